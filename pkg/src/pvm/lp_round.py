"""LP relaxation of the per-class prize-collecting covers and randomized rounding.

The joint program separates by class once the wrong-class slacks are
eliminated (they are always tight), so each class gets its own LP:

    min  sum_j c_j a_j + sum_{i in X_l} xi_i
    s.t. sum_{j covers i} a_j + xi_i >= 1   for i in X_l
         0 <= a_j <= 1,  xi_i >= 0

with c_j = lam + (wrong-class points in ball j).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .coverage import CoverageIncidence, evaluate_objective
from .data_model import PrototypeSolution
from .simplex import LpError, simplex

FEAS_TOL = 1e-8
CLAMP_TOL = 1e-9
DEFAULT_ROUNDS = 200


@dataclass(frozen=True)
class ClassLp:
    klass: int
    costs: np.ndarray      # (m,)
    members: np.ndarray    # indices of the class-l training points
    cover: np.ndarray      # (k, m) bool, rows restricted to members

    @property
    def num_candidates(self) -> int:
        return self.costs.size

    def arrays(self, upper_bounds: bool = True):
        """(c, A, b, senses) over variables [a_1..a_m, xi_1..xi_k]."""
        k, m = self.cover.shape
        c = np.concatenate([self.costs, np.ones(k)])
        A = [np.hstack([self.cover.astype(float), np.eye(k)])]
        senses = [">="] * k
        b = [np.ones(k)]
        if upper_bounds:
            A.append(np.hstack([np.eye(m), np.zeros((m, k))]))
            b.append(np.ones(m))
            senses += ["<="] * m
        return c, np.vstack(A), np.concatenate(b), senses


@dataclass(frozen=True)
class LpSolution:
    klass: int
    alpha: np.ndarray
    xi: np.ndarray
    objective: float
    status: str
    iterations: int = 0


def build_class_lp(inc: CoverageIncidence, lam, l: int) -> ClassLp:
    members = np.flatnonzero(inc.y == l)
    costs = lam + inc.miscover_counts[:, l].astype(float)
    return ClassLp(l, costs, members, inc.covers[members])


def solve_lp(lp: ClassLp) -> LpSolution:
    """Optimal vertex of one class LP.

    Candidates whose ball holds no point of the class are fixed at zero (their
    cost is non-negative and they relax no constraint), and the a_j <= 1 bounds
    are left to a final clip: with non-negative costs, lowering any a_j > 1 to 1
    keeps every constraint satisfied and cannot raise the objective.
    """
    k, m = lp.cover.shape
    useful = lp.cover.any(axis=0)
    cols = np.flatnonzero(useful)
    reduced = ClassLp(lp.klass, lp.costs[cols], lp.members, lp.cover[:, cols])
    c, A, b, senses = reduced.arrays(upper_bounds=False)
    res = simplex(c, A, b, senses)
    if res.status != "optimal":
        raise LpError(f"class {lp.klass + 1} LP returned status {res.status}")
    alpha = np.zeros(m)
    alpha[cols] = res.x[:cols.size]
    alpha = np.clip(alpha, 0.0, 1.0)
    xi = np.maximum(res.x[cols.size:], 0.0)
    # recompute xi as the smallest feasible slack so that residuals are exact
    if k:
        xi = np.maximum(0.0, 1.0 - lp.cover.astype(float) @ alpha)
    objective = float(lp.costs @ alpha + xi.sum())
    if objective > res.fun + FEAS_TOL * max(1.0, abs(res.fun)):
        raise LpError(f"class {lp.klass + 1} LP: clipping changed the optimum")
    return LpSolution(lp.klass, alpha, xi, objective, "optimal", res.iterations)


def solve_relaxation(inc: CoverageIncidence, lam) -> list:
    """One LpSolution per class."""
    return [solve_lp(build_class_lp(inc, lam, l)) for l in range(inc.num_classes)]


def alpha_matrix(solutions: Sequence[LpSolution]) -> np.ndarray:
    return np.column_stack([s.alpha for s in solutions])


def opt_lp(solutions: Sequence[LpSolution]) -> float:
    return float(sum(s.objective for s in solutions))


def eta_star(inc: CoverageIncidence, alpha) -> np.ndarray:
    """Fractional wrong-class coverage of every training point under alpha (m x L)."""
    hits = inc.covers.astype(float) @ np.asarray(alpha, dtype=float)
    return hits.sum(axis=1) - hits[np.arange(inc.n), inc.y]


def rounding_bound(n: int, opt: float) -> float:
    """Upper bound n/e + OPT_LP on the expected objective of one rounding draw."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if opt < 0:
        raise ValueError("LP optimum must be non-negative")
    return n / math.e + opt


@dataclass(frozen=True)
class RoundingDraw:
    A: np.ndarray     # m x L bool
    S: np.ndarray     # own-class uncovered indicators
    T: np.ndarray     # wrong-class cover counts
    objective: float


def rounding_draw(inc: CoverageIncidence, A, lam) -> RoundingDraw:
    """Slacks and objective induced by one binary draw."""
    A = np.asarray(A, dtype=bool)
    hits = inc.covers.astype(np.int64) @ A.astype(np.int64)
    own = hits[np.arange(inc.n), inc.y]
    S = (own == 0).astype(np.int64)
    T = hits.sum(axis=1) - own
    return RoundingDraw(A, S, T, int(S.sum()) + int(T.sum()) + lam * int(A.sum()))


@dataclass
class RoundingResult:
    solution: PrototypeSolution
    objectives: np.ndarray
    best_index: int
    lp: list = field(default_factory=list)
    n: int = 0

    @property
    def opt_lp(self) -> float:
        return opt_lp(self.lp)

    @property
    def bound(self) -> float:
        return rounding_bound(self.n, self.opt_lp)

    @property
    def best_objective(self) -> float:
        return float(self.objectives[self.best_index])


def _clamped(alpha) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    if (alpha < -CLAMP_TOL).any() or (alpha > 1 + CLAMP_TOL).any():
        raise ValueError("fractional solution outside [0, 1]")
    return np.clip(alpha, 0.0, 1.0)


def draw_objectives(inc: CoverageIncidence, alpha, lam, rounds: int, seed,
                    chunk: int = 256, keep_slacks: bool = False):
    """Objective of every rounding draw, generated in a fixed stream order.

    Uniforms come from ``numpy.random.default_rng(seed)`` (PCG64), consumed
    round-major, then class, then candidate; a_j^(l) is on iff u < alpha_j^(l).
    Returns (objectives, best A) or, with ``keep_slacks``, also the per-draw
    S and T arrays.
    """
    alpha = _clamped(alpha)
    m, L = alpha.shape
    rng = np.random.default_rng(seed)
    covers = inc.covers.astype(np.float64)
    own_onehot = np.zeros((inc.n, L), dtype=bool)
    own_onehot[np.arange(inc.n), inc.y] = True
    objectives = np.empty(rounds)
    S_all, T_all = [], []
    best_A, best_obj = None, np.inf
    for start in range(0, rounds, chunk):
        size = min(chunk, rounds - start)
        u = rng.random((size, L, m))
        A = u < alpha.T[None]
        hits = np.einsum("ij,blj->bil", covers, A.astype(np.float64)).astype(np.int64)
        own = hits[:, own_onehot]
        S = (own == 0).astype(np.int64)
        T = hits.sum(axis=2) - own
        obj = S.sum(axis=1) + T.sum(axis=1) + lam * A.sum(axis=(1, 2))
        objectives[start:start + size] = obj
        b = int(np.argmin(obj))
        if obj[b] < best_obj:
            best_obj, best_A = obj[b], A[b].T.copy()
        if keep_slacks:
            S_all.append(S)
            T_all.append(T)
    if keep_slacks:
        return objectives, best_A, np.concatenate(S_all), np.concatenate(T_all)
    return objectives, best_A


def randomized_round(inc: CoverageIncidence, lp_solutions: Sequence[LpSolution], lam,
                     rounds: int = DEFAULT_ROUNDS, seed=0) -> RoundingResult:
    """Best of ``rounds`` Bernoulli draws from the LP solution (earliest draw wins ties)."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    alpha = alpha_matrix(lp_solutions)
    objectives, best_A = draw_objectives(inc, alpha, lam, rounds, seed)
    best = int(np.argmin(objectives))
    solution = PrototypeSolution.from_alpha(best_A)
    solution = PrototypeSolution(solution.prototype_sets, inc.m,
                                 evaluate_objective(inc, solution, lam))
    return RoundingResult(solution, objectives, best, list(lp_solutions), inc.n)


def lp_round(inc: CoverageIncidence, lam, rounds: int = DEFAULT_ROUNDS, seed=0) -> RoundingResult:
    """Solve the relaxation and round it."""
    return randomized_round(inc, solve_relaxation(inc, lam), lam, rounds, seed)


def _var(name: str, coef: float, first: bool) -> str:
    sign = "-" if coef < 0 else ("" if first else "+")
    return f"{sign} {abs(coef):.17g} {name}".strip()


def write_lp(lp: ClassLp, path) -> None:
    """Write one class LP in CPLEX LP text format.

    Variables are ``a<j>`` for candidate j (0-based) and ``x<i>`` for training
    point i (0-based row of the full training set).
    """
    lines = [f"\\ prototype selection LP for class {lp.klass + 1}", "Minimize"]
    terms = [_var(f"a{j}", c, t == 0) for t, (j, c) in enumerate(enumerate(lp.costs))]
    terms += [_var(f"x{i}", 1.0, False) for i in lp.members]
    lines.append(" obj: " + " ".join(terms))
    lines.append("Subject To")
    for r, i in enumerate(lp.members):
        cov = np.flatnonzero(lp.cover[r])
        lhs = " ".join([f"+ a{j}" for j in cov] + [f"+ x{i}"])
        lines.append(f" cover_{i}: {lhs.lstrip('+ ')} >= 1")
    lines.append("Bounds")
    lines += [f" 0 <= a{j} <= 1" for j in range(lp.num_candidates)]
    lines += [f" x{i} >= 0" for i in lp.members]
    lines.append("End")
    Path(path).write_text("\n".join(lines) + "\n")
