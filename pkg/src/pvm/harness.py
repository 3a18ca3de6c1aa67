"""Model fitting helpers, cross-validation, synthetic data and exact oracles."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .classifier import classify, test_error
from .coverage import CoverageIncidence, build_incidence, evaluate_objective
from .data_model import (Dataset, InputError, ObjectiveBreakdown, PrototypeSolution,
                         check_dissimilarity)
from .greedy import greedy_select
from .lp_round import DEFAULT_ROUNDS, lp_round

BRUTE_FORCE_BUDGET = 24


def select_prototypes(D, y, epsilon: float, lam: Optional[float] = None,
                      algorithm: str = "greedy", rounds: int = DEFAULT_ROUNDS,
                      seed=0, num_classes: Optional[int] = None) -> PrototypeSolution:
    """Fit prototype sets on an n x m dissimilarity matrix.

    ``y`` holds 0-based class codes; ``lam`` defaults to 1/n.
    """
    D = check_dissimilarity(D)
    lam = 1.0 / D.shape[0] if lam is None else lam
    inc = build_incidence(D, y, epsilon, num_classes)
    if algorithm == "greedy":
        return greedy_select(inc, lam)
    if algorithm == "lp_round":
        return lp_round(inc, lam, rounds, seed).solution
    raise InputError(f"unknown algorithm {algorithm!r}")


# ---------------------------------------------------------------- folds / CV

def stratified_folds(y, folds: int, seed) -> np.ndarray:
    """Fold id per point.

    Points are shuffled, grouped by class (keeping the shuffled order inside
    each class) and dealt to folds round-robin in that order, so each class is
    spread evenly and no fold is left empty.
    """
    y = np.asarray(y)
    if folds < 2:
        raise InputError("need at least two folds")
    if folds > y.size:
        raise InputError("more folds than points")
    rng = np.random.default_rng(seed)
    order = rng.permutation(y.size)
    order = order[np.argsort(y[order], kind="stable")]
    fold = np.empty(y.size, dtype=np.int64)
    fold[order] = np.arange(y.size) % folds
    return fold


@dataclass
class CvResult:
    epsilons: np.ndarray
    mean_error: np.ndarray
    std_error: np.ndarray
    mean_prototypes: np.ndarray
    fold_errors: np.ndarray        # (grid, folds)
    fold_prototypes: np.ndarray    # (grid, folds)
    chosen: Optional[float] = None

    def table(self) -> list:
        """Rows (epsilon, mean error, SE, mean prototype count)."""
        return [(float(e), float(m), float(s), float(p)) for e, m, s, p in
                zip(self.epsilons, self.mean_error, self.std_error, self.mean_prototypes)]


def kfold_cv(D, y, grid: Sequence[float], lam: Optional[float] = None,
             algorithm: str = "greedy", folds: int = 10, seed=0,
             rounds: int = DEFAULT_ROUNDS, same_candidates: bool = True,
             num_classes: Optional[int] = None) -> CvResult:
    """Stratified k-fold CV error of the prototype classifier over an epsilon grid.

    With ``same_candidates`` (Z = X, D square) the held-out points are removed
    from the candidate set as well as from the training rows.  ``lam=None``
    uses 1/n_train in every fold.
    """
    D = check_dissimilarity(D)
    y = np.asarray(y, dtype=np.int64)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise InputError("epsilon grid is empty")
    if same_candidates and D.shape[0] != D.shape[1]:
        raise InputError("same_candidates needs a square dissimilarity matrix")
    L = int(num_classes) if num_classes else int(y.max()) + 1
    fold_of = stratified_folds(y, folds, seed)
    errors = np.zeros((grid.size, folds))
    protos = np.zeros((grid.size, folds))
    for f in range(folds):
        train = np.flatnonzero(fold_of != f)
        test = np.flatnonzero(fold_of == f)
        cols = train if same_candidates else np.arange(D.shape[1])
        D_train = D[np.ix_(train, cols)]
        D_test = D[np.ix_(test, cols)]
        lam_f = 1.0 / train.size if lam is None else lam
        for g, eps in enumerate(grid):
            sol = select_prototypes(D_train, y[train], eps, lam_f, algorithm,
                                    rounds, seed, L)
            protos[g, f] = sum(sol.counts)
            if protos[g, f] == 0:
                # no prototypes at all: fall back to the training majority class
                pred = np.full(test.size, np.bincount(y[train], minlength=L).argmax())
            else:
                pred = classify(D_test, sol).predicted
            errors[g, f] = test_error(pred, y[test])
    mean = errors.mean(axis=1)
    se = errors.std(axis=1, ddof=1) / np.sqrt(folds)
    result = CvResult(grid, mean, se, protos.mean(axis=1), errors, protos)
    result.chosen = one_se_select(result)
    return result


def one_se_select(cv: CvResult) -> float:
    """Sparsest epsilon whose mean error is within one SE of the best.

    Ties on prototype count go to the larger epsilon; the result does not
    depend on the order of the grid.
    """
    order = np.argsort(cv.epsilons, kind="stable")
    eps = np.asarray(cv.epsilons)[order]
    err = np.asarray(cv.mean_error)[order]
    se = np.asarray(cv.std_error)[order]
    cnt = np.asarray(cv.mean_prototypes)[order]
    if eps.size == 0:
        raise InputError("empty CV result")
    best = np.flatnonzero(err == err.min())
    # among equally good minima use the largest SE (the most permissive threshold)
    threshold = err.min() + se[best].max()
    ok = np.flatnonzero(err <= threshold)
    fewest = ok[cnt[ok] == cnt[ok].min()]
    return float(eps[fewest.max()])


# ---------------------------------------------------------------- mixture data

@dataclass(frozen=True)
class Mixture:
    dataset: Dataset
    centers: np.ndarray      # (3, 2)
    subcenters: np.ndarray   # (3, 10, 2)
    component: np.ndarray    # subcenter index of each point


def gen_mixture(seed, n: int = 300, subcenters: Optional[np.ndarray] = None,
                num_classes: int = 3, per_class: int = 10,
                center_sd: float = 4.0, point_var: float = 0.2) -> Mixture:
    """Each class a mixture of ``per_class`` Gaussians in the plane.

    Class centres ~ N(0, 16 I), subcentres ~ N(centre, I), points ~
    N(subcentre, I/5) around a uniformly chosen subcentre of their class.
    Draw order from ``default_rng(seed)``: centres, subcentres, subcentre
    choices, point noise.  Passing ``subcenters`` skips the first two steps,
    which gives fresh samples from a fixed mixture.
    """
    if n % num_classes:
        raise InputError(f"n must be divisible by {num_classes}")
    rng = np.random.default_rng(seed)
    if subcenters is None:
        centers = center_sd * rng.standard_normal((num_classes, 2))
        subcenters = centers[:, None, :] + rng.standard_normal((num_classes, per_class, 2))
    else:
        subcenters = np.asarray(subcenters, dtype=float)
        num_classes, per_class = subcenters.shape[:2]
        if n % num_classes:
            raise InputError(f"n must be divisible by {num_classes}")
        centers = subcenters.mean(axis=1)
    y = np.repeat(np.arange(num_classes), n // num_classes)
    component = rng.integers(0, per_class, size=n)
    noise = np.sqrt(point_var) * rng.standard_normal((n, 2))
    X = subcenters[y, component] + noise
    return Mixture(Dataset(y + 1, num_classes, X), centers, subcenters, component)


# ---------------------------------------------------------------- exact oracles

def _popcount_table(bits: int) -> np.ndarray:
    table = np.zeros(1 << bits, dtype=np.int64)
    for b in range(bits):
        table += (np.arange(1 << bits) >> b) & 1
    return table


def _masks(inc: CoverageIncidence) -> np.ndarray:
    """Bitmask over candidates covering each training point."""
    weights = 1 << np.arange(inc.m, dtype=np.int64)
    return inc.covers.astype(np.int64) @ weights


def class_optimum(inc: CoverageIncidence, lam, l: int) -> tuple:
    """Exhaustive optimum of one class's prize-collecting cover.

    Returns (integer part, prototype count, subset bitmask) of the best subset,
    where the cost of a subset is wrong-class covers + uncovered class-l points
    + lam * size.
    """
    m = inc.m
    subsets = np.arange(1 << m, dtype=np.int64)
    size = _popcount_table(m)
    wrong = np.zeros(1 << m, dtype=np.int64)
    miscover = inc.miscover_counts[:, l]
    for j in range(m):
        wrong += ((subsets >> j) & 1) * int(miscover[j])
    uncovered = np.zeros(1 << m, dtype=np.int64)
    for mask in _masks(inc)[inc.y == l]:
        uncovered += (subsets & mask) == 0
    integer = wrong + uncovered
    value = integer + lam * size
    best = int(np.argmin(value))
    return int(integer[best]), int(size[best]), best


def _mask_to_list(mask: int, m: int) -> tuple:
    return tuple(j for j in range(m) if mask >> j & 1)


def brute_force_optimum(inc: CoverageIncidence, lam) -> tuple:
    """Exact minimum of the PVM objective, enumerated class by class.

    Returns (ObjectiveBreakdown-valued optimum, optimal PrototypeSolution).
    """
    if inc.m * inc.num_classes > BRUTE_FORCE_BUDGET:
        raise InputError(f"m * L = {inc.m * inc.num_classes} exceeds the enumeration budget")
    sets = []
    for l in range(inc.num_classes):
        _, _, mask = class_optimum(inc, lam, l)
        sets.append(_mask_to_list(mask, inc.m))
    sets = tuple(sets)
    breakdown = evaluate_objective(inc, sets, lam)
    return breakdown, PrototypeSolution(sets, inc.m, breakdown)


def brute_force_joint(inc: CoverageIncidence, lam, chunk: int = 1 << 20) -> tuple:
    """Exact minimum over all 2^(m*L) joint assignments, without using separability.

    Every joint assignment is scored directly from the slack definitions.
    Returns (integer part xi + eta, prototype count, optimal sets).
    """
    m, L, n = inc.m, inc.num_classes, inc.n
    bits = m * L
    if bits > BRUTE_FORCE_BUDGET:
        raise InputError(f"m * L = {bits} exceeds the enumeration budget")
    pop = _popcount_table(m)
    masks = _masks(inc)
    full = (1 << m) - 1
    best = (np.inf, None, None, None)
    for start in range(0, 1 << bits, chunk):
        codes = np.arange(start, min(start + chunk, 1 << bits), dtype=np.int64)
        per_class = [(codes >> (l * m)) & full for l in range(L)]
        integer = np.zeros(codes.size, dtype=np.int64)
        for i in range(n):
            for l in range(L):
                hit = pop[per_class[l] & masks[i]]
                if l == inc.y[i]:
                    integer += hit == 0
                else:
                    integer += hit
        count = sum(pop[s] for s in per_class)
        value = integer + lam * count
        k = int(np.argmin(value))
        if value[k] < best[0]:
            best = (value[k], int(integer[k]), int(count[k]), int(codes[k]))
    _, integer, count, code = best
    sets = tuple(_mask_to_list((code >> (l * m)) & full, m) for l in range(L))
    return integer, count, sets


def empty_objective(inc: CoverageIncidence, lam) -> ObjectiveBreakdown:
    return ObjectiveBreakdown(inc.n, 0, 0, lam)


