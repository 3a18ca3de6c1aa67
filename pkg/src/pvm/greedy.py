"""Greedy prototype selection.

Each step adds the (candidate, class) pair with the largest objective
decrease ``newly covered own-class points - wrong-class points covered - lam``
and stops as soon as no pair gives a strictly positive decrease.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .coverage import CoverageIncidence, evaluate_objective
from .data_model import InputError, PrototypeSolution


@dataclass(frozen=True)
class GreedyStep:
    candidate: int
    klass: int
    d_xi: int
    d_eta: int
    d_obj: float


class GreedyState:
    """Mutable bookkeeping for the greedy search.

    ``gain[j, l]`` is the number of still-uncovered class-l points inside ball j;
    it is updated incrementally after each accepted step.  The wrong-class
    count never changes and is read from the incidence once.
    """

    def __init__(self, inc: CoverageIncidence, lam, classes: Optional[Sequence[int]] = None):
        self.inc = inc
        self.lam = lam
        L = inc.num_classes
        self.active = np.zeros(L, dtype=bool)
        self.active[list(range(L)) if classes is None else list(classes)] = True
        self.covered = np.zeros(inc.n, dtype=bool)
        self.gain = inc.class_counts.copy()
        self.miscover = inc.miscover_counts
        self.chosen = np.zeros((inc.m, L), dtype=bool)
        self.prototype_sets = [[] for _ in range(L)]
        self.trace: list[GreedyStep] = []

    def delta_obj(self, j: int, l: int) -> tuple:
        if self.chosen[j, l]:
            raise InputError(f"candidate {j} already a prototype of class {l}")
        d_xi = int(self.gain[j, l])
        d_eta = int(self.miscover[j, l])
        return d_xi, d_eta, d_xi - d_eta - self.lam

    def scores(self) -> np.ndarray:
        score = (self.gain - self.miscover) - self.lam
        score = score.astype(float)
        score[self.chosen] = -np.inf
        score[:, ~self.active] = -np.inf
        return score

    def best(self) -> tuple:
        """(j, l) maximising the decrease; ties go to the smallest class, then candidate."""
        score = self.scores()
        flat = int(np.argmax(score.T))
        l, j = divmod(flat, self.inc.m)
        return j, l, score[j, l]

    def add(self, j: int, l: int) -> GreedyStep:
        d_xi, d_eta, d_obj = self.delta_obj(j, l)
        inc = self.inc
        newly = inc.covers[:, j] & ~self.covered & (inc.y == l)
        if newly.any():
            self.gain[:, l] -= inc.covers[newly].sum(axis=0)
            self.covered |= newly
        self.chosen[j, l] = True
        self.prototype_sets[l].append(j)
        step = GreedyStep(j, l, d_xi, d_eta, d_obj)
        self.trace.append(step)
        return step


def greedy_select(inc: CoverageIncidence, lam, classes: Optional[Sequence[int]] = None,
                  max_steps: Optional[int] = None) -> PrototypeSolution:
    """Run the greedy search to completion and return the chosen prototypes.

    ``classes`` restricts the search to a subset of class codes (the other
    classes keep empty prototype sets).
    """
    state = GreedyState(inc, lam, classes)
    while max_steps is None or len(state.trace) < max_steps:
        j, l, score = state.best()
        if not score > 0:
            break
        state.add(j, l)
    sets = tuple(tuple(P) for P in state.prototype_sets)
    objective = evaluate_objective(inc, sets, lam)
    return PrototypeSolution(sets, inc.m, objective, state.trace)


def greedy_per_class(inc: CoverageIncidence, lam) -> PrototypeSolution:
    """Greedy run separately for each class; yields the same sets as the joint run."""
    sets = tuple(greedy_select(inc, lam, classes=[l]).prototype_sets[l]
                 for l in range(inc.num_classes))
    return PrototypeSolution(sets, inc.m, evaluate_objective(inc, sets, lam))


def trace_table(trace: Sequence[GreedyStep]) -> list:
    """Rows (step, candidate, class label, d_xi, d_eta, d_xi - d_eta, d_obj) for export."""
    return [(t + 1, s.candidate, s.klass + 1, s.d_xi, s.d_eta, s.d_xi - s.d_eta, s.d_obj)
            for t, s in enumerate(trace)]
