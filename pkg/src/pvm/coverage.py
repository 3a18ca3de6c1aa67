"""Epsilon-ball incidence, per-class prototype costs and the PVM objective."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .data_model import InputError, ObjectiveBreakdown, as_sets, check_dissimilarity


@dataclass(frozen=True)
class CoverageIncidence:
    """Which training points fall in which candidate's epsilon-ball.

    ``covers[i, j]`` is True iff D[i, j] < epsilon.  ``class_counts[j, l]`` is
    the number of class-l points inside ball j.
    """

    covers: np.ndarray
    y: np.ndarray
    num_classes: int
    epsilon: float
    class_counts: np.ndarray

    @property
    def n(self) -> int:
        return self.covers.shape[0]

    @property
    def m(self) -> int:
        return self.covers.shape[1]

    @property
    def ball_sizes(self) -> np.ndarray:
        return self.class_counts.sum(axis=1)

    @property
    def miscover_counts(self) -> np.ndarray:
        """m x L: points of classes other than l inside ball j."""
        return self.ball_sizes[:, None] - self.class_counts


def build_incidence(D, y, epsilon: float, num_classes: Optional[int] = None) -> CoverageIncidence:
    """Threshold D at epsilon (strictly) and cache per-class ball counts.

    ``y`` holds 0-based class codes.
    """
    if not epsilon > 0:
        raise InputError("epsilon must be positive")
    D = check_dissimilarity(D)
    y = np.asarray(y, dtype=np.int64)
    if y.shape != (D.shape[0],):
        raise InputError("need one label per dissimilarity row")
    L = int(num_classes) if num_classes is not None else int(y.max()) + 1
    covers = D < epsilon
    onehot = np.zeros((D.shape[0], L), dtype=np.int64)
    onehot[np.arange(y.size), y] = 1
    class_counts = covers.T.astype(np.int64) @ onehot
    covers.setflags(write=False)
    class_counts.setflags(write=False)
    return CoverageIncidence(covers, y, L, float(epsilon), class_counts)


def prototype_cost(inc: CoverageIncidence, lam, j: int, l: int):
    """Cost of putting candidate j into class l: lam plus wrong-class points in its ball."""
    return lam + int(inc.ball_sizes[j] - inc.class_counts[j, l])


def evaluate_objective(inc: CoverageIncidence, solution, lam) -> ObjectiveBreakdown:
    """Slack totals and objective for an arbitrary prototype assignment.

    ``solution`` is a PrototypeSolution or a sequence of per-class index lists.
    """
    sets = as_sets(solution)
    if len(sets) != inc.num_classes:
        raise InputError(f"expected {inc.num_classes} prototype sets, got {len(sets)}")
    hits = np.zeros((inc.n, inc.num_classes), dtype=np.int64)
    count = 0
    for l, P in enumerate(sets):
        P = np.asarray(list(P), dtype=np.int64)
        if P.size and (P.min() < 0 or P.max() >= inc.m):
            raise InputError("prototype index out of range")
        hits[:, l] = inc.covers[:, P].sum(axis=1)
        count += P.size
    own = hits[np.arange(inc.n), inc.y]
    xi = int(np.count_nonzero(own == 0))
    eta = int(hits.sum() - own.sum())
    return ObjectiveBreakdown(xi, eta, count, lam)
