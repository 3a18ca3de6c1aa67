"""Core types shared across the package.

Class labels are 1-based at the boundary (files, ``Dataset.labels``) and
0-based class codes everywhere inside the library (``Dataset.y``,
``prototype_sets[l]`` belongs to label ``l + 1``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


class InputError(ValueError):
    """Raised for malformed or inconsistent user input."""


@dataclass(frozen=True)
class Dataset:
    labels: np.ndarray
    num_classes: int = 0
    points: Optional[np.ndarray] = None

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 1 or labels.size == 0:
            raise InputError("labels must be a non-empty 1-d sequence")
        if not np.issubdtype(labels.dtype, np.integer):
            if not np.all(np.equal(np.mod(labels, 1), 0)):
                raise InputError("labels must be integers")
        labels = labels.astype(np.int64)
        L = int(self.num_classes) if self.num_classes else int(labels.max())
        if L < 1:
            raise InputError("num_classes must be positive")
        bad = (labels < 1) | (labels > L)
        if bad.any():
            raise InputError(f"label out of range: {labels[bad][0]} not in 1..{L}")
        counts = np.bincount(labels - 1, minlength=L)
        for l in range(L):
            if counts[l] == 0:
                raise InputError(f"class {l + 1} empty")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "num_classes", L)

        if self.points is not None:
            pts = np.asarray(self.points, dtype=float)
            if pts.ndim == 1:
                pts = pts[:, None]
            if pts.ndim != 2 or pts.shape[1] < 1:
                raise InputError("points must be an n x p array with p >= 1")
            if pts.shape[0] != labels.size:
                raise InputError(
                    f"dimension mismatch: {pts.shape[0]} points but {labels.size} labels")
            if not np.all(np.isfinite(pts)):
                raise InputError("points contain non-finite values")
            object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return int(self.labels.size)

    @property
    def y(self) -> np.ndarray:
        """0-based class codes."""
        return self.labels - 1


@dataclass(frozen=True)
class CandidateSet:
    """Potential prototypes Z. ``identity=True`` declares Z = X."""

    points: Optional[np.ndarray] = None
    identity: bool = False
    size: int = 0

    def __post_init__(self):
        if self.points is not None:
            pts = np.asarray(self.points, dtype=float)
            if pts.ndim == 1:
                pts = pts[:, None]
            object.__setattr__(self, "points", pts)
            m = pts.shape[0]
            if self.size and self.size != m:
                raise InputError("candidate size disagrees with candidate points")
            object.__setattr__(self, "size", m)
        if self.size < 1 and not self.identity:
            raise InputError("candidate set must contain at least one point")

    @classmethod
    def same_as(cls, dataset: Dataset) -> "CandidateSet":
        return cls(points=dataset.points, identity=True, size=dataset.n)


def check_dissimilarity(D, shape: Optional[tuple] = None) -> np.ndarray:
    """Validate a dissimilarity matrix and return it as a float array."""
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] < 1 or D.shape[1] < 1:
        raise InputError("dissimilarity must be a non-empty 2-d matrix")
    if shape is not None and D.shape != tuple(shape):
        raise InputError(f"dimension mismatch: dissimilarity is {D.shape}, expected {tuple(shape)}")
    if not np.all(np.isfinite(D)):
        raise InputError("non-finite dissimilarity")
    if (D < 0).any():
        raise InputError("negative dissimilarity")
    return D


@dataclass(frozen=True)
class Problem:
    dataset: Dataset
    candidates: CandidateSet
    D: np.ndarray


def validate_inputs(dataset: Dataset, candidates: Optional[CandidateSet], D) -> Problem:
    """Check that a dataset, candidate set and n x m dissimilarity agree.

    ``candidates=None`` means Z = X.
    """
    if candidates is None:
        candidates = CandidateSet.same_as(dataset)
    m = dataset.n if candidates.identity else candidates.size
    if candidates.identity and candidates.size not in (0, dataset.n):
        raise InputError("identity candidate set must have m = n")
    if (dataset.points is not None and candidates.points is not None
            and dataset.points.shape[1] != candidates.points.shape[1]):
        raise InputError("dimension mismatch between points and candidates")
    D = check_dissimilarity(D, (dataset.n, m))
    D.setflags(write=False)
    return Problem(dataset, candidates, D)


@dataclass(frozen=True)
class PvmConfig:
    epsilon: float
    lam: Optional[float] = None
    algorithm: str = "greedy"
    rounds: int = 200
    seed: int = 0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InputError("epsilon must be positive")
        if self.lam is not None and not self.lam >= 0:
            raise InputError("lambda must be non-negative")
        if self.algorithm not in ("greedy", "lp_round"):
            raise InputError(f"unknown algorithm {self.algorithm!r}")
        if self.rounds < 1:
            raise InputError("rounds must be >= 1")

    def lambda_for(self, n: int) -> float:
        """The prototype cost, defaulting to 1/n."""
        return 1.0 / n if self.lam is None else self.lam


@dataclass(frozen=True)
class ObjectiveBreakdown:
    xi_total: int
    eta_total: int
    proto_count: int
    lam: float

    @property
    def total(self):
        return self.xi_total + self.eta_total + self.lam * self.proto_count

    def as_dict(self) -> dict:
        return {"xi": self.xi_total, "eta": self.eta_total,
                "count": self.proto_count, "total": float(self.total)}


@dataclass(frozen=True)
class PrototypeSolution:
    """Per-class prototype index lists into Z, in the order they were chosen."""

    prototype_sets: tuple
    num_candidates: int
    objective: Optional[ObjectiveBreakdown] = None
    trace: list = field(default_factory=list)

    def __post_init__(self):
        sets = tuple(tuple(int(j) for j in P) for P in self.prototype_sets)
        for P in sets:
            if len(set(P)) != len(P):
                raise InputError("duplicate prototype index within a class")
            if any(j < 0 or j >= self.num_candidates for j in P):
                raise InputError("prototype index out of range")
        object.__setattr__(self, "prototype_sets", sets)

    @classmethod
    def from_alpha(cls, alpha, objective=None) -> "PrototypeSolution":
        alpha = np.asarray(alpha, dtype=bool)
        return cls(tuple(np.flatnonzero(alpha[:, l]) for l in range(alpha.shape[1])),
                   alpha.shape[0], objective)

    @property
    def num_classes(self) -> int:
        return len(self.prototype_sets)

    @property
    def alpha(self) -> np.ndarray:
        """m x L boolean indicator matrix."""
        a = np.zeros((self.num_candidates, self.num_classes), dtype=bool)
        for l, P in enumerate(self.prototype_sets):
            a[list(P), l] = True
        return a

    @property
    def counts(self) -> list:
        return [len(P) for P in self.prototype_sets]


def empty_solution(num_candidates: int, num_classes: int) -> PrototypeSolution:
    return PrototypeSolution(tuple(() for _ in range(num_classes)), num_candidates)


def as_sets(solution) -> Sequence[Sequence[int]]:
    if isinstance(solution, PrototypeSolution):
        return solution.prototype_sets
    return solution
