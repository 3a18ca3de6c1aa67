"""Dense two-phase tableau simplex.

Solves ``min c.x  s.t.  A x (<=|>=|=) b,  x >= 0``.  Pricing starts with the
most negative reduced cost and switches to Bland's rule for the rest of the
solve once a run of degenerate pivots suggests stalling, so it cannot cycle.
Rows that already own a unit column (a slack-like variable) start with that
column basic and need no artificial.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-9
STALL_LIMIT = 50


class LpError(RuntimeError):
    """Numerical failure inside the LP solver."""


@dataclass
class SimplexResult:
    x: np.ndarray
    fun: float
    status: str
    iterations: int


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    col_vals = T[:, col].copy()
    col_vals[row] = 0.0
    T -= np.outer(col_vals, T[row])
    basis[row] = col


def _run(T, basis, allowed, tol, max_iter, it, bland=False):
    """Iterate on tableau T whose last row holds reduced costs and -objective."""
    rows = T.shape[0] - 1
    stalled = 0
    while True:
        if it >= max_iter:
            raise LpError("simplex iteration limit reached")
        cost = np.where(allowed, T[-1, :-1], 0.0)
        entering = np.flatnonzero(cost < -tol)
        if entering.size == 0:
            return "optimal", it
        col = entering[0] if bland else int(np.argmin(cost))
        column = T[:rows, col]
        pos = column > tol
        if not pos.any():
            return "unbounded", it
        ratios = np.full(rows, np.inf)
        ratios[pos] = T[:rows, -1][pos] / column[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + tol * max(1.0, abs(best)))
        row = ties[np.argmin(basis[ties])]
        stalled = stalled + 1 if best <= tol else 0
        if stalled > STALL_LIMIT:
            bland = True
        _pivot(T, basis, row, col)
        it += 1


def _unit_columns(A, b_rows):
    """For each row, a column that is a positive multiple of that row's unit vector."""
    found = {}
    nz = A != 0
    single = nz.sum(axis=0) == 1
    for col in np.flatnonzero(single):
        row = int(np.flatnonzero(nz[:, col])[0])
        if row in b_rows and A[row, col] > 0 and row not in found:
            found[row] = int(col)
    return found


def simplex(c, A, b, senses, tol: float = PIVOT_TOL, max_iter: int = 200_000) -> SimplexResult:
    c = np.asarray(c, dtype=float)
    A = np.array(A, dtype=float, ndmin=2)
    b = np.array(b, dtype=float)
    senses = list(senses)
    rows, nvar = A.shape
    if rows == 0:
        if (c < -tol).any():
            return SimplexResult(np.zeros(nvar), -np.inf, "unbounded", 0)
        return SimplexResult(np.zeros(nvar), 0.0, "optimal", 0)

    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1
    senses = [{"<=": ">=", ">=": "<="}.get(s, s) if f else s for s, f in zip(senses, flip)]

    ge_rows = {i for i, s in enumerate(senses) if s != "<="}
    crash = _unit_columns(A, ge_rows)
    for i, col in crash.items():
        # scale the row so the crash column enters with coefficient one
        b[i] /= A[i, col]
        A[i] /= A[i, col]

    n_slack = sum(s != "=" for s in senses)
    n_art = sum(s != "<=" and i not in crash for i, s in enumerate(senses))
    width = nvar + n_slack + n_art
    T = np.zeros((rows + 1, width + 1))
    T[:rows, :nvar] = A
    T[:rows, -1] = b
    basis = np.empty(rows, dtype=np.int64)
    s_col, a_col = nvar, nvar + n_slack
    for i, s in enumerate(senses):
        if s == "<=":
            T[i, s_col] = 1.0
            basis[i] = s_col
            s_col += 1
            continue
        if s == ">=":
            T[i, s_col] = -1.0
            s_col += 1
        elif s != "=":
            raise ValueError(f"unknown constraint sense {s!r}")
        if i in crash:
            basis[i] = crash[i]
        else:
            T[i, a_col] = 1.0
            basis[i] = a_col
            a_col += 1
    art = np.zeros(width, dtype=bool)
    art[nvar + n_slack:] = True

    # phase I: minimise the sum of artificials
    it = 0
    if n_art:
        phase1 = np.zeros(width)
        phase1[art] = 1.0
        T[-1, :-1] = phase1
        for i in range(rows):
            if art[basis[i]]:
                T[-1] -= T[i]
        status, it = _run(T, basis, np.ones(width, dtype=bool), tol, max_iter, it)
        if -T[-1, -1] > tol * max(1.0, np.abs(b).max()) * rows:
            return SimplexResult(np.full(nvar, np.nan), np.nan, "infeasible", it)
        # drive remaining zero-level artificials out of the basis
        keep = np.ones(rows, dtype=bool)
        for i in range(rows):
            if art[basis[i]]:
                candidates = np.flatnonzero(~art & (np.abs(T[i, :-1]) > tol))
                if candidates.size:
                    _pivot(T, basis, i, candidates[0])
                else:
                    keep[i] = False
        if not keep.all():
            T = np.vstack([T[:rows][keep], T[-1:]])
            basis = basis[keep]
            rows = basis.size

    # phase II
    cost = np.zeros(width)
    cost[:nvar] = c
    T[-1] = 0.0
    T[-1, :-1] = cost
    for i in range(rows):
        T[-1] -= cost[basis[i]] * T[i]
    status, it = _run(T, basis, ~art, tol, max_iter, it)
    x_full = np.zeros(width)
    x_full[basis] = T[:rows, -1]
    x = x_full[:nvar]
    if status == "unbounded":
        return SimplexResult(x, -np.inf, status, it)
    return SimplexResult(x, float(c @ x), status, it)
