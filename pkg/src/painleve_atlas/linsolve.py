"""Exact Gauss-Jordan elimination over any field whose elements support
``+ - * /`` and ``== 0`` (``Fraction`` or :class:`RationalFunction`)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence


@dataclass
class LinearSolution:
    feasible: bool
    rank: int
    n_unknowns: int
    particular: list | None  # free unknowns set to zero
    nullspace: list[list]  # one vector per free unknown
    pivots: list[int]


def _is_zero(a) -> bool:
    z = getattr(a, "is_zero", None)
    return z() if callable(z) else a == 0


def rref(rows: Sequence[Sequence], zero, one, pivot_key: Callable | None = None):
    """Reduced row echelon form of an augmented matrix (last column = rhs).

    Returns ``(matrix, pivot_columns)``.  ``pivot_key`` ranks candidate pivots
    (smaller is better) to keep intermediate expressions small.
    """
    m = [list(r) for r in rows]
    n_rows = len(m)
    n_cols = len(m[0]) - 1 if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        cands = [i for i in range(r, n_rows) if not _is_zero(m[i][c])]
        if not cands:
            continue
        p = min(cands, key=(lambda i: pivot_key(m[i][c]))) if pivot_key else cands[0]
        m[r], m[p] = m[p], m[r]
        inv = one / m[r][c]
        m[r] = [a * inv if not _is_zero(a) else zero for a in m[r]]
        for i in range(n_rows):
            if i != r and not _is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [a - f * b if not _is_zero(b) else a for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return m, pivots


def solve(rows: Sequence[Sequence], n_unknowns: int, zero, one, pivot_key=None) -> LinearSolution:
    if not rows:
        return LinearSolution(True, 0, n_unknowns, [zero] * n_unknowns, _basis(range(n_unknowns), n_unknowns, zero, one), [])
    m, pivots = rref(rows, zero, one, pivot_key)
    rank = len(pivots)
    for row in m[rank:]:
        if not _is_zero(row[-1]):
            return LinearSolution(False, rank, n_unknowns, None, [], pivots)
    particular = [zero] * n_unknowns
    for i, c in enumerate(pivots):
        particular[c] = m[i][-1]
    free = [c for c in range(n_unknowns) if c not in set(pivots)]
    nullspace = []
    for f in free:
        vec = [zero] * n_unknowns
        vec[f] = one
        for i, c in enumerate(pivots):
            if not _is_zero(m[i][f]):
                vec[c] = zero - m[i][f]
        nullspace.append(vec)
    return LinearSolution(True, rank, n_unknowns, particular, nullspace, pivots)


def _basis(cols, n, zero, one):
    out = []
    for f in cols:
        vec = [zero] * n
        vec[f] = one
        out.append(vec)
    return out
