"""Exact rational linear algebra on sparse rows.

Rows are scaled to primitive integer vectors and eliminated fraction-free:
``r <- (p * r - r[c] * pivot_row) / content``.  No rounding ever happens, and
rows that do not touch the pivot column are left alone, which keeps the sparse
systems built by the cohomology and derivation solvers cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence, Union

Row = Union[Mapping[int, object], Sequence[object]]


def _sparse(row: Row) -> dict[int, Fraction]:
    items = row.items() if isinstance(row, Mapping) else enumerate(row)
    return {j: Fraction(v) for j, v in items if v != 0}


def _primitive(row: dict[int, Fraction] | dict[int, int]) -> dict[int, int]:
    """Scale a nonzero row to coprime integers with positive leading entry."""
    den = reduce(lcm, (Fraction(v).denominator for v in row.values()), 1)
    ints = {j: int(Fraction(v) * den) for j, v in row.items()}
    g = reduce(gcd, ints.values(), 0)
    lead = ints[min(ints)]
    if lead < 0:
        g = -g
    return {j: v // g for j, v in ints.items()}


@dataclass
class Echelon:
    """Reduced row echelon data: ``rows[i]`` has pivot column ``pivots[i]``.

    Every row is a primitive integer vector; pivot columns are zero in every other row.
    """

    ncols: int
    pivots: list[int]
    rows: list[dict[int, int]]

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def free_columns(self) -> list[int]:
        piv = set(self.pivots)
        return [j for j in range(self.ncols) if j not in piv]


def row_reduce(rows: Iterable[Row], ncols: int) -> Echelon:
    """Fraction-free Gauss-Jordan elimination.

    The pivot for each column is the candidate row with the smallest absolute
    entry in that column (ties: fewest nonzeros), which limits coefficient growth.
    """
    pending: dict[int, list[dict[int, int]]] = {}
    seen = set()
    for row in rows:
        r = _sparse(row)
        if not r:
            continue
        if any(j < 0 or j >= ncols for j in r):
            raise ValueError(f"row has a column outside 0..{ncols - 1}")
        p = _primitive(r)
        key = frozenset(p.items())
        if key in seen:
            continue
        seen.add(key)
        pending.setdefault(min(p), []).append(p)

    pivots: list[int] = []
    reduced: list[dict[int, int]] = []
    for col in range(ncols):
        bucket = pending.pop(col, None)
        if not bucket:
            continue
        best = min(range(len(bucket)), key=lambda i: (abs(bucket[i][col]), len(bucket[i])))
        prow = bucket.pop(best)
        p = prow[col]
        for r in bucket:
            new = _combine(r, prow, p, r[col])
            if new:
                pending.setdefault(min(new), []).append(new)
        # clear the pivot column from rows already reduced
        for i, r in enumerate(reduced):
            c = r.get(col)
            if c:
                reduced[i] = _combine(r, prow, p, c)
        pivots.append(col)
        reduced.append(prow)
    return Echelon(ncols, pivots, reduced)


def _combine(r: dict[int, int], prow: dict[int, int], p: int, c: int) -> dict[int, int]:
    """Primitive part of ``p*r - c*prow``."""
    out = {j: p * v for j, v in r.items()}
    for j, v in prow.items():
        w = out.get(j, 0) - c * v
        if w:
            out[j] = w
        else:
            out.pop(j, None)
    if not out:
        return out
    g = reduce(gcd, out.values(), 0)
    if out[min(out)] < 0:
        g = -g
    return {j: v // g for j, v in out.items()}


def nullspace(matrix: Iterable[Row], ncols: int | None = None) -> list[list[Fraction]]:
    """Exact basis of ``{v : M v = 0}``.

    One basis vector per free column, with a 1 in that column and 0 in the other
    free columns.  ``ncols`` is required when the matrix has no rows or sparse rows.
    """
    rows = list(matrix)
    if ncols is None:
        if not rows or isinstance(rows[0], Mapping):
            raise ValueError("ncols is required for empty or sparse matrices")
        ncols = len(rows[0])
    ech = row_reduce(rows, ncols)
    basis = []
    for f in ech.free_columns:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for pc, r in zip(ech.pivots, ech.rows):
            c = r.get(f)
            if c:
                v[pc] = Fraction(-c, r[pc])
        basis.append(v)
    return basis


def rank(matrix: Iterable[Row], ncols: int | None = None) -> int:
    rows = list(matrix)
    if ncols is None:
        if not rows:
            return 0
        ncols = max((max(r) + 1 for r in rows if isinstance(r, Mapping) and r), default=0) \
            if isinstance(rows[0], Mapping) else len(rows[0])
    return row_reduce(rows, ncols).rank


def solve(matrix: Iterable[Row], rhs: Sequence[object], ncols: int) -> list[Fraction] | None:
    """A particular solution of ``M x = rhs`` (free variables zero), or None if inconsistent."""
    rows = list(matrix)
    if len(rows) != len(rhs):
        raise ValueError("rhs length does not match the number of rows")
    augmented = []
    for row, b in zip(rows, rhs):
        r = _sparse(row)
        if b != 0:
            r[ncols] = Fraction(b)
        augmented.append(r)
    ech = row_reduce(augmented, ncols + 1)
    if ncols in ech.pivots:
        return None
    x = [Fraction(0)] * ncols
    for pc, r in zip(ech.pivots, ech.rows):
        x[pc] = Fraction(r.get(ncols, 0), r[pc])
    return x


def consistency_ranks(matrix: Iterable[Row], rhs: Sequence[object], ncols: int) -> tuple[int, int]:
    """(rank M, rank [M | rhs]); the system is infeasible exactly when they differ."""
    rows = [_sparse(r) for r in matrix]
    aug = []
    for r, b in zip(rows, rhs):
        r = dict(r)
        if b != 0:
            r[ncols] = Fraction(b)
        aug.append(r)
    return row_reduce(rows, ncols).rank, row_reduce(aug, ncols + 1).rank


def matvec(matrix: Iterable[Row], v: Sequence[Fraction]) -> list[Fraction]:
    out = []
    for row in matrix:
        items = row.items() if isinstance(row, Mapping) else enumerate(row)
        out.append(sum((Fraction(c) * v[j] for j, c in items), Fraction(0)))
    return out


def complement_basis(space: Sequence[Sequence[Fraction]], sub: Sequence[Sequence[Fraction]],
                     ncols: int) -> list[list[Fraction]]:
    """Vectors of ``space`` that extend a basis of span(sub) to a basis of span(space + sub).

    Greedy: keep a vector of ``space`` when it raises the rank.
    """
    kept: list[list[Fraction]] = []
    current = [dict(enumerate(v)) for v in sub]
    r = row_reduce(current, ncols).rank
    for v in space:
        trial = current + [dict(enumerate(v))]
        r2 = row_reduce(trial, ncols).rank
        if r2 > r:
            kept.append(list(v))
            current, r = trial, r2
    return kept


def reduce_modulo(vectors, sub, ncols):
    """Reduce each vector modulo span(sub) so it vanishes on the pivot columns of sub."""
    ech = row_reduce([dict(enumerate(v)) for v in sub], ncols)
    out = []
    for v in vectors:
        v = list(v)
        for pc, r in zip(ech.pivots, ech.rows):
            if v[pc]:
                k = v[pc] / r[pc]
                for j, c in r.items():
                    v[j] -= k * c
        out.append(v)
    return out
