"""Exact rational ground truth for Betti and persistent Betti numbers.

Everything here runs over ``fractions.Fraction``; nothing is rounded.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .boundary import BoundaryMatrix, boundary_matrix
from .errors import CapacityError, ValidationError
from .flag_builder import FilteredFlagComplex

DEFAULT_ORACLE_MAX_COLUMNS = 300
ORACLE_MAX_COLUMNS = max(
    1,
    int(os.environ.get("PDFLAP_ORACLE_MAX_COLUMNS", DEFAULT_ORACLE_MAX_COLUMNS)),
)


@dataclass
class RationalMatrix:
    """Dense matrix of exact rationals, stored row-major."""

    n_rows: int
    n_cols: int
    entries: list[list[Fraction]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.entries:
            self.entries = [[Fraction(0)] * self.n_cols for _ in range(self.n_rows)]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[object]]) -> "RationalMatrix":
        n_cols = len(rows[0]) if rows else 0
        return cls(len(rows), n_cols, [[Fraction(x) for x in row] for row in rows])

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        m = cls(n, n)
        for i in range(n):
            m.entries[i][i] = Fraction(1)
        return m

    @classmethod
    def from_boundary(cls, bm: BoundaryMatrix, n_rows: int | None = None) -> "RationalMatrix":
        """Exact copy of *bm*, optionally padded with zero rows to *n_rows*."""
        rows = len(bm.rows) if n_rows is None else n_rows
        m = cls(rows, len(bm.cols))
        for j, column in enumerate(bm.columns):
            for row, sign in column:
                m.entries[row][j] = Fraction(sign)
        return m

    @classmethod
    def from_columns(cls, n_rows: int, columns: Iterable[Sequence[Fraction]]) -> "RationalMatrix":
        cols = list(columns)
        m = cls(n_rows, len(cols))
        for j, column in enumerate(cols):
            for i, value in enumerate(column):
                m.entries[i][j] = Fraction(value)
        return m

    def columns(self) -> list[list[Fraction]]:
        return [[self.entries[i][j] for i in range(self.n_rows)] for j in range(self.n_cols)]

    def hstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if other.n_rows != self.n_rows:
            raise ValidationError("Cannot stack matrices with different row counts.")
        return RationalMatrix(
            self.n_rows,
            self.n_cols + other.n_cols,
            [mine + theirs for mine, theirs in zip(self.entries, other.entries)]
            if self.n_rows
            else [],
        )


def _check_size(m: RationalMatrix, limit: Optional[int]) -> None:
    cap = ORACLE_MAX_COLUMNS if limit is None else limit
    if m.n_cols > cap:
        raise CapacityError(
            f"Rational matrix has {m.n_cols} columns, above the cap of {cap}."
        )


def _rref(m: RationalMatrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns, by Gauss-Jordan elimination."""
    rows = [list(row) for row in m.entries]
    pivots: list[int] = []
    r = 0
    for c in range(m.n_cols):
        if r == m.n_rows:
            break
        pivot = next((i for i in range(r, m.n_rows) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(m.n_rows):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def exact_rank(m: RationalMatrix, limit: Optional[int] = None) -> int:
    """Rank over the rationals.

    Raises:
        CapacityError: above *limit* columns (default ``ORACLE_MAX_COLUMNS``).
    """
    if m.n_rows == 0 or m.n_cols == 0:
        return 0
    _check_size(m, limit)
    return len(_rref(m)[1])


def exact_nullspace(m: RationalMatrix, limit: Optional[int] = None) -> list[list[Fraction]]:
    """Basis of ``{x : m x = 0}`` as a list of length-``n_cols`` vectors."""
    if m.n_cols == 0:
        return []
    if m.n_rows == 0:
        return RationalMatrix.identity(m.n_cols).columns()
    _check_size(m, limit)
    rows, pivots = _rref(m)
    pivot_set = set(pivots)
    free = [c for c in range(m.n_cols) if c not in pivot_set]
    basis: list[list[Fraction]] = []
    for f in free:
        vector = [Fraction(0)] * m.n_cols
        vector[f] = Fraction(1)
        for r, p in enumerate(pivots):
            vector[p] = -rows[r][f]
        basis.append(vector)
    return basis


def _boundary_rank(complex_: FilteredFlagComplex, k: int, a: float) -> int:
    if k < 1 or k > complex_.max_dim:
        return 0
    return exact_rank(RationalMatrix.from_boundary(boundary_matrix(complex_, k, a)))


def oracle_betti(complex_: FilteredFlagComplex, k: int, a: float) -> int:
    """``beta_k^a = nullity(B_k^a) - rank(B_{k+1}^a)``, exactly."""
    complex_.check_dim(k)
    n = complex_.count_at(k, a)
    return n - _boundary_rank(complex_, k, a) - _boundary_rank(complex_, k + 1, a)


def oracle_persistent_betti(complex_: FilteredFlagComplex, k: int, a: float, b: float) -> int:
    """``beta_k^{a,b} = dim Z_k^a - dim(Z_k^a ∩ B_k^b)``, exactly.

    The intersection dimension comes from
    ``dim(U ∩ W) = dim U + dim W - dim(U + W)``.

    Raises:
        ValidationError: if ``a > b`` or *k* is out of range.
    """
    complex_.check_dim(k)
    if a > b:
        raise ValidationError(f"Persistent pair requires a <= b, got ({a}, {b}).")

    n_b = complex_.count_at(k, b)
    if k == 0:
        cycles = RationalMatrix.identity(complex_.count_at(0, a)).columns()
    else:
        cycles = exact_nullspace(RationalMatrix.from_boundary(boundary_matrix(complex_, k, a)))
    if not cycles:
        return 0
    # Embed Z_k^a into C_k^b: simplices alive at a are a prefix at b.
    cycles = [vector + [Fraction(0)] * (n_b - len(vector)) for vector in cycles]
    u = RationalMatrix.from_columns(n_b, cycles)

    if k + 1 <= complex_.max_dim:
        w = RationalMatrix.from_boundary(boundary_matrix(complex_, k + 1, b))
    else:
        w = RationalMatrix(n_b, 0)
    dim_u = len(cycles)
    dim_w = exact_rank(w)
    dim_sum = exact_rank(u.hstack(w))
    return dim_u - (dim_u + dim_w - dim_sum)
