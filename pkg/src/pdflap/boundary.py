"""Sparse boundary matrices of a filtered directed flag complex."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csc_matrix

from .flag_builder import FilteredFlagComplex
from .model import Simplex


@dataclass(frozen=True)
class BoundaryMatrix:
    """Matrix of ``d_k`` at filtration value ``a``.

    Rows are the (k-1)-simplices and columns the k-simplices alive at ``a``,
    both in canonical order. ``columns[j]`` lists the ``(row, sign)`` pairs of
    column ``j``; entries are small integers.
    """

    k: int
    a: float
    rows: tuple[Simplex, ...]
    cols: tuple[Simplex, ...]
    columns: tuple[tuple[tuple[int, int], ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.cols))

    def to_sparse(self) -> csc_matrix:
        data: list[int] = []
        indices: list[int] = []
        indptr = [0]
        for column in self.columns:
            for row, sign in column:
                indices.append(row)
                data.append(sign)
            indptr.append(len(indices))
        return csc_matrix(
            (np.asarray(data, dtype=np.int64), np.asarray(indices, dtype=np.int64), indptr),
            shape=self.shape,
        )

    def to_dense(self, dtype: type = np.float64) -> np.ndarray:
        return self.to_sparse().toarray().astype(dtype)


def boundary_matrix(complex_: FilteredFlagComplex, k: int, a: float) -> BoundaryMatrix:
    """Assemble ``d_k`` at *a* with ``(-1)^i`` at the face dropping vertex i.

    ``k = 0`` yields the zero map (no rows).

    Raises:
        ValidationError: if *k* is outside ``0..max_dim``.
    """
    complex_.check_dim(k)
    cols = tuple(complex_.simplices[k][: complex_.count_at(k, a)])
    if k == 0:
        return BoundaryMatrix(k=0, a=a, rows=(), cols=cols, columns=tuple(() for _ in cols))

    rows = tuple(complex_.simplices[k - 1][: complex_.count_at(k - 1, a)])
    columns = tuple(
        tuple(
            sorted(
                (complex_.index_of(face), 1 if i % 2 == 0 else -1)
                for i, face in simplex.faces()
            )
        )
        for simplex in cols
    )
    return BoundaryMatrix(k=k, a=a, rows=rows, cols=cols, columns=columns)


def verify_chain_complex(complex_: FilteredFlagComplex, a: float) -> bool:
    """True iff ``B_k^a @ B_{k+1}^a`` vanishes for every k (integer arithmetic)."""
    for k in range(1, complex_.max_dim):
        product = boundary_matrix(complex_, k, a).to_sparse() @ boundary_matrix(
            complex_, k + 1, a
        ).to_sparse()
        if product.count_nonzero():
            return False
    return True


def write_triplets(matrix: BoundaryMatrix) -> str:
    """Plain-text ``row col value`` dump of the nonzero entries."""
    lines = [
        f"{row} {col} {sign}"
        for col, column in enumerate(matrix.columns)
        for row, sign in column
    ]
    return "\n".join(lines) + ("\n" if lines else "")
