"""Persistent directed flag Laplacians ``L_k^{a,b}``.

The up term needs an orthonormal basis ``Z`` of ``C_{k+1}^{a,b}``, the
(k+1)-chains alive at ``b`` whose boundary only touches k-simplices already
alive at ``a``. With ``Z`` orthonormal the adjoint of the persistent boundary
is its transpose.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy import linalg

from .boundary import boundary_matrix
from .errors import ValidationError
from .flag_builder import FilteredFlagComplex
from .laplacian import check_capacity, decompose
from .model import Simplex
from .oracle import RationalMatrix, exact_nullspace
from .schemas import SpectraRecord

log = logging.getLogger(__name__)

# ---------------------------------------------------------------------------
# Constants
# ---------------------------------------------------------------------------

DEFAULT_EXACT_COLUMN_LIMIT = 500
EXACT_COLUMN_LIMIT = max(
    1,
    int(os.environ.get("PDFLAP_EXACT_COLUMN_LIMIT", DEFAULT_EXACT_COLUMN_LIMIT)),
)

# Relative rank threshold for subspace detection in floating point.
SUBSPACE_TOL = 1e-10


@dataclass(frozen=True)
class PersistentChainBasis:
    """Orthonormal columns ``Z`` spanning ``C_{k+1}^{a,b}`` inside ``C_{k+1}^b``."""

    k_plus_1: int
    a: float
    b: float
    Z: np.ndarray
    simplices: tuple[Simplex, ...]
    exact: bool

    @property
    def rank(self) -> int:
        return self.Z.shape[1]


@dataclass(frozen=True)
class PersistentLaplacian:
    """``L = B_pers B_pers^T + (B_k^a)^T B_k^a`` acting on ``C_k^a``."""

    k: int
    a: float
    b: float
    B_pers: np.ndarray
    L: np.ndarray
    basis: PersistentChainBasis
    simplices: tuple[Simplex, ...]


# ---------------------------------------------------------------------------
# Orthonormal bases
# ---------------------------------------------------------------------------

def orthonormalize(generators: np.ndarray, tol: float = SUBSPACE_TOL) -> np.ndarray:
    """Orthonormal basis of the column span of *generators*.

    Pivoted QR picks the rank, then a second QR pass restores orthogonality
    lost to rounding.
    """
    m, n = generators.shape
    if m == 0 or n == 0:
        return np.zeros((m, 0))
    q, r, _ = linalg.qr(generators, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0.0:
        return np.zeros((m, 0))
    rank = int(np.count_nonzero(diag > tol * diag[0]))
    q, _ = linalg.qr(q[:, :rank], mode="economic")
    return q


def _float_null_basis(block: np.ndarray, tol: float = SUBSPACE_TOL) -> np.ndarray:
    """Orthonormal basis of ``{x : block @ x = 0}`` from a pivoted QR of ``block^T``."""
    _, m = block.shape
    q, r, _ = linalg.qr(block.T, mode="full", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.count_nonzero(diag > tol * diag[0])) if diag.size and diag[0] > 0 else 0
    null = q[:, rank:]
    if null.shape[1] == 0:
        return np.zeros((m, 0))
    null, _ = linalg.qr(null, mode="economic")
    return null


def _exact_null_basis(complex_: FilteredFlagComplex, k_plus_1: int, b: float, n_a: int) -> np.ndarray:
    """Rational column reduction against the new rows, then orthonormalization."""
    bm = boundary_matrix(complex_, k_plus_1, b)
    block = RationalMatrix(len(bm.rows) - n_a, len(bm.cols))
    for j, column in enumerate(bm.columns):
        for row, sign in column:
            if row >= n_a:
                block.entries[row - n_a][j] = Fraction(sign)
    kernel = exact_nullspace(block, limit=EXACT_COLUMN_LIMIT)
    if not kernel:
        return np.zeros((len(bm.cols), 0))
    generators = np.array([[float(x) for x in vector] for vector in kernel]).T
    return orthonormalize(generators)


def _use_exact(reduction: str, n_cols: int) -> bool:
    if reduction == "exact":
        return True
    if reduction == "float":
        return False
    if reduction == "auto":
        return n_cols <= EXACT_COLUMN_LIMIT
    raise ValidationError(f"Unknown reduction mode '{reduction}'.")


def _check_pair(a: float, b: float) -> None:
    if a > b:
        raise ValidationError(f"Persistent pair requires a <= b, got ({a}, {b}).")


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def persistent_chain_basis(
    complex_: FilteredFlagComplex,
    k_plus_1: int,
    a: float,
    b: float,
    reduction: str = "auto",
) -> PersistentChainBasis:
    """Orthonormal basis of ``{s in C_{k+1}^b : d_{k+1}^b s in C_k^a}``.

    Above the top dimension of the complex the basis is empty.

    Raises:
        ValidationError: if ``a > b`` or ``k_plus_1 < 1``.
    """
    _check_pair(a, b)
    if k_plus_1 < 1:
        raise ValidationError(f"Chain dimension must be >= 1, got {k_plus_1}.")
    if k_plus_1 > complex_.max_dim:
        return PersistentChainBasis(k_plus_1, a, b, np.zeros((0, 0)), (), exact=True)

    simplices = tuple(complex_.simplices[k_plus_1][: complex_.count_at(k_plus_1, b)])
    m = len(simplices)
    n_a = complex_.count_at(k_plus_1 - 1, a)
    n_b = complex_.count_at(k_plus_1 - 1, b)

    if n_a == n_b:
        # No new k-simplices: every chain qualifies.
        return PersistentChainBasis(k_plus_1, a, b, np.eye(m), simplices, exact=True)
    if m == 0:
        return PersistentChainBasis(k_plus_1, a, b, np.zeros((0, 0)), simplices, exact=True)

    exact = _use_exact(reduction, m)
    if exact:
        z = _exact_null_basis(complex_, k_plus_1, b, n_a)
    else:
        block = boundary_matrix(complex_, k_plus_1, b).to_dense()[n_a:, :]
        z = _float_null_basis(block)
    log.debug(
        "C_%d^{%s,%s}: %d of %d chains (%s)",
        k_plus_1, a, b, z.shape[1], m, "exact" if exact else "float",
    )
    return PersistentChainBasis(k_plus_1, a, b, z, simplices, exact=exact)


def persistent_boundary(
    complex_: FilteredFlagComplex,
    k_plus_1: int,
    a: float,
    b: float,
    basis: Optional[PersistentChainBasis] = None,
    reduction: str = "auto",
) -> np.ndarray:
    """``B_{k+1}^{a,b} = J_k^{a,b} B_{k+1}^b Z``.

    ``J_k^{a,b}`` keeps the rows of the k-simplices alive at ``a``, which are a
    prefix of the rows at ``b``.
    """
    complex_.check_dim(k_plus_1 - 1)
    if basis is None:
        basis = persistent_chain_basis(complex_, k_plus_1, a, b, reduction)
    n_a = complex_.count_at(k_plus_1 - 1, a)
    if basis.rank == 0:
        return np.zeros((n_a, 0))
    full = boundary_matrix(complex_, k_plus_1, b).to_dense()
    return full[:n_a, :] @ basis.Z


def persistent_laplacian(
    complex_: FilteredFlagComplex,
    k: int,
    a: float,
    b: float,
    reduction: str = "auto",
    basis: Optional[PersistentChainBasis] = None,
) -> PersistentLaplacian:
    """``L_k^{a,b} = B_{k+1}^{a,b} (B_{k+1}^{a,b})^T + (B_k^a)^T B_k^a``.

    Its kernel dimension is the persistent Betti number ``beta_k^{a,b}``.

    Raises:
        ValidationError: if ``a > b`` or *k* is out of range.
        CapacityError: if either factor exceeds the size cap.
    """
    complex_.check_dim(k)
    _check_pair(a, b)
    n_a = complex_.count_at(k, a)
    check_capacity(n_a, f"L_{k}^{{{a},{b}}}")
    check_capacity(complex_.count_at(k + 1, b), f"C_{k + 1}^{b} basis")

    if basis is None:
        basis = persistent_chain_basis(complex_, k + 1, a, b, reduction)
    b_pers = persistent_boundary(complex_, k + 1, a, b, basis=basis)

    total = b_pers @ b_pers.T if b_pers.shape[1] else np.zeros((n_a, n_a))
    if k > 0 and n_a:
        down = boundary_matrix(complex_, k, a).to_dense()
        total = total + down.T @ down
    # Assemble symmetrically; rounding in the up term can break exact symmetry.
    total = 0.5 * (total + total.T)
    return PersistentLaplacian(
        k=k,
        a=a,
        b=b,
        B_pers=b_pers,
        L=total,
        basis=basis,
        simplices=tuple(complex_.simplices[k][:n_a]),
    )


def persistent_spectra(
    pl: PersistentLaplacian,
    zero_tol: Optional[float] = None,
    with_eigenvectors: bool = False,
) -> SpectraRecord:
    """Sorted spectrum of ``L_k^{a,b}``; ``lambda_min_nonzero`` is ``lambda_k^{a,b}``."""
    return decompose(pl.L, pl.k, pl.a, pl.b, zero_tol, with_eigenvectors)
