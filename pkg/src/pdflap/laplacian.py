"""Directed flag Laplacians and their spectra."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from .boundary import boundary_matrix
from .errors import CapacityError, SolverError, ValidationError
from .flag_builder import FilteredFlagComplex
from .model import Simplex
from .schemas import SpectraRecord

# ---------------------------------------------------------------------------
# Constants
# ---------------------------------------------------------------------------

DEFAULT_MAX_MATRIX_SIZE = 2000
MAX_MATRIX_SIZE = max(
    1,
    int(os.environ.get("PDFLAP_MAX_MATRIX_SIZE", DEFAULT_MAX_MATRIX_SIZE)),
)

# Relative zero threshold: eigenvalues below ZERO_TOL_SCALE * max(1, ||L||_inf)
# count as harmonic.
ZERO_TOL_SCALE = 1e-8


@dataclass(frozen=True)
class LaplacianMatrix:
    """Dense symmetric matrix ``L_k^a`` indexed by the k-simplices alive at ``a``."""

    k: int
    a: float
    matrix: np.ndarray
    simplices: tuple[Simplex, ...]

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def check_capacity(n: int, what: str) -> None:
    if n > MAX_MATRIX_SIZE:
        raise CapacityError(
            f"{what} would be {n}x{n}, above the cap of {MAX_MATRIX_SIZE}.\n"
            "Raise PDFLAP_MAX_MATRIX_SIZE or lower --max-dim."
        )


def laplacian(complex_: FilteredFlagComplex, k: int, a: float) -> LaplacianMatrix:
    """``L_k^a = B_{k+1} B_{k+1}^T + B_k^T B_k``.

    The down term is absent for ``k = 0`` and the up term at the top
    dimension of the complex.

    Raises:
        ValidationError: if *k* is outside ``0..max_dim``.
        CapacityError: if the matrix exceeds ``MAX_MATRIX_SIZE``.
    """
    complex_.check_dim(k)
    down = boundary_matrix(complex_, k, a)
    n = len(down.cols)
    check_capacity(n, f"L_{k}")

    total = np.zeros((n, n), dtype=np.int64)
    if k > 0 and n:
        d = down.to_sparse()
        total += (d.T @ d).toarray()
    if k < complex_.max_dim:
        up = boundary_matrix(complex_, k + 1, a)
        if up.cols:
            u = up.to_sparse()
            total += (u @ u.T).toarray()
    return LaplacianMatrix(k=k, a=a, matrix=total.astype(np.float64), simplices=down.cols)


def zero_tolerance(matrix: np.ndarray, zero_tol: Optional[float] = None) -> float:
    """Harmonic threshold: explicit *zero_tol* or ``1e-8 * max(1, ||L||_inf)``."""
    if zero_tol is not None:
        return float(zero_tol)
    norm = float(np.abs(matrix).sum(axis=1).max()) if matrix.size else 0.0
    return ZERO_TOL_SCALE * max(1.0, norm)


def decompose(
    matrix: np.ndarray,
    k: int,
    a: float,
    b: float,
    zero_tol: Optional[float] = None,
    with_eigenvectors: bool = False,
) -> SpectraRecord:
    """Full symmetric eigendecomposition of *matrix* summarised as a record.

    Raises:
        SolverError: when the eigensolver does not converge.
    """
    tol = zero_tolerance(matrix, zero_tol)
    if matrix.size == 0:
        return SpectraRecord(
            k=k, a=a, b=b, eigenvalues=[], betti=0, lambda_min_nonzero=None,
            zero_tol=tol, eigenvectors=[] if with_eigenvectors else None,
        )
    try:
        if with_eigenvectors:
            values, vectors = linalg.eigh(matrix)
        else:
            values = linalg.eigh(matrix, eigvals_only=True)
            vectors = None
    except (linalg.LinAlgError, ValueError) as e:
        raise SolverError(
            f"Eigensolver failed for L_{k} at ({a}, {b}): {e}\n"
            f"  shape: {matrix.shape}\n"
            f"  frobenius norm: {np.linalg.norm(matrix):.6g}\n"
            f"  symmetry defect: {np.abs(matrix - matrix.T).max():.3g}"
        ) from e

    eigenvalues = [float(x) for x in values]
    nonzero = [x for x in eigenvalues if x >= tol]
    return SpectraRecord(
        k=k,
        a=a,
        b=b,
        eigenvalues=eigenvalues,
        betti=sum(1 for x in eigenvalues if x < tol),
        lambda_min_nonzero=nonzero[0] if nonzero else None,
        zero_tol=tol,
        eigenvectors=vectors.tolist() if vectors is not None else None,
    )


def spectra(
    lap: LaplacianMatrix,
    zero_tol: Optional[float] = None,
    with_eigenvectors: bool = False,
) -> SpectraRecord:
    """Sorted spectrum, Betti number and smallest nonzero eigenvalue of ``L_k^a``."""
    return decompose(lap.matrix, lap.k, lap.a, lap.a, zero_tol, with_eigenvectors)


def eigenvector_check(
    lap: LaplacianMatrix,
    v: np.ndarray,
    lam: float,
    tol: float = 1e-9,
) -> bool:
    """True iff ``||L v - lam v|| <= tol * ||v||``.

    Raises:
        ValidationError: on a dimension mismatch or a zero vector.
    """
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.shape[0] != lap.size:
        raise ValidationError(
            f"Vector has length {v.shape[0]} but L_{lap.k} is {lap.size}x{lap.size}."
        )
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ValidationError("The zero vector is not an eigenvector.")
    residual = float(np.linalg.norm(lap.matrix @ v - lam * v))
    return residual <= tol * norm
