"""Full eigendecomposition of dense real-symmetric matrices with residual checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .basis import SectorHamiltonian
from .errors import DiagonalizationError

ORTHO_TOL = 1e-10
EIGEN_TOL = 1e-9


@dataclass
class EigenDecomposition:
    """Ascending eigenvalues with orthonormal eigenvectors as matching columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)


@dataclass
class ResidualReport:
    ortho_residual: float
    eigen_residual: float
    ortho_ok: bool
    eigen_ok: bool

    @property
    def passed(self) -> bool:
        return self.ortho_ok and self.eigen_ok


def _as_matrix(h) -> np.ndarray:
    return h.matrix if isinstance(h, SectorHamiltonian) else np.asarray(h, dtype=float)


def diagonalize(h) -> EigenDecomposition:
    """Full spectrum and eigenvectors of a real-symmetric matrix.

    Accepts a SectorHamiltonian or a plain 2-D array.  Backed by the LAPACK
    divide-and-conquer driver; the accuracy contract is checked via validate().
    """
    m = _as_matrix(h)
    if not np.all(np.isfinite(m)):
        raise DiagonalizationError("matrix contains non-finite entries")
    try:
        w, v = scipy.linalg.eigh(m, driver="evd", check_finite=False)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise DiagonalizationError(f"eigensolver failed to converge: {exc}") from exc
    return EigenDecomposition(eigenvalues=w, eigenvectors=v)


def validate(decomp: EigenDecomposition, h) -> ResidualReport:
    """Max orthonormality and eigen-equation residuals, flagged against tolerances."""
    m = _as_matrix(h)
    v = decomp.eigenvectors
    if v.shape != m.shape:
        raise ValueError(f"dimension mismatch: vectors {v.shape} vs matrix {m.shape}")
    ortho = float(np.max(np.abs(v.T @ v - np.eye(len(v)))))
    eigen = float(np.max(np.abs(m @ v - v * decomp.eigenvalues)))
    eigen_bound = EIGEN_TOL * max(1.0, float(np.max(np.abs(m))) * len(m))
    return ResidualReport(
        ortho_residual=ortho,
        eigen_residual=eigen,
        ortho_ok=ortho <= ORTHO_TOL,
        eigen_ok=eigen <= eigen_bound,
    )
