"""Dense complex linear algebra for small Hermitian matrices.

Everything here operates on plain ``numpy`` arrays of dtype ``complex128``.
Matrices are tiny (n <= 8, usually 2 or 3), so clarity wins over speed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-12
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class Violation:
    """One broken invariant together with the measured magnitude."""

    invariant: str
    measured: float
    tolerance: float

    def __str__(self) -> str:
        return f"{self.invariant}: measured {self.measured:.3e} (tolerance {self.tolerance:.1e})"


class ValidationError(ValueError):
    """Raised when a matrix violates one or more structural invariants."""

    def __init__(self, violations: Sequence[Violation], what: str = "matrix"):
        self.violations = list(violations)
        msg = f"invalid {what}: " + "; ".join(str(v) for v in self.violations)
        super().__init__(msg)

    @property
    def invariants(self) -> list[str]:
        return [v.invariant for v in self.violations]


class DensityMatrixError(ValidationError):
    def __init__(self, violations: Sequence[Violation]):
        super().__init__(violations, what="density matrix")


def as_cmatrix(M) -> np.ndarray:
    """Return ``M`` as a square complex array, rejecting NaN/Inf entries."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValidationError([Violation("finite", float("nan"), 0.0)])
    return A


def hermiticity_defect(M) -> float:
    """Relative Frobenius distance ||M - M^dagger|| / max(1, ||M||)."""
    A = np.asarray(M, dtype=complex)
    return float(np.linalg.norm(A - A.conj().T) / max(1.0, np.linalg.norm(A)))


def check_hermitian(M, tol: float = HERMITICITY_TOL) -> np.ndarray:
    A = as_cmatrix(M)
    defect = hermiticity_defect(A)
    if defect > tol:
        raise ValidationError([Violation("hermiticity", defect, tol)])
    return A


def commutator(A, B) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A @ B - B @ A


def fix_phase(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate ``v`` so its first non-negligible component is real and positive."""
    v = np.asarray(v, dtype=complex)
    idx = np.flatnonzero(np.abs(v) > tol * max(1.0, np.abs(v).max()))
    if idx.size == 0:
        return v.copy()
    c = v[idx[0]]
    return v * (abs(c) / c)


def eigvecs_hermitian(M) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and phase-fixed orthonormal eigenvectors (as columns)."""
    A = check_hermitian(M)
    w, V = np.linalg.eigh((A + A.conj().T) / 2)
    V = np.column_stack([fix_phase(V[:, k]) for k in range(V.shape[1])])
    return w, V


@dataclass(frozen=True)
class SpectralData:
    """Distinct eigenvalues (ascending) and their orthogonal spectral projectors."""

    eigenvalues: np.ndarray
    projectors: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    def reconstruct(self) -> np.ndarray:
        return sum(lam * P for lam, P in zip(self.eigenvalues, self.projectors))

    def multiplicities(self) -> list[int]:
        return [int(round(np.trace(P).real)) for P in self.projectors]


def eig_hermitian(M, degeneracy_tol: float = DEGENERACY_TOL) -> SpectralData:
    """Spectral decomposition of a Hermitian matrix.

    Eigenvalues closer than ``degeneracy_tol`` are merged into a single
    projector whose eigenvalue is the mean of the cluster.

    Raises
    ------
    ValidationError
        If ``M`` is not Hermitian to within ``HERMITICITY_TOL``.
    """
    w, V = eigvecs_hermitian(M)
    groups: list[list[int]] = [[0]]
    for k in range(1, len(w)):
        if w[k] - w[groups[-1][-1]] < degeneracy_tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    eigenvalues = np.array([w[g].mean() for g in groups])
    projectors = tuple(V[:, g] @ V[:, g].conj().T for g in groups)
    return SpectralData(eigenvalues, projectors)


def apply_spectral_function(f: Callable[[float], float], S: SpectralData) -> np.ndarray:
    """Return f(M) = sum_i f(lambda_i) P_i."""
    return sum(complex(f(float(lam))) * P for lam, P in zip(S.eigenvalues, S.projectors))


def matrix_polynomial(coeffs: Sequence[float], M) -> np.ndarray:
    """Horner evaluation of sum_k coeffs[k] M^k (ascending coefficient order)."""
    A = np.asarray(M, dtype=complex)
    I = np.eye(A.shape[0], dtype=complex)
    out = np.zeros_like(A)
    for c in reversed(list(coeffs)):
        out = out @ A + c * I
    return out


def density_violations(M) -> list[Violation]:
    """Every density-matrix invariant ``M`` breaks, with measured magnitudes."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        return [Violation("finite", float("nan"), 0.0)]
    out = []
    herm = hermiticity_defect(A)
    if herm > HERMITICITY_TOL:
        out.append(Violation("hermiticity", herm, HERMITICITY_TOL))
    tr = abs(np.trace(A) - 1.0)
    if tr > TRACE_TOL:
        out.append(Violation("trace", float(tr), TRACE_TOL))
    # positivity is judged on the Hermitian part so a small asymmetry does not mask it
    min_eig = float(np.linalg.eigvalsh((A + A.conj().T) / 2).min())
    if min_eig < -POSITIVITY_TOL:
        out.append(Violation("positivity", min_eig, -POSITIVITY_TOL))
    return out


def validate_density(M) -> np.ndarray:
    """Return ``M`` as a complex array if it is a density matrix.

    Raises
    ------
    DensityMatrixError
        Listing every violated invariant (hermiticity, trace, positivity).
    """
    violations = density_violations(M)
    if violations:
        raise DensityMatrixError(violations)
    return np.array(M, dtype=complex)


def unitary_exp(H, scale: float) -> np.ndarray:
    """exp(-i * scale * H) for Hermitian H, built from its eigendecomposition."""
    w, V = np.linalg.eigh(np.asarray(H, dtype=complex))
    return (V * np.exp(-1j * scale * w)) @ V.conj().T
