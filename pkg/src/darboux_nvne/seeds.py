"""Exactly solvable seeds: the rotating two-level block and the 3-level seeds.

Conventions used throughout the package
--------------------------------------
* A 3-level seed lives in the eigenbasis of H restricted to three levels,
  ordered as *construction* levels (h1, h2, h3) with h3 the level that is
  not coupled in rho(0).
* rho(0) = [[r1, r, 0], [r, r2, 0], [0, 0, r3]] with r real and >= 0.
* The eigenvectors omega_i of rho(0) are labelled so that omega_1, omega_2
  span the coupled block with lambda_1 >= lambda_2, and omega_3 = e_3.
* The Lax vector phi_1 spanning the block part of the z_mu eigenspace has a
  real positive second component; its squared norm is a per-model constant
  (2 for equispaced levels, 2 d(n) for hydrogen levels) so that the switching
  offsets come out as ln(|D|/sqrt(2)) and ln(|D|/sqrt(2 d(n))).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .matrix_core import (
    SpectralData,
    eig_hermitian,
    eigvecs_hermitian,
    unitary_exp,
    validate_density,
    DensityMatrixError,
)
from .nonlinearity import QUADRATIC, Nonlinearity

EIGEN_RESIDUAL_TOL = 1e-10
LAX_REALITY_TOL = 1e-10


class SeedError(ValueError):
    """Base class for seed-construction failures."""


class TrivialDarbouxError(SeedError):
    """Im(mu) = 0: the Darboux transformation reduces to the identity."""


class DegeneratePairError(SeedError):
    pass


class SeedConstraintError(SeedError):
    pass


class PositivityError(SeedError):
    def __init__(self, message: str, eigenvalue: float):
        self.eigenvalue = eigenvalue
        super().__init__(message)


class SeedConsistencyError(SeedError):
    """The Lax eigenvalue equation is not satisfied to tolerance."""


@dataclass(frozen=True)
class HamiltonianSpec:
    """Diagonal Hamiltonian with an optional uniform shift and a 3-level working set."""

    levels: tuple[float, ...]
    shift: float = 0.0
    selected: tuple[int, int, int] = (0, 1, 2)

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(float(h) for h in self.levels))
        sel = tuple(int(i) for i in self.selected)
        if len(set(sel)) != 3 or any(i < 0 or i >= len(self.levels) for i in sel):
            raise ValueError(f"selected levels {sel} must be 3 distinct indices < {len(self.levels)}")
        object.__setattr__(self, "selected", sel)

    @classmethod
    def equispaced(cls, B: float, A: float = 0.0) -> "HamiltonianSpec":
        return cls((B, 3 * B, 2 * B), shift=A)

    def matrix(self) -> np.ndarray:
        return np.diag(np.array(self.levels) + self.shift).astype(complex)

    @property
    def working_levels(self) -> tuple[float, float, float]:
        return tuple(self.levels[i] + self.shift for i in self.selected)


@dataclass(frozen=True)
class SeedSolution:
    """A 3-level seed rho(0) with its Darboux data.

    ``lax_hamiltonian`` is the (possibly shifted) 3x3 Hamiltonian for which
    z_mu is an eigenvalue of rho(0) - mu H; a uniform shift of H leaves the
    dynamics unchanged, so this matrix can be used for every downstream step.
    """

    rho0: np.ndarray
    lam: np.ndarray
    omega: np.ndarray
    mu: complex
    z_mu: complex
    f: Nonlinearity
    alpha_lambda: float
    hamiltonian: HamiltonianSpec
    lax_hamiltonian: np.ndarray
    phi1: np.ndarray
    model: str = "custom"
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def spectral(self) -> SpectralData:
        return eig_hermitian(self.rho0)

    @property
    def beta(self) -> float:
        return self.mu.imag

    @property
    def coupling(self) -> complex:
        return complex(self.rho0[0, 1])

    def lax_matrix(self) -> np.ndarray:
        return self.rho0 - self.mu * self.lax_hamiltonian

    def eigenspace_residuals(self) -> tuple[float, float]:
        """Residuals of (rho(0) - mu H) v = z_mu v on the two orthonormal vectors phi_1, e_3."""
        L = self.lax_matrix()
        u = self.phi1 / np.linalg.norm(self.phi1)
        e3 = self.omega[:, 2]
        return (
            float(np.linalg.norm(L @ u - self.z_mu * u)),
            float(np.linalg.norm(L @ e3 - self.z_mu * e3)),
        )


def alpha_lambda(f: Nonlinearity, lam1: float, lam2: float) -> float:
    """Difference quotient (f(lam1) - f(lam2)) / (lam1 - lam2)."""
    if lam1 == lam2:
        raise DegeneratePairError(f"alpha(lambda) undefined for equal eigenvalues {lam1}")
    return f.divided_difference(lam1, lam2)


def two_level_evolution(rho0, H1, f: Nonlinearity, t: float) -> np.ndarray:
    """rho_1(t) = exp(-i alpha H1 t) rho_1(0) exp(+i alpha H1 t) for a 2x2 block."""
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (2, 2):
        raise ValueError("two_level_evolution expects a 2x2 block")
    w = np.linalg.eigvalsh((rho0 + rho0.conj().T) / 2)
    if abs(w[1] - w[0]) < 1e-14:
        raise DegeneratePairError("rho_1(0) has a degenerate spectrum; alpha(lambda) undefined")
    a = alpha_lambda(f, w[1], w[0])
    V = unitary_exp(H1, a * t)
    return V @ rho0 @ V.conj().T


def _block_basis(rho0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """lambda_1 >= lambda_2 from the coupled block, lambda_3 = rho0[2,2]; omega as columns."""
    w, V = eigvecs_hermitian(rho0[:2, :2])
    lam = np.array([w[1], w[0], rho0[2, 2].real])
    omega = np.zeros((3, 3), dtype=complex)
    omega[:2, 0] = V[:, 1]
    omega[:2, 1] = V[:, 0]
    omega[2, 2] = 1.0
    return lam, omega


def _lax_block_vector(rho0, mu, z, H, norm2: float) -> np.ndarray:
    # (rho - mu H - z) v = 0 on the block: first row gives v = (r, z + mu h1 - r1)
    v = np.array([rho0[0, 1], z + mu * H[0, 0] - rho0[0, 0], 0.0], dtype=complex)
    c = v[1] if abs(v[1]) > 1e-300 else v[0]
    v = v * (abs(c) / c)
    return v * np.sqrt(norm2) / np.linalg.norm(v)


def _assemble(rho0, mu, z, H, f, spec, phi1_norm2, model, notes) -> SeedSolution:
    lam, omega = _block_basis(rho0)
    a = alpha_lambda(f, lam[0], lam[1])
    lam3_check = z + mu * H[2, 2]
    if abs(lam3_check.imag) > LAX_REALITY_TOL or abs(lam3_check.real - lam[2]) > LAX_REALITY_TOL:
        raise SeedConsistencyError(
            f"third-level Lax condition lambda_3 = z_mu + mu h_3 fails: {lam3_check} vs {lam[2]}"
        )
    seed = SeedSolution(
        rho0=rho0,
        lam=lam,
        omega=omega,
        mu=complex(mu),
        z_mu=complex(z),
        f=f,
        alpha_lambda=a,
        hamiltonian=spec,
        lax_hamiltonian=H,
        phi1=_lax_block_vector(rho0, mu, z, H, phi1_norm2),
        model=model,
        notes=tuple(notes),
    )
    res = max(seed.eigenspace_residuals())
    if res > EIGEN_RESIDUAL_TOL:
        raise SeedConsistencyError(f"z_mu eigen-residual {res:.2e} exceeds {EIGEN_RESIDUAL_TOL:.0e}")
    return seed


def _require_density(rho0: np.ndarray) -> None:
    try:
        validate_density(rho0)
    except DensityMatrixError as exc:
        min_eig = float(np.linalg.eigvalsh(rho0).min())
        if "positivity" in exc.invariants:
            raise PositivityError(f"seed rho(0) is not positive: min eigenvalue {min_eig:.6g}", min_eig) from exc
        raise SeedConstraintError(str(exc)) from exc


def build_equispaced_seed(B: float, alpha: float, beta: float, f: Nonlinearity = QUADRATIC) -> SeedSolution:
    """Seed for H = diag(B, 3B, 2B) with mu = alpha + i beta.

    rho(0) has diagonal (1/3 - alpha B, 1/3 + alpha B, 1/3) and off-diagonal
    |beta B| in the coupled block; z_mu = 1/3 - 2 mu B.
    """
    if B == 0:
        raise SeedConstraintError("B must be nonzero")
    if beta == 0:
        raise TrivialDarbouxError("beta = Im(mu) must be nonzero; the Darboux transformation is trivial otherwise")
    mu = complex(alpha, beta)
    r1, r2, r3 = 1 / 3 - alpha * B, 1 / 3 + alpha * B, 1 / 3
    r = abs(beta * B)
    rho0 = np.array([[r1, r, 0], [r, r2, 0], [0, 0, r3]], dtype=complex)
    for name, val in (("rho'_1", r1), ("rho'_2", r2)):
        if val <= 0:
            raise PositivityError(f"{name} = {val:.6g} must be positive", val)
    _require_density(rho0)
    if abs(mu) ** 2 * B**2 >= 1 / 3:
        raise SeedConstraintError(f"|mu|^2 B^2 = {abs(mu) ** 2 * B ** 2:.6g} must be < 1/3")
    spec = HamiltonianSpec.equispaced(B)
    H = np.diag([B, 3 * B, 2 * B]).astype(complex)
    z = 1 / 3 - 2 * mu * B
    return _assemble(rho0, mu, z, H, f, spec, 2.0, "HO", ())


def build_inhomogeneous_seed(
    h1: float,
    h2: float,
    h3: float,
    beta: float,
    rho3: float,
    f: Nonlinearity = QUADRATIC,
    phi1_norm2: float = 2.0,
    model: str = "custom",
) -> SeedSolution:
    """Seed for arbitrary levels with h3 strictly between h1 and h2.

    alpha = (1 - 3 rho3) / (h1 + h2 - 2 h3) is fixed by unit trace, and
    |r|^2 = beta^2 [h3 (h1 + h2 - h3) - h1 h2].  The Lax pair is posed with
    the shifted Hamiltonian H - (h1 + h2)/2, for which
    z_mu = rho3 + (1 - 3 rho3)/2 - i beta [h3 - (h1 + h2)/2].
    """
    if beta == 0:
        raise TrivialDarbouxError("beta = Im(mu) must be nonzero; the Darboux transformation is trivial otherwise")
    r_sq = beta**2 * (h3 * (h1 + h2 - h3) - h1 * h2)
    if not (min(h1, h2) < h3 < max(h1, h2)):
        raise SeedConstraintError(f"h3 = {h3} must lie strictly between h1 = {h1} and h2 = {h2} (|rho|^2 = {r_sq:.6g} < 0)")
    denom = h1 + h2 - 2 * h3
    if denom == 0:
        if rho3 != 1 / 3:
            raise SeedConstraintError("h1 + h2 = 2 h3 requires rho3 = 1/3")
        alpha = 0.0
    else:
        alpha = (1 - 3 * rho3) / denom
    mu = complex(alpha, beta)
    r1 = alpha * (h1 - h3) + rho3
    r2 = alpha * (h2 - h3) + rho3
    for name, val in (("rho_1", r1), ("rho_2", r2), ("rho_3", rho3)):
        if val <= 0:
            raise PositivityError(f"{name} = {val:.6g} must be positive", val)
    if r1 * r2 <= r_sq:
        raise PositivityError(f"rho_1 rho_2 = {r1 * r2:.6g} must exceed |rho|^2 = {r_sq:.6g}", r1 * r2 - r_sq)
    notes = []
    if not beta**2 * (h1 - h2) ** 2 > 4 * r_sq:
        msg = f"beta^2 (h1 - h2)^2 = {beta ** 2 * (h1 - h2) ** 2:.6g} does not exceed 4|rho|^2 = {4 * r_sq:.6g}"
        warnings.warn(msg, stacklevel=2)
        notes.append(msg)
    rho0 = np.array([[r1, np.sqrt(r_sq), 0], [np.sqrt(r_sq), r2, 0], [0, 0, rho3]], dtype=complex)
    _require_density(rho0)
    spec = HamiltonianSpec((h1, h2, h3))
    H = np.diag([h1, h2, h3]).astype(complex) - (h1 + h2) / 2 * np.eye(3)
    z = rho3 + 0.5 * (1 - 3 * rho3) - 1j * beta * (h3 - 0.5 * (h1 + h2))
    return _assemble(rho0, mu, z, H, f, spec, phi1_norm2, model, notes)


def hydrogen_levels(n: int, B: float) -> tuple[float, float, float]:
    """Neighbouring hydrogen-like levels (-B/n^2, -B/(n+2)^2, -B/(n+1)^2)."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if B <= 0:
        raise ValueError("B must be positive")
    return (-B / n**2, -B / (n + 2) ** 2, -B / (n + 1) ** 2)


def hydrogen_d(n: int) -> float:
    return 4.0 * (2 * n + 1) * (n + 1) ** 3


def build_hydrogen_seed(n: int, B: float, beta: float, f: Nonlinearity = QUADRATIC) -> SeedSolution:
    """Hydrogen seed with rho3 = 1/3 (hence alpha = 0) and |phi_1|^2 = 2 d(n)."""
    h1, h2, h3 = hydrogen_levels(n, B)
    return build_inhomogeneous_seed(h1, h2, h3, beta, 1 / 3, f=f, phi1_norm2=2 * hydrogen_d(n), model=f"HA({n})")


def lax_eigenvector(seed: SeedSolution, gamma1: complex, gamma3: complex) -> np.ndarray:
    """phi(0) = gamma1 phi_1(0) + gamma3 omega_3(0)."""
    if gamma1 == 0 and gamma3 == 0:
        raise ValueError("gamma1 and gamma3 cannot both vanish")
    phi = gamma1 * seed.phi1 + gamma3 * seed.omega[:, 2]
    L = seed.lax_matrix()
    res = np.linalg.norm(L @ phi - seed.z_mu * phi) / max(1.0, np.linalg.norm(phi))
    if res > EIGEN_RESIDUAL_TOL:
        raise SeedConsistencyError(f"Lax eigenvector residual {res:.2e} exceeds {EIGEN_RESIDUAL_TOL:.0e}")
    return phi
