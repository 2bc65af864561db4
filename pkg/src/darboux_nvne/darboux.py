"""Darboux dressing of a 3-level seed.

Two independent routes produce the interaction-picture solution rho_int[1](t):

* the sandwich route: build psi(t) in closed form, form the rank-one
  projector P_int = |psi><psi| / <psi|psi>, and conjugate rho(0) by
  1 + ((mu - conj mu)/conj mu) P_int;
* the coefficient route: expand the same product in the eigenbasis of
  rho(0) with explicit coefficients c_i, c_ij over the denominator F(t)^2.

The sandwich route is treated as ground truth. The full solution is
rho[1](t) = V rho_int[1](t) V^dagger with V = exp(-i alpha(lambda) H t).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .matrix_core import unitary_exp
from .seeds import SeedSolution, lax_eigenvector

F_SINGULAR_TOL = 1e-14


class SingularDenominatorError(ArithmeticError):
    pass


def beta_of_lambda(seed: SeedSolution) -> np.ndarray:
    """beta(lambda_i) = f'(lambda_i) - alpha(lambda) (lambda_i - z_mu), with f' = f - f(lambda_3)."""
    # f(l) - f(lambda_3) as (l - lambda_3) times a divided difference: no cancellation
    l3 = seed.lam[2]
    return np.array(
        [(l - l3) * seed.f.divided_difference(l, l3) - seed.alpha_lambda * (l - seed.z_mu) for l in seed.lam],
        dtype=complex,
    )


@dataclass(frozen=True)
class LaxSolution:
    """Closed-form Lax data for one choice of (gamma1, gamma3)."""

    seed: SeedSolution
    gamma1: complex
    gamma3: complex
    phi0: np.ndarray
    u: np.ndarray  # <omega_i | psi(0)>
    beta: np.ndarray
    a: np.ndarray
    b: np.ndarray  # full b_ij matrix

    @property
    def mu(self) -> complex:
        return self.seed.mu

    @property
    def b_block(self) -> complex:
        """The common exponent b = b_11 = b_22 = b_12 = b_21."""
        return complex(self.b[0, 0])

    @property
    def theta(self) -> float:
        """Switching rate: exp(-i b t) = exp(-2 theta t)."""
        return float((1j * self.b_block).real) / 2

    def D(self) -> complex:
        return np.conj(self.gamma3) * self.gamma1 / abs(self.gamma1) ** 2


def build_lax(seed: SeedSolution, gamma1: complex = 1.0, gamma3: complex = 1.0) -> LaxSolution:
    if seed.mu == 0:
        raise ValueError("mu = 0 is not a valid spectral parameter")
    phi0 = lax_eigenvector(seed, gamma1, gamma3)
    u = seed.omega.conj().T @ phi0
    beta = beta_of_lambda(seed)
    a = np.outer(u, u.conj())
    b = beta[:, None] / seed.mu - beta.conj()[None, :] / np.conj(seed.mu)
    return LaxSolution(seed, complex(gamma1), complex(gamma3), phi0, u, beta, a, b)


def evolve_psi(lax: LaxSolution, t: float) -> np.ndarray:
    """psi(t) = sum_i exp(-i beta_i t / mu) P_i(0) psi(0); not norm-preserving."""
    return lax.seed.omega @ (np.exp(-1j * lax.beta * t / lax.mu) * lax.u)


def evolve_phi(lax: LaxSolution, t: float) -> np.ndarray:
    """Lax vector in the laboratory frame, phi(t) = V psi(t)."""
    V = unitary_exp(lax.seed.lax_hamiltonian, lax.seed.alpha_lambda * t)
    return V @ evolve_psi(lax, t)


def norm_factor(lax: LaxSolution, t: float) -> complex:
    """F(t) = sum_i a_ii exp(-i b_ii t) = exp(-i b t)(a_11 + a_22) + a_33."""
    return complex(np.sum(np.diag(lax.a) * np.exp(-1j * np.diag(lax.b) * t)))


def _checked_F(lax: LaxSolution, t: float) -> complex:
    F = norm_factor(lax, t)
    if abs(F) < F_SINGULAR_TOL:
        raise SingularDenominatorError(f"|F({t})| = {abs(F):.2e} is below {F_SINGULAR_TOL:.0e}")
    return F


def p_int(lax: LaxSolution, t: float) -> np.ndarray:
    """P_int(t) = sum_ij a_ij exp(-i b_ij t) P_ij(0) / F(t)."""
    F = _checked_F(lax, t)
    A = lax.a * np.exp(-1j * lax.b * t)
    W = lax.seed.omega
    return W @ A @ W.conj().T / F


def darboux_sandwich(rho, mu: complex, P, mu3: complex | None = None) -> np.ndarray:
    """(1 + (mu3 - conj mu)/conj mu P) rho (1 + (conj mu - mu3)/mu3 P).

    With ``mu3`` left at ``mu`` this is the isospectral, density-preserving
    specialisation; other values give the general (non-Hermitian) map.
    """
    mu = complex(mu)
    mu3 = mu if mu3 is None else complex(mu3)
    rho = np.asarray(rho, dtype=complex)
    I = np.eye(rho.shape[0], dtype=complex)
    left = I + (mu3 - mu.conjugate()) / mu.conjugate() * P
    right = I + (mu.conjugate() - mu3) / mu3 * P
    return left @ rho @ right


def closed_form_coefficients(lax: LaxSolution, t: float, literal: bool = False) -> tuple[complex, np.ndarray]:
    """Return (F(t), C) where C holds c_i on the diagonal and c_ij off it.

    ``literal=True`` reproduces the literal c_i with (lambda_1 - lambda_k) in
    its second term instead of (lambda_i - lambda_k); only row i = 1 agrees.
    """
    mu, mub = lax.mu, np.conj(lax.mu)
    lam = lax.seed.lam
    A = lax.a * np.exp(-1j * lax.b * t)
    F = _checked_F(lax, t)
    C = np.zeros((3, 3), dtype=complex)
    for i in range(3):
        j, k = [m for m in range(3) if m != i]
        second = lam[0] if literal else lam[i]
        C[i, i] = (mu - mub) * A[i, i] * ((lam[i] - lam[j]) * A[j, j] + (second - lam[k]) * A[k, k])
        for j in range(3):
            if j == i:
                continue
            k = 3 - i - j
            C[i, j] = A[i, j] * (
                (lam[j] - lam[i]) * (mu * A[i, i] + mub * A[j, j])
                + ((mub - mu) * lam[k] + mu * lam[j] - mub * lam[i]) * A[k, k]
            )
    return F, C


def rho1_closed_form(lax: LaxSolution, t: float, literal: bool = False) -> np.ndarray:
    """rho_int[1](t) = rho(0) + (mu - conj mu)/(F^2 |mu|^2) sum C_ij P_ij(0)."""
    F, C = closed_form_coefficients(lax, t, literal=literal)
    mu = lax.mu
    W = lax.seed.omega
    return lax.seed.rho0 + (mu - np.conj(mu)) / (F**2 * abs(mu) ** 2) * (W @ C @ W.conj().T)


def dress(rho_int, H, alpha_lambda: float, t: float) -> np.ndarray:
    """V rho_int V^dagger with V = exp(-i alpha(lambda) H t)."""
    V = unitary_exp(H, alpha_lambda * t)
    return V @ np.asarray(rho_int, dtype=complex) @ V.conj().T


@dataclass(frozen=True)
class DarbouxSolution:
    """Sampler for the dressed solution rho[1](t) and its building blocks.

    Calling the object with a time returns rho[1](t) from the sandwich route.
    All methods are pure functions of t and can be evaluated concurrently.
    """

    lax: LaxSolution

    @classmethod
    def from_seed(cls, seed: SeedSolution, gamma1: complex = 1.0, gamma3: complex = 1.0) -> "DarbouxSolution":
        return cls(build_lax(seed, gamma1, gamma3))

    @property
    def seed(self) -> SeedSolution:
        return self.lax.seed

    @property
    def H(self) -> np.ndarray:
        return self.seed.lax_hamiltonian

    @property
    def theta(self) -> float:
        return self.lax.theta

    @property
    def midpoint(self) -> float:
        """Time at which exp(-i b t)(a_11 + a_22) = a_33 (tanh argument zero)."""
        a = np.real(np.diag(self.lax.a))
        if a[2] == 0 or a[0] + a[1] == 0 or self.lax.theta == 0:
            return 0.0
        return float(np.log((a[0] + a[1]) / a[2]) / (2 * self.lax.theta))

    def F(self, t: float) -> complex:
        return norm_factor(self.lax, t)

    def p_int(self, t: float) -> np.ndarray:
        return p_int(self.lax, t)

    def rho_int(self, t: float) -> np.ndarray:
        return darboux_sandwich(self.seed.rho0, self.lax.mu, p_int(self.lax, t))

    def rho_int_closed(self, t: float, literal: bool = False) -> np.ndarray:
        return rho1_closed_form(self.lax, t, literal=literal)

    def rho(self, t: float) -> np.ndarray:
        return dress(self.rho_int(t), self.H, self.seed.alpha_lambda, t)

    def rho_closed(self, t: float) -> np.ndarray:
        return dress(self.rho_int_closed(t), self.H, self.seed.alpha_lambda, t)

    def seed_rho(self, t: float) -> np.ndarray:
        """The undressed seed trajectory rho(t) = V rho(0) V^dagger."""
        return dress(self.seed.rho0, self.H, self.seed.alpha_lambda, t)

    def __call__(self, t: float) -> np.ndarray:
        return self.rho(t)

    def sample(self, times: Iterable[float]) -> np.ndarray:
        return np.array([self.rho(t) for t in times])
