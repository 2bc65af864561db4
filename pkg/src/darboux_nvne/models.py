"""Worked models: harmonic-oscillator (HO) and hydrogen-like (HA) 3-level solitons.

For alpha = 0 seeds the interaction-picture solution, written in the
eigenbasis (omega_1, omega_2, omega_3) of rho(0), reads

    [[1/3 + zeta, 0,          xi  ],
     [0,          1/3 - zeta, xi2 ],
     [conj xi,    conj xi2,   1/3 ]]

with zeta = r tanh(theta t + vartheta), xi = Z sech(theta t + vartheta) and
xi2 = Z2 sech(theta t + vartheta).  For real D one has xi2 = conj(xi).

Z carries a unit phase e_hat fixed by the Lax-vector convention in
``seeds``: e_hat = (1 + i s)/sqrt(2) for HO and e(n)/sqrt(d(n)) for HA
(s = sign of beta; e(n) conjugated when beta < 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .nonlinearity import QUADRATIC, Nonlinearity
from .seeds import hydrogen_d, hydrogen_levels

SQRT2 = math.sqrt(2.0)


class UnsupportedNonlinearityError(ValueError):
    pass


class DegenerateVelocityError(ValueError):
    pass


def hydrogen_e(n: int) -> complex:
    """e(n) = (2n+1)(n+2) + i n sqrt((2n+3)(2n+1)); note |e(n)|^2 = d(n)."""
    return complex((2 * n + 1) * (n + 2), n * math.sqrt((2 * n + 3) * (2 * n + 1)))


@dataclass(frozen=True)
class SolitonProfile:
    """tanh/sech switching profile of a 3-level Darboux soliton.

    ``levels`` are the construction levels (h1, h2, h3) of the model; the
    ascending renumbering used for the field is ``np.argsort(levels)``.
    """

    theta: float
    vartheta: float
    Z: complex
    Z2: complex
    rho_mag: float
    D: complex
    model: str
    levels: tuple[float, float, float]
    alpha_lambda: float = 2.0 / 3.0

    def arg(self, t):
        return self.theta * np.asarray(t) + self.vartheta

    @property
    def midpoint(self) -> float:
        return -self.vartheta / self.theta

    def zeta(self, t):
        return self.rho_mag * np.tanh(self.arg(t))

    def sech(self, t):
        return 1.0 / np.cosh(self.arg(t))

    def xi(self, t):
        return self.Z * self.sech(t)

    def xi2(self, t):
        return self.Z2 * self.sech(t)

    @property
    def permutation(self) -> np.ndarray:
        return np.argsort(self.levels, kind="stable")

    @property
    def ascending_levels(self) -> tuple[float, float, float]:
        return tuple(float(self.levels[i]) for i in self.permutation)

    def omega_basis_matrix(self, t: float) -> np.ndarray:
        zeta, xi, xi2 = float(self.zeta(t)), complex(self.xi(t)), complex(self.xi2(t))
        return np.array(
            [[1 / 3 + zeta, 0, xi], [0, 1 / 3 - zeta, xi2], [np.conj(xi), np.conj(xi2), 1 / 3]],
            dtype=complex,
        )


def _switching_D(gamma1: complex, gamma3: complex) -> complex:
    if gamma1 == 0 or gamma3 == 0:
        raise ValueError(
            "gamma1 * gamma3 = 0: the Darboux solution is constant in time, so there is no soliton profile"
        )
    return np.conj(gamma3) * gamma1 / abs(gamma1) ** 2


def _profile(r, beta, D, e_hat, phi_norm, model, levels) -> SolitonProfile:
    phase = D / abs(D)
    return SolitonProfile(
        theta=r**2 / beta,
        vartheta=math.log(abs(D) / phi_norm),
        Z=-phase * e_hat * r / SQRT2,
        Z2=-phase * np.conj(e_hat) * r / SQRT2,
        rho_mag=r,
        D=complex(D),
        model=model,
        levels=tuple(float(h) for h in levels),
    )


def ho_profile(B: float, beta: float, gamma1: complex = 1.0, gamma3: complex = 1.0) -> SolitonProfile:
    """Closed-form profile for the equispaced seed with alpha = 0.

    |rho'| = |beta B|, theta' = |rho'|^2 / beta, vartheta' = ln(|D| / sqrt 2).
    """
    if beta == 0:
        raise ValueError("beta must be nonzero")
    D = _switching_D(gamma1, gamma3)
    r = abs(beta * B)
    s = math.copysign(1.0, beta * B)
    e_hat = complex(1.0, s) / SQRT2
    return _profile(r, beta, D, e_hat, SQRT2, "HO", (B, 3 * B, 2 * B))


def ha_profile(n: int, B: float, beta: float, gamma1: complex = 1.0, gamma3: complex = 1.0) -> SolitonProfile:
    """Closed-form profile for the hydrogen seed (rho3 = 1/3, alpha = 0).

    |rho|^2 = beta^2 B^2 (4n^2 + 8n + 3) / (n^2 (n+2)^2 (n+1)^4),
    vartheta = ln(|D| / sqrt(2 d(n))), d(n) = 4 (2n+1)(n+1)^3.
    """
    if beta == 0:
        raise ValueError("beta must be nonzero")
    D = _switching_D(gamma1, gamma3)
    r = abs(beta) * B * math.sqrt(4 * n * n + 8 * n + 3) / (n * (n + 2) * (n + 1) ** 2)
    d = hydrogen_d(n)
    e = hydrogen_e(n)
    e_hat = (e if beta > 0 else e.conjugate()) / math.sqrt(d)
    return _profile(r, beta, D, e_hat, math.sqrt(2 * d), f"HA({n})", hydrogen_levels(n, B))


def real_normal_form(profile: SolitonProfile) -> SolitonProfile:
    """Profile with the sech amplitude replaced by the real -D r / (sqrt 2 |D|).

    This is the simplified real amplitude of the HO normal form. It drops the
    unit phase e_hat and therefore does NOT reproduce the Darboux solution;
    it is kept to exercise the field/Maxwell machinery on a non-null pulse.
    """
    Z = -profile.D / abs(profile.D) * profile.rho_mag / SQRT2
    return replace(profile, Z=Z, Z2=np.conj(Z), model=profile.model + "-normal-form")


def to_ascending(M, levels) -> np.ndarray:
    """Permute a matrix from construction order to ascending-level order."""
    p = np.argsort(levels, kind="stable")
    return np.asarray(M)[np.ix_(p, p)]


_OMEGA_ALPHA0 = np.array([[1, 1, 0], [1, -1, 0], [0, 0, SQRT2]], dtype=complex).T / SQRT2


def rho_spectral_basis(profile: SolitonProfile, t: float) -> np.ndarray:
    """Interaction-picture solution in the H eigenbasis, ascending levels.

    For the usual ordering h1 < h3 < h2 and real D this is

        [[1/3,          sqrt2 Re xi,    zeta          ],
         [sqrt2 Re xi,  1/3,            -i sqrt2 Im xi],
         [zeta,         i sqrt2 Im xi,  1/3           ]].

    Complex D is handled by using xi2 in place of conj(xi).
    """
    M = profile.omega_basis_matrix(t)
    W = _OMEGA_ALPHA0
    return to_ascending(W @ M @ W.conj().T, profile.levels)


def row_amplitudes(profile: SolitonProfile) -> tuple[complex, complex]:
    """Constant sech amplitudes of the (1,2) and (2,3) entries of rho_spectral_basis."""
    at_peak = replace(profile, vartheta=0.0, theta=1.0)
    R = rho_spectral_basis(at_peak, 0.0)
    return complex(R[0, 1]), complex(R[1, 2])


def decoupling_gauge(levels_ascending) -> tuple[float, float]:
    """(eps1, eps2) = (-(h1 + h3)/2, 3 (h1 + h3)/4) for ascending levels."""
    h1, _, h3 = levels_ascending
    return -(h1 + h3) / 2, 3 * (h1 + h3) / 4


def effective_hamiltonian(
    rho, levels, eps1: float, eps2: float, f: Nonlinearity = QUADRATIC
) -> np.ndarray:
    """h = (H + eps1) rho + rho (H + eps1) + eps2, so that [H, rho^2] = [h, rho]."""
    if not f.is_pure_quadratic:
        raise UnsupportedNonlinearityError("the factorisation [H, rho^2] = [H rho + rho H, rho] needs f(x) = x^2")
    rho = np.asarray(rho, dtype=complex)
    K = np.diag(np.asarray(levels, dtype=float) + eps1).astype(complex)
    return K @ rho + rho @ K + eps2 * np.eye(rho.shape[0])


def diagonal_offset(h, levels, alpha_lambda: float) -> tuple[float, float]:
    """Mean and spread of diag(h) - alpha(lambda) * levels.

    A zero spread means the diagonal equals alpha(lambda) H up to a constant.
    """
    delta = np.real(np.diag(h)) - alpha_lambda * np.asarray(levels, dtype=float)
    return float(delta.mean()), float(delta.max() - delta.min())


@dataclass(frozen=True)
class FieldConfig:
    """McCall-Hahn field parameters in Gaussian units (c defaults to 1)."""

    Ex0: float
    Ey0: float
    omega: float
    v: float = 0.5
    c: float = 1.0

    def __post_init__(self):
        if not (0 < self.v < self.c):
            raise ValueError(f"pulse velocity must satisfy 0 < v < c, got v={self.v}, c={self.c}")

    @property
    def index_term(self) -> float:
        """(c/v)^2 - 1."""
        return (self.c / self.v) ** 2 - 1


def default_carrier(profile: SolitonProfile) -> float:
    h1, h2, _ = profile.ascending_levels
    return profile.alpha_lambda * (h2 - h1)


def carriers(profile: SolitonProfile) -> tuple[float, float]:
    """Row oscillation frequencies alpha(lambda)(h2 - h1) and alpha(lambda)(h3 - h2)."""
    h1, h2, h3 = profile.ascending_levels
    return profile.alpha_lambda * (h2 - h1), profile.alpha_lambda * (h3 - h2)


def field(profile: SolitonProfile, cfg: FieldConfig, t: float) -> np.ndarray:
    s = float(profile.sech(t))
    return np.array([cfg.Ex0 * s * math.cos(cfg.omega * t), cfg.Ey0 * s * math.sin(cfg.omega * t), 0.0])


def dipoles(profile: SolitonProfile, omega: float, t: float) -> tuple[np.ndarray, np.ndarray]:
    """d_x, d_y built from a~(t) and b~(t) with the dressing phases of rho[1]."""
    h1, h2, h3 = profile.ascending_levels
    A12, A23 = row_amplitudes(profile)
    al = profile.alpha_lambda
    a_t = (h2 - h3) * A12 * np.exp(-1j * al * (h1 - h2) * t)
    b_t = (h2 - h1) * A23 * np.exp(-1j * al * (h2 - h3) * t)
    base = np.array([[0, a_t, 0], [np.conj(a_t), 0, b_t], [0, np.conj(b_t), 0]], dtype=complex)
    return base * math.cos(omega * t), base * math.sin(omega * t)


def field_and_dipoles(profile: SolitonProfile, cfg: FieldConfig, t: float):
    """(E(t), d_x(t), d_y(t)); -d.E equals the off-diagonal of h when Ex0 = Ey0 = -1."""
    d_x, d_y = dipoles(profile, cfg.omega, t)
    return field(profile, cfg, t), d_x, d_y


def factorizing_config(profile: SolitonProfile, v: float = 0.5, c: float = 1.0) -> FieldConfig:
    return FieldConfig(Ex0=-1.0, Ey0=-1.0, omega=default_carrier(profile), v=v, c=c)


def factorization_residual(h, E, d_x, d_y) -> float:
    """||(h - diag h) + d . E||_F."""
    h = np.asarray(h, dtype=complex)
    V = h - np.diag(np.diag(h))
    return float(np.linalg.norm(V + d_x * E[0] + d_y * E[1]))


def polarization(rho, d_x, d_y) -> tuple[float, float, float]:
    """(P_x, P_y, largest imaginary part) with P = Tr(rho d)."""
    px, py = np.trace(rho @ d_x), np.trace(rho @ d_y)
    return float(px.real), float(py.real), float(max(abs(px.imag), abs(py.imag)))


def polarization_bracket(profile: SolitonProfile) -> float:
    """(h2 - h3)|A12|^2/2 + (h2 - h1)|A23|^2/2 on ascending levels.

    Equals (h2 - h3) Re(Z)^2 + (h2 - h1) Im(Z)^2 when D is real.
    """
    h1, h2, h3 = profile.ascending_levels
    A12, A23 = row_amplitudes(profile)
    return 0.5 * ((h2 - h3) * abs(A12) ** 2 + (h2 - h1) * abs(A23) ** 2)


def polarization_closed_form(profile: SolitonProfile, omega: float, t: float) -> tuple[float, float]:
    env = 4.0 * float(profile.sech(t)) * polarization_bracket(profile)
    return env * math.cos(omega * t), env * math.sin(omega * t)


def solve_field_amplitude(profile: SolitonProfile, v: float, c: float = 1.0) -> float:
    """E_o(0) from 16 pi [bracket] = ((c/v)^2 - 1) E_o(0)."""
    idx = (c / v) ** 2 - 1
    if idx < 1e-12:
        raise DegenerateVelocityError(f"(c/v)^2 - 1 = {idx:.3e} is too small; the required amplitude diverges")
    return 16 * math.pi * polarization_bracket(profile) / idx


@dataclass(frozen=True)
class MaxwellResult:
    constraint_residual: float
    pde_residual: float
    required_amplitude: float
    bracket: float
    null_pulse: bool


def maxwell_check(cfg: FieldConfig, profile: SolitonProfile, span: float = 10.0, n_points: int = 401) -> MaxwellResult:
    """Steady-state Maxwell check d^2E/ds^2 = 4 pi / ((c/v)^2 - 1) d^2P/ds^2.

    ``constraint_residual`` is the worse of the x and y amplitude mismatches.
    ``pde_residual`` is the maximum over a retarded-time grid (midpoint +- span/theta)
    of the second-central-difference residual, relative to the larger of
    max |d^2E/ds^2| and max |4 pi / ((c/v)^2 - 1) d^2P/ds^2|.
    When field and polarization both vanish identically it is reported as 0
    and ``null_pulse`` is set.
    """
    idx = cfg.index_term
    if idx < 1e-12:
        raise DegenerateVelocityError(f"(c/v)^2 - 1 = {idx:.3e} is too small; the required amplitude diverges")
    lhs = 16 * math.pi * polarization_bracket(profile)
    constraint = max(abs(lhs - idx * cfg.Ex0), abs(lhs - idx * cfg.Ey0))
    kappa = 4 * math.pi / idx
    h = 1e-3 / abs(profile.theta)
    grid = profile.midpoint + np.linspace(-span, span, n_points) / abs(profile.theta)

    def second(fn, s):
        return (fn(s + h) - 2 * fn(s) + fn(s - h)) / h**2

    def E(s):
        return field(profile, cfg, s)[:2]

    def P(s):
        return np.array(polarization_closed_form(profile, cfg.omega, s))

    e2 = np.array([second(E, s) for s in grid])
    p2 = np.array([second(P, s) for s in grid])
    scale = max(np.abs(e2).max(), kappa * np.abs(p2).max())
    res = np.abs(e2 - kappa * p2).max()
    null = scale == 0.0
    return MaxwellResult(
        constraint_residual=float(constraint),
        pde_residual=0.0 if null else float(res / scale),
        required_amplitude=lhs / idx,
        bracket=polarization_bracket(profile),
        null_pulse=bool(null),
    )
