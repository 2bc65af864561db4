"""Independent oracles for NvNE solutions.

Everything here treats a solution as an opaque sampler t -> rho(t) and checks
it against the equation i drho/dt = [H, f(rho)] directly (finite differences,
an RK4 integrator) or against conserved quantities.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable

import numpy as np

from .matrix_core import commutator, hermiticity_defect
from .nonlinearity import Nonlinearity

Sampler = Callable[[float], np.ndarray]


@dataclass(frozen=True)
class TimeGrid:
    t_start: float
    t_end: float
    n_points: int

    def __post_init__(self):
        if not self.t_start < self.t_end:
            raise ValueError(f"t_start ({self.t_start}) must be < t_end ({self.t_end})")
        if self.n_points < 2:
            raise ValueError("n_points must be >= 2")

    @classmethod
    def centered(cls, center: float, half_width: float, n_points: int) -> "TimeGrid":
        return cls(center - half_width, center + half_width, n_points)

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_points)

    @property
    def spacing(self) -> float:
        return (self.t_end - self.t_start) / (self.n_points - 1)


@dataclass
class CheckRecord:
    name: str
    tolerance: float
    measured: float
    passed: bool
    notes: str = ""


@dataclass
class VerificationReport:
    """Ordered, name-unique collection of check records."""

    records: list[CheckRecord] = field(default_factory=list)

    def add(self, name: str, measured: float, tolerance: float, notes: str = "", passed: bool | None = None) -> CheckRecord:
        if name in self.names():
            raise ValueError(f"check {name!r} registered twice")
        if passed is None:
            passed = bool(np.isfinite(measured) and measured <= tolerance)
        rec = CheckRecord(name, float(tolerance), float(measured), bool(passed), notes)
        self.records.append(rec)
        return rec

    def extend(self, other: "VerificationReport", prefix: str = "") -> None:
        for r in other.records:
            self.add(prefix + r.name, r.measured, r.tolerance, r.notes, r.passed)

    def names(self) -> list[str]:
        return [r.name for r in self.records]

    def __getitem__(self, name: str) -> CheckRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failed(self) -> list[str]:
        return [r.name for r in self.records if not r.passed]

    def to_dict(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "checks": [
                {**asdict(r), "verdict": "pass" if r.passed else "fail"} for r in self.records
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def summary(self) -> str:
        lines = []
        for r in self.records:
            verdict = "PASS" if r.passed else "FAIL"
            lines.append(f"[{verdict}] {r.name}: {r.measured:.3e} (tol {r.tolerance:.1e}) {r.notes}".rstrip())
        return "\n".join(lines)


def nvne_rhs(rho, H, f: Nonlinearity) -> np.ndarray:
    """drho/dt = -i [H, f(rho)]."""
    return -1j * commutator(H, f.of_matrix(rho))


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    trace_drift: float

    def __call__(self, t: float) -> np.ndarray:
        k = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[k] - t) > 1e-9 * max(1.0, abs(t)):
            raise KeyError(f"t={t} is not a sampled time")
        return self.states[k]


def rk4_integrate(rho_start, H, f: Nonlinearity, grid: TimeGrid, step: float) -> Trajectory:
    """Classic fourth-order Runge-Kutta for i drho/dt = [H, f(rho)].

    The state is re-Hermitised after every step; the trace is left alone so
    its drift measures integrator quality.
    """
    rho = np.array(rho_start, dtype=complex)
    H = np.asarray(H, dtype=complex)
    if step <= 0 or step > grid.spacing * (1 + 1e-12):
        raise ValueError(f"step {step} must be positive and no larger than the grid spacing {grid.spacing}")
    per_sample = grid.spacing / step
    n_sub = int(round(per_sample))
    if abs(per_sample - n_sub) > 1e-9 * per_sample:
        raise ValueError(f"grid spacing {grid.spacing} is not an integer multiple of step {step}")
    stiffness = np.linalg.norm(nvne_rhs(rho, H, f)) * step
    if stiffness >= 0.1:
        raise ValueError(f"||[H, f(rho)]|| * step = {stiffness:.3g} must be < 0.1")
    h = grid.spacing / n_sub
    coeffs = list(reversed(f.polynomial.coef))
    eye = np.eye(rho.shape[0], dtype=complex)

    def rhs(r):
        # Horner for f(r), then -i [H, f(r)]; hoisted out of the loop for speed
        fr = coeffs[0] * eye
        for c in coeffs[1:]:
            fr = fr @ r + c * eye
        return -1j * (H @ fr - fr @ H)

    tr0 = np.trace(rho)
    states = [rho.copy()]
    drift = 0.0
    for _ in range(grid.n_points - 1):
        for _ in range(n_sub):
            k1 = rhs(rho)
            k2 = rhs(rho + 0.5 * h * k1)
            k3 = rhs(rho + 0.5 * h * k2)
            k4 = rhs(rho + h * k3)
            rho = rho + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
            rho = 0.5 * (rho + rho.conj().T)
        drift = max(drift, abs(np.trace(rho) - tr0))
        states.append(rho.copy())
    return Trajectory(grid.times, np.array(states), float(drift))


def nvne_residual_fd(rho_sampler: Sampler, H, f: Nonlinearity, t: float, delta: float = 1e-5) -> float:
    """||i (rho(t+d) - rho(t-d)) / 2d - [H, f(rho(t))]||_F."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    drho = (rho_sampler(t + delta) - rho_sampler(t - delta)) / (2 * delta)
    return float(np.linalg.norm(1j * drho - commutator(H, f.of_matrix(rho_sampler(t)))))


def max_nvne_residual(rho_sampler: Sampler, H, f: Nonlinearity, times: Iterable[float], delta: float = 1e-5) -> float:
    return max(nvne_residual_fd(rho_sampler, H, f, t, delta) for t in times)


def invariant_suite(
    rho_sampler: Sampler,
    grid: TimeGrid,
    reference_eigenvalues=None,
    trace_tol: float = 1e-12,
    herm_tol: float = 1e-12,
    pos_tol: float = 1e-12,
    drift_tol: float = 1e-10,
) -> VerificationReport:
    """Trace, hermiticity, positivity, eigenvalue drift and Tr(rho^2) constancy over a grid.

    Eigenvalue drift is measured against ``reference_eigenvalues`` when given,
    otherwise against the spectrum at the first grid point.
    """
    states = [rho_sampler(t) for t in grid.times]
    herm = [0.5 * (R + R.conj().T) for R in states]
    ref = np.sort(np.asarray(reference_eigenvalues, dtype=float)) if reference_eigenvalues is not None else np.linalg.eigvalsh(herm[0])
    eigs = [np.linalg.eigvalsh(R) for R in herm]
    purity0 = float(np.trace(herm[0] @ herm[0]).real)
    rep = VerificationReport()
    rep.add("trace", max(abs(np.trace(R) - 1) for R in states), trace_tol)
    rep.add("hermiticity", max(hermiticity_defect(R) for R in states), herm_tol)
    min_eig = min(float(e.min()) for e in eigs)
    rep.add("positivity", max(0.0, -min_eig), pos_tol, notes=f"min eigenvalue {min_eig:.3e}")
    rep.add("eigenvalue_drift", max(float(np.abs(e - ref).max()) for e in eigs), drift_tol)
    rep.add("purity_drift", max(abs(float(np.trace(R @ R).real) - purity0) for R in herm), drift_tol)
    return rep


def solution_report(
    rho_sampler: Sampler,
    H,
    f: Nonlinearity,
    grid: TimeGrid,
    reference_eigenvalues=None,
    residual_tol: float = 1e-6,
    delta: float = 1e-5,
) -> VerificationReport:
    """invariant_suite plus the finite-difference NvNE residual."""
    rep = invariant_suite(rho_sampler, grid, reference_eigenvalues)
    rep.add("nvne_residual", max_nvne_residual(rho_sampler, H, f, grid.times, delta), residual_tol)
    return rep


def scaling_property_check(
    rho_sampler: Sampler, H, k: int, tau: float, grid: TimeGrid, tol: float = 1e-6, delta: float = 1e-5
) -> VerificationReport:
    """Scaling property for f(x) = x^k.

    From a unit-trace solution rho build the predensity sigma(t) = tau rho(tau^(k-1) t),
    which solves the same equation with Tr sigma = tau; then the map
    sigma / Tr sigma evaluated at t / (Tr sigma)^(k-1) must solve it again.
    """
    f = Nonlinearity.power(k)

    def sigma(t):
        return tau * rho_sampler(tau ** (k - 1) * t)

    def rescaled(t):
        s = sigma(t / tau ** (k - 1))
        return s / np.trace(s).real

    times = grid.times / tau ** (k - 1)
    rep = VerificationReport()
    rep.add(f"predensity_residual_k{k}", max_nvne_residual(sigma, H, f, times, delta), tol,
            notes=f"Tr sigma = {tau}")
    rep.add(f"rescaled_residual_k{k}", max_nvne_residual(rescaled, H, f, grid.times, delta), tol)
    return rep


def shift_property_check(
    rho_sampler: Sampler, H, s: float, f: Nonlinearity, grid: TimeGrid, tol: float = 1e-6, delta: float = 1e-5
) -> tuple[VerificationReport, dict[str, float]]:
    """Test rho + s I against g(x) = f(x + s) and g(x) = f(x - s).

    Returns a report whose single record passes if at least one reading
    holds, plus the residual of each reading.
    """
    n = rho_sampler(grid.t_start).shape[0]

    def shifted(t):
        return rho_sampler(t) + s * np.eye(n)

    residuals = {
        "g(x)=f(x+s)": max_nvne_residual(shifted, H, f.composed_shift(s), grid.times, delta),
        "g(x)=f(x-s)": max_nvne_residual(shifted, H, f.composed_shift(-s), grid.times, delta),
    }
    passing = [name for name, r in residuals.items() if r < tol]
    rep = VerificationReport()
    rep.add(
        "shift_property",
        min(residuals.values()),
        tol,
        notes="passing readings: " + (", ".join(passing) if passing else "none"),
    )
    return rep, residuals


def mutation_self_test(
    rho_sampler: Sampler, H, f: Nonlinearity, grid: TimeGrid, eps: float = 1e-3, reference_eigenvalues=None
) -> dict[tuple[int, int], list[str]]:
    """Perturb each entry by eps and list the checks that flip to failure."""
    n = rho_sampler(grid.t_start).shape[0]
    flipped = {}
    for i in range(n):
        for j in range(n):
            E = np.zeros((n, n), dtype=complex)
            E[i, j] = eps

            def corrupted(t, E=E):
                return rho_sampler(t) + E

            rep = solution_report(corrupted, H, f, grid, reference_eigenvalues)
            flipped[(i, j)] = rep.failed()
    return flipped


def richardson_ratio(err_coarse: float, err_fine: float) -> float:
    return err_coarse / err_fine if err_fine > 0 else math.inf
