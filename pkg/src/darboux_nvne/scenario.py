"""Run a configured scenario: build the seed, dress it, verify it, export it."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .config import ScenarioConfig
from .darboux import DarbouxSolution
from .matrix_core import commutator
from .models import (
    FieldConfig,
    SolitonProfile,
    default_carrier,
    effective_hamiltonian,
    field_and_dipoles,
    ha_profile,
    ho_profile,
    maxwell_check,
    decoupling_gauge,
    polarization,
    polarization_closed_form,
    real_normal_form,
    solve_field_amplitude,
    to_ascending,
)
from .seeds import (
    SeedSolution,
    build_equispaced_seed,
    build_hydrogen_seed,
    build_inhomogeneous_seed,
)
from .verify import (
    TimeGrid,
    VerificationReport,
    invariant_suite,
    max_nvne_residual,
    mutation_self_test,
    rk4_integrate,
    scaling_property_check,
    shift_property_check,
)

FD_DELTA = 1e-5


def build_seed(cfg: ScenarioConfig) -> SeedSolution:
    s, f = cfg.seed, cfg.nonlinearity
    if cfg.model == "HO":
        return build_equispaced_seed(s["B"], s["alpha"], s["beta"], f=f)
    if cfg.model == "HA":
        return build_hydrogen_seed(s["n"], s["B"], s["beta"], f=f)
    h1, h2, h3 = s["levels"]
    return build_inhomogeneous_seed(h1, h2, h3, s["beta"], s["rho3"], f=f)


def build_profile(cfg: ScenarioConfig) -> SolitonProfile:
    s = cfg.seed
    if cfg.model == "HO":
        return ho_profile(s["B"], s["beta"], cfg.gamma1, cfg.gamma3)
    return ha_profile(s["n"], s["B"], s["beta"], cfg.gamma1, cfg.gamma3)


def resolve_grid(cfg: ScenarioConfig, sol: DarbouxSolution) -> TimeGrid:
    g = cfg.grid
    if g.t_start is not None:
        return TimeGrid(g.t_start, g.t_end, g.n_points)
    center = sol.midpoint if g.center == "midpoint" else float(g.center)
    half = g.half_width
    if g.units == "switching":
        if sol.theta == 0:
            raise ValueError("switching units need a nonzero switching rate")
        half = half / abs(sol.theta)
    return TimeGrid.centered(center, half, g.n_points)


def field_config(cfg: ScenarioConfig, profile: SolitonProfile) -> FieldConfig:
    fs = cfg.field
    omega = default_carrier(profile) if fs.omega is None else fs.omega
    if fs.amplitude == "solve":
        amp = solve_field_amplitude(profile, fs.v, fs.c)
        return FieldConfig(amp, amp, omega, fs.v, fs.c)
    return FieldConfig(fs.Ex0, fs.Ey0, omega, fs.v, fs.c)


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    solution: DarbouxSolution
    grid: TimeGrid
    report: VerificationReport
    permutation: list[int]
    notes: list[str] = field(default_factory=list)
    profile: SolitonProfile | None = None
    field_cfg: FieldConfig | None = None

    def report_document(self) -> dict:
        cfg = self.config
        doc = {
            "scenario": cfg.name,
            "model": self.solution.seed.model,
            "grid": {"t_start": self.grid.t_start, "t_end": self.grid.t_end, "n_points": self.grid.n_points},
            "basis": {
                "description": "exported matrices use ascending energy levels",
                "permutation_from_construction_order": self.permutation,
            },
            "switching_rate": self.solution.theta,
            "midpoint": self.solution.midpoint,
            "notes": self.notes,
        }
        doc.update(self.report.to_dict())
        return doc


def fd_generator_residual(sampler: Callable, generator: Callable, times, delta: float = FD_DELTA) -> float:
    """max_t ||i drho/dt - [G(t), rho(t)]||_F with a central difference."""
    worst = 0.0
    for t in times:
        drho = (sampler(t + delta) - sampler(t - delta)) / (2 * delta)
        rho = sampler(t)
        worst = max(worst, float(np.linalg.norm(1j * drho - commutator(generator(t, rho), rho))))
    return worst


def _check_closed_form(sol, grid, tol, rep, notes):
    times = grid.times
    err = max(float(np.abs(sol.rho_int_closed(t) - sol.rho_int(t)).max()) for t in times)
    lit = max(float(np.abs(sol.rho_int_closed(t, literal=True) - sol.rho_int(t)).max()) for t in times)
    msg = (
        f"diagonal coefficient uses (lambda_i - lambda_k); the (lambda_1 - lambda_k) reading "
        f"deviates by {lit:.3e} and is rejected"
    )
    rep.add("closed_form", err, tol, notes=msg)
    notes.append("closed_form: " + msg)


def _check_profile(sol, profile, grid, tol, rep):
    W = sol.seed.omega
    err = 0.0
    for t in grid.times:
        M = W.conj().T @ sol.rho_int(t) @ W
        err = max(err, float(np.abs(M - profile.omega_basis_matrix(t)).max()))
    rep.add("profile_entries", err, tol)
    rep.add("switching_amplitude", abs(2 * profile.rho_mag - 2 * abs(sol.seed.rho0[0, 1])), 1e-9,
            notes=f"2|rho'| = {2 * profile.rho_mag:.12g}")
    env = max(float(np.abs(np.tanh(profile.arg(t)) ** 2 + profile.sech(t) ** 2 - 1)) for t in grid.times)
    rep.add("envelope_identity", env, 1e-10)


def _check_rk4(sol, cfg, rep):
    rk = cfg.rk4
    f = cfg.nonlinearity
    t0 = sol.midpoint - rk.span / 2
    n = int(round(rk.span / rk.sample_spacing)) + 1
    grid = TimeGrid(t0, t0 + rk.span, n)
    traj = rk4_integrate(sol(t0), sol.H, f, grid, rk.step)
    dev = max(float(np.linalg.norm(traj.states[k] - sol(t))) for k, t in enumerate(grid.times))
    ref = np.linalg.eigvalsh(sol.seed.rho0)
    drift = max(float(np.abs(np.linalg.eigvalsh(0.5 * (S + S.conj().T)) - ref).max()) for S in traj.states)
    rep.add("rk4_vs_closed_form", dev, cfg.tolerances["rk4"], notes=f"step {rk.step}, span {rk.span}")
    rep.add("rk4_eigenvalue_drift", drift, cfg.tolerances["rk4"], notes=f"trace drift {traj.trace_drift:.3e}")


def _check_factorization(sol, profile_levels, grid, tol, rep):
    perm = np.argsort(profile_levels, kind="stable")
    levels = [float(profile_levels[i]) for i in perm]

    def sampler(t):
        return to_ascending(sol(t), profile_levels)

    rng = np.random.default_rng(20240611)
    decoupled = decoupling_gauge(levels)
    choices = {"decoupled": decoupled, "zero": (0.0, 0.0), "random": tuple(float(x) for x in rng.uniform(-2, 2, 2))}
    for label, (e1, e2) in choices.items():
        res = fd_generator_residual(sampler, lambda t, rho: effective_hamiltonian(rho, levels, e1, e2), grid.times)
        rep.add(f"factorization_{label}", res, tol["factorization"], notes=f"eps1={e1:.6g}, eps2={e2:.6g}")
    h13 = max(abs(effective_hamiltonian(sampler(t), levels, *decoupled)[0, 2]) for t in grid.times)
    rep.add("gauge_h13", h13, tol["gauge_h13"])


def _check_maxwell(cfg, profile, fcfg, rep, notes):
    res = maxwell_check(fcfg, profile)
    tol = cfg.tolerances
    rep.add("maxwell_constraint_residual", res.constraint_residual, tol["maxwell_constraint"],
            notes=f"required amplitude {res.required_amplitude:.6g}, Ex0={fcfg.Ex0:.6g}, Ey0={fcfg.Ey0:.6g}")
    rep.add("maxwell_pde_residual", res.pde_residual, tol["maxwell_pde"],
            notes="null pulse: field and polarization vanish" if res.null_pulse else "")
    if res.null_pulse:
        notes.append(
            f"maxwell: polarization bracket is {res.bracket:.3e}; the constraint forces a zero field amplitude"
        )


def run_checks(cfg: ScenarioConfig, sol: DarbouxSolution, grid: TimeGrid) -> tuple[VerificationReport, list[str], SolitonProfile | None, FieldConfig | None]:
    rep = VerificationReport()
    notes: list[str] = []
    tol = cfg.tolerances
    f = cfg.nonlinearity
    ref = np.linalg.eigvalsh(sol.seed.rho0)
    profile = build_profile(cfg) if cfg.has_profile and ("profile" in cfg.checks or cfg.field) else None
    field_profile = None
    fcfg = None
    if cfg.field is not None and profile is not None:
        field_profile = real_normal_form(profile) if cfg.field.profile == "normal_form" else profile
        fcfg = field_config(cfg, field_profile)

    if "invariants" in cfg.checks:
        inv = invariant_suite(sol, grid, ref, tol["trace"], tol["hermiticity"], tol["positivity"], tol["eigenvalue_drift"])
        rep.extend(inv)
    if "nvne_residual" in cfg.checks:
        rep.add("nvne_residual", max_nvne_residual(sol, sol.H, f, grid.times, FD_DELTA), tol["nvne_residual"],
                notes=f"central difference, delta={FD_DELTA}")
    if "closed_form" in cfg.checks:
        _check_closed_form(sol, grid, tol["closed_form"], rep, notes)
    if "profile" in cfg.checks:
        _check_profile(sol, profile, grid, tol["profile"], rep)
    if "rk4" in cfg.checks:
        _check_rk4(sol, cfg, rep)
    if "factorization" in cfg.checks:
        levels = np.real(np.diag(sol.H))
        _check_factorization(sol, levels, grid, tol, rep)
    if "maxwell" in cfg.checks:
        _check_maxwell(cfg, field_profile, fcfg, rep, notes)
    if "scaling" in cfg.checks:
        k = f.degree
        rep.extend(scaling_property_check(sol, sol.H, k, cfg.scaling_tau, grid, tol["scaling"], FD_DELTA))
    if "shift" in cfg.checks:
        srep, residuals = shift_property_check(sol, sol.H, cfg.shift_s, f, grid, tol["shift"], FD_DELTA)
        rep.extend(srep)
        notes.append("shift: " + ", ".join(f"{k} residual {v:.3e}" for k, v in residuals.items()))
    if "mutation" in cfg.checks:
        flipped = mutation_self_test(sol, sol.H, f, grid, 1e-3, ref)
        undetected = [f"({i + 1},{j + 1})" for (i, j), names in flipped.items() if not names]
        rep.add("mutation_self_test", float(len(undetected)), 0.0,
                notes="all entries detected" if not undetected else "undetected: " + " ".join(undetected))
    return rep, notes, field_profile, fcfg


def run_scenario(cfg: ScenarioConfig) -> ScenarioResult:
    seed = build_seed(cfg)
    sol = DarbouxSolution.from_seed(seed, cfg.gamma1, cfg.gamma3)
    grid = resolve_grid(cfg, sol)
    levels = np.real(np.diag(sol.H))
    perm = [int(i) for i in np.argsort(levels, kind="stable")]
    rep, notes, prof, fcfg = run_checks(cfg, sol, grid)
    notes = list(seed.notes) + notes
    return ScenarioResult(cfg, sol, grid, rep, perm, notes, prof, fcfg)


# ---------------------------------------------------------------- export

def _upper(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i, n)]


def timeseries_header(n: int) -> list[str]:
    cols = ["t"]
    for i, j in _upper(n):
        cols += [f"re_{i + 1}{j + 1}", f"im_{i + 1}{j + 1}"]
    return cols


def _fmt(x: float) -> str:
    return "%.17g" % x


def export_timeseries(times, states, path: Path | str) -> Path:
    """CSV of t and the real/imaginary parts of the upper triangle, row-major."""
    path = Path(path)
    states = np.asarray(states)
    n = states.shape[1]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(timeseries_header(n))
            for t, S in zip(times, states):
                row = [_fmt(t)]
                for i, j in _upper(n):
                    row += [_fmt(S[i, j].real), _fmt(S[i, j].imag)]
                w.writerow(row)
    except OSError as exc:
        raise OSError(f"cannot write time series to {path}: {exc.strerror or exc}") from exc
    return path


def read_timeseries(path: Path | str) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of export_timeseries; rebuilds full Hermitian matrices."""
    with Path(path).open() as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    m = (len(header) - 1) // 2
    n = int(round((np.sqrt(8 * m + 1) - 1) / 2))
    if timeseries_header(n) != header:
        raise ValueError(f"{path}: unexpected header {header[:4]}...")
    times = np.array([float(r[0]) for r in body])
    states = np.zeros((len(body), n, n), dtype=complex)
    for k, r in enumerate(body):
        vals = [float(x) for x in r[1:]]
        for idx, (i, j) in enumerate(_upper(n)):
            z = complex(vals[2 * idx], vals[2 * idx + 1])
            if i != j:
                states[k, j, i] = z.conjugate()
            states[k, i, j] = z
    return times, states


def export_series(rows, path: Path | str) -> Path:
    """Tidy long-format CSV with columns t, series, value."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "series", "value"])
            for t, name, val in rows:
                w.writerow([_fmt(t), name, _fmt(val)])
    except OSError as exc:
        raise OSError(f"cannot write series to {path}: {exc.strerror or exc}") from exc
    return path


def series_rows(result: ScenarioResult) -> list[tuple[float, str, float]]:
    """zeta and |xi| from the engine (omega basis); E_x and P_x when a field is configured.

    P_x is Tr(rho d_x) for the true solution and the closed form for the real normal-form profile.
    """
    sol = result.solution
    W = sol.seed.omega
    rows = []
    for t in result.grid.times:
        M = W.conj().T @ sol.rho_int(t) @ W
        rows.append((t, "zeta", float((M[0, 0].real - M[1, 1].real) / 2)))
        rows.append((t, "abs_xi", float(abs(M[0, 2]))))
        if result.field_cfg is not None:
            E, dx, dy = field_and_dipoles(result.profile, result.field_cfg, t)
            if result.config.field.profile == "normal_form":
                px, _ = polarization_closed_form(result.profile, result.field_cfg.omega, t)
            else:
                px, _, _ = polarization(to_ascending(sol(t), np.real(np.diag(sol.H))), dx, dy)
            rows.append((t, "E_x", float(E[0])))
            rows.append((t, "P_x", px))
    return rows


def ascending_states(result: ScenarioResult) -> np.ndarray:
    sol = result.solution
    levels = np.real(np.diag(sol.H))
    return np.array([to_ascending(sol(t), levels) for t in result.grid.times])


def write_report(result: ScenarioResult, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(result.report_document(), indent=2) + "\n")
    return path


def write_artifacts(result: ScenarioResult, timeseries: bool = True) -> dict[str, Path]:
    out = result.config.output
    paths = {}
    if timeseries:
        paths["timeseries"] = export_timeseries(result.grid.times, ascending_states(result), out.timeseries_path)
        paths["series"] = export_series(series_rows(result), out.series_path)
    paths["report"] = write_report(result, out.report_path)
    return paths
