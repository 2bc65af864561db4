"""Scenario configuration: one YAML file holds every free parameter of a run."""

from __future__ import annotations

import copy
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .nonlinearity import Nonlinearity

KNOWN_CHECKS = (
    "invariants",
    "nvne_residual",
    "closed_form",
    "profile",
    "rk4",
    "factorization",
    "maxwell",
    "scaling",
    "shift",
    "mutation",
)

DEFAULT_TOLERANCES = {
    "trace": 1e-12,
    "hermiticity": 1e-12,
    "positivity": 1e-12,
    "eigenvalue_drift": 1e-10,
    "nvne_residual": 1e-6,
    "closed_form": 1e-10,
    "profile": 1e-10,
    "rk4": 1e-7,
    "factorization": 1e-6,
    "gauge_h13": 1e-12,
    "maxwell_constraint": 1e-9,
    "maxwell_pde": 1e-4,
    "scaling": 1e-6,
    "shift": 1e-6,
}


class ConfigError(ValueError):
    """Invalid scenario configuration; ``field`` is a dotted key path."""

    def __init__(self, field: str, message: str, line: int | None = None):
        self.field = field
        self.line = line
        where = f"{field}" + (f" (line {line})" if line is not None else "")
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class GridSpec:
    n_points: int
    t_start: float | None = None
    t_end: float | None = None
    center: float | str = "midpoint"
    half_width: float = 10.0
    units: str = "time"  # or "switching": half_width measured in 1/theta


@dataclass(frozen=True)
class FieldSpec:
    v: float = 0.5
    c: float = 1.0
    amplitude: str = "solve"  # or "explicit"
    Ex0: float | None = None
    Ey0: float | None = None
    omega: float | None = None
    profile: str = "solution"  # or "normal_form"


@dataclass(frozen=True)
class RK4Spec:
    step: float = 1e-3
    span: float = 20.0
    sample_spacing: float = 0.1


@dataclass(frozen=True)
class OutputSpec:
    directory: Path
    timeseries: str = "solution.csv"
    series: str = "series.csv"
    report: str = "report.json"

    @property
    def timeseries_path(self) -> Path:
        return self.directory / self.timeseries

    @property
    def series_path(self) -> Path:
        return self.directory / self.series

    @property
    def report_path(self) -> Path:
        return self.directory / self.report


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    model: str  # "HO", "HA" or "custom"
    nonlinearity: Nonlinearity
    seed: dict[str, Any]
    gamma1: complex
    gamma3: complex
    grid: GridSpec
    output: OutputSpec
    checks: tuple[str, ...] = ()
    tolerances: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    field: FieldSpec | None = None
    rk4: RK4Spec = RK4Spec()
    scaling_tau: float = 2.0
    shift_s: float = 0.1

    @property
    def has_profile(self) -> bool:
        """Closed-form tanh/sech profiles exist for HO/HA seeds with alpha = 0."""
        return self.model == "HA" or (self.model == "HO" and self.seed.get("alpha", 0.0) == 0.0)


BUNDLED_EXAMPLES: dict[str, dict[str, Any]] = {
    "ho_quadratic": {
        "name": "ho_quadratic",
        "model": "HO",
        "nonlinearity": {"power": 2},
        "seed": {"B": 1.0, "alpha": 0.0, "beta": 0.3},
        "darboux": {"gamma1": [1.0, 0.0], "gamma3": [1.0, 0.0]},
        "grid": {"center": "midpoint", "half_width": 10.0, "n_points": 201},
        "field": {"v": 0.5, "c": 1.0, "amplitude": "solve", "profile": "solution"},
        "checks": list(KNOWN_CHECKS),
        "rk4": {"step": 1e-3, "span": 20.0, "sample_spacing": 0.1},
        "output": {"directory": "out/ho_quadratic"},
    },
    "ha_quadratic": {
        "name": "ha_quadratic",
        "model": "HA",
        "nonlinearity": {"power": 2},
        "seed": {"n": 1, "B": 1.0, "beta": 0.1},
        "darboux": {"gamma1": [1.0, 0.0], "gamma3": [1.0, 0.0]},
        "grid": {"center": "midpoint", "half_width": 5.0, "units": "switching", "n_points": 201},
        "field": {"v": 0.5, "c": 1.0, "amplitude": "solve", "profile": "solution"},
        "checks": ["invariants", "nvne_residual", "closed_form", "profile", "rk4", "factorization", "maxwell", "mutation"],
        "rk4": {"step": 1e-3, "span": 20.0, "sample_spacing": 0.1},
        "output": {"directory": "out/ha_quadratic"},
    },
}


def bundled_example(name: str) -> dict[str, Any]:
    return copy.deepcopy(BUNDLED_EXAMPLES[name])


def _line_index(node, path=(), index=None) -> dict[tuple, int]:
    """Map key paths to 1-based line numbers from a composed YAML node tree."""
    if index is None:
        index = {}
    index[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            _line_index(v, path + (k.value,), index)
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            _line_index(v, path + (i,), index)
    return index


class _Reader:
    def __init__(self, lines: dict[tuple, int] | None):
        self.lines = lines or {}

    def fail(self, path: tuple, message: str) -> ConfigError:
        line = None
        for k in range(len(path), -1, -1):
            if path[:k] in self.lines:
                line = self.lines[path[:k]]
                break
        return ConfigError(".".join(str(p) for p in path) or "<root>", message, line)

    def section(self, data: dict, key: str, path: tuple = (), required: bool = True) -> dict:
        if key not in data:
            if required:
                raise self.fail(path + (key,), "missing required section")
            return {}
        val = data[key]
        if not isinstance(val, dict):
            raise self.fail(path + (key,), "must be a mapping")
        return val

    def number(self, data: dict, key: str, path: tuple, default=None, positive=False, integer=False):
        if key not in data:
            if default is None:
                raise self.fail(path + (key,), "missing required value")
            return default
        val = data[key]
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise self.fail(path + (key,), f"expected a number, got {val!r}")
        if integer and (not isinstance(val, int)):
            raise self.fail(path + (key,), f"expected an integer, got {val!r}")
        if not math.isfinite(val):
            raise self.fail(path + (key,), "must be finite")
        if positive and val <= 0:
            raise self.fail(path + (key,), f"must be positive, got {val!r}")
        return val

    def complex_pair(self, data: dict, key: str, path: tuple, default: complex) -> complex:
        if key not in data:
            return default
        val = data[key]
        if isinstance(val, (int, float)) and not isinstance(val, bool):
            return complex(val)
        if isinstance(val, list) and len(val) == 2 and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in val):
            return complex(val[0], val[1])
        raise self.fail(path + (key,), f"expected a real number or [re, im], got {val!r}")

    def unknown_keys(self, data: dict, allowed, path: tuple) -> None:
        for k in data:
            if k not in allowed:
                raise self.fail(path + (k,), f"unknown key; expected one of {sorted(allowed)}")


_HA_RE = re.compile(r"^HA\((\d+)\)$")


def parse_config(data: Any, base_dir: Path | str = ".", lines: dict[tuple, int] | None = None) -> ScenarioConfig:
    """Validate a parsed mapping and build a ScenarioConfig.

    Relative output paths are resolved against ``base_dir``.
    """
    rd = _Reader(lines)
    if not isinstance(data, dict):
        raise rd.fail((), "top level must be a mapping")
    rd.unknown_keys(
        data,
        {"name", "model", "nonlinearity", "seed", "darboux", "grid", "field", "checks", "tolerances", "rk4", "scaling", "shift", "output"},
        (),
    )
    name = str(data.get("name", "scenario"))

    model = data.get("model")
    if model is None:
        raise rd.fail(("model",), "missing; choose exactly one of HO, HA, HA(n), custom")
    if not isinstance(model, str):
        raise rd.fail(("model",), "must be a string")
    seed = dict(rd.section(data, "seed"))
    m = _HA_RE.match(model)
    if m:
        if "n" in seed and seed["n"] != int(m.group(1)):
            raise rd.fail(("seed", "n"), f"conflicts with model {model}")
        seed["n"] = int(m.group(1))
        model = "HA"
    if model not in ("HO", "HA", "custom"):
        raise rd.fail(("model",), f"unknown model {model!r}; choose one of HO, HA, HA(n), custom")

    sp = ("seed",)
    if model == "HO":
        rd.unknown_keys(seed, {"B", "alpha", "beta"}, sp)
        seed = {"B": rd.number(seed, "B", sp), "alpha": rd.number(seed, "alpha", sp, default=0.0), "beta": rd.number(seed, "beta", sp)}
    elif model == "HA":
        rd.unknown_keys(seed, {"n", "B", "beta"}, sp)
        n = rd.number(seed, "n", sp, integer=True)
        if n < 1:
            raise rd.fail(sp + ("n",), "principal quantum number must be >= 1")
        seed = {"n": n, "B": rd.number(seed, "B", sp, positive=True), "beta": rd.number(seed, "beta", sp)}
    else:
        rd.unknown_keys(seed, {"levels", "beta", "rho3"}, sp)
        levels = seed.get("levels")
        if not (isinstance(levels, list) and len(levels) == 3 and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in levels)):
            raise rd.fail(sp + ("levels",), "expected a list of three numbers [h1, h2, h3]")
        rho3 = rd.number(seed, "rho3", sp)
        if not 0 < rho3 < 1:
            raise rd.fail(sp + ("rho3",), f"must lie in (0, 1), got {rho3}")
        seed = {"levels": [float(x) for x in levels], "beta": rd.number(seed, "beta", sp), "rho3": rho3}

    nl = rd.section(data, "nonlinearity", required=False) or {"power": 2}
    rd.unknown_keys(nl, {"power", "coefficients"}, ("nonlinearity",))
    if ("power" in nl) == ("coefficients" in nl):
        raise rd.fail(("nonlinearity",), "give exactly one of 'power' or 'coefficients'")
    if "power" in nl:
        k = rd.number(nl, "power", ("nonlinearity",), integer=True)
        if k < 1:
            raise rd.fail(("nonlinearity", "power"), "must be >= 1")
        f = Nonlinearity.power(k)
    else:
        coeffs = nl["coefficients"]
        if not (isinstance(coeffs, list) and coeffs and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in coeffs)):
            raise rd.fail(("nonlinearity", "coefficients"), "expected a non-empty list of numbers (ascending powers)")
        f = Nonlinearity(tuple(coeffs))

    dx = rd.section(data, "darboux", required=False)
    rd.unknown_keys(dx, {"gamma1", "gamma3"}, ("darboux",))
    g1 = rd.complex_pair(dx, "gamma1", ("darboux",), 1.0)
    g3 = rd.complex_pair(dx, "gamma3", ("darboux",), 1.0)
    if g1 == 0 and g3 == 0:
        raise rd.fail(("darboux",), "gamma1 and gamma3 cannot both vanish")

    gd = rd.section(data, "grid")
    gp = ("grid",)
    rd.unknown_keys(gd, {"t_start", "t_end", "center", "half_width", "units", "n_points"}, gp)
    n_points = rd.number(gd, "n_points", gp, integer=True)
    if n_points < 2:
        raise rd.fail(gp + ("n_points",), "must be >= 2")
    if "t_start" in gd or "t_end" in gd:
        t0, t1 = rd.number(gd, "t_start", gp), rd.number(gd, "t_end", gp)
        if not t0 < t1:
            raise rd.fail(gp + ("t_end",), "t_start must be < t_end")
        grid = GridSpec(n_points=n_points, t_start=float(t0), t_end=float(t1))
    else:
        center = gd.get("center", "midpoint")
        if center != "midpoint" and (isinstance(center, bool) or not isinstance(center, (int, float))):
            raise rd.fail(gp + ("center",), "expected a number or 'midpoint'")
        units = gd.get("units", "time")
        if units not in ("time", "switching"):
            raise rd.fail(gp + ("units",), "expected 'time' or 'switching'")
        grid = GridSpec(
            n_points=n_points,
            center=center,
            half_width=float(rd.number(gd, "half_width", gp, default=10.0, positive=True)),
            units=units,
        )

    checks = data.get("checks", ["invariants", "nvne_residual"])
    if not isinstance(checks, list):
        raise rd.fail(("checks",), "expected a list")
    for i, c in enumerate(checks):
        if c not in KNOWN_CHECKS:
            raise rd.fail(("checks", i), f"unknown check {c!r}; known: {', '.join(KNOWN_CHECKS)}")
    if len(set(checks)) != len(checks):
        raise rd.fail(("checks",), "duplicate entries")

    fs = None
    if "field" in data:
        fd = rd.section(data, "field")
        fp = ("field",)
        rd.unknown_keys(fd, {"v", "c", "amplitude", "Ex0", "Ey0", "omega", "profile"}, fp)
        c = rd.number(fd, "c", fp, default=1.0, positive=True)
        v = rd.number(fd, "v", fp, default=0.5 * c, positive=True)
        if not v < c:
            raise rd.fail(fp + ("v",), f"pulse velocity must satisfy 0 < v < c = {c}")
        amp = fd.get("amplitude", "solve")
        if amp not in ("solve", "explicit"):
            raise rd.fail(fp + ("amplitude",), "expected 'solve' or 'explicit'")
        ex = ey = None
        if amp == "explicit":
            ex = float(rd.number(fd, "Ex0", fp))
            ey = float(rd.number(fd, "Ey0", fp))
        omega = fd.get("omega")
        if omega is not None:
            omega = float(rd.number(fd, "omega", fp))
        prof = fd.get("profile", "solution")
        if prof not in ("solution", "normal_form"):
            raise rd.fail(fp + ("profile",), "expected 'solution' or 'normal_form'")
        fs = FieldSpec(v=float(v), c=float(c), amplitude=amp, Ex0=ex, Ey0=ey, omega=omega, profile=prof)

    tol = dict(DEFAULT_TOLERANCES)
    td = rd.section(data, "tolerances", required=False)
    for k in td:
        if k not in DEFAULT_TOLERANCES:
            raise rd.fail(("tolerances", k), f"unknown tolerance; known: {', '.join(DEFAULT_TOLERANCES)}")
        tol[k] = float(rd.number(td, k, ("tolerances",), positive=True))

    rk = rd.section(data, "rk4", required=False)
    rd.unknown_keys(rk, {"step", "span", "sample_spacing"}, ("rk4",))
    rk4 = RK4Spec(
        step=float(rd.number(rk, "step", ("rk4",), default=1e-3, positive=True)),
        span=float(rd.number(rk, "span", ("rk4",), default=20.0, positive=True)),
        sample_spacing=float(rd.number(rk, "sample_spacing", ("rk4",), default=0.1, positive=True)),
    )
    if rk4.step > rk4.sample_spacing:
        raise rd.fail(("rk4", "step"), "must not exceed sample_spacing")

    sc = rd.section(data, "scaling", required=False)
    rd.unknown_keys(sc, {"tau"}, ("scaling",))
    tau = float(rd.number(sc, "tau", ("scaling",), default=2.0, positive=True))
    sh = rd.section(data, "shift", required=False)
    rd.unknown_keys(sh, {"s"}, ("shift",))
    s = float(rd.number(sh, "s", ("shift",), default=0.1))

    od = rd.section(data, "output", required=False)
    rd.unknown_keys(od, {"directory", "timeseries", "series", "report"}, ("output",))
    out_dir = Path(od.get("directory", f"out/{name}"))
    if not out_dir.is_absolute():
        out_dir = Path(base_dir) / out_dir
    output = OutputSpec(
        directory=out_dir,
        timeseries=str(od.get("timeseries", "solution.csv")),
        series=str(od.get("series", "series.csv")),
        report=str(od.get("report", "report.json")),
    )

    cfg = ScenarioConfig(
        name=name,
        model=model,
        nonlinearity=f,
        seed=seed,
        gamma1=g1,
        gamma3=g3,
        grid=grid,
        output=output,
        checks=tuple(checks),
        tolerances=tol,
        field=fs,
        rk4=rk4,
        scaling_tau=tau,
        shift_s=s,
    )
    needs_profile = [c for c in ("profile", "maxwell") if c in cfg.checks] + (["field"] if fs else [])
    if needs_profile and not cfg.has_profile:
        raise rd.fail(("checks",), f"{', '.join(needs_profile)} need an HO (alpha = 0) or HA model")
    if "maxwell" in cfg.checks and fs is None:
        raise rd.fail(("field",), "the maxwell check needs a field section")
    if "factorization" in cfg.checks and not f.is_pure_quadratic:
        raise rd.fail(("checks",), "factorization needs f(x) = x^2")
    if "scaling" in cfg.checks and f.coeffs[:-1] != tuple([0.0] * (len(f.coeffs) - 1)):
        raise rd.fail(("checks",), "scaling needs a pure power nonlinearity x^k")
    return cfg


def load_config(path: Path | str) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc.strerror or exc}") from exc
    try:
        node = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(str(path), f"YAML syntax error: {getattr(exc, 'problem', exc)}", mark.line + 1 if mark else None) from exc
    lines = _line_index(node) if node is not None else {}
    return parse_config(data, base_dir=path.parent, lines=lines)


def dump_example(name: str) -> str:
    return yaml.safe_dump(bundled_example(name), sort_keys=False)
