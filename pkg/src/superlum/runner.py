"""Scenario parsing, execution, and parameter sweeps.

A scenario is a nested key/value document (YAML) selecting one of three
models and its parameters. Parsing is strict: unknown keys are named,
all missing required fields are reported at once, and out-of-range values
quote the violated bound. ``normalized_dump`` echoes the fully defaulted
scenario; parsing that dump reproduces the identical Scenario (the
round-trip contract).

Output is deliberately plain: one comma-separated track table per run
(column 1 = time), a normalized scenario echo, and a JSON summary. No
timestamps anywhere, fixed float formatting, fixed key order: repeated
invocations are byte-identical.
"""

from __future__ import annotations

import copy
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np
import yaml

from .analytic import QuadraticModelSpec, gaussian_evolve, normal_mode_analysis, resonance_velocity
from .errors import ConfigError
from .evolve import NoiseSpec, evolve_lindblad, evolve_unitary
from .hamiltonian import (
    MirrorModelSpec,
    RabiParams,
    coupling_ratio_for_velocity,
    mirror_schedule,
    rabi_schedule,
    two_mode_hamiltonian,
)
from .qops import (
    Operator,
    basis_state,
    make_annihilation,
    make_identity,
    make_pauli,
    tensor,
    vacuum_state,
)
from .trajectory import MirrorProfile, QubitTrajectory

MODELS = ("qubit-rabi", "mirror-two-mode", "mirror-multimode")

_ENGINES_BY_MODEL = {
    "qubit-rabi": ("lindblad", "unitary"),
    "mirror-two-mode": ("lindblad", "gaussian"),
    "mirror-multimode": ("lindblad", "unitary"),
}

FLOAT_FORMAT = "%.12e"


# --- schema ------------------------------------------------------------------
# field spec: (type, default or REQUIRED, bound or None); a bound is
# (low, high, interval) with interval notation like "(]" marking exclusivity
_REQUIRED = object()

_SCHEMA: dict[str, dict[str, tuple]] = {
    "": {
        "name": (str, "run", None),
        "model": (str, _REQUIRED, None),
        "preset": (str, None, None),
        "engines": (list, None, None),
        "tracks": (list, None, None),
    },
    "rabi": {
        "omega_q": (float, _REQUIRED, (0.0, math.inf, "()")),
        "g": (float, _REQUIRED, None),
        "omega0": (float, 1.0, (0.0, math.inf, "()")),
        "n_max": (int, 15, (2, 200, "[]")),
    },
    "trajectory": {
        "kind": (str, _REQUIRED, None),
        "x0": (float, 0.0, None),
        "v": (float, None, None),  # required by constant-velocity motion
        "omega": (float, 0.0, (0.0, math.inf, "[)")),
    },
    "mirror": {
        "variant": (str, "literal-eq13", None),
        "v": (float, None, None),
        "coupling": (float, None, None),
        "n_modes": (int, 2, (2, 6, "[]")),
        "n_max": (int, 25, (2, 200, "[]")),
        "L": (float, 1.0, (0.0, math.inf, "()")),
    },
    "profile": {
        "kind": (str, "static", None),
        "v": (float, 0.0, None),
        "delta": (float, 0.0, (0.0, 0.1, "[]")),
        "omega_d": (float, 0.0, (0.0, math.inf, "[)")),
        "short_time": (bool, False, None),
    },
    "noise": {
        "kappa": (float, 0.0, (0.0, math.inf, "[)")),
        "gamma": (float, 0.0, (0.0, math.inf, "[)")),
        "gamma_phi": (float, 0.0, (0.0, math.inf, "[)")),
        "kappa_modes": (list, None, None),
    },
    "time": {
        "t_final": (float, _REQUIRED, (0.0, math.inf, "()")),
        "samples": (int, _REQUIRED, (2, 1_000_000, "[]")),
    },
}

_SECTIONS_BY_MODEL = {
    "qubit-rabi": ("rabi", "trajectory", "noise", "time"),
    "mirror-two-mode": ("mirror", "noise", "time"),
    "mirror-multimode": ("mirror", "profile", "noise", "time"),
}


@dataclass(frozen=True)
class Scenario:
    """A fully validated, defaults-filled simulation request."""

    data: Mapping[str, Any]

    @property
    def name(self) -> str:
        return self.data["name"]

    @property
    def model(self) -> str:
        return self.data["model"]

    @property
    def engines(self) -> tuple[str, ...]:
        return tuple(self.data["engines"])

    def section(self, key: str) -> Mapping[str, Any]:
        return self.data[key]

    def time_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.data["time"]["t_final"], self.data["time"]["samples"])

    def with_value(self, dotted: str, value) -> "Scenario":
        d = copy.deepcopy(dict(self.data))
        parts = dotted.split(".")
        node = d
        for p in parts[:-1]:
            if p not in node or not isinstance(node[p], dict):
                raise ConfigError(f"sweep axis {dotted!r} does not name a scenario field")
            node = node[p]
        leaf = parts[-1]
        if leaf not in node:
            raise ConfigError(f"sweep axis {dotted!r} does not name a scenario field")
        if not isinstance(node[leaf], (int, float)) or isinstance(node[leaf], bool):
            raise ConfigError(f"sweep axis {dotted!r} is not a numeric scalar")
        node[leaf] = float(value)
        renamed = d
        renamed["name"] = f"{d['name']}_{leaf}_{value:g}"
        return parse_scenario(renamed)


def _coerce(section: str, key: str, spec: tuple, raw, errors: list[str]):
    typ, default, bounds = spec
    label = f"{section}.{key}" if section else key
    if raw is None:
        return default if default is not _REQUIRED else None
    if typ is float:
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            errors.append(f"{label}: expected a number, got {raw!r}")
            return None
        val = float(raw)
    elif typ is int:
        if isinstance(raw, bool) or not isinstance(raw, int):
            errors.append(f"{label}: expected an integer, got {raw!r}")
            return None
        val = int(raw)
    elif typ is bool:
        if not isinstance(raw, bool):
            errors.append(f"{label}: expected true/false, got {raw!r}")
            return None
        val = raw
    elif typ is list:
        if not isinstance(raw, (list, tuple)):
            errors.append(f"{label}: expected a list, got {raw!r}")
            return None
        val = list(raw)
    else:
        if not isinstance(raw, str):
            errors.append(f"{label}: expected a string, got {raw!r}")
            return None
        val = raw
    if bounds is not None and isinstance(val, (int, float)):
        lo, hi, interval = bounds
        lo_ok = val > lo if interval[0] == "(" else val >= lo
        hi_ok = val < hi if interval[1] == ")" else val <= hi
        if not (lo_ok and hi_ok):
            errors.append(f"{label}: value {val!r} violates bound {interval[0]}{lo}, {hi}{interval[1]}")
            return None
    return val


def parse_scenario(source) -> Scenario:
    """Parse and validate a scenario from a path, YAML text, or mapping."""
    if isinstance(source, Mapping):
        raw = copy.deepcopy(dict(source))
    else:
        if isinstance(source, (str, Path)):
            p = Path(source)
            if "\n" not in str(source) and p.exists():
                text = p.read_text()
            elif isinstance(source, Path) or (
                "\n" not in str(source) and str(source).endswith((".yaml", ".yml", ".json"))
            ):
                raise ConfigError(f"scenario file {source!s} does not exist")
            else:
                text = str(source)
        else:
            raise ConfigError("scenario source must be a mapping, YAML text, or file path")
        try:
            raw = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"scenario is not valid YAML: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("scenario document must be a key/value mapping")

    errors: list[str] = []
    missing: list[str] = []

    model = raw.get("model")
    if model not in MODELS:
        raise ConfigError(
            f"model must be one of {', '.join(MODELS)}; got {model!r}"
        )
    sections = _SECTIONS_BY_MODEL[model]

    # unknown top-level keys
    allowed_top = set(_SCHEMA[""]) | set(sections)
    for key in raw:
        if key not in allowed_top:
            raise ConfigError(f"unknown key {key!r} (allowed: {', '.join(sorted(allowed_top))})")

    out: dict[str, Any] = {}
    for key, spec in _SCHEMA[""].items():
        val = _coerce("", key, spec, raw.get(key), errors)
        if spec[1] is _REQUIRED and raw.get(key) is None:
            missing.append(key)
        out[key] = val

    for sec in sections:
        sec_raw = raw.get(sec) or {}
        if not isinstance(sec_raw, dict):
            raise ConfigError(f"section {sec!r} must be a mapping")
        for key in sec_raw:
            if key not in _SCHEMA[sec]:
                raise ConfigError(
                    f"unknown key {sec}.{key} (allowed: {', '.join(sorted(_SCHEMA[sec]))})"
                )
        out[sec] = {}
        for key, spec in _SCHEMA[sec].items():
            val = _coerce(sec, key, spec, sec_raw.get(key), errors)
            if spec[1] is _REQUIRED and sec_raw.get(key) is None:
                missing.append(f"{sec}.{key}")
            out[sec][key] = val

    if missing:
        errors.insert(0, f"missing required fields: {', '.join(missing)}")
    if errors:
        raise ConfigError("; ".join(errors))

    _validate_semantic(out)
    return Scenario(out)


def _validate_semantic(out: dict) -> None:
    model = out["model"]
    errors: list[str] = []

    engines = out.get("engines")
    if engines is None:
        engines = ["lindblad"]
    for e in engines:
        if e not in _ENGINES_BY_MODEL[model]:
            errors.append(
                f"engine {e!r} not available for {model} "
                f"(allowed: {', '.join(_ENGINES_BY_MODEL[model])})"
            )
    out["engines"] = list(engines)

    if model == "qubit-rabi":
        traj = out["trajectory"]
        if traj["kind"] not in ("constant-velocity", "oscillatory", "static"):
            errors.append(f"trajectory.kind {traj['kind']!r} unknown")
        if traj["kind"] == "constant-velocity" and traj["v"] is None:
            errors.append("trajectory.v: required for constant-velocity motion")
        if traj["kind"] == "oscillatory" and traj["omega"] <= 0:
            errors.append("trajectory.omega: oscillatory motion needs omega > 0")
        if abs(out["rabi"]["g"]) >= out["rabi"]["omega0"]:
            errors.append("rabi.g: |g| must stay below omega0 (perturbative regime)")
    elif model == "mirror-two-mode":
        mir = out["mirror"]
        if mir["variant"] not in ("literal-eq13", "dicke-form"):
            errors.append(f"mirror.variant {mir['variant']!r} unknown")
        if (mir["v"] is None) == (mir["coupling"] is None):
            errors.append("mirror: exactly one of v (units of c) or coupling (units of omega_1) is required")
    else:
        prof = out["profile"]
        if prof["kind"] not in ("linear", "dce-sinusoidal", "static"):
            errors.append(f"profile.kind {prof['kind']!r} unknown")
        if prof["kind"] == "linear" and prof["v"] <= 0:
            errors.append("profile.v: linear contraction needs v > 0")
        if prof["kind"] == "dce-sinusoidal" and not (0 < prof["delta"] <= 0.1):
            errors.append("profile.delta: need 0 < delta <= 0.1")

    km = out["noise"].get("kappa_modes")
    if km is not None:
        if not all(isinstance(x, (int, float)) and not isinstance(x, bool) and x >= 0 for x in km):
            errors.append("noise.kappa_modes: entries must be non-negative numbers")
        else:
            out["noise"]["kappa_modes"] = [float(x) for x in km]

    tracks = out.get("tracks")
    if tracks is not None:
        out["tracks"] = [str(tr) for tr in tracks]

    if errors:
        raise ConfigError("; ".join(errors))


def normalized_dump(s: Scenario) -> str:
    """Canonical YAML echo of a scenario: defaults filled, keys sorted."""
    return yaml.safe_dump(json.loads(json.dumps(dict(s.data))), sort_keys=True)


# --- model assembly ----------------------------------------------------------

def _qubit_observables(n_max: int) -> dict[str, Operator]:
    iq = make_identity(2)
    ifld = make_identity(n_max)
    sz = make_pauli("z")
    proj_e = 0.5 * (make_identity(2) + sz)
    proj_g = 0.5 * (make_identity(2) - sz)
    num = make_annihilation(n_max).dag() @ make_annihilation(n_max)
    return {
        "P_e": tensor([proj_e, ifld]),
        "P_g": tensor([proj_g, ifld]),
        "n1": tensor([iq, num]),
    }


def _mode_observables(dims: Sequence[int]) -> dict[str, Operator]:
    obs = {}
    for i, d in enumerate(dims):
        factors = [make_identity(dd) for dd in dims]
        factors[i] = make_annihilation(d).dag() @ make_annihilation(d)
        obs[f"n{i + 1}"] = tensor(factors)
    return obs


def _noise_from_section(sec: Mapping[str, Any]) -> NoiseSpec:
    km = sec.get("kappa_modes")
    return NoiseSpec(
        kappa=sec["kappa"], gamma=sec["gamma"], gamma_phi=sec["gamma_phi"],
        kappa_modes=tuple(km) if km is not None else None,
    )


@dataclass
class RunResult:
    scenario: Scenario
    series_t: np.ndarray
    columns: dict[str, np.ndarray]
    summary: dict[str, Any]


def execute_scenario(s: Scenario, step_scale: float = 1.0) -> RunResult:
    """Run all requested engines on one scenario; no file I/O."""
    t = s.time_grid()
    columns: dict[str, np.ndarray] = {}
    summary: dict[str, Any] = {"name": s.name, "model": s.model, "engines": list(s.engines)}

    if s.model == "qubit-rabi":
        r = s.section("rabi")
        p = RabiParams(omega_q=r["omega_q"], g=r["g"], omega0=r["omega0"], n_max=r["n_max"])
        tr = s.section("trajectory")
        traj = QubitTrajectory(tr["kind"], x0=tr["x0"], v=tr["v"] or 0.0, omega=tr["omega"])
        sched = rabi_schedule(p, traj)
        obs = _qubit_observables(p.n_max)
        noise = _noise_from_section(s.section("noise"))
        summary["resonance_velocity"] = resonance_velocity(p.omega_q, p.omega0)
        for engine_name in s.engines:
            if engine_name == "lindblad":
                res = evolve_lindblad(sched, basis_state(p.dims, [1, 0]).to_density(),
                                      noise=noise, t_grid=t, observables=obs,
                                      layout="qubit-mode", step_scale=step_scale)
            else:
                res = evolve_unitary(sched, basis_state(p.dims, [1, 0]), t,
                                     observables=obs, step_scale=step_scale)
            _merge_engine_tracks(columns, summary, engine_name, s.engines, res)

    elif s.model == "mirror-two-mode":
        m = s.section("mirror")
        omega1 = 1.0
        coupling = m["coupling"]
        if coupling is None:
            coupling = coupling_ratio_for_velocity(m["v"]) * omega1
        summary["coupling"] = coupling
        summary["velocity"] = (m["v"] if m["v"] is not None
                               else coupling / (omega1 * coupling_ratio_for_velocity(1.0)))
        noise = _noise_from_section(s.section("noise"))
        kappas = noise.kappa_modes or (noise.kappa, noise.kappa)
        spec = QuadraticModelSpec.from_coupling(m["variant"], coupling, omega1=omega1,
                                                kappa=(kappas[0], kappas[1]))
        report = normal_mode_analysis(spec)
        summary["stable"] = bool(report.stable)
        summary["normal_mode_frequencies"] = [round(f, 12) for f in report.frequencies]
        for engine_name in s.engines:
            if engine_name == "gaussian":
                series, _ = gaussian_evolve(spec, t)
                res = _GaussianResultShim(series)
            else:
                nm = m["n_max"]
                h = two_mode_hamiltonian(omega1, coupling, m["variant"], n_max=nm)
                obs = _mode_observables((nm, nm))
                res = evolve_lindblad(h, vacuum_state((nm, nm)).to_density(),
                                      noise=NoiseSpec(kappa_modes=(kappas[0], kappas[1])),
                                      t_grid=t, observables=obs, layout="modes",
                                      step_scale=step_scale)
            _merge_engine_tracks(columns, summary, engine_name, s.engines, res)

    else:  # mirror-multimode
        m = s.section("mirror")
        pr = s.section("profile")
        spec = MirrorModelSpec(n_modes=m["n_modes"], L=m["L"], variant=m["variant"],
                               n_max=m["n_max"])
        profile = MirrorProfile(pr["kind"], L=m["L"], v=pr["v"], delta=pr["delta"],
                                omega_d=pr["omega_d"], short_time=pr["short_time"])
        if profile.t_max <= t[-1]:
            raise ConfigError(
                f"time.t_final {t[-1]} exceeds the linear profile domain t < {profile.t_max:.6g}"
            )
        sched = mirror_schedule(spec, profile)
        obs = _mode_observables(spec.dims)
        noise = _noise_from_section(s.section("noise"))
        for engine_name in s.engines:
            if engine_name == "lindblad":
                res = evolve_lindblad(sched, vacuum_state(spec.dims).to_density(),
                                      noise=noise, t_grid=t, observables=obs,
                                      layout="modes", step_scale=step_scale)
            else:
                res = evolve_unitary(sched, vacuum_state(spec.dims), t,
                                     observables=obs, step_scale=step_scale)
            _merge_engine_tracks(columns, summary, engine_name, s.engines, res)

    selected = s.data.get("tracks")
    if selected:
        missing = [tr for tr in selected if tr not in columns]
        if missing:
            raise ConfigError(
                f"requested tracks not produced: {', '.join(missing)} "
                f"(available: {', '.join(sorted(columns))})"
            )
        columns = {tr: columns[tr] for tr in selected}
    return RunResult(s, t, columns, summary)


class _GaussianResultShim:
    """Adapts the gaussian oracle output to the engine-result interface."""

    def __init__(self, series):
        self.series = series
        self.diagnostics = None


def _merge_engine_tracks(columns, summary, engine_name, engines, res) -> None:
    primary = engine_name == engines[0]
    suffix = "" if primary else f"_{engine_name}"
    tracks = dict(res.series.tracks)
    n_parts = [v for k, v in tracks.items() if k.startswith("n") and k[1:].isdigit()]
    if len(n_parts) >= 2 and "n_total" not in tracks:
        tracks["n_total"] = np.sum(n_parts, axis=0)
    for k, v in tracks.items():
        columns[f"{k}{suffix}"] = v
    eng_summary: dict[str, Any] = {}
    for k, v in tracks.items():
        eng_summary[f"peak_{k}"] = float(np.max(v))
        eng_summary[f"final_{k}"] = float(v[-1])
    if res.diagnostics is not None:
        d = res.diagnostics
        eng_summary["max_trace_drift"] = float(d.max_trace_drift)
        eng_summary["max_norm_drift"] = float(d.max_norm_drift)
        eng_summary["max_hermiticity_defect"] = float(d.max_hermiticity_defect)
        eng_summary["min_eigenvalue"] = (
            float(d.min_eigenvalue) if math.isfinite(d.min_eigenvalue) else None
        )
        eng_summary["substeps_total"] = int(d.substeps_total)
        eng_summary["backend"] = d.backend
    summary[engine_name] = eng_summary


# --- file output -------------------------------------------------------------

def _units_header(model: str) -> list[str]:
    if model == "qubit-rabi":
        return [
            "# units: time in 1/omega_0; frequencies in omega_0; velocities in c;",
            "# rates (kappa, gamma, gamma_phi) in omega_0",
        ]
    return [
        "# units: time in 1/omega_1; frequencies in omega_1; velocities in c;",
        "# rates (kappa) in omega_1",
    ]


def write_run(result: RunResult, outdir: Path) -> list[Path]:
    """Write the track table, scenario echo, and summary for one run."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    name = result.scenario.name
    written: list[Path] = []
    try:
        csv_path = outdir / f"{name}.csv"
        written.append(csv_path)  # registered before writing so cleanup catches partials
        cols = list(result.columns)
        with open(csv_path, "w") as fh:
            for line in _units_header(result.scenario.model):
                fh.write(line + "\n")
            fh.write(",".join(["t"] + cols) + "\n")
            data = np.column_stack([result.series_t] + [result.columns[c] for c in cols])
            np.savetxt(fh, data, fmt=FLOAT_FORMAT, delimiter=",")

        echo_path = outdir / f"{name}_scenario.yaml"
        written.append(echo_path)
        echo_path.write_text(normalized_dump(result.scenario))

        summary_path = outdir / f"{name}_summary.json"
        written.append(summary_path)
        summary_path.write_text(json.dumps(result.summary, sort_keys=True, indent=1) + "\n")
    except BaseException:
        for p in written:
            p.unlink(missing_ok=True)
        raise
    return written


def run_scenario(s: Scenario, outdir, step_scale: float = 1.0) -> RunResult:
    """Execute one scenario and write its artifacts; partial files are
    removed if the integration fails."""
    result = execute_scenario(s, step_scale=step_scale)
    write_run(result, Path(outdir))
    return result


# --- sweeps ------------------------------------------------------------------

def _sweep_worker(args) -> dict[str, Any]:
    data, axis, value = args
    s = parse_scenario(data).with_value(axis, value)
    result = execute_scenario(s)
    row = {"value": float(value)}
    for eng in s.engines:
        for k, v in result.summary[eng].items():
            if isinstance(v, (int, float)) and not isinstance(v, bool):
                row[f"{eng}.{k}"] = v
    if "stable" in result.summary:
        row["stable"] = int(result.summary["stable"])
    return row


def sweep(s: Scenario, axis: str, values: Sequence[float], outdir=None,
          workers: int | None = None) -> list[dict[str, Any]]:
    """Run one scenario per value of the named numeric axis.

    Values execute in parallel but the aggregate keeps input order so the
    emitted table is deterministic.
    """
    values = [float(v) for v in values]
    if not values:
        raise ConfigError("sweep needs at least one value")
    s.with_value(axis, values[0])  # validates the axis before fan-out
    jobs = [(dict(s.data), axis, v) for v in values]
    if len(jobs) == 1 or (workers is not None and workers <= 1):
        rows = [_sweep_worker(j) for j in jobs]
    else:
        max_workers = workers or os.cpu_count() or 1
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(_sweep_worker, jobs))
    if outdir is not None:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        path = outdir / f"{s.name}_sweep_{axis.replace('.', '_')}.csv"
        cols = sorted({k for row in rows for k in row} - {"value"})
        with open(path, "w") as fh:
            fh.write(",".join(["value"] + cols) + "\n")
            for row in rows:
                vals = [FLOAT_FORMAT % row["value"]]
                vals += [(FLOAT_FORMAT % row[c]) if c in row else "" for c in cols]
                fh.write(",".join(vals) + "\n")
    return rows
