"""Shipped presets regenerating the two headline figures.

fig1: excitation probability of a ground-state qubit under simulated
superluminal motion, six configurations (omega_q in {0.5, 0.9, 1.0} omega_0
x cavity decay kappa in {0.001, 0.1}), each run with both the full-span
oscillatory trajectory (g = 0.02) and the equivalent constant-velocity
trajectory at v = 2c with coupling -2 J1(pi/2) * 0.02. Qubit rates follow
the stronger (figure-caption) preset: gamma = 0.002, T2/T1 = 0.67; the
weaker in-text pair (gamma = 0.001, gamma_phi = 0.0005) ships as the
"text" noise preset.

fig2: photon generation of the two-mode mirror model for
v/c in {0.1, 1, 2, 3pi/2} with per-mode decay 0.001, run by both the Fock
Lindblad solver and the exact Gaussian oracle on a common grid. The Fock
truncation is 16 per mode (not the library default of 25): over this window
that truncation is converged against the exact oracle, and it keeps each
velocity within the runtime budget.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .analytic import bessel_j_pi_half
from .errors import ConfigError
from .runner import RunResult, Scenario, execute_scenario, parse_scenario, write_run


def preset_tag_of(source) -> str | None:
    """The preset name a scenario document stands for, if any.

    A document consisting of a bare ``preset: fig1`` (optionally with a
    ``name``) expands to that preset's runs instead of a single scenario.
    """
    if isinstance(source, (str, Path)):
        p = Path(source)
        if p.exists():
            raw = yaml.safe_load(p.read_text())
        else:
            raw = yaml.safe_load(str(source))
    else:
        raw = dict(source)
    if not isinstance(raw, dict):
        return None
    tag = raw.get("preset")
    if tag is None:
        return None
    extra = set(raw) - {"preset", "name"}
    if extra:
        raise ConfigError(
            f"a preset-tagged scenario cannot carry other sections (found: {', '.join(sorted(extra))})"
        )
    if tag not in PRESETS:
        raise ConfigError(f"unknown preset {tag!r} (available: {', '.join(PRESETS)})")
    return tag

PRESETS = ("fig1", "fig2")

FIG1_OMEGA_Q = (0.5, 0.9, 1.0)
FIG1_KAPPA = (0.001, 0.1)
FIG1_G = 0.02
FIG1_T_FINAL = 300.0
FIG1_SAMPLES = 1501

#: caption noise preset (default): gamma and T2/T1 from the figure caption.
NOISE_PRESET_CAPTION = {"gamma": 0.002, "gamma_phi": 0.002 / 0.67}
#: in-text alternative: gamma/omega = 1e-3, gamma_phi/omega = 5e-4.
NOISE_PRESET_TEXT = {"gamma": 0.001, "gamma_phi": 0.0005}

FIG2_VELOCITIES = (0.1, 1.0, 2.0, 3.0 * math.pi / 2.0)
FIG2_KAPPA = 0.001
FIG2_T_FINAL = 2.5
FIG2_SAMPLES = 126
FIG2_N_MAX = 16
FIG2_VARIANT = "literal-eq13"


def _fig1_tag(omega_q: float, kappa: float, variant: str) -> str:
    return f"fig1_wq{omega_q:g}_k{kappa:g}_{variant}"


def fig1_configurations() -> list[tuple[float, float]]:
    return [(wq, k) for wq in FIG1_OMEGA_Q for k in FIG1_KAPPA]


def fig1_scenarios(noise_preset: str = "caption") -> list[Scenario]:
    """Twelve runs: six (omega_q, kappa) configurations times two trajectories."""
    rates = {"caption": NOISE_PRESET_CAPTION, "text": NOISE_PRESET_TEXT}[noise_preset]
    g_cv = -2.0 * bessel_j_pi_half(1) * FIG1_G
    scenarios = []
    for omega_q, kappa in fig1_configurations():
        base = {
            "model": "qubit-rabi",
            "rabi": {"omega_q": omega_q, "n_max": 15},
            "noise": {"kappa": kappa, **rates},
            "time": {"t_final": FIG1_T_FINAL, "samples": FIG1_SAMPLES},
            "engines": ["lindblad"],
        }
        osc = json_deepcopy(base)
        osc["name"] = _fig1_tag(omega_q, kappa, "osc")
        osc["rabi"]["g"] = FIG1_G
        osc["trajectory"] = {"kind": "oscillatory", "omega": 2.0}
        cv = json_deepcopy(base)
        cv["name"] = _fig1_tag(omega_q, kappa, "cv")
        cv["rabi"]["g"] = g_cv
        cv["trajectory"] = {"kind": "constant-velocity", "x0": 0.0, "v": 2.0}
        scenarios.append(parse_scenario(osc))
        scenarios.append(parse_scenario(cv))
    return scenarios


def fig2_scenarios(variant: str = FIG2_VARIANT) -> list[Scenario]:
    scenarios = []
    for v in FIG2_VELOCITIES:
        scenarios.append(parse_scenario({
            "name": f"fig2_v{v:.3f}",
            "model": "mirror-two-mode",
            "mirror": {"variant": variant, "v": v, "n_max": FIG2_N_MAX},
            "noise": {"kappa_modes": [FIG2_KAPPA, FIG2_KAPPA]},
            "time": {"t_final": FIG2_T_FINAL, "samples": FIG2_SAMPLES},
            "engines": ["lindblad", "gaussian"],
        }))
    return scenarios


def json_deepcopy(obj):
    return json.loads(json.dumps(obj))


@dataclass
class PresetReport:
    name: str
    results: list[RunResult]
    summary: dict
    timings: dict[str, float]


def expand_preset(name: str, variant: str = FIG2_VARIANT,
                  noise_preset: str = "caption") -> list[Scenario]:
    """The per-run scenarios a preset tag stands for."""
    if name == "fig1":
        return fig1_scenarios(noise_preset)
    if name == "fig2":
        return fig2_scenarios(variant)
    raise ConfigError(f"unknown preset {name!r} (available: {', '.join(PRESETS)})")


def _timed_execute(data: dict):
    import time as _time

    s = parse_scenario(data)
    t0 = _time.perf_counter()
    res = execute_scenario(s)
    return res, _time.perf_counter() - t0


def run_preset(name: str, outdir, variant: str = FIG2_VARIANT,
               noise_preset: str = "caption", workers: int | None = 1) -> PresetReport:
    """Run every scenario of a preset, write per-run artifacts plus an
    aggregate summary with the figure-level comparisons.

    workers > 1 fans the independent runs across processes; per-run wall
    times are then measured under contention, so timing-sensitive callers
    (the acceptance suite) keep the sequential default.
    """
    outdir = Path(outdir)
    scenarios = expand_preset(name, variant=variant, noise_preset=noise_preset)

    results = []
    timings = {}
    if workers is None or workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(_timed_execute, [dict(s.data) for s in scenarios]))
    else:
        outs = [_timed_execute(dict(s.data)) for s in scenarios]
    for s, (res, elapsed) in zip(scenarios, outs):
        timings[s.name] = elapsed
        write_run(res, outdir)
        results.append(res)

    if name == "fig1":
        summary = _fig1_aggregate(results)
    else:
        summary = _fig2_aggregate(results)
    path = outdir / f"{name}_summary.json"
    path.write_text(json.dumps(summary, sort_keys=True, indent=1) + "\n")
    return PresetReport(name, results, summary, timings)


def _fig1_aggregate(results: list[RunResult]) -> dict:
    by_name = {r.scenario.name: r for r in results}
    configs = {}
    for omega_q, kappa in fig1_configurations():
        osc = by_name[_fig1_tag(omega_q, kappa, "osc")]
        cv = by_name[_fig1_tag(omega_q, kappa, "cv")]
        dpe = float(np.abs(osc.columns["P_e"] - cv.columns["P_e"]).max())
        configs[f"wq{omega_q:g}_k{kappa:g}"] = {
            "max_abs_P_e_difference": dpe,
            "peak_P_e_oscillatory": float(osc.columns["P_e"].max()),
            "peak_P_e_constant_velocity": float(cv.columns["P_e"].max()),
            "max_trace_drift": max(osc.summary["lindblad"]["max_trace_drift"],
                                   cv.summary["lindblad"]["max_trace_drift"]),
            "min_eigenvalue": min(osc.summary["lindblad"]["min_eigenvalue"],
                                  cv.summary["lindblad"]["min_eigenvalue"]),
        }
    return {"preset": "fig1", "configurations": configs}


def _fig2_aggregate(results: list[RunResult]) -> dict:
    runs = {}
    for r in results:
        ntf = r.columns["n_total"]
        ntg = r.columns["n_total_gaussian"]
        mask = ntg > 1e-3
        rel = float(np.max(np.abs(ntf[mask] - ntg[mask]) / ntg[mask])) if mask.any() else 0.0
        runs[r.scenario.name] = {
            "velocity": r.summary["velocity"],
            "coupling": r.summary["coupling"],
            "stable": r.summary["stable"],
            "peak_n_total_gaussian": float(ntg.max()),
            "final_n_total_gaussian": float(ntg[-1]),
            "final_n_total": float(ntf[-1]),
            "fock_vs_gaussian_max_rel": rel,
            "max_trace_drift": r.summary["lindblad"]["max_trace_drift"],
            "min_eigenvalue": r.summary["lindblad"]["min_eigenvalue"],
        }
    ordered = sorted(results, key=lambda r: r.summary["velocity"])
    finals = [float(r.columns["n_total_gaussian"][-1]) for r in ordered]
    return {
        "preset": "fig2",
        "runs": runs,
        "velocities": [r.summary["velocity"] for r in ordered],
        "final_n_total_gaussian_by_velocity": finals,
        "monotone_in_velocity": bool(np.all(np.diff(finals) > 0)),
    }
