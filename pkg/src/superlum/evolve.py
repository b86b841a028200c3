"""Time evolution under time-dependent Hamiltonians.

Two integrators, both fixed-step RK4 so that repeated runs are
bit-reproducible: unitary Schrodinger evolution for pure states and the
Lindblad master equation for density matrices. The step is tied to the
spectral radius of H(t0) (1/50 of the fastest period present). Norm and
trace are monitored, never silently repaired; the density matrix is
re-symmetrized every step with the defect recorded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import engine
from .engine import Schedule, pack_collapse, stage_times, step_bound, substep_count
from .errors import DimensionError, DomainError, IntegrationError, PositivityError
from .qops import (
    HERMITIAN_TOL,
    Operator,
    QuantumState,
    make_annihilation,
    make_identity,
    make_lowering_qubit,
    make_pauli,
    tensor,
)

NORM_DRIFT_LIMIT = 1e-6
TRACE_DRIFT_LIMIT = 1e-6
POSITIVITY_LIMIT = -1e-6

#: max number of eigenvalue (positivity) checks per Lindblad run for large
#: spaces; small spaces are checked at every grid point.
POSITIVITY_SAMPLES = 25
POSITIVITY_FULL_DIM = 64


@dataclass(frozen=True)
class NoiseSpec:
    """Dissipation rates, all in units of the model's reference frequency.

    kappa: cavity decay; gamma: qubit relaxation (T1 = 1/gamma);
    gamma_phi: qubit dephasing (T2 = 1/gamma_phi); kappa_modes: per-mode
    cavity decay list for multimode models (falls back to kappa for every
    mode when absent).
    """

    kappa: float = 0.0
    gamma: float = 0.0
    gamma_phi: float = 0.0
    kappa_modes: tuple[float, ...] | None = None

    def __post_init__(self):
        rates = [self.kappa, self.gamma, self.gamma_phi] + list(self.kappa_modes or ())
        if any(r < 0 for r in rates):
            raise DomainError("noise rates must be non-negative")

    def is_trivial(self) -> bool:
        return all(r == 0 for r in (self.kappa, self.gamma, self.gamma_phi)) and not any(
            self.kappa_modes or ()
        )


@dataclass
class TimeSeries:
    """Time grid plus named real observable tracks of equal length."""

    t: np.ndarray
    tracks: dict[str, np.ndarray]
    units: str = ""

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        for name, arr in self.tracks.items():
            arr = np.asarray(arr, dtype=float)
            if arr.shape != self.t.shape:
                raise DimensionError(f"track {name!r} length does not match the time grid")
            self.tracks[name] = arr

    def names(self) -> list[str]:
        return list(self.tracks)


def observables(series: TimeSeries, names: Sequence[str]) -> dict[str, np.ndarray]:
    """Extract named tracks.

    Two derived tracks are synthesized when absent: n_total from the
    per-mode occupations, and trace on unitary runs (norm squared, constant
    one up to integrator drift).
    """
    out = {}
    for name in names:
        if name in series.tracks:
            out[name] = series.tracks[name]
            continue
        if name == "n_total":
            parts = [v for k, v in series.tracks.items()
                     if k.startswith("n") and k[1:].isdigit()]
            if parts:
                out[name] = np.sum(parts, axis=0)
                continue
        if name == "trace" and "norm" in series.tracks:
            out[name] = series.tracks["norm"] ** 2
            continue
        raise DomainError(
            f"unknown observable {name!r}; available: {', '.join(sorted(series.tracks))}"
        )
    return out


def qubit_collapse_ops(noise: NoiseSpec, n_max: int) -> list[Operator]:
    """Collapse set for the qubit (x) single-mode model:
    sqrt(kappa) a, sqrt(gamma) sigma_minus, sqrt(gamma_phi/2) sigma_z."""
    iq = make_identity(2)
    ifld = make_identity(n_max)
    ops = []
    if noise.kappa > 0:
        ops.append(math.sqrt(noise.kappa) * tensor([iq, make_annihilation(n_max)]))
    if noise.gamma > 0:
        ops.append(math.sqrt(noise.gamma) * tensor([make_lowering_qubit(), ifld]))
    if noise.gamma_phi > 0:
        ops.append(math.sqrt(noise.gamma_phi / 2.0) * tensor([make_pauli("z"), ifld]))
    return ops


def mode_collapse_ops(noise: NoiseSpec, dims: Sequence[int]) -> list[Operator]:
    """Per-mode collapse set sqrt(kappa_i) a_i for multimode field models."""
    dims = tuple(int(d) for d in dims)
    kappas = noise.kappa_modes
    if kappas is None:
        kappas = tuple(noise.kappa for _ in dims)
    if len(kappas) != len(dims):
        raise DimensionError("kappa_modes length must match the number of modes")
    ops = []
    for i, (k, d) in enumerate(zip(kappas, dims)):
        if k <= 0:
            continue
        factors = [make_identity(dd) for dd in dims]
        factors[i] = make_annihilation(d)
        ops.append(math.sqrt(k) * tensor(factors))
    return ops


@dataclass
class EvolutionDiagnostics:
    step: float
    substeps_total: int
    spectral_radius: float
    backend: str
    max_norm_drift: float = 0.0
    max_trace_drift: float = 0.0
    max_hermiticity_defect: float = 0.0
    min_eigenvalue: float = math.inf
    min_eig_times: tuple[float, ...] = field(default_factory=tuple)
    min_eig_values: tuple[float, ...] = field(default_factory=tuple)


@dataclass
class EvolutionResult:
    series: TimeSeries
    final_state: QuantumState
    diagnostics: EvolutionDiagnostics


def _coerce_schedule(h) -> tuple[Schedule | None, Callable | None]:
    if isinstance(h, Schedule):
        return h, None
    if isinstance(h, Operator):
        return Schedule((h,), (1.0,)), None
    if callable(h):
        return None, h
    raise DomainError("Hamiltonian must be an Operator, a Schedule, or a callable t -> Operator")


def _validate_grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0):
        raise DomainError("t_grid must be a strictly increasing 1-d grid with >= 2 points")
    return t


def _expect_real(obs_t: np.ndarray, rho: np.ndarray) -> float:
    val = np.sum(obs_t * rho)
    if abs(val.imag) > 1e-8:
        raise IntegrationError(f"observable developed imaginary part {val.imag:.2e}")
    return float(val.real)


def _sampled_hamiltonian(h_callable: Callable, t: float, dim: int) -> np.ndarray:
    op = h_callable(t)
    mat = op.matrix if isinstance(op, Operator) else np.asarray(op, dtype=complex)
    if mat.shape != (dim, dim):
        raise DimensionError("Hamiltonian sample has wrong shape")
    if float(np.abs(mat - mat.conj().T).max()) > HERMITIAN_TOL:
        raise DomainError(f"Hamiltonian sample at t={t:.6g} is not Hermitian")
    return mat


def evolve_unitary(h, psi0: QuantumState, t_grid, observables: Mapping[str, Operator] | None = None,
                   step_scale: float = 1.0, backend: str | None = None) -> EvolutionResult:
    """Integrate i dpsi/dt = H(t) psi with fixed-step RK4.

    The norm track records the (unrepaired) drift; drift beyond 1e-6 raises
    IntegrationError with a suggestion to shrink the step via step_scale.
    """
    if psi0.kind != "pure":
        raise DomainError("evolve_unitary needs a pure initial state")
    t = _validate_grid(t_grid)
    schedule, h_callable = _coerce_schedule(h)
    obs = dict(observables or {})
    for name, op in obs.items():
        if op.dims != psi0.dims:
            raise DimensionError(f"observable {name!r} dims do not match the state")

    dim = psi0.dim
    if schedule is not None:
        if schedule.dims != psi0.dims:
            raise DimensionError("schedule dims do not match the state")
        h_max = step_bound(schedule, step_scale=step_scale, t0=t[0])
        spectral = float(np.abs(np.linalg.eigvalsh(schedule.at(t[0]).matrix)).max())
        terms = schedule.stacked_terms()
        _, schro = engine.get_interval_functions(backend)
    else:
        h0 = _sampled_hamiltonian(h_callable, t[0], dim)
        spectral = float(np.abs(np.linalg.eigvalsh(h0)).max())
        h_max = step_scale * (2.0 * math.pi / spectral) / 50.0 if spectral > 0 else math.inf

    psi = np.array(psi0.data, dtype=complex)
    tracks: dict[str, list[float]] = {"norm": []}
    for name in obs:
        tracks[name] = []
    obs_mats = {name: np.ascontiguousarray(op.matrix) for name, op in obs.items()}

    def record():
        tracks["norm"].append(float(np.linalg.norm(psi)))
        for name, mat in obs_mats.items():
            val = np.vdot(psi, mat @ psi)
            tracks[name].append(float(val.real))

    substeps_total = 0
    record()
    for i in range(1, t.size):
        dt = t[i] - t[i - 1]
        n_sub = substep_count(dt, h_max)
        hstep = dt / n_sub
        substeps_total += n_sub
        if schedule is not None:
            u = schedule.sample(stage_times(t[i - 1], hstep, n_sub))
            schro(psi, terms, u, hstep, n_sub)
        else:
            for s in range(n_sub):
                ts0 = t[i - 1] + s * hstep
                m1 = _sampled_hamiltonian(h_callable, ts0, dim)
                m2 = _sampled_hamiltonian(h_callable, ts0 + hstep / 2, dim)
                m4 = _sampled_hamiltonian(h_callable, ts0 + hstep, dim)
                k1 = -1j * (m1 @ psi)
                k2 = -1j * (m2 @ (psi + 0.5 * hstep * k1))
                k3 = -1j * (m2 @ (psi + 0.5 * hstep * k2))
                k4 = -1j * (m4 @ (psi + hstep * k3))
                psi += (hstep / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        record()

    norm_arr = np.asarray(tracks["norm"])
    max_drift = float(np.abs(norm_arr - 1.0).max())
    # NaN-safe: a diverged integration must not slip past the comparison
    if not max_drift <= NORM_DRIFT_LIMIT:
        raise IntegrationError(
            f"norm drifted by {max_drift:.2e} (> {NORM_DRIFT_LIMIT}); "
            "reduce the step with step_scale < 1"
        )
    series = TimeSeries(t, {k: np.asarray(v) for k, v in tracks.items()})
    final = QuantumState.pure(psi / np.linalg.norm(psi), psi0.dims)
    diag = EvolutionDiagnostics(
        step=h_max, substeps_total=substeps_total, spectral_radius=spectral,
        backend=backend or engine.BACKEND, max_norm_drift=max_drift,
    )
    return EvolutionResult(series, final, diag)


def evolve_lindblad(h, rho0: QuantumState, noise: NoiseSpec | None = None, t_grid=None,
                    observables: Mapping[str, Operator] | None = None,
                    collapse: Sequence[Operator] | None = None,
                    layout: str = "auto", step_scale: float = 1.0,
                    backend: str | None = None) -> EvolutionResult:
    """Integrate the Lindblad master equation with fixed-step RK4.

    Collapse operators come either from ``noise`` (NoiseSpec, interpreted for
    the state's layout: a [2, n] space gets the qubit set, otherwise one
    decay channel per mode) or explicitly via ``collapse``. The density
    matrix is symmetrized every step (defect recorded) and its positivity is
    spot-checked on the grid; an eigenvalue below -1e-6 aborts the run.
    """
    state = rho0.to_density()
    t = _validate_grid(t_grid)
    schedule, h_callable = _coerce_schedule(h)
    dims = state.dims
    dim = state.dim

    if collapse is None:
        noise = noise or NoiseSpec()
        if layout == "auto":
            layout = "qubit-mode" if (len(dims) == 2 and dims[0] == 2) else "modes"
        if layout == "qubit-mode":
            collapse = qubit_collapse_ops(noise, dims[1])
        elif layout == "modes":
            collapse = mode_collapse_ops(noise, dims)
        else:
            raise DomainError(f"unknown layout {layout!r}")
    cplan = pack_collapse(collapse, dim)
    rate_scale = float(np.abs(np.diag(cplan.a_dense)).max(initial=0.0))

    obs = dict(observables or {})
    for name, op in obs.items():
        if op.dims != dims:
            raise DimensionError(f"observable {name!r} dims do not match the state")
    obs_t = {name: np.ascontiguousarray(op.matrix.T) for name, op in obs.items()}

    if schedule is not None:
        if schedule.dims != dims:
            raise DimensionError("schedule dims do not match the state")
        h_max = step_bound(schedule, rate_scale=rate_scale, step_scale=step_scale, t0=t[0])
        spectral = float(np.abs(np.linalg.eigvalsh(schedule.at(t[0]).matrix)).max())
        terms = schedule.stacked_terms()
    else:
        h0 = _sampled_hamiltonian(h_callable, t[0], dim)
        spectral = float(np.abs(np.linalg.eigvalsh(h0)).max())
        scale = spectral + rate_scale
        h_max = step_scale * (2.0 * math.pi / scale) / 50.0 if scale > 0 else math.inf

    lind, _ = engine.get_interval_functions(backend)
    use_fast = cplan.is_structured and schedule is not None

    rho = np.array(state.data, dtype=complex)
    tracks: dict[str, list[float]] = {"trace": [], "purity": []}
    for name in obs:
        tracks[name] = []

    # positivity checks: every point for small spaces, decimated above
    if dim <= POSITIVITY_FULL_DIM:
        check_idx = set(range(t.size))
    else:
        check_idx = set(np.unique(np.linspace(0, t.size - 1, POSITIVITY_SAMPLES).astype(int)))
    eig_times: list[float] = []
    eig_vals: list[float] = []

    def record(i: int):
        tr = complex(np.trace(rho))
        tracks["trace"].append(float(tr.real))
        tracks["purity"].append(float(np.sum(np.abs(rho) ** 2)))
        # NaN-safe (a diverged step must not slip past the comparison), and
        # checked before the eigensolve so divergence fails cleanly
        if not (abs(tr.real - 1.0) <= TRACE_DRIFT_LIMIT and abs(tr.imag) <= TRACE_DRIFT_LIMIT):
            raise IntegrationError(
                f"trace drifted to {tr:.8f} at t={t[i]:.6g}; "
                "reduce the step with step_scale < 1"
            )
        for name, mat_t in obs_t.items():
            tracks[name].append(_expect_real(mat_t, rho))
        if i in check_idx:
            mineig = float(np.linalg.eigvalsh(rho).min())
            eig_times.append(float(t[i]))
            eig_vals.append(mineig)
            if not mineig >= POSITIVITY_LIMIT:
                raise PositivityError(
                    f"density matrix eigenvalue {mineig:.2e} below {POSITIVITY_LIMIT} "
                    f"at t={t[i]:.6g}"
                )

    max_defect = 0.0
    substeps_total = 0
    record(0)
    for i in range(1, t.size):
        dt = t[i] - t[i - 1]
        n_sub = substep_count(dt, h_max)
        hstep = dt / n_sub
        substeps_total += n_sub
        if use_fast:
            u = schedule.sample(stage_times(t[i - 1], hstep, n_sub))
            defect = lind(rho, terms, u, hstep, n_sub,
                          cplan.rows, cplan.cols, cplan.vals, cplan.ptr, cplan.weight)
        elif schedule is not None:
            u = schedule.sample(stage_times(t[i - 1], hstep, n_sub))
            defect = engine.lindblad_interval_dense(
                rho, terms, u, hstep, n_sub, cplan.dense_ops, cplan.a_dense)
        else:
            defect = _lindblad_callable_interval(
                rho, h_callable, t[i - 1], hstep, n_sub, cplan, dim)
        max_defect = max(max_defect, defect)
        record(i)

    trace_arr = np.asarray(tracks["trace"])
    series = TimeSeries(t, {k: np.asarray(v) for k, v in tracks.items()})
    # the returned state carries the master-equation positivity tolerance,
    # looser than the -1e-9 accepted for hand-built inputs
    final = QuantumState.density(0.5 * (rho + rho.conj().T) / np.trace(rho).real, dims,
                                 eig_floor=POSITIVITY_LIMIT)
    diag = EvolutionDiagnostics(
        step=h_max, substeps_total=substeps_total, spectral_radius=spectral,
        backend=backend or engine.BACKEND,
        max_trace_drift=float(np.abs(trace_arr - 1.0).max()),
        max_hermiticity_defect=max_defect,
        min_eigenvalue=min(eig_vals) if eig_vals else math.inf,
        min_eig_times=tuple(eig_times), min_eig_values=tuple(eig_vals),
    )
    return EvolutionResult(series, final, diag)


def _lindblad_callable_interval(rho, h_callable, t0, hstep, n_sub, cplan, dim):
    """Generic path for callable Hamiltonians: dense dissipator, sampled H."""
    c_dags = [c.conj().T for c in cplan.dense_ops]
    a = cplan.a_dense

    def rhs(mat, rho_s):
        t1 = mat @ rho_s
        k = -1j * (t1 - t1.conj().T)
        for c, cd in zip(cplan.dense_ops, c_dags):
            k += c @ rho_s @ cd
        k -= 0.5 * (a @ rho_s + rho_s @ a)
        return k

    max_defect = 0.0
    for s in range(n_sub):
        ts0 = t0 + s * hstep
        m1 = _sampled_hamiltonian(h_callable, ts0, dim)
        m2 = _sampled_hamiltonian(h_callable, ts0 + hstep / 2, dim)
        m4 = _sampled_hamiltonian(h_callable, ts0 + hstep, dim)
        k1 = rhs(m1, rho)
        k2 = rhs(m2, rho + 0.5 * hstep * k1)
        k3 = rhs(m2, rho + 0.5 * hstep * k2)
        k4 = rhs(m4, rho + hstep * k3)
        rho += (hstep / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        defect = float(np.abs(rho - rho.conj().T).max())
        max_defect = max(max_defect, defect)
        rho += rho.conj().T
        rho *= 0.5
    return max_defect
