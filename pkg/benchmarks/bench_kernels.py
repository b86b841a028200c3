"""Benchmark: compiled RK4 kernels vs the pure numpy fallback.

Times the two hot paths (single-mode qubit Lindblad, two-mode mirror
Lindblad, plus a unitary run) on representative problem sizes and checks
the backends agree. Run:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from superlum import engine
from superlum.evolve import NoiseSpec, evolve_lindblad, evolve_unitary
from superlum.hamiltonian import RabiParams, rabi_schedule, two_mode_hamiltonian
from superlum.qops import basis_state, make_annihilation, make_identity, make_pauli, tensor, vacuum_state
from superlum.trajectory import QubitTrajectory


def _qubit_case():
    p = RabiParams(omega_q=1.0, g=0.02, n_max=15)
    sched = rabi_schedule(p, QubitTrajectory("oscillatory", omega=2.0))
    rho0 = basis_state([2, 15], [1, 0]).to_density()
    obs = {"P_e": tensor([0.5 * (make_identity(2) + make_pauli("z")), make_identity(15)])}
    noise = NoiseSpec(kappa=0.001, gamma=0.002, gamma_phi=0.002 / 0.67)
    t = np.linspace(0.0, 60.0, 301)
    return lambda backend: evolve_lindblad(sched, rho0, noise=noise, t_grid=t,
                                           observables=obs, layout="qubit-mode",
                                           backend=backend)


def _two_mode_case():
    nm = 12
    h = two_mode_hamiltonian(1.0, 0.30, "literal-eq13", n_max=nm)
    rho0 = vacuum_state([nm, nm]).to_density()
    num = make_annihilation(nm).dag() @ make_annihilation(nm)
    obs = {"n1": tensor([num, make_identity(nm)]), "n2": tensor([make_identity(nm), num])}
    t = np.linspace(0.0, 2.0, 41)
    return lambda backend: evolve_lindblad(h, rho0, noise=NoiseSpec(kappa_modes=(0.001, 0.001)),
                                           t_grid=t, observables=obs, layout="modes",
                                           backend=backend)


def _unitary_case():
    p = RabiParams(omega_q=1.0, g=0.002, n_max=15)
    sched = rabi_schedule(p, QubitTrajectory("constant-velocity", v=2.0))
    psi0 = basis_state([2, 15], [1, 0])
    t = np.linspace(0.0, 50.0, 251)
    return lambda backend: evolve_unitary(sched, psi0, t, backend=backend)


def run():
    backends = engine.available_backends()
    print(f"available backends: {', '.join(backends)} (default: {engine.BACKEND})")
    cases = [
        ("qubit lindblad  (d=30,  T=60)", _qubit_case()),
        ("two-mode lindblad (d=144, T=2)", _two_mode_case()),
        ("qubit unitary   (d=30,  T=50)", _unitary_case()),
    ]
    print(f"{'case':34s} " + " ".join(f"{b:>10s}" for b in backends) + "   speedup")
    for label, fn in cases:
        times = {}
        ref_tracks = None
        for b in backends:
            t0 = time.perf_counter()
            res = fn(b)
            times[b] = time.perf_counter() - t0
            tracks = {k: v for k, v in res.series.tracks.items()}
            if ref_tracks is None:
                ref_tracks = tracks
            else:
                worst = max(np.abs(tracks[k] - ref_tracks[k]).max() for k in tracks)
                assert worst < 1e-10, f"backend disagreement {worst:.2e} on {label}"
        row = " ".join(f"{times[b]:9.3f}s" for b in backends)
        if len(backends) == 2:
            row += f"   {times[backends[1]] / times[backends[0]]:6.1f}x"
        print(f"{label:34s} {row}")


if __name__ == "__main__":
    run()
