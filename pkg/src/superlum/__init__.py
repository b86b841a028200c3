"""Desk-scale simulation of effectively superluminal motion in circuit QED.

Two scenarios: a qubit whose simulated position sweeps a resonator faster
than light in the medium (emission from counter-rotating resonance), and a
cavity mirror contracting at superluminal effective speed (two-mode
squeezing with a superradiant critical point). The package provides the
operator algebra, trajectory/flux compilers, Hamiltonian builders, unitary
and Lindblad integrators, analytic oracles, and a scenario CLI.
"""

from .analytic import (
    BesselExpansion,
    CovarianceState,
    NormalModeReport,
    PerturbativeResult,
    QuadraticModelSpec,
    bessel_coefficients,
    dicke_mapping,
    gaussian_evolve,
    normal_mode_analysis,
    perturbative_probability,
    qubits_for_velocity,
    resonance_velocity,
)
from .engine import BACKEND, Schedule, available_backends
from .errors import (
    ConfigError,
    DimensionError,
    DomainError,
    IntegrationError,
    PositivityError,
    SuperlumError,
)
from .evolve import (
    EvolutionResult,
    NoiseSpec,
    TimeSeries,
    evolve_lindblad,
    evolve_unitary,
    mode_collapse_ops,
    observables,
    qubit_collapse_ops,
)
from .hamiltonian import (
    MirrorModelSpec,
    RabiParams,
    coupling_ratio_for_velocity,
    coupling_to_velocity,
    critical_coupling,
    effective_oscillatory_hamiltonian,
    flux_rabi_hamiltonian,
    mirror_hamiltonian,
    rabi_hamiltonian,
    rabi_schedule,
    two_mode_hamiltonian,
    velocity_to_coupling,
)
from .qops import (
    Operator,
    QuantumState,
    basis_state,
    expectation,
    make_annihilation,
    make_identity,
    make_pauli,
    tensor,
    vacuum_state,
)
from .trajectory import (
    FeasibilityReport,
    MirrorProfile,
    QubitTrajectory,
    feasibility_check,
    flux_profile,
    mirror_log_derivative,
    qubit_phase,
)

__version__ = "0.1.0"
