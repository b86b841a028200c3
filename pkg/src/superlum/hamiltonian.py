"""Hamiltonian builders for the moving-qubit and moving-mirror models.

Moving qubit (units of omega_0 = pi c / L):

    H(theta) = omega_0 a^dag a + (omega_q/2) sigma_z
               + g cos(theta) sigma_x (a^dag + a),

with theta = k x_q the position phase / magnetic frustration. The qubit
factor comes first in the tensor order, dims = (2, n_max).

Moving mirror (units of omega_1 = pi c / L): multimode field in a cavity of
instantaneous length L(t),

    H = sum_n omega_n (a_n^dag a_n + 1/2)
        + i (L_dot/L) sum_n sum_{j != n} (-1)^{n+j} jn/(j^2-n^2) sqrt(n/j)
          (a_n^dag a_j^dag + a_n^dag a_j - a_n a_j^dag - a_n a_j),

with omega_n = pi c n / L(t). The raw double sum times a real prefactor is
anti-Hermitian (each bracket is X - X^dag), so the interaction is multiplied
by i to obtain a Hermitian generator; Hermiticity is asserted at build time.

Restricted to the two lowest modes with the short-time rate -v/L, the
squeezing strength is Omega = (sqrt(2)/3)(v/L) and the mode-mixing strength
is exactly 3 Omega.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import bessel_j_pi_half
from .engine import Schedule
from .errors import DimensionError, DomainError
from .qops import HERMITIAN_TOL, Operator, make_annihilation, make_identity, make_pauli, tensor
from .trajectory import MirrorProfile, QubitTrajectory, mirror_log_derivative, qubit_phase

TWO_MODE_VARIANTS = ("literal-eq13", "dicke-form")


@dataclass(frozen=True)
class RabiParams:
    """Moving-qubit model parameters, frequencies in units of omega_0."""

    omega_q: float
    g: float
    omega0: float = 1.0
    n_max: int = 15

    def __post_init__(self):
        if self.omega0 <= 0:
            raise DomainError("omega0 must be positive")
        if self.n_max < 2:
            raise DimensionError("n_max must be at least 2")
        if abs(self.g) >= self.omega0:
            raise DomainError("|g| < omega0 required (perturbative coupling regime)")

    @property
    def dims(self) -> tuple[int, int]:
        return (2, self.n_max)


@dataclass(frozen=True)
class MirrorModelSpec:
    """Moving-mirror field model, frequencies in units of omega_1.

    ``variant`` selects between the two-lowest-modes restriction of the
    multimode Hamiltonian above ("literal-eq13") and the symmetric
    position-position coupling ("dicke-form"); Omega is the squeezing
    strength used by the two-mode builders.
    """

    n_modes: int = 2
    L: float = 1.0
    variant: str = "literal-eq13"
    Omega: float = 0.0
    n_max: int = 25

    def __post_init__(self):
        if self.n_modes < 2:
            raise DimensionError("need at least two field modes")
        if self.n_modes > 6:
            raise DimensionError("n_modes > 6 unsupported (dimension explosion)")
        if self.L <= 0:
            raise DomainError("rest length must be positive")
        if self.variant not in TWO_MODE_VARIANTS:
            raise DomainError(f"unknown variant {self.variant!r}")
        if self.n_max < 2:
            raise DimensionError("n_max must be at least 2")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(self.n_max for _ in range(self.n_modes))


# --- moving qubit -----------------------------------------------------------

def rabi_free_term(p: RabiParams) -> Operator:
    a = make_annihilation(p.n_max)
    number = a.dag() @ a
    return p.omega0 * tensor([make_identity(2), number]) + 0.5 * p.omega_q * tensor(
        [make_pauli("z"), make_identity(p.n_max)]
    )


def rabi_interaction_term(p: RabiParams) -> Operator:
    a = make_annihilation(p.n_max)
    return p.g * tensor([make_pauli("x"), a + a.dag()])


def rabi_hamiltonian(p: RabiParams, theta: float) -> Operator:
    """Moving-qubit Hamiltonian at position phase theta = k x_q."""
    h = rabi_free_term(p) + math.cos(theta) * rabi_interaction_term(p)
    _assert_hermitian(h)
    return h


def flux_rabi_hamiltonian(p: RabiParams, f: float) -> Operator:
    """Flux-driven form: identical to rabi_hamiltonian under f = k x_q."""
    return rabi_hamiltonian(p, f)


def effective_oscillatory_hamiltonian(p: RabiParams, omega: float, t: float) -> Operator:
    """Single-harmonic reduction of full-span oscillatory motion.

    cos(pi/2 + (pi/2)cos(omega t)) ~ -2 J1(pi/2) cos(omega t), so the
    interaction equals a constant-velocity drive at v = (omega/omega0) c
    with coupling -2 g J1(pi/2).
    """
    coupling = -2.0 * bessel_j_pi_half(1) * math.cos(omega * t)
    h = rabi_free_term(p) + coupling * rabi_interaction_term(p)
    _assert_hermitian(h)
    return h


def rabi_schedule(p: RabiParams, traj: QubitTrajectory) -> Schedule:
    """Time-dependent schedule H(t) = H_free + cos(theta(t)) H_int."""
    free = rabi_free_term(p)
    inter = rabi_interaction_term(p)
    return Schedule((free, inter), (1.0, lambda t: np.cos(qubit_phase(traj, t))))


def effective_oscillatory_schedule(p: RabiParams, omega: float) -> Schedule:
    free = rabi_free_term(p)
    inter = rabi_interaction_term(p)
    amp = -2.0 * bessel_j_pi_half(1)
    return Schedule((free, inter), (1.0, lambda t: amp * np.cos(omega * t)))


# --- moving mirror ----------------------------------------------------------

def mode_coupling_coefficient(n: int, j: int) -> float:
    """(-1)^(n+j) * jn/(j^2 - n^2) * sqrt(n/j) for physical mode labels n != j."""
    if n == j:
        raise DomainError("coupling coefficient is defined for distinct modes")
    return ((-1) ** (n + j)) * (j * n / (j * j - n * n)) * math.sqrt(n / j)


def mirror_free_term(spec: MirrorModelSpec, L_t: float | None = None) -> Operator:
    """sum_n omega_n (a_n^dag a_n + 1/2) at instantaneous length L_t."""
    if L_t is None:
        L_t = spec.L
    if L_t <= 0:
        raise DomainError("cavity length must stay positive")
    dims = spec.dims
    total = np.zeros((int(np.prod(dims)),) * 2, dtype=complex)
    for i in range(spec.n_modes):
        omega_n = (i + 1) * (spec.L / L_t)  # pi c n / L(t) in omega_1 units
        factors = [make_identity(d) for d in dims]
        number = make_annihilation(dims[i]).dag() @ make_annihilation(dims[i])
        factors[i] = number + 0.5 * make_identity(dims[i])
        total = total + omega_n * tensor(factors).matrix
    return Operator(total, dims)


def mirror_coupling_term(spec: MirrorModelSpec) -> Operator:
    """i * sum_{n != j} coeff(n,j) (a_n^dag a_j^dag + a_n^dag a_j - h.c. pieces).

    This is the interaction at unit L_dot/L; multiply by the instantaneous
    log-derivative to get the full interaction.
    """
    dims = spec.dims
    size = int(np.prod(dims))
    total = np.zeros((size, size), dtype=complex)
    ann = [None] * spec.n_modes
    for i in range(spec.n_modes):
        factors = [make_identity(d) for d in dims]
        factors[i] = make_annihilation(dims[i])
        ann[i] = tensor(factors).matrix
    for n in range(1, spec.n_modes + 1):
        for j in range(1, spec.n_modes + 1):
            if n == j:
                continue
            cnj = mode_coupling_coefficient(n, j)
            an, aj = ann[n - 1], ann[j - 1]
            adn, adj = an.conj().T, aj.conj().T
            total += cnj * (adn @ adj + adn @ aj - an @ adj - an @ aj)
    return Operator(1j * total, dims)


def mirror_hamiltonian(spec: MirrorModelSpec, L_t: float, logderiv: float) -> Operator:
    """Multimode mirror Hamiltonian at instantaneous length and L_dot/L."""
    h = mirror_free_term(spec, L_t) + logderiv * mirror_coupling_term(spec)
    _assert_hermitian(h)
    return h


def mirror_schedule(spec: MirrorModelSpec, profile: MirrorProfile) -> Schedule:
    """H(t) with mode frequencies at instantaneous L(t) and the profile's
    log-derivative; under the short-time flag both coefficients freeze."""
    free = mirror_free_term(spec)
    coupling = mirror_coupling_term(spec)
    if profile.kind == "linear" and profile.short_time:
        rate = float(mirror_log_derivative(profile, 0.0))
        return Schedule((free, coupling), (1.0, rate))
    return Schedule(
        (free, coupling),
        (lambda t: profile.L / profile.length(t), lambda t: mirror_log_derivative(profile, t)),
    )


def two_mode_hamiltonian(omega1: float, Omega: float, variant: str = "literal-eq13",
                         n_max: int = 25) -> Operator:
    """Two coupled bosonic modes with omega_2 = 2 omega_1.

    literal-eq13: the n_modes = 2 restriction of the mirror Hamiltonian with
    the short-time rate chosen so the squeezing strength is Omega (the
    mode-mixing strength is then 3 Omega).
    dicke-form: H = omega1 a^dag a + 2 omega1 b^dag b
                    + Omega (a + a^dag)(b + b^dag).
    """
    if omega1 <= 0:
        raise DomainError("omega1 must be positive")
    if variant == "literal-eq13":
        spec = MirrorModelSpec(n_modes=2, variant=variant, Omega=Omega, n_max=n_max)
        # squeezing coefficient = |logderiv| * (c12 + c21) = |logderiv| * sqrt(2)/3
        logderiv = -3.0 * Omega / math.sqrt(2.0)
        h = omega1 * mirror_free_term(spec).matrix + logderiv * mirror_coupling_term(spec).matrix
        op = Operator(h, spec.dims)
    elif variant == "dicke-form":
        dims = (n_max, n_max)
        a = tensor([make_annihilation(n_max), make_identity(n_max)]).matrix
        b = tensor([make_identity(n_max), make_annihilation(n_max)]).matrix
        xa = a + a.conj().T
        xb = b + b.conj().T
        h = (omega1 * a.conj().T @ a + 2.0 * omega1 * b.conj().T @ b
             + Omega * (xa @ xb))
        op = Operator(h, dims)
    else:
        raise DomainError(f"unknown two-mode variant {variant!r}")
    _assert_hermitian(op)
    return op


def velocity_to_coupling(v: float, L: float = 1.0, c: float = 1.0) -> float:
    """Squeezing strength Omega = (sqrt(2)/3)(v c / L) for mirror speed v
    (units of c). Returned in the same frequency units as
    omega_1 = pi c / L; the ratio Omega/omega_1 = sqrt(2) v / (3 pi) is
    independent of L."""
    if L <= 0:
        raise DomainError("L must be positive")
    return (math.sqrt(2.0) / 3.0) * v * c / L


def coupling_to_velocity(Omega: float, L: float = 1.0, c: float = 1.0) -> float:
    """Exact inverse of velocity_to_coupling."""
    if L <= 0:
        raise DomainError("L must be positive")
    return 3.0 * Omega * L / (math.sqrt(2.0) * c)


def fundamental_frequency(L: float = 1.0, c: float = 1.0) -> float:
    """omega_1 = pi c / L."""
    if L <= 0:
        raise DomainError("L must be positive")
    return math.pi * c / L


def critical_coupling(omega1: float = 1.0, omega2: float | None = None) -> float:
    """Superradiant critical point Omega_c = sqrt(omega1 omega2)/2."""
    if omega2 is None:
        omega2 = 2.0 * omega1
    return math.sqrt(omega1 * omega2) / 2.0


def coupling_ratio_for_velocity(v: float) -> float:
    """Omega/omega_1 for a mirror speed v in units of c: sqrt(2) v/(3 pi)."""
    return math.sqrt(2.0) * v / (3.0 * math.pi)


def _assert_hermitian(op: Operator) -> None:
    defect = op.hermiticity_defect()
    if defect > HERMITIAN_TOL:
        raise DomainError(f"built Hamiltonian is not Hermitian (defect {defect:.2e})")
