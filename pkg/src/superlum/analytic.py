"""Closed-form and semi-analytic oracles.

These routines deliberately avoid the Fock-space integrator so they can
serve as independent cross-checks: perturbative emission probability by
adaptive quadrature plus an elementary closed form, an in-house Bessel
power series for the oscillatory-motion reduction, exact Gaussian
(covariance-matrix) propagation for the quadratic mirror models, and the
symplectic stability analysis locating the superradiant critical point.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.linalg import expm

from .errors import DimensionError, DomainError
from .evolve import TimeSeries
from .qops import _readonly
from .trajectory import QubitTrajectory, qubit_phase

#: x_q-phase argument fixed by the full-span oscillation: k L / 2.
_BESSEL_ARG = math.pi / 2.0

#: mean thermal photon number of a ~5 GHz mode at the top of the 10-100 mK
#: range; photon yields are compared against this floor.
THERMAL_COMPARISON_FLOOR = 0.1

#: h * 1 GHz / k_B in millikelvin.
_GHZ_IN_MK = 47.9924


def thermal_occupation(freq_ghz: float, temp_mk: float) -> float:
    """Bose occupation of a mode of the given frequency and temperature."""
    if freq_ghz <= 0 or temp_mk < 0:
        raise DomainError("frequency must be positive and temperature non-negative")
    if temp_mk == 0:
        return 0.0
    return 1.0 / math.expm1(_GHZ_IN_MK * freq_ghz / temp_mk)


# --- Bessel reduction of the oscillatory trajectory --------------------------

def bessel_j_series(order: int, x: float) -> float:
    """Bessel J_n(x) by power series, terms kept until relative size < 1e-15.

    Self-contained on purpose: the package carries no special-function
    dependency, and the series converges in a few terms for the fixed
    argument pi/2 used here.
    """
    if order < 0:
        raise DomainError("order must be non-negative")
    half = 0.5 * x
    term = half**order / math.factorial(order)
    total = term
    m = 1
    while True:
        term *= -(half * half) / (m * (m + order))
        total += term
        if abs(term) < 1e-15 * max(abs(total), 1e-300):
            return total
        m += 1
        if m > 200:  # unreachable for the arguments used here
            raise DomainError(f"Bessel series failed to converge for J_{order}({x})")


@lru_cache(maxsize=None)
def bessel_j_pi_half(order: int) -> float:
    return bessel_j_series(order, _BESSEL_ARG)


@dataclass(frozen=True)
class BesselExpansion:
    """Odd-order Bessel values at pi/2 and the induced cosine expansion.

    cos(pi/2 + (pi/2)cos(phi)) = sum_k coefficients[k] * cos((2k+1) phi)
    with coefficients[k] = -2 (-1)^k J_{2k+1}(pi/2); sup_error is the
    sup-norm of the truncation over one period of phi.
    """

    orders: tuple[int, ...]
    values: tuple[float, ...]
    coefficients: tuple[float, ...]
    sup_error: float


def bessel_coefficients(k_max: int) -> BesselExpansion:
    if k_max < 0:
        raise DomainError("k_max must be non-negative")
    orders = tuple(2 * k + 1 for k in range(k_max + 1))
    values = tuple(bessel_j_pi_half(n) for n in orders)
    coeffs = tuple(-2.0 * ((-1) ** k) * v for k, v in enumerate(values))
    phi = np.linspace(0.0, 2.0 * np.pi, 4001)
    exact = np.cos(_BESSEL_ARG + _BESSEL_ARG * np.cos(phi))
    approx = np.zeros_like(phi)
    for n, c in zip(orders, coeffs):
        approx += c * np.cos(n * phi)
    sup_error = float(np.abs(exact - approx).max())
    return BesselExpansion(orders, values, coeffs, sup_error)


# --- perturbative emission probability ----------------------------------------

@dataclass(frozen=True)
class PerturbativeResult:
    """Emission probability from quadrature, with the elementary closed form
    when the trajectory admits one (constant velocity / static)."""

    quadrature: float
    closed_form: float | None
    integral: complex


def _phase_integral_elementary(mu: float, T: float) -> complex:
    """int_0^T e^{i mu t} dt."""
    if mu == 0.0:
        return complex(T)
    return (np.exp(1j * mu * T) - 1.0) / (1j * mu)


def perturbative_probability(p, traj: QubitTrajectory, T: float) -> PerturbativeResult:
    """P_e = g^2 | int_0^T e^{i(omega_q + omega0) t} cos(k x_q(t)) dt |^2.

    Quadrature with relative tolerance 1e-8 does not assume any trajectory
    form; for constant-velocity and static motion the integral splits into
    elementary pieces e^{i(Delta +- k v) t}, returned alongside.
    """
    if T <= 0:
        raise DomainError("T must be positive")
    if abs(p.g) / p.omega0 > 0.05:
        warnings.warn("perturbative probability unreliable for g/omega0 > 0.05", stacklevel=2)
    delta = p.omega_q + p.omega0

    def integrand_re(t):
        return math.cos(float(qubit_phase(traj, t))) * math.cos(delta * t)

    def integrand_im(t):
        return math.cos(float(qubit_phase(traj, t))) * math.sin(delta * t)

    # enough subdivisions for ~(delta + v) T / 2pi oscillation periods
    limit = max(200, int(20 * (delta + abs(traj.v) + traj.omega) * T / (2 * math.pi)))
    re, _ = quad(integrand_re, 0.0, T, epsabs=1e-13, epsrel=1e-10, limit=limit)
    im, _ = quad(integrand_im, 0.0, T, epsabs=1e-13, epsrel=1e-10, limit=limit)
    integral = complex(re, im)

    closed = None
    if traj.kind in ("constant-velocity", "static"):
        kx0 = math.pi * traj.x0
        kv = traj.v if traj.kind == "constant-velocity" else 0.0
        val = 0.5 * (
            np.exp(1j * kx0) * _phase_integral_elementary(delta + kv, T)
            + np.exp(-1j * kx0) * _phase_integral_elementary(delta - kv, T)
        )
        closed = float(p.g**2 * abs(val) ** 2)
    return PerturbativeResult(float(p.g**2 * abs(integral) ** 2), closed, integral)


def resonance_velocity(omega_q: float, omega0: float) -> float:
    """Velocity (units of c) at which emission is resonantly enhanced."""
    if omega_q <= 0 or omega0 <= 0:
        raise DomainError("frequencies must be positive")
    return (omega_q + omega0) / omega0


# --- Gaussian propagation of the quadratic mirror models ---------------------

#: symplectic form for quadrature order (x1, p1, x2, p2).
SYMPLECTIC_FORM = np.array(
    [[0.0, 1.0, 0.0, 0.0],
     [-1.0, 0.0, 0.0, 0.0],
     [0.0, 0.0, 0.0, 1.0],
     [0.0, 0.0, -1.0, 0.0]]
)

QUADRATIC_VARIANTS = ("literal-eq13", "dicke-form")


@dataclass(frozen=True)
class QuadraticModelSpec:
    """Two-mode quadratic model: frequencies, squeezing/mixing strengths,
    per-mode decay rates, all in units of omega_1."""

    variant: str
    squeeze: float
    mix: float
    omega1: float = 1.0
    omega2: float = 2.0
    kappa: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.variant not in QUADRATIC_VARIANTS:
            raise DomainError(f"unknown variant {self.variant!r}")
        if self.omega1 <= 0 or self.omega2 <= 0:
            raise DomainError("mode frequencies must be positive")
        if any(k < 0 for k in self.kappa):
            raise DomainError("decay rates must be non-negative")

    @classmethod
    def from_coupling(cls, variant: str, Omega: float, omega1: float = 1.0,
                      kappa: tuple[float, float] = (0.0, 0.0)) -> "QuadraticModelSpec":
        """Canonical strengths for a given interaction scale Omega:
        literal-eq13 pairs squeezing Omega with mixing 3 Omega; dicke-form
        weights both quadratic pieces equally."""
        if variant == "literal-eq13":
            return cls(variant, squeeze=Omega, mix=3.0 * Omega, omega1=omega1,
                       omega2=2.0 * omega1, kappa=kappa)
        if variant == "dicke-form":
            return cls(variant, squeeze=Omega, mix=Omega, omega1=omega1,
                       omega2=2.0 * omega1, kappa=kappa)
        raise DomainError(f"unknown variant {variant!r}")

    def quadratic_form(self) -> np.ndarray:
        """Symmetric G with H = (1/2) r^T G r, r = (x1, p1, x2, p2)."""
        g = np.diag([self.omega1, self.omega1, self.omega2, self.omega2]).astype(float)
        s, m = self.squeeze, self.mix
        if self.variant == "literal-eq13":
            # -i s (a1+ a2+ - a1 a2) + i m (a1+ a2 - a1 a2+)
            g[0, 3] = g[3, 0] = -(s + m)
            g[1, 2] = g[2, 1] = m - s
        else:
            # s (a1 a2 + h.c.) + m (a1 a2+ + h.c.)
            g[0, 2] = g[2, 0] = s + m
            g[1, 3] = g[3, 1] = m - s
        return g


@dataclass(frozen=True)
class CovarianceState:
    """Gaussian state of the two-mode model: quadrature means and 4x4
    covariance (vacuum variances 1/2)."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if mean.shape != (4,) or cov.shape != (4, 4):
            raise DimensionError("CovarianceState needs a 4-vector mean and 4x4 covariance")
        if np.abs(cov - cov.T).max() > 1e-10:
            raise DimensionError("covariance matrix must be symmetric")
        # uncertainty relation: V + i Sigma / 2 >= 0
        test = cov + 0.5j * SYMPLECTIC_FORM
        mineig = float(np.linalg.eigvalsh(test).min())
        if mineig < -1e-9:
            raise DimensionError(f"covariance violates the uncertainty relation ({mineig:.2e})")
        object.__setattr__(self, "mean", _readonly(mean))
        object.__setattr__(self, "cov", _readonly(0.5 * (cov + cov.T)))

    @classmethod
    def vacuum(cls) -> "CovarianceState":
        return cls(np.zeros(4), 0.5 * np.eye(4))

    @classmethod
    def thermal(cls, nbars: tuple[float, float]) -> "CovarianceState":
        diag = [nbars[0] + 0.5, nbars[0] + 0.5, nbars[1] + 0.5, nbars[1] + 0.5]
        return cls(np.zeros(4), np.diag(diag))

    def photon_numbers(self) -> tuple[float, float]:
        n = []
        for i in (0, 1):
            v = self.cov[2 * i, 2 * i] + self.cov[2 * i + 1, 2 * i + 1]
            mu = self.mean[2 * i] ** 2 + self.mean[2 * i + 1] ** 2
            n.append(0.5 * (v + mu - 1.0))
        return (n[0], n[1])


def gaussian_evolve(spec: QuadraticModelSpec, t_grid,
                    initial: CovarianceState | None = None) -> tuple[TimeSeries, CovarianceState]:
    """Exact propagation of the Gaussian state under the quadratic model with
    per-mode decay.

    The first moments follow dm/dt = A m and the covariance
    dV/dt = A V + V A^T + D with A = Sigma G - (1/2) diag(kappa) and
    D = (1/2) diag(kappa) (zero-temperature input). Both flows are affine
    and time-independent, so each grid interval is advanced by one exact
    matrix exponential; there is no Fock truncation error and no step error
    beyond expm itself.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0):
        raise DomainError("t_grid must be a strictly increasing 1-d grid with >= 2 points")
    state = initial or CovarianceState.vacuum()
    g = spec.quadratic_form()
    kdiag = np.array([spec.kappa[0], spec.kappa[0], spec.kappa[1], spec.kappa[1]])
    a = SYMPLECTIC_FORM @ g - 0.5 * np.diag(kdiag)
    d = 0.5 * np.diag(kdiag)

    # affine Lyapunov flow, augmented so expm handles the inhomogeneity
    kmat = np.kron(a, np.eye(4)) + np.kron(np.eye(4), a)
    aug = np.zeros((17, 17))
    aug[:16, :16] = kmat
    aug[:16, 16] = d.reshape(-1)

    prop_cache: dict[float, tuple[np.ndarray, np.ndarray]] = {}

    def propagators(dt: float) -> tuple[np.ndarray, np.ndarray]:
        key = round(dt, 15)
        if key not in prop_cache:
            prop_cache[key] = (expm(aug * dt), expm(a * dt))
        return prop_cache[key]

    vec = np.empty(17)
    vec[:16] = np.asarray(state.cov).reshape(-1)
    vec[16] = 1.0
    mean = np.array(state.mean, dtype=float)

    n1 = np.empty(t.size)
    n2 = np.empty(t.size)
    for i in range(t.size):
        cov = vec[:16].reshape(4, 4)
        v1 = cov[0, 0] + cov[1, 1] + mean[0] ** 2 + mean[1] ** 2
        v2 = cov[2, 2] + cov[3, 3] + mean[2] ** 2 + mean[3] ** 2
        n1[i] = 0.5 * (v1 - 1.0)
        n2[i] = 0.5 * (v2 - 1.0)
        if i + 1 < t.size:
            e_aug, e_mean = propagators(t[i + 1] - t[i])
            vec = e_aug @ vec
            mean = e_mean @ mean
    series = TimeSeries(t, {"n1": n1, "n2": n2, "n_total": n1 + n2})
    cov = vec[:16].reshape(4, 4)
    final = CovarianceState(mean, 0.5 * (cov + cov.T))
    return series, final


@dataclass(frozen=True)
class NormalModeReport:
    """Normal-mode frequencies and dynamical stability of a quadratic model."""

    frequencies: tuple[float, ...]
    stable: bool
    max_growth_rate: float


def normal_mode_analysis(spec: QuadraticModelSpec) -> NormalModeReport:
    """Symplectic eigenanalysis of the closed (decay-free) quadratic form.

    Eigenvalues of Sigma G come in (+/- i nu) pairs for a stable model; any
    eigenvalue with a real part beyond the numerical threshold marks
    dynamical instability (for the dicke-form this onset sits at
    Omega_c = sqrt(omega1 omega2)/2).
    """
    g = spec.quadratic_form()
    mu = np.linalg.eigvals(SYMPLECTIC_FORM @ g)
    scale = float(np.abs(mu).max())
    growth = float(mu.real.max())
    stable = growth <= 1e-6 * max(scale, 1.0)
    freqs = np.sort(mu.imag[mu.imag > 1e-12 * max(scale, 1.0)])
    return NormalModeReport(tuple(float(f) for f in freqs), stable, growth)


# --- Dicke mapping -----------------------------------------------------------

def dicke_mapping(n_qubits: int, g1: float) -> float:
    """Collective coupling sqrt(N) g1 of N qubits sharing one mode."""
    if n_qubits < 1:
        raise DomainError("need at least one qubit")
    if g1 <= 0:
        raise DomainError("single-qubit coupling must be positive")
    return math.sqrt(n_qubits) * g1


def qubits_for_velocity(v: float, g1: float, L: float = 1.0, c: float = 1.0) -> int:
    """Smallest N with sqrt(N) g1 >= the coupling simulating mirror speed v."""
    from .hamiltonian import velocity_to_coupling  # local import; hamiltonian uses the Bessel series above

    if g1 <= 0:
        raise DomainError("single-qubit coupling must be positive")
    target = velocity_to_coupling(v, L, c)
    if target <= 0:
        return 1
    ratio = (target / g1) ** 2
    # snap exact squares that floating point nudged upward
    return max(1, math.ceil(ratio - 1e-9))
