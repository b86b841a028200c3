"""Qubit trajectories, mirror length profiles, and their modulation signals.

Unit conventions (ratios are all that matter for the physics):

* qubit side: positions in units of the resonator length L, velocities in
  units of c (the speed of light in the medium), times in 1/omega_0 where
  omega_0 = pi c / L is the fundamental mode frequency;
* mirror side: lengths in units of the rest length L, velocities in units
  of c, times in 1/omega_1 where omega_1 = pi c / L. The combination
  c / (omega_1 L) = 1/pi converts c-unit speeds into log-derivative rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

#: speed of light in the medium over a resonator length, in units of the
#: fundamental frequency: c/L = omega_1/pi (identically on the qubit side).
C_OVER_L = 1.0 / math.pi

#: typical microwave-circuit medium: c = c0/3.
DEFAULT_MEDIUM_C_RATIO = 1.0 / 3.0

#: engineering margin turning "much less than" into a testable bound.
DEFAULT_MARGIN = 0.2

QUBIT_KINDS = ("constant-velocity", "oscillatory", "static")
MIRROR_KINDS = ("linear", "dce-sinusoidal", "static")


@dataclass(frozen=True)
class QubitTrajectory:
    """Parametric qubit position x_q(t) inside the resonator.

    constant-velocity: x_q(t) = x0 + v t (may leave [0, L]; only
    cos(k x_q) ever enters the dynamics, so no clamping).
    oscillatory: x_q(t) = L/2 + (L/2) cos(omega t), spanning [0, L].
    static: x_q(t) = x0.
    """

    kind: str
    x0: float = 0.0      # units of L
    v: float = 0.0       # units of c
    omega: float = 0.0   # units of omega_0

    def __post_init__(self):
        if self.kind not in QUBIT_KINDS:
            raise DomainError(f"unknown qubit trajectory kind {self.kind!r}")
        if self.kind == "oscillatory" and self.omega <= 0:
            raise DomainError("oscillatory trajectory needs omega > 0")

    def peak_speed(self) -> float:
        """Peak |dx_q/dt| in units of c."""
        if self.kind == "constant-velocity":
            return abs(self.v)
        if self.kind == "oscillatory":
            # |x_dot| max = (L/2) omega; divide by c = omega_0 L / pi
            return self.omega * math.pi / 2.0
        return 0.0


@dataclass(frozen=True)
class MirrorProfile:
    """Cavity length profile L(t).

    linear: L(t) = L - v t, valid for t < L/v.
    dce-sinusoidal: L(t) = L (1 + delta sin(omega_d t)), delta <= 0.1.
    static: L(t) = L.
    """

    kind: str
    L: float = 1.0        # rest length (length unit)
    v: float = 0.0        # units of c
    delta: float = 0.0    # relative modulation amplitude
    omega_d: float = 0.0  # units of omega_1
    short_time: bool = False  # linear profile only: freeze L_dot/L at -v/L

    def __post_init__(self):
        if self.kind not in MIRROR_KINDS:
            raise DomainError(f"unknown mirror profile kind {self.kind!r}")
        if self.L <= 0:
            raise DomainError("rest length must be positive")
        if self.kind == "dce-sinusoidal":
            if not 0 < self.delta <= 0.1:
                raise DomainError(
                    f"dce-sinusoidal needs 0 < delta <= 0.1 (delta << 1), got {self.delta}"
                )
            if self.omega_d <= 0:
                raise DomainError("dce-sinusoidal needs omega_d > 0")
        if self.kind == "linear" and self.v <= 0:
            raise DomainError("linear profile needs contraction speed v > 0")

    @property
    def t_max(self) -> float:
        """Upper end of the validity domain (1/omega_1 units); inf if none."""
        if self.kind == "linear" and not self.short_time:
            # L(t) > 0  <=>  t < L/(v c), i.e. pi/v in 1/omega_1 units
            return math.pi / self.v
        return math.inf

    def length(self, t):
        """L(t) in units of the rest length."""
        t = np.asarray(t, dtype=float)
        if self.kind == "linear":
            frac = 1.0 - (self.v * C_OVER_L) * t
            if np.any(frac <= 0):
                raise DomainError(
                    "linear profile evaluated at t >= L/v; the restriction is on "
                    "time, not on velocity"
                )
            return self.L * frac
        if self.kind == "dce-sinusoidal":
            return self.L * (1.0 + self.delta * np.sin(self.omega_d * t))
        return self.L * np.ones_like(t)

    def peak_speed(self) -> float:
        """Peak |dL/dt| in units of c."""
        if self.kind == "linear":
            return abs(self.v)
        if self.kind == "dce-sinusoidal":
            # |L_dot| max = delta L omega_d; dividing by c = omega_1 L / pi
            # cancels L and leaves pi delta omega_d
            return self.delta * self.omega_d * math.pi
        return 0.0


@dataclass(frozen=True)
class FeasibilityReport:
    """Classification of a motion's peak effective velocity."""

    hardware_feasible: bool
    superluminal_in_medium: bool
    superluminal_in_vacuum: bool
    v_max: float  # units of c
    notes: tuple[str, ...] = field(default_factory=tuple)


def qubit_phase(traj: QubitTrajectory, t):
    """Phase theta = k x_q(t) in radians, with k = pi/L.

    constant-velocity: theta = pi x0 + v t;
    oscillatory: theta = pi/2 + (pi/2) cos(omega t);
    static: theta = pi x0.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("trajectory phases are defined for t >= 0")
    if traj.kind == "constant-velocity":
        return math.pi * traj.x0 + traj.v * t
    if traj.kind == "oscillatory":
        return math.pi / 2.0 + (math.pi / 2.0) * np.cos(traj.omega * t)
    return math.pi * traj.x0 * np.ones_like(t)


def flux_profile(traj: QubitTrajectory, t):
    """Magnetic frustration f(t); identical to qubit_phase by the f = k x_q map."""
    return qubit_phase(traj, t)


def mirror_log_derivative(profile: MirrorProfile, t):
    """L_dot(t)/L(t) in units of omega_1.

    linear: -v/(L - v t); with the short-time flag, the constant -v/L.
    dce-sinusoidal: delta omega_d cos(omega_d t) / (1 + delta sin(omega_d t)).
    """
    t = np.asarray(t, dtype=float)
    w = profile.v * C_OVER_L  # v c / L in omega_1 units (L cancels)
    if profile.kind == "linear":
        if profile.short_time:
            return -w * np.ones_like(t)
        frac = 1.0 - w * t
        if np.any(frac <= 0):
            raise DomainError(
                "linear profile log-derivative needs t < L/v (positive length)"
            )
        return -w / frac
    if profile.kind == "dce-sinusoidal":
        ph = profile.omega_d * t
        return profile.delta * profile.omega_d * np.cos(ph) / (1.0 + profile.delta * np.sin(ph))
    return np.zeros_like(t)


def feasibility_check(motion, medium_c_ratio: float = DEFAULT_MEDIUM_C_RATIO,
                      margin: float = DEFAULT_MARGIN) -> FeasibilityReport:
    """Classify peak effective velocity against c (medium) and c0 (vacuum).

    For qubit trajectories the motion is only simulated (flux modulation), so
    it is always hardware-feasible regardless of the effective speed. Mirror
    motion is bounded by the modulated-boundary hardware limit
    v_max << 2c, made testable as v_max < margin * 2c; the linear profile is
    never feasible (infinite acceleration at t = 0).
    """
    if not 0 < medium_c_ratio <= 1:
        raise DomainError("medium_c_ratio must lie in (0, 1]")
    v_max = motion.peak_speed()
    vacuum_threshold = 1.0 / medium_c_ratio
    in_medium = v_max > 1.0
    in_vacuum = v_max > vacuum_threshold
    notes = []
    if isinstance(motion, QubitTrajectory):
        feasible = True
        if in_vacuum:
            notes.append(
                f"effective velocity {v_max:.3g}c exceeds c0 = {vacuum_threshold:.3g}c; "
                "only realizable as a flux-modulation simulation"
            )
        elif in_medium:
            notes.append(f"effective velocity {v_max:.3g}c exceeds c but stays below c0")
    elif isinstance(motion, MirrorProfile):
        if motion.kind == "linear":
            feasible = False
            notes.append("linear contraction implies infinite acceleration at t = 0")
        elif motion.kind == "dce-sinusoidal":
            bound = margin * 2.0
            feasible = v_max < bound
            if not feasible:
                notes.append(
                    f"peak boundary speed {v_max:.3g}c violates v_max < {bound:.3g}c "
                    "(modulated-SQUID operating margin)"
                )
        else:
            feasible = True
        if in_medium:
            feasible = False
    else:
        raise DomainError(f"cannot classify object of type {type(motion).__name__}")
    return FeasibilityReport(
        hardware_feasible=feasible,
        superluminal_in_medium=in_medium,
        superluminal_in_vacuum=in_vacuum,
        v_max=v_max,
        notes=tuple(notes),
    )
