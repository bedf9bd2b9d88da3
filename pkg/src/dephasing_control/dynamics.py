"""Bloch dynamics of a controlled dephasing qubit.

The controlled master equation is equivalent to the real linear system

    2 vx' = -gamma*vx + uy*vz - uz*vy
    2 vy' = -gamma*vy - ux*vz + uz*vx
    2 vz' =  ux*vy - uy*vx

for the Bloch coordinates, with (ux, uy, uz) the control field components.
Two propagation routes are provided:

* closed form, stage by stage: free decay (zero field) and the oscillatory
  solution for a constant y-only field u > gamma/2 acting on a state in the
  xz-plane, with angular frequency Omega = sqrt(4u^2 - gamma^2)/4 and
  envelope exp(-gamma*t/4);
* an independent fixed-step RK4 oracle that integrates the system above
  directly and never lets a step straddle a switching time.

Control schedules are three-stage and piecewise constant: rotate the state
into the z-axis (stage 1), wait inside the decoherence-free set (stage 2),
rotate back out to the original coherence (stage 3).  The in-plane direction
of the field is set once by the phase theta of the initial transverse
component; stage 3 uses the opposite sign of stage 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bloch import BlochState
from .errors import (
    InvalidState,
    InvalidStep,
    OutOfHorizon,
    OverdampedRegime,
    PlaneViolation,
)

# |vy| below this (relative to the state scale) is treated as exactly in-plane.
PLANE_TOL = 1e-12


@dataclass(frozen=True)
class ControlField:
    """Instantaneous control field components entering the Bloch system."""

    ux: float
    uy: float
    uz: float

    def __post_init__(self):
        for name in ("ux", "uy", "uz"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidState(f"control component {name} is not finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.ux, self.uy, self.uz], dtype=float)


ZERO_FIELD = ControlField(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class ControlSchedule:
    """Three-stage piecewise-constant control.

    epsilon is the rotation sense of stage 1 (stage 3 uses -epsilon), theta
    the azimuth of the initial transverse component, u > 0 the field
    magnitude, and dt1/dt2/dt3 the stage durations.  The horizon is their
    sum.  Whenever a steering stage is present (dt1 > 0 or dt3 > 0) the
    field must satisfy u > gamma/2 for the damping rate it is used with;
    that is enforced where gamma is known (propagation and synthesis).
    """

    epsilon: int
    theta: float
    u: float
    dt1: float
    dt2: float
    dt3: float

    def __post_init__(self):
        if self.epsilon not in (-1, 1):
            raise InvalidState(f"epsilon must be -1 or +1, got {self.epsilon!r}")
        if not (self.u > 0) or not math.isfinite(self.u):
            raise InvalidState(f"field magnitude must be > 0, got {self.u!r}")
        if not math.isfinite(self.theta):
            raise InvalidState(f"theta is not finite: {self.theta!r}")
        for name in ("dt1", "dt2", "dt3"):
            v = getattr(self, name)
            if not (v >= 0) or not math.isfinite(v):
                raise InvalidState(f"{name} must be >= 0, got {v!r}")
        object.__setattr__(self, "theta", self.theta % (2.0 * math.pi))

    @property
    def horizon(self) -> float:
        return self.dt1 + self.dt2 + self.dt3

    def stage_boundaries(self) -> tuple[float, float, float]:
        """Switch-off, switch-on, and final times (t1, t2, T)."""
        return self.dt1, self.dt1 + self.dt2, self.horizon


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered samples of the controlled evolution.

    states has one row (vx, vy, vz) per time; purity and coherence are the
    squared norm and squared transverse part of the same rows.
    """

    times: np.ndarray
    states: np.ndarray
    fields: np.ndarray
    purity: np.ndarray
    coherence: np.ndarray

    def __post_init__(self):
        n = len(self.times)
        if self.states.shape != (n, 3) or self.fields.shape != (n, 3):
            raise InvalidState("trajectory column shapes disagree")
        if n == 0 or np.any(np.diff(self.times) <= 0):
            raise InvalidState("trajectory times must be strictly increasing")

    @classmethod
    def from_samples(cls, times, states, fields) -> "Trajectory":
        times = np.asarray(times, dtype=float)
        states = np.asarray(states, dtype=float)
        fields = np.asarray(fields, dtype=float)
        pur = np.einsum("ij,ij->i", states, states)
        coh = states[:, 0] ** 2 + states[:, 1] ** 2
        return cls(times, states, fields, pur, coh)

    def __len__(self) -> int:
        return len(self.times)

    def final_state(self) -> BlochState:
        return BlochState.from_array(self.states[-1])


def control_field_at(schedule: ControlSchedule, t: float) -> ControlField:
    """Field at time t: stage 1 on [0, dt1), off on [dt1, dt1+dt2), stage 3
    on [dt1+dt2, T] with the opposite sign.

    Stage intervals are half-open except the last, which is closed at T, so
    the value at each switching instant is unambiguous.  The in-plane
    direction is (-sin(theta), cos(theta)) scaled by epsilon*u; the z
    component is always zero.
    """
    t1, t2, T = schedule.stage_boundaries()
    if t < 0.0 or t > T:
        raise OutOfHorizon(f"t = {t!r} outside [0, {T!r}]")
    if t < t1:
        sign = schedule.epsilon * schedule.u
    elif t < t2:
        return ZERO_FIELD
    else:
        sign = -schedule.epsilon * schedule.u
    return ControlField(-sign * math.sin(schedule.theta), sign * math.cos(schedule.theta), 0.0)


def derivative(state: BlochState, field: ControlField, gamma: float) -> tuple[float, float, float]:
    """Right-hand side of the controlled Bloch system, (vx', vy', vz')."""
    return _deriv(state.vx, state.vy, state.vz, field.ux, field.uy, field.uz, gamma)


def _deriv(vx, vy, vz, ux, uy, uz, gamma):
    return (
        0.5 * (-gamma * vx + uy * vz - uz * vy),
        0.5 * (-gamma * vy - ux * vz + uz * vx),
        0.5 * (ux * vy - uy * vx),
    )


def free_propagate(state: BlochState, gamma: float, dt: float) -> BlochState:
    """Zero-field evolution: transverse components decay as exp(-gamma*dt/2),
    vz is untouched."""
    if dt < 0:
        raise ValueError(f"dt must be >= 0, got {dt!r}")
    decay = math.exp(-0.5 * gamma * dt)
    return BlochState(state.vx * decay, state.vy * decay, state.vz)


def propagate_constant_y(
    state: BlochState, u: float, epsilon: int, gamma: float, dt: float
) -> BlochState:
    """Closed-form evolution under a constant y-only field u_y = epsilon*u.

    Valid in the oscillatory regime u > gamma/2 for states in the xz-plane
    (vy = 0).  With Omega = sqrt(4u^2 - gamma^2)/4 and s = 4*Omega:

        vx(dt) = e^(-gamma dt/4) [ vx0 cos(Omega dt)
                                   + (2 eps u vz0 - gamma vx0)/s sin(Omega dt) ]
        vz(dt) = e^(-gamma dt/4) [ vz0 cos(Omega dt)
                                   - (2 eps u vx0 - gamma vz0)/s sin(Omega dt) ]

    and vy stays exactly zero.
    """
    _check_plane_inputs(state, u, epsilon, gamma)
    if dt < 0:
        raise ValueError(f"dt must be >= 0, got {dt!r}")
    vx, vz = _plane_step(state.vx, state.vz, u, epsilon, gamma, dt)
    return BlochState(vx, 0.0, vz)


def _check_plane_inputs(state: BlochState, u: float, epsilon: int, gamma: float):
    if epsilon not in (-1, 1):
        raise InvalidState(f"epsilon must be -1 or +1, got {epsilon!r}")
    if not (gamma > 0):
        raise ValueError(f"gamma must be > 0, got {gamma!r}")
    if u <= 0.5 * gamma:
        raise OverdampedRegime(f"u = {u!r} <= gamma/2 = {0.5 * gamma!r}")
    scale = max(1.0, abs(state.vx), abs(state.vz))
    if abs(state.vy) > PLANE_TOL * scale:
        raise PlaneViolation(f"vy = {state.vy!r} but the propagator requires vy = 0")


def _plane_step(vx, vz, u, epsilon, gamma, dt):
    s = math.sqrt(4.0 * u * u - gamma * gamma)
    om = 0.25 * s
    env = np.exp(-0.25 * gamma * np.asarray(dt))
    c = np.cos(om * np.asarray(dt))
    sn = np.sin(om * np.asarray(dt))
    nvx = env * (vx * c + (2.0 * epsilon * u * vz - gamma * vx) / s * sn)
    nvz = env * (vz * c - (2.0 * epsilon * u * vx - gamma * vz) / s * sn)
    return nvx, nvz


def states_at(
    schedule: ControlSchedule, state0: BlochState, gamma: float, times
) -> np.ndarray:
    """Closed-form states of the scheduled evolution at the given times.

    Rotates the initial state by -theta into the xz-plane, composes the
    stage propagators, and rotates back.  times must lie in [0, T].
    Returns an array of shape (len(times), 3).
    """
    if not (gamma > 0):
        raise ValueError(f"gamma must be > 0, got {gamma!r}")
    t1, t2, T = schedule.stage_boundaries()
    times = np.asarray(times, dtype=float)
    if times.size and (times.min() < 0.0 or times.max() > T):
        raise OutOfHorizon(f"sample times outside [0, {T!r}]")
    if (schedule.dt1 > 0 or schedule.dt3 > 0) and schedule.u <= 0.5 * gamma:
        raise OverdampedRegime(
            f"u = {schedule.u!r} <= gamma/2 = {0.5 * gamma!r} with steering stages"
        )

    th = schedule.theta
    ct, st = math.cos(th), math.sin(th)
    # into the xz-plane
    px = state0.vx * ct + state0.vy * st
    py = -state0.vx * st + state0.vy * ct
    pz = state0.vz
    scale = max(1.0, abs(px), abs(pz))
    if abs(py) > PLANE_TOL * scale:
        raise PlaneViolation(
            f"rotated vy = {py!r}: schedule phase does not match the state"
        )

    eps, u = schedule.epsilon, schedule.u
    # anchor states at the stage boundaries
    if schedule.dt1 > 0:
        x1, z1 = _plane_step(px, pz, u, eps, gamma, schedule.dt1)
    else:
        x1, z1 = px, pz
    x2 = x1 * math.exp(-0.5 * gamma * schedule.dt2)
    z2 = z1

    out = np.empty((times.size, 3), dtype=float)
    m1 = times < t1
    m2 = (times >= t1) & (times < t2)
    m3 = times >= t2

    if np.any(m1):
        xs, zs = _plane_step(px, pz, u, eps, gamma, times[m1])
        out[m1, 0], out[m1, 2] = xs, zs
    if np.any(m2):
        xs = x1 * np.exp(-0.5 * gamma * (times[m2] - t1))
        out[m2, 0], out[m2, 2] = xs, z1
    if np.any(m3):
        xs, zs = _plane_step(x2, z2, u, -eps, gamma, times[m3] - t2)
        out[m3, 0], out[m3, 2] = xs, zs
    out[:, 1] = 0.0

    # back to the original frame
    rx = out[:, 0] * ct - out[:, 1] * st
    ry = out[:, 0] * st + out[:, 1] * ct
    out[:, 0], out[:, 1] = rx, ry
    return out


def _sample_grid(schedule: ControlSchedule, sample_step: float) -> np.ndarray:
    """Uniform grid over [0, T] with the stage boundaries inserted exactly."""
    t1, t2, T = schedule.stage_boundaries()
    n = int(math.floor(T / sample_step))
    grid = np.arange(n + 1, dtype=float) * sample_step
    pts = np.concatenate([grid, [t1, t2, T]])
    pts = np.unique(pts)
    pts = pts[(pts >= 0.0) & (pts <= T)]
    # drop grid points that collide with a boundary to keep times strictly increasing
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.diff(pts) > 1e-12 * max(1.0, T)
    pts = pts[keep]
    for b in (t1, t2, T):  # boundary wins over a colliding grid point
        if not np.any(pts == b):
            i = np.searchsorted(pts, b)
            j = min(max(i - 1, 0), len(pts) - 1) if i >= len(pts) or abs(pts[min(i, len(pts) - 1)] - b) > abs(pts[max(i - 1, 0)] - b) else i
            pts[j] = b
    return np.unique(pts)


def simulate(
    schedule: ControlSchedule,
    state0: BlochState,
    gamma: float,
    sample_step: float = 0.01,
) -> Trajectory:
    """Closed-form trajectory of the scheduled evolution.

    Samples every sample_step plus the exact stage boundaries.  During stage
    2 the state sits on the z-axis, so the recorded coherence is constant
    (zero up to the stage-1 landing residual).
    """
    if not (sample_step > 0):
        raise InvalidStep(f"sample_step must be > 0, got {sample_step!r}")
    times = _sample_grid(schedule, sample_step)
    states = states_at(schedule, state0, gamma, times)
    fields = np.array([control_field_at(schedule, t).as_array() for t in times])
    return Trajectory.from_samples(times, states, fields)


def integrate_rk4(
    state: BlochState,
    schedule: ControlSchedule,
    gamma: float,
    t0: float = 0.0,
    t1: float | None = None,
    step: float = 1e-3,
) -> Trajectory:
    """Fixed-step classical RK4 integration of the controlled Bloch system.

    Independent of the closed-form propagators: it only evaluates the
    derivative with the field reported by control_field_at.  Integration is
    split at the stage boundaries so no step straddles a field switch, and
    the final partial step of each segment is shortened to land exactly on
    the segment end.
    """
    if not (step > 0):
        raise InvalidStep(f"step must be > 0, got {step!r}")
    T = schedule.horizon
    if t1 is None:
        t1 = T
    if t0 < 0.0 or t1 > T:
        raise OutOfHorizon(f"[{t0!r}, {t1!r}] outside [0, {T!r}]")
    if not (t0 < t1):
        raise ValueError(f"need t0 < t1, got {t0!r} >= {t1!r}")

    b1, b2, _ = schedule.stage_boundaries()
    cuts = [t0] + [b for b in (b1, b2) if t0 < b < t1] + [t1]

    times = [t0]
    states = [(state.vx, state.vy, state.vz)]
    vx, vy, vz = state.vx, state.vy, state.vz
    for a, b in zip(cuts[:-1], cuts[1:]):
        fld = control_field_at(schedule, 0.5 * (a + b))
        ux, uy, uz = fld.ux, fld.uy, fld.uz
        span = b - a
        n_full = int(math.floor(span / step + 1e-9))
        rem = span - n_full * step
        if rem <= step * 1e-9:
            rem = 0.0
        t = a
        for i in range(n_full + (1 if rem else 0)):
            h = step if i < n_full else rem
            k1x, k1y, k1z = _deriv(vx, vy, vz, ux, uy, uz, gamma)
            k2x, k2y, k2z = _deriv(
                vx + 0.5 * h * k1x, vy + 0.5 * h * k1y, vz + 0.5 * h * k1z, ux, uy, uz, gamma
            )
            k3x, k3y, k3z = _deriv(
                vx + 0.5 * h * k2x, vy + 0.5 * h * k2y, vz + 0.5 * h * k2z, ux, uy, uz, gamma
            )
            k4x, k4y, k4z = _deriv(
                vx + h * k3x, vy + h * k3y, vz + h * k3z, ux, uy, uz, gamma
            )
            vx += h / 6.0 * (k1x + 2.0 * (k2x + k3x) + k4x)
            vy += h / 6.0 * (k1y + 2.0 * (k2y + k3y) + k4y)
            vz += h / 6.0 * (k1z + 2.0 * (k2z + k3z) + k4z)
            t = a + (i + 1) * step if i < n_full else b
            times.append(min(t, b))
            states.append((vx, vy, vz))

    times = np.asarray(times)
    states = np.asarray(states)
    fields = np.array([control_field_at(schedule, t).as_array() for t in times])
    return Trajectory.from_samples(times, states, fields)
