"""Bloch-vector state representation and the scalar functionals built on it.

A qubit density matrix is parameterized by a real 3-vector v = (vx, vy, vz)
inside the unit ball:

    rho = (I + vx*sigma_x + vy*sigma_y + vz*sigma_z) / 2.

Throughout the package "purity" means the squared Bloch norm and "coherence"
the squared transverse component:

    purity    p = vx^2 + vy^2 + vz^2
    coherence c = vx^2 + vy^2

Note this purity convention differs from Tr(rho^2) = (1 + |v|^2) / 2; the
squared-norm form is the quantity whose decay rate is exactly -gamma * c
under pure dephasing, which is what the control synthesis relies on.

For a dephasing qubit with damping rate gamma, a state of purity p and
coherence c has breakdown time

    t_b = (p - c) / (gamma * c),

the longest span over which any unitary control can hold the coherence
constant.  Recovery over longer horizons is what the rest of the package is
for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDensityMatrix, InvalidState, ZeroCoherence

# Slack on unit-ball membership: absorbs propagator round-off without
# letting genuinely unphysical states through.
EPS_NORM = 1e-9

# Tolerances for density-matrix validation.
_HERM_TOL = 1e-12
_TRACE_TOL = 1e-12
_DET_TOL = 1e-12


@dataclass(frozen=True)
class BlochState:
    """Bloch vector of a single qubit. Validated at construction; immutable."""

    vx: float
    vy: float
    vz: float

    def __post_init__(self):
        for name in ("vx", "vy", "vz"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise InvalidState(f"{name} is not finite: {v!r}")
        n2 = self.vx**2 + self.vy**2 + self.vz**2
        if n2 > 1.0 + EPS_NORM:
            raise InvalidState(f"Bloch vector outside unit ball: |v|^2 = {n2!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.vx, self.vy, self.vz], dtype=float)

    @classmethod
    def from_array(cls, v) -> "BlochState":
        vx, vy, vz = (float(x) for x in v)
        return cls(vx, vy, vz)


@dataclass(frozen=True)
class DensityMatrix:
    """2x2 qubit density matrix, stored row-major as four complex entries."""

    e00: complex
    e01: complex
    e10: complex
    e11: complex

    def __post_init__(self):
        if abs(self.e01 - self.e10.conjugate()) > _HERM_TOL:
            raise InvalidDensityMatrix("off-diagonal entries are not conjugates")
        if abs(self.e00.imag) > _HERM_TOL or abs(self.e11.imag) > _HERM_TOL:
            raise InvalidDensityMatrix("diagonal entries are not real")
        trace = self.e00.real + self.e11.real
        if abs(trace - 1.0) > _TRACE_TOL:
            raise InvalidDensityMatrix(f"trace = {trace!r}, expected 1")
        det = (self.e00 * self.e11 - self.e01 * self.e10).real
        if det < -_DET_TOL:
            raise InvalidDensityMatrix(f"negative determinant {det!r}: not PSD")

    def as_array(self) -> np.ndarray:
        return np.array([[self.e00, self.e01], [self.e10, self.e11]], dtype=complex)


@dataclass(frozen=True)
class ModelParams:
    """Damping rate plus the numeric tolerances shared across solvers.

    root_tol bounds residuals of transcendental root finding; ode_step is the
    fixed step of the Runge-Kutta verification oracle.
    """

    gamma: float
    root_tol: float = 1e-12
    ode_step: float = 1e-3

    def __post_init__(self):
        if not (self.gamma > 0):
            raise ValueError(f"gamma must be > 0, got {self.gamma!r}")
        if not (self.root_tol > 0):
            raise ValueError(f"root_tol must be > 0, got {self.root_tol!r}")
        if not (self.ode_step > 0):
            raise ValueError(f"ode_step must be > 0, got {self.ode_step!r}")


def purity(state: BlochState) -> float:
    """Squared Bloch norm vx^2 + vy^2 + vz^2."""
    return state.vx**2 + state.vy**2 + state.vz**2


def coherence(state: BlochState) -> float:
    """Squared transverse component vx^2 + vy^2; zero exactly on the z-axis."""
    return state.vx**2 + state.vy**2


def to_density_matrix(state: BlochState) -> DensityMatrix:
    """Expand the Bloch vector in the Pauli basis: rho = (I + v . sigma) / 2."""
    return DensityMatrix(
        e00=complex((1.0 + state.vz) / 2.0),
        e01=complex(state.vx / 2.0, -state.vy / 2.0),
        e10=complex(state.vx / 2.0, state.vy / 2.0),
        e11=complex((1.0 - state.vz) / 2.0),
    )


def from_density_matrix(rho) -> BlochState:
    """Invert the Pauli expansion. Accepts a DensityMatrix or a 2x2 array.

    Raises InvalidDensityMatrix for non-Hermitian or trace != 1 input.
    """
    if not isinstance(rho, DensityMatrix):
        m = np.asarray(rho, dtype=complex)
        if m.shape != (2, 2):
            raise InvalidDensityMatrix(f"expected a 2x2 matrix, got shape {m.shape}")
        rho = DensityMatrix(m[0, 0], m[0, 1], m[1, 0], m[1, 1])
    vx = (rho.e01 + rho.e10).real
    vy = (rho.e10 - rho.e01).imag
    vz = (rho.e00 - rho.e11).real
    return BlochState(vx, vy, vz)


def breakdown_time(p: float, c: float, gamma: float) -> float:
    """Longest span over which unitary control can keep the coherence constant.

    t_b = (p - c) / (gamma * c).  Requires 0 < c <= p <= 1.  At p = c the
    result is zero: there is no purity reserve and nothing can be held.
    """
    if not (gamma > 0):
        raise ValueError(f"gamma must be > 0, got {gamma!r}")
    if c == 0:
        raise ZeroCoherence("breakdown time is undefined at zero coherence")
    if c < 0 or c > p or p > 1.0 + EPS_NORM:
        raise InvalidState(f"need 0 < c <= p <= 1, got c={c!r}, p={p!r}")
    return (p - c) / (gamma * c)
