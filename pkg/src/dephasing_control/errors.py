"""Exception hierarchy for the dephasing-qubit control package.

Every domain failure raises a subclass of :class:`ControlError`, so callers
(and the CLI exit-code mapping) can distinguish degenerate states, infeasible
horizons, and solver breakdowns without string matching.
"""

from __future__ import annotations


class ControlError(Exception):
    """Base class for all domain errors raised by this package."""


class InvalidState(ControlError):
    """Bloch vector outside the unit ball, non-finite, or p/c ordering broken."""


class InvalidDensityMatrix(ControlError):
    """2x2 matrix is not a valid qubit density matrix (Hermitian, trace one, PSD)."""


class ZeroCoherence(ControlError):
    """Initial coherence is zero: there is no transverse component to recover."""


class NoPurityReserve(ControlError):
    """vz(0) = 0, i.e. purity equals coherence: no z-reserve to trade for time."""


class OutOfHorizon(ControlError):
    """Requested time lies outside the schedule's [0, T] window."""


class OverdampedRegime(ControlError):
    """Control field u <= gamma/2: the in-plane rotation is not oscillatory."""


class PlaneViolation(ControlError):
    """State has a vy component where the xz-plane propagator requires vy = 0."""


class InvalidStep(ControlError):
    """Non-positive integrator or sampling step."""


class NoRecoveryAtThisField(ControlError):
    """Recovery equation has no root at this field strength; u must be increased."""


class Infeasible(ControlError):
    """Stage times exceed the requested horizon at the given field strength."""

    def __init__(self, horizon: float, u: float, needed: float):
        self.horizon = horizon
        self.u = u
        self.needed = needed
        super().__init__(
            f"dt1 + dt3 = {needed:.6g} exceeds horizon T = {horizon:.6g} "
            f"at field u = {u:.6g}"
        )


class NoLimitSolution(ControlError):
    """Limit-field bracketing or its forward-simulation validation failed."""


class ConfigError(ControlError):
    """Malformed scenario or schedule input."""
