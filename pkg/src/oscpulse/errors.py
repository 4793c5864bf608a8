"""Exception types shared across the package."""


class OscPulseError(Exception):
    """Base class for all package errors."""


class NonFiniteState(OscPulseError):
    """Integration produced NaN/Inf or exceeded the divergence limit."""


class GridTooShort(OscPulseError):
    """Multistep integrator asked to run with fewer steps than its startup needs."""


class ResonantDenominator(OscPulseError):
    """Linear-resonance denominator 4*omega**2 - Omega**2 vanishes."""


class WindowMismatch(OscPulseError):
    """Sampling grid does not contain an integer number of samples per window."""


class TooFewPoints(OscPulseError):
    """Not enough samples for the requested finite-difference or windowed operation."""


class WindowOutOfRange(OscPulseError):
    """Averaging window does not fit inside the available trajectory."""


class DenominatorNearZero(OscPulseError):
    """Asymptotic response denominator too close to zero to be meaningful."""


class DomainError(OscPulseError):
    """Envelope point outside the open unit disc |K| < 1."""


class SingularDenominator(OscPulseError):
    """Hamiltonian denominator vanishes at the requested point."""


class LeftDomain(OscPulseError):
    """Envelope flow reached the domain boundary |K| -> 1."""


class InfeasibleLevel(OscPulseError):
    """Hamiltonian level admits no real amplitude roots."""


class ZeroLevel(OscPulseError):
    """Amplitude-root formula is singular at H0 = 0."""


class NotClosedOrbit(OscPulseError):
    """Flow failed to return to the Poincare section (no closed orbit found)."""


class TurningPointResolutionError(OscPulseError):
    """Level-set traversal could not resolve the orbit near a turning point."""
