"""oscpulse: numerics for a resonantly forced pair of coupled oscillators.

Direct simulation of the coupled system, Floquet analysis of the associated
Mathieu equation, windowed-averaging verification of the slow-envelope
equation, and the large-frequency-ratio Hamiltonian reduction with amplitude
and period diagnostics.
"""

__version__ = "0.1.0"

from .integrators import IntegrationGrid, TimeSeries, VectorField  # noqa: F401
from .oscillator import NondimParams, OscParams  # noqa: F401
