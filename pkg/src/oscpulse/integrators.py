"""Fixed-step ODE integrators with dense equally spaced output.

Two schemes of the same (fourth) order: the classical Runge-Kutta method and
an Adams-Bashforth-Moulton predictor-corrector run in PECE mode.  Fixed steps
are deliberate; the downstream windowed Fourier analysis needs equally spaced
samples, so adaptive stepping is out of scope.
"""

import numpy as np

from .errors import GridTooShort, NonFiniteState

# Abort once any state component grows beyond this.  Unstable parametric
# regimes blow up exponentially and must fail loudly instead of overflowing.
DIVERGENCE_LIMIT = 1e12


class VectorField:
    """Right-hand side f(t, y) of an n-dimensional first-order system.

    Parameters
    ----------
    dimension : int
        Number of state components.
    eval_fn : callable
        Maps (t, y) to the derivative array of length `dimension`.
    """

    def __init__(self, dimension, eval_fn):
        self.dimension = int(dimension)
        self._eval = eval_fn

    def eval(self, t, y):
        return self._eval(t, y)


class IntegrationGrid:
    """Uniform grid t0 + i*h for i = 0 .. n_steps.

    The step count is the nearest integer to (t_end - t0)/h and the stored
    step is then adjusted so that the last grid point lands on t_end exactly
    (the requested h rarely divides the interval).  The adjustment is at most
    half a step spread over the whole interval.
    """

    def __init__(self, t0, t_end, h):
        t0 = float(t0)
        t_end = float(t_end)
        h = float(h)
        if not t_end > t0:
            raise ValueError("t_end must exceed t0")
        if not h > 0.0:
            raise ValueError("step h must be positive")
        self.t0 = t0
        self.t_end = t_end
        self.n_steps = max(1, int(round((t_end - t0) / h)))
        self.h = (t_end - t0) / self.n_steps

    def times(self):
        return self.t0 + self.h * np.arange(self.n_steps + 1)


class TimeSeries:
    """Trajectory samples on a uniform grid.

    Attributes
    ----------
    grid : IntegrationGrid
    states : ndarray, shape (n_steps + 1, dimension)
        Row 0 is the initial condition exactly.
    """

    def __init__(self, grid, states):
        self.grid = grid
        self.states = states

    @property
    def times(self):
        return self.grid.times()

    def __len__(self):
        return self.states.shape[0]


def _check_finite(y, i, t):
    # A single comparison catches NaN as well: NaN < limit is False.
    if not np.all(np.abs(y) < DIVERGENCE_LIMIT):
        raise NonFiniteState(
            f"state left the divergence limit {DIVERGENCE_LIMIT:g} "
            f"at step {i} (t = {t:.6g})")


def rk4_integrate(field, init, grid):
    """Integrate with the classical fourth-order Runge-Kutta scheme.

    Parameters
    ----------
    field : VectorField
    init : array_like
        Initial state, length field.dimension.
    grid : IntegrationGrid

    Returns
    -------
    TimeSeries

    Raises
    ------
    NonFiniteState
        If the state diverges or a stage produces NaN/Inf.
    """
    y = np.asarray(init, dtype=float)
    if y.shape != (field.dimension,):
        raise ValueError(f"init must have length {field.dimension}")
    h = grid.h
    n = grid.n_steps
    states = np.empty((n + 1, field.dimension))
    states[0] = y
    f = field.eval
    for i in range(1, n + 1):
        t = grid.t0 + (i - 1) * h
        k1 = f(t, y)
        k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = f(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        _check_finite(y, i, grid.t0 + i * h)
        states[i] = y
    return TimeSeries(grid, states)


def abm4_integrate(field, init, grid):
    """Integrate with the 4th-order Adams-Bashforth-Moulton pair (PECE).

    The first three steps come from RK4; thereafter the Adams-Bashforth
    predictor is corrected once by the Adams-Moulton formula, and the
    right-hand side is re-evaluated at the corrected point for the next
    step's history.

    Raises
    ------
    GridTooShort
        If the grid has fewer than 4 steps (the startup needs them).
    NonFiniteState
        On divergence, as for rk4_integrate.
    """
    y = np.asarray(init, dtype=float)
    if y.shape != (field.dimension,):
        raise ValueError(f"init must have length {field.dimension}")
    if grid.n_steps < 4:
        raise GridTooShort("abm4 needs at least 4 steps (3-step RK4 startup)")
    h = grid.h
    n = grid.n_steps
    f = field.eval
    states = np.empty((n + 1, field.dimension))
    states[0] = y

    hist = [f(grid.t0, y)]
    for i in range(1, 4):
        t = grid.t0 + (i - 1) * h
        k1 = hist[-1]
        k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = f(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        _check_finite(y, i, grid.t0 + i * h)
        states[i] = y
        hist.append(f(grid.t0 + i * h, y))

    f0, f1, f2, f3 = hist[3], hist[2], hist[1], hist[0]
    for i in range(4, n + 1):
        t_next = grid.t0 + i * h
        y_pred = y + (h / 24.0) * (55.0 * f0 - 59.0 * f1 + 37.0 * f2 - 9.0 * f3)
        f_pred = f(t_next, y_pred)
        y = y + (h / 24.0) * (9.0 * f_pred + 19.0 * f0 - 5.0 * f1 + f2)
        _check_finite(y, i, t_next)
        states[i] = y
        f3, f2, f1 = f2, f1, f0
        f0 = f(t_next, y)
    return TimeSeries(grid, states)
