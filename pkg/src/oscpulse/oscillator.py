"""The forced coupled-oscillator system and its simulation drivers.

State vector is (x, x', y, y').  The x oscillator is damped, driven at half
the y eigenfrequency, and coupled to y through eps*x*y; the y oscillator is
driven parametrically by eps*delta*x**2:

    x'' + nu x' + omega**2 x = eps x y + A cos(Omega t / 2)
    y'' + Omega**2 y         = eps delta x**2

Rescaling time by theta = Omega t turns this into the same system with
omega -> lambda = omega/Omega, nu -> mu = nu/Omega, eps -> eps/Omega**2,
A -> f = A/Omega**2 and unit y frequency, which is how the slow-envelope
analysis is set up.
"""

import numpy as np

from . import backend
from .errors import NonFiniteState, ResonantDenominator
from .integrators import IntegrationGrid, TimeSeries, VectorField


class OscParams:
    """Physical parameters of the coupled system.

    Defaults are the reference parameter set used throughout the
    reproduction runs: omega = 3, Omega = 1, A = 1, nu = 0.1, eps = 0.2,
    delta = 1.
    """

    def __init__(self, omega=3.0, Omega=1.0, A=1.0, nu=0.1, eps=0.2, delta=1.0):
        omega = float(omega)
        Omega = float(Omega)
        A = float(A)
        nu = float(nu)
        eps = float(eps)
        delta = float(delta)
        if omega <= 0.0 or Omega <= 0.0:
            raise ValueError("frequencies omega, Omega must be positive")
        if A < 0.0 or nu < 0.0:
            raise ValueError("A and nu must be nonnegative")
        # eps = 0 is allowed so the decoupled linear limits stay testable.
        if eps < 0.0:
            raise ValueError("eps must be nonnegative")
        if delta <= 0.0:
            raise ValueError("delta must be positive")
        if 4.0 * omega**2 == Omega**2:
            raise ValueError("degenerate parameters: 4*omega**2 == Omega**2")
        self.omega = omega
        self.Omega = Omega
        self.A = A
        self.nu = nu
        self.eps = eps
        self.delta = delta

    def __repr__(self):
        return (f"OscParams(omega={self.omega}, Omega={self.Omega}, A={self.A}, "
                f"nu={self.nu}, eps={self.eps}, delta={self.delta})")


class NondimParams:
    """Dimensionless parameter set lambda, varepsilon, f, mu, delta."""

    def __init__(self, lam, varepsilon, f, mu, delta):
        self.lam = float(lam)
        self.varepsilon = float(varepsilon)
        self.f = float(f)
        self.mu = float(mu)
        self.delta = float(delta)

    def to_osc(self, Omega=1.0):
        """Reconstruct an OscParams for a given carrier frequency Omega."""
        Omega = float(Omega)
        return OscParams(omega=self.lam * Omega,
                         Omega=Omega,
                         A=self.f * Omega**2,
                         nu=self.mu * Omega,
                         eps=self.varepsilon * Omega**2,
                         delta=self.delta)

    def __repr__(self):
        return (f"NondimParams(lam={self.lam}, varepsilon={self.varepsilon}, "
                f"f={self.f}, mu={self.mu}, delta={self.delta})")


def nondimensionalize(p):
    """Quotient formulas lambda = omega/Omega, eps/Omega**2, A/Omega**2, nu/Omega."""
    return NondimParams(lam=p.omega / p.Omega,
                        varepsilon=p.eps / p.Omega**2,
                        f=p.A / p.Omega**2,
                        mu=p.nu / p.Omega,
                        delta=p.delta)


def coupled_field(p):
    """VectorField of the coupled system for the generic integrators.

    The fast simulation path goes through `simulate`, which uses the
    compiled backend; this callable form exists for cross-checks and for
    mixing the system into generic integrator tests.
    """
    om2 = p.omega**2
    Om2 = p.Omega**2
    half_Om = 0.5 * p.Omega
    eps = p.eps
    A = p.A
    nu = p.nu
    ed = p.eps * p.delta

    def rhs(t, s):
        x, xp, y, yp = s
        return np.array([
            xp,
            -nu * xp - om2 * x + eps * x * y + A * np.cos(half_Om * t),
            yp,
            -Om2 * y + ed * x * x,
        ])

    return VectorField(4, rhs)


def nondim_field(npar):
    """VectorField of the rescaled system in theta = Omega t.

    Identical structure with unit y frequency, so it reuses coupled_field
    with the mapped parameter values.
    """
    return coupled_field(npar.to_osc(Omega=1.0))


def linear_growth_line(p):
    """Slope of the initial-stage linear growth of the y envelope.

    Returns 4*eps_nd*A**2 / (4*omega**2 - Omega**2)**2 with
    eps_nd = eps/Omega**2.  The fitted envelope of |y| from zero initial
    data follows this line until the coupling feeds back.
    """
    den = 4.0 * p.omega**2 - p.Omega**2
    if den == 0.0:
        raise ResonantDenominator("4*omega**2 == Omega**2")
    eps_nd = p.eps / p.Omega**2
    return 4.0 * eps_nd * p.A**2 / den**2


def simulate(p, init, t_end, h, method="rk4", store_every=1):
    """Integrate the coupled system with the active backend.

    Parameters
    ----------
    p : OscParams
    init : array_like, length 4
    t_end : float
    h : float
        Integration step.
    method : {"rk4", "abm4"}
    store_every : int
        Keep every store_every-th step (the horizon is rounded up to a
        whole number of stored intervals).  Row 0 is always the initial
        state.

    Returns
    -------
    TimeSeries
        On the stored grid with step h*store_every.
    """
    init = np.ascontiguousarray(init, dtype=float)
    if init.shape != (4,):
        raise ValueError("init must have length 4")
    store_every = int(store_every)
    if store_every < 1:
        raise ValueError("store_every must be >= 1")
    n_steps = max(1, int(round(t_end / h)))
    if n_steps % store_every:
        n_steps += store_every - n_steps % store_every
    if method == "rk4":
        kern = backend.coupled_rk4
    elif method == "abm4":
        kern = backend.coupled_abm4
    else:
        raise ValueError(f"unknown method {method!r}")
    states, bad = kern(init, 0.0, h, n_steps, store_every,
                       p.nu, p.omega, p.eps, p.A, p.Omega, p.delta)
    if bad >= 0:
        raise NonFiniteState(
            f"state left the divergence limit at step {bad} (t = {bad * h:.6g})")
    grid = IntegrationGrid(0.0, n_steps * h, h * store_every)
    return TimeSeries(grid, states)


def envelope_maxima(ts, component=2):
    """Local maxima of |state[:, component]| as (times, values).

    This is the working definition of the oscillation envelope: the
    sequence of local maxima of the rectified signal, linearly
    interpolated where a continuous curve is needed.
    """
    v = np.abs(ts.states[:, component])
    inner = (v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])
    idx = np.where(inner)[0] + 1
    return ts.times[idx], v[idx]


def slope_fit_report(p, ts):
    """Least-squares slope of the |y| envelope over the initial stage.

    The window runs from t = 0 until |y| first reaches 25% of the
    saturation scale lambda**2/varepsilon (or the whole run if it never
    does).  Fits both the raw envelope and the varepsilon-scaled one so
    the report shows which normalization the growth line actually
    matches; the raw-y fit is the one that does.

    Returns
    -------
    dict with keys formula, slope_y, slope_eps_y, ratio_y, ratio_eps_y,
    window_t_end, n_maxima.
    """
    npar = nondimensionalize(p)
    t_m, y_m = envelope_maxima(ts, component=2)
    cap = 0.25 * npar.lam**2 / npar.varepsilon
    above = np.where(y_m >= cap)[0]
    t_stop = t_m[above[0]] if len(above) else ts.times[-1]
    keep = t_m <= t_stop
    t_m, y_m = t_m[keep], y_m[keep]
    if len(t_m) < 2:
        raise ValueError("too few envelope maxima for a slope fit")
    design = np.column_stack([t_m, np.ones_like(t_m)])
    slope_y = np.linalg.lstsq(design, y_m, rcond=None)[0][0]
    slope_eps_y = np.linalg.lstsq(design, npar.varepsilon * y_m, rcond=None)[0][0]
    formula = linear_growth_line(p)
    return {
        "formula": formula,
        "slope_y": slope_y,
        "slope_eps_y": slope_eps_y,
        "ratio_y": slope_y / formula,
        "ratio_eps_y": slope_eps_y / formula,
        "window_t_end": float(t_stop),
        "n_maxima": int(len(t_m)),
    }
