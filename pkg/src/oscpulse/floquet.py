"""Floquet analysis of the Mathieu equation u'' + (Q - 2R cos 2s) u = 0.

Monodromy matrices and characteristic exponents, the stability surface
Re lambda_1(Q, R), fixed-Q sections against the dissipation threshold, the
cumulative integral index Lambda(tau), and the particular solution of the
damped inhomogeneous equation x0'' + 4 mu x0' + (q - 2r cos 2s) x0 =
4 f cos(s - a/2).

The monodromy is taken over s in [0, 2pi] (twice the coefficient period),
matching the exponent normalization lambda = log(rho) / (2 pi).
"""

import numpy as np

from . import backend
from .errors import NonFiniteState
from .integrators import IntegrationGrid, VectorField, rk4_integrate

# Step count for one 2pi monodromy interval.  2000 steps resolve the
# oscillation fine (Q = 49 still gets > 1100 points per cycle) but leave a
# Liouville drift of ~4e-8 at the stiff corner of the working lattice; 8000
# brings max |det - 1| down to ~4e-11, inside the 1e-9 determinant gate
# with a wide margin.
DEFAULT_MONODROMY_STEPS = 8000


class MathieuParams:
    """Parameter bundle for the damped, forced Mathieu equation.

    Parameters
    ----------
    q : float
        Undamped stiffness parameter; 4*lam**2 when built from the envelope.
    r : float
        Parametric forcing amplitude; 2*|k| when built from the envelope.
    mu : float, optional
        Damping (the friction term is 4*mu*x0').
    a : float, optional
        Forcing phase in radians (arg k for envelope-driven forcing).
    f : float, optional
        Forcing amplitude (the drive is 4*f*cos(s - a/2)).

    Attributes
    ----------
    Q, R : float
        Parameters of the damping-reduced equation u'' + (Q - 2R cos 2s)u
        = 0 obtained through x0 = u exp(-2 mu s): Q = q - 4 mu**2, R = |r|.
        A negative r is a half-period shift in s and is normalized away.
    """

    def __init__(self, q, r, mu=0.0, a=0.0, f=0.0):
        self.q = float(q)
        self.r = float(r)
        self.mu = float(mu)
        self.a = float(a)
        self.f = float(f)
        if not np.isfinite([self.q, self.r, self.mu, self.a, self.f]).all():
            raise ValueError("MathieuParams fields must be finite")
        if self.mu < 0.0:
            raise ValueError("damping mu must be nonnegative")
        self.Q = self.q - 4.0 * self.mu ** 2
        self.R = abs(self.r)

    @classmethod
    def from_envelope(cls, lam, k, mu=0.0, f=0.0):
        """Build parameters from the frequency ratio and complex envelope.

        q = 4*lam**2, r = 2*|k|, a = arg(k).
        """
        k = complex(k)
        return cls(q=4.0 * float(lam) ** 2, r=2.0 * abs(k), mu=mu,
                   a=float(np.angle(k)), f=f)

    def __repr__(self):
        return (f"MathieuParams(q={self.q}, r={self.r}, mu={self.mu}, "
                f"a={self.a}, f={self.f})")


class FloquetResult:
    """Monodromy matrix of one 2pi interval and its spectral data.

    Attributes
    ----------
    monodromy : ndarray, shape (2, 2)
    det : float
        Determinant of the numerical monodromy, accumulated stepwise as a
        product of one-step transfer determinants.  Forming it from the
        final entries would cancel catastrophically once the entries reach
        exp(2 pi Re lambda_1) at strongly unstable parameters.
    multiplicators : (complex, complex)
        Eigenvalues rho_1, rho_2 with |rho_1| >= |rho_2|.
    char_exponents : (complex, complex)
        lambda_i = log(rho_i) / (2 pi), principal branch, ordered so that
        Re lambda_1 >= Re lambda_2; a tie (stable case) is broken by
        nonnegative imaginary part of lambda_1.
    re_lambda1 : float
        Exactly 0.0 in the stable case |trace| <= 2, where the
        multiplicators are normalized onto the unit circle.
    trace : float
    """

    def __init__(self, monodromy, det):
        m = np.asarray(monodromy, dtype=float)
        if not np.isfinite(m).all() or not np.isfinite(det):
            raise NonFiniteState("monodromy overflowed within one period")
        self.monodromy = m
        self.det = float(det)
        t = m[0, 0] + m[1, 1]
        self.trace = t

        if abs(t) <= 2.0:
            # Stable: complex pair on the unit circle.  Clamp the modulus
            # to exactly 1 so Re lambda_1 is exactly zero; the phase keeps
            # full accuracy.
            im = np.sqrt(max(self.det - 0.25 * t * t, 0.0))
            phi = np.arctan2(im, 0.5 * t)
            rho1 = complex(np.cos(phi), np.sin(phi))
            rho2 = rho1.conjugate()
            lam1 = complex(0.0, phi / (2.0 * np.pi))
            lam2 = complex(0.0, -phi / (2.0 * np.pi))
        else:
            # Unstable: real pair.  Take the larger root without
            # subtraction, recover the other from the product.
            sgn = 1.0 if t > 0.0 else -1.0
            big = 0.5 * abs(t) + np.sqrt(max(0.25 * t * t - self.det, 0.0))
            rho1 = complex(sgn * big)
            rho2 = complex(self.det / (sgn * big))
            lam1 = np.log(complex(rho1)) / (2.0 * np.pi)
            lam2 = np.log(complex(rho2)) / (2.0 * np.pi)

        self.multiplicators = (rho1, rho2)
        self.char_exponents = (lam1, lam2)
        self.re_lambda1 = lam1.real


def _steps_from_h(h):
    if h is None:
        return DEFAULT_MONODROMY_STEPS
    h = float(h)
    if not h > 0.0:
        raise ValueError("step h must be positive")
    return max(4, int(round(2.0 * np.pi / h)))


def monodromy(Q, R, h=None):
    """Monodromy of u'' + (Q - 2R cos 2s) u = 0 over s in [0, 2 pi].

    The two fundamental solutions (u(0), u'(0)) = (1, 0) and (0, 1) are
    integrated with RK4 at fixed step (default 2 pi / 8000) and assembled
    columnwise.

    Parameters
    ----------
    Q, R : float
    h : float, optional
        Step in s; defaults to 2 pi / 8000.

    Returns
    -------
    FloquetResult

    Raises
    ------
    NonFiniteState
        If the solution overflows within the period (extreme parameters).
    """
    Q = float(Q)
    R = float(R)
    if not (np.isfinite(Q) and np.isfinite(R)):
        raise ValueError("Q and R must be finite")
    n = _steps_from_h(h)
    m11, m12, m21, m22, det = backend.monodromy_grid(
        np.array([Q]), np.array([R]), n)
    m = np.array([[m11[0], m12[0]], [m21[0], m22[0]]])
    return FloquetResult(m, det[0])


class StabilitySurface:
    """Re lambda_1 sampled on a rectangular (Q, R) lattice.

    Attributes
    ----------
    Q_values, R_values : 1-d ndarrays (lattice axes)
    re_lambda1 : ndarray, shape (len(Q_values), len(R_values))
    trace, det : ndarrays, same shape
        Monodromy trace and stepwise-product determinant per cell.
    """

    def __init__(self, Q_values, R_values, re_lambda1, trace, det):
        self.Q_values = Q_values
        self.R_values = R_values
        self.re_lambda1 = re_lambda1
        self.trace = trace
        self.det = det

    def rows(self):
        """Yield (Q, R, re_lambda1) in row-major order (R fastest)."""
        for i, q in enumerate(self.Q_values):
            for j, r in enumerate(self.R_values):
                yield q, r, self.re_lambda1[i, j]


def _lattice(lo, hi, step):
    lo = float(lo)
    hi = float(hi)
    step = float(step)
    if not step > 0.0:
        raise ValueError("grid_step must be positive")
    if not hi >= lo:
        raise ValueError("range must satisfy hi >= lo")
    n = int(round((hi - lo) / step))
    return lo + step * np.arange(n + 1)


def _re_lambda1_from_parts(trace, det):
    """Vectorized Re lambda_1 with the exact-zero stable clamp."""
    out = np.zeros_like(trace)
    unstable = np.abs(trace) > 2.0
    t = trace[unstable]
    big = 0.5 * np.abs(t) + np.sqrt(
        np.maximum(0.25 * t * t - det[unstable], 0.0))
    out[unstable] = np.log(big) / (2.0 * np.pi)
    return out


def stability_surface(Q_range, R_range, grid_step, h=None):
    """Re lambda_1 over a rectangular lattice of (Q, R).

    Parameters
    ----------
    Q_range, R_range : (lo, hi) pairs
    grid_step : float
        Lattice spacing, same in both directions.
    h : float, optional
        Monodromy integration step (default 2 pi / 8000).

    Returns
    -------
    StabilitySurface
    """
    Qv = _lattice(Q_range[0], Q_range[1], grid_step)
    Rv = _lattice(R_range[0], R_range[1], grid_step)
    QQ, RR = np.meshgrid(Qv, Rv, indexing="ij")
    n = _steps_from_h(h)
    m11, m12, m21, m22, det = backend.monodromy_grid(
        np.ascontiguousarray(QQ.ravel()), np.ascontiguousarray(RR.ravel()), n)
    bad = ~(np.isfinite(m11) & np.isfinite(m12)
            & np.isfinite(m21) & np.isfinite(m22))
    if bad.any():
        i = int(np.argmax(bad))
        raise NonFiniteState(
            f"monodromy overflowed at Q={QQ.ravel()[i]}, R={RR.ravel()[i]}")
    trace = (m11 + m22).reshape(QQ.shape)
    det = det.reshape(QQ.shape)
    re1 = _re_lambda1_from_parts(trace, det)
    return StabilitySurface(Qv, Rv, re1, trace, det)


def stability_section(Q, R_range, grid_step, mu=0.0, h=None):
    """Fixed-Q section of the stability surface with its damping level.

    Returns
    -------
    (R_values, re_lambda1, threshold) : 1-d arrays and the constant 2*mu.
        Crossings of re_lambda1 with the threshold mark where the damped
        solution switches between net growth and net decay.
    """
    surf = stability_surface((Q, Q), R_range, grid_step, h=h)
    return surf.R_values, surf.re_lambda1[0], 2.0 * float(mu)


def damped_multiplicator(q, r, mu, h=None):
    """Per-2pi growth factor of the damped solution, exp(2pi(Re l1 - 2mu)).

    The undamped exponent is evaluated at the damping-shifted parameters
    Q = q - 4 mu**2, R = |r|; a value below 1 means the damped Mathieu
    solution decays per period, above 1 it grows.
    """
    mp = MathieuParams(q=q, r=r, mu=mu)
    res = monodromy(mp.Q, mp.R, h=h)
    return float(np.exp(2.0 * np.pi * (res.re_lambda1 - 2.0 * mp.mu)))


def integral_index(tau, r_of_tau, q, mu, h=None):
    """Cumulative index Lambda(tau) = int_0^tau (Re l1 - 2 mu) dtau'.

    Parameters
    ----------
    tau : 1-d array, increasing
        Slow-time sample points.
    r_of_tau : 1-d array
        Parametric amplitude r at each sample.
    q : float
    mu : float

    Returns
    -------
    ndarray
        Lambda at each tau point (Lambda[0] = 0), by the trapezoid rule,
        which is exact for constant integrands.  Monotone decreasing
        wherever Re lambda_1 < 2 mu.
    """
    tau = np.asarray(tau, dtype=float)
    r = np.asarray(r_of_tau, dtype=float)
    if tau.shape != r.shape or tau.ndim != 1:
        raise ValueError("tau and r_of_tau must be 1-d arrays of equal length")
    mu = float(mu)
    Q = float(q) - 4.0 * mu ** 2
    n = _steps_from_h(h)
    m11, m12, m21, m22, det = backend.monodromy_grid(
        np.full(r.shape, Q), np.abs(r), n)
    re1 = _re_lambda1_from_parts(m11 + m22, det)
    integrand = re1 - 2.0 * mu
    steps = 0.5 * (integrand[1:] + integrand[:-1]) * np.diff(tau)
    return np.concatenate([[0.0], np.cumsum(steps)])


def particular_solution(mp, s_end, h):
    """Zero-initial-data response of the damped, forced Mathieu equation.

    Integrates x0'' + 4 mu x0' + (q - 2r cos 2s) x0 = 4 f cos(s - a/2)
    from x0(0) = x0'(0) = 0 with RK4.

    Parameters
    ----------
    mp : MathieuParams
    s_end : float
    h : float

    Returns
    -------
    TimeSeries
        States are (x0, x0') rows.

    Raises
    ------
    NonFiniteState
        In the parametrically unstable regime.
    """
    q, r, mu, a, f4 = mp.q, mp.r, mp.mu, mp.a, 4.0 * mp.f

    def rhs(s, y):
        return np.array([
            y[1],
            -4.0 * mu * y[1] - (q - 2.0 * r * np.cos(2.0 * s)) * y[0]
            + f4 * np.cos(s - 0.5 * a),
        ])

    field = VectorField(2, rhs)
    grid = IntegrationGrid(0.0, float(s_end), float(h))
    return rk4_integrate(field, np.zeros(2), grid)
