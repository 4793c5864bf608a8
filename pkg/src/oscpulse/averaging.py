"""Slow-envelope extraction and the averaged solvability condition.

The y component of a simulated trajectory is projected window-by-window
onto its first harmonic in theta, giving the complex envelope k(tau) with
eps*y ~ k e^{i theta} + conj(k) e^{-i theta} on the slow scale tau =
eps**2 theta.  The solvability condition relates the tau derivative of the
full first-harmonic amplitude 2k to the fast average of x**2 e^{-i theta};
the residual report quantifies how well a trajectory honors it.
"""

import numpy as np

from .errors import TooFewPoints, WindowMismatch, WindowOutOfRange

_TWO_PI = 2.0 * np.pi

# Entries of the residual report with |S_l| at or below this fraction of
# the peak are reported as missing (NaN), not zero: near envelope turning
# points the relative error is 0/0 noise.
REL_ERROR_FLOOR = 1e-8


class EnvelopeSeries:
    """Complex envelope samples k(tau) on an increasing slow-time grid."""

    def __init__(self, tau_points, k_values):
        tau = np.asarray(tau_points, dtype=float)
        k = np.asarray(k_values, dtype=complex)
        if tau.shape != k.shape or tau.ndim != 1:
            raise ValueError("tau_points and k_values must be equal-length 1-d")
        if tau.size >= 2 and not np.all(np.diff(tau) > 0.0):
            raise ValueError("tau_points must be strictly increasing")
        self.tau_points = tau
        self.k_values = k

    def __len__(self):
        return self.tau_points.size


class ResidualReport:
    """Pointwise comparison of the two sides of the averaged condition.

    Attributes
    ----------
    tau_points : ndarray
    lhs : complex ndarray
        Difference derivative of the full harmonic amplitude 2k.
    rhs : complex ndarray
        Windowed fast average -(i delta / T) int x**2 e^{-i theta}.
    rel_error : ndarray
        |lhs - rhs| / |lhs|; NaN where |lhs| sits below the floor.
    """

    def __init__(self, tau_points, lhs, rhs, rel_error):
        self.tau_points = tau_points
        self.lhs = lhs
        self.rhs = rhs
        self.rel_error = rel_error


def _samples_per_window(h):
    m = int(round(_TWO_PI / h))
    if m < 4 or abs(m * h - _TWO_PI) > 1e-6 * _TWO_PI:
        raise WindowMismatch(
            f"step {h:g} does not give an integer number of samples per "
            f"2 pi window")
    return m


def extract_envelope(ts, npar):
    """Project eps*y onto its first harmonic over consecutive 2pi windows.

    Parameters
    ----------
    ts : TimeSeries
        Coupled-system trajectory sampled uniformly in theta.
    npar : NondimParams

    Returns
    -------
    EnvelopeSeries
        Per window, k1 = (1/2pi) int eps*y cos(theta), k2 = -(1/2pi) int
        eps*y sin(theta) (trapezoid), so 2*k1 cos - 2*k2 sin reproduces the
        first harmonic of eps*y; tau = eps**2 theta at window centers.

    Raises
    ------
    WindowMismatch
        If the sampling step does not divide 2 pi.
    """
    h = ts.grid.h
    m = _samples_per_window(h)
    theta = ts.times
    ey = npar.varepsilon * ts.states[:, 2]
    n_win = (len(ey) - 1) // m
    if n_win < 1:
        raise WindowMismatch("trajectory shorter than one 2 pi window")
    tau = np.empty(n_win)
    k = np.empty(n_win, dtype=complex)
    cos_t = np.cos(theta)
    sin_t = np.sin(theta)
    for j in range(n_win):
        lo, hi = j * m, j * m + m + 1
        seg = ey[lo:hi]
        k1 = np.trapezoid(seg * cos_t[lo:hi], dx=h) / _TWO_PI
        k2 = -np.trapezoid(seg * sin_t[lo:hi], dx=h) / _TWO_PI
        k[j] = k1 + 1j * k2
        tau[j] = npar.varepsilon**2 * (theta[lo] + np.pi)
    return EnvelopeSeries(tau, k)


def lhs_derivative(env):
    """Difference derivative of k(tau): central inside, one-sided at ends.

    Raises
    ------
    TooFewPoints
        If the series has fewer than 3 samples.
    """
    if len(env) < 3:
        raise TooFewPoints("need at least 3 envelope points")
    tau = env.tau_points
    k = env.k_values
    out = np.empty_like(k)
    out[1:-1] = (k[2:] - k[:-2]) / (tau[2:] - tau[:-2])
    out[0] = (k[1] - k[0]) / (tau[1] - tau[0])
    out[-1] = (k[-1] - k[-2]) / (tau[-1] - tau[-2])
    return out


def default_window(npar):
    """Averaging window length: eps**-2 rounded to whole fast periods."""
    return _TWO_PI * max(1.0, np.round(npar.varepsilon**-2 / _TWO_PI))


def rhs_average(ts, npar, center_theta, window_len=None):
    """Fast average -(i delta / T) int x**2 e^{-i theta} over one window.

    Parameters
    ----------
    ts : TimeSeries
    npar : NondimParams
    center_theta : float
        Window midpoint in theta.
    window_len : float, optional
        Window length T; defaults to eps**-2 rounded to whole 2pi periods.

    Raises
    ------
    WindowOutOfRange
        If the window pokes outside the trajectory.
    """
    if window_len is None:
        window_len = default_window(npar)
    h = ts.grid.h
    n = len(ts) - 1
    i0 = int(round((center_theta - 0.5 * window_len - ts.grid.t0) / h))
    m = int(round(window_len / h))
    if i0 < 0 or i0 + m > n:
        raise WindowOutOfRange(
            f"window [{center_theta - 0.5 * window_len:g}, "
            f"{center_theta + 0.5 * window_len:g}] leaves the trajectory")
    theta = ts.times[i0:i0 + m + 1]
    x = ts.states[i0:i0 + m + 1, 0]
    integrand = x * x * np.exp(-1j * theta)
    val = np.trapezoid(integrand, dx=h)
    return -1j * npar.delta / (m * h) * val


def rhs_average_pair(ts, npar, center_theta, window_len=None):
    """Real-pair form of rhs_average: two real trapezoid averages.

    Returns (-delta * avg(x**2 sin theta), -delta * avg(x**2 cos theta)),
    the real and imaginary parts of the complex average computed without
    complex arithmetic; the two forms agree to roundoff.
    """
    if window_len is None:
        window_len = default_window(npar)
    h = ts.grid.h
    n = len(ts) - 1
    i0 = int(round((center_theta - 0.5 * window_len - ts.grid.t0) / h))
    m = int(round(window_len / h))
    if i0 < 0 or i0 + m > n:
        raise WindowOutOfRange("window leaves the trajectory")
    theta = ts.times[i0:i0 + m + 1]
    xsq = ts.states[i0:i0 + m + 1, 0] ** 2
    T = m * h
    re = -npar.delta * np.trapezoid(xsq * np.sin(theta), dx=h) / T
    im = -npar.delta * np.trapezoid(xsq * np.cos(theta), dx=h) / T
    return re, im


def residual_report(ts, npar, window_len=None):
    """Residual of the averaged condition along a trajectory.

    Extracts the envelope, forms the difference derivative of the full
    harmonic amplitude 2k (the half-amplitude k of extract_envelope times
    two), evaluates the fast average at every window center where the
    averaging window fits, and reports the relative error.

    Returns
    -------
    ResidualReport
    """
    env = extract_envelope(ts, npar)
    if len(env) < 5:
        raise TooFewPoints("need at least 5 envelope windows")
    dk = 2.0 * lhs_derivative(env)
    if window_len is None:
        window_len = default_window(npar)
    eps2 = npar.varepsilon**2
    theta_end = ts.times[-1]

    keep = []
    rhs_vals = []
    for j, tau in enumerate(env.tau_points):
        c = tau / eps2
        if c - 0.5 * window_len < 0.0 or c + 0.5 * window_len > theta_end:
            continue
        keep.append(j)
        rhs_vals.append(rhs_average(ts, npar, c, window_len))
    keep = np.asarray(keep, dtype=int)
    if keep.size == 0:
        raise WindowOutOfRange("averaging window fits nowhere in the run")
    lhs = dk[keep]
    rhs = np.asarray(rhs_vals)
    mag = np.abs(lhs)
    floor = REL_ERROR_FLOOR * mag.max()
    rel = np.full(mag.shape, np.nan)
    ok = mag > floor
    rel[ok] = np.abs(lhs[ok] - rhs[ok]) / mag[ok]
    return ResidualReport(env.tau_points[keep], lhs, rhs, rel)
