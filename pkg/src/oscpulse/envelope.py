"""Slow-envelope reduction for lambda >> 1: the closed-form asymptotic
response, the envelope Hamiltonian H(K1, K2) and its canonical flow in the
rescaled slow time tau', the amplitude roots of a Hamiltonian level, and a
dual-method period computation (flow return time vs level-set contour
integral).

K = k / lambda**2 is the rescaled complex envelope; the open unit disk
|K| < 1 is the physical domain because H contains sqrt(1 - |K|**2).
"""

import numpy as np

from .errors import (DenominatorNearZero, DomainError, InfeasibleLevel,
                     LeftDomain, NotClosedOrbit, SingularDenominator,
                     TurningPointResolutionError, ZeroLevel)
from .integrators import IntegrationGrid, VectorField, rk4_integrate

# Reject states with |K|**2 beyond this; the square root degenerates and
# the reduction loses meaning at the rim.
DOMAIN_RIM = 1.0 - 1e-9

# Half-width of the K2-parametrized bands around the turning points of a
# level-set traversal, where the dK1 integrand 1/(dH/dK2) blows up.
TURNING_BAND = 1e-3


class EnvelopeState:
    """Rescaled envelope point (K1, K2) at slow time tau'."""

    def __init__(self, K1, K2, tau_prime=0.0):
        self.K1 = float(K1)
        self.K2 = float(K2)
        self.tau_prime = float(tau_prime)
        if self.K1**2 + self.K2**2 >= 1.0:
            raise DomainError("|K| must be strictly below 1")

    def __repr__(self):
        return (f"EnvelopeState(K1={self.K1}, K2={self.K2}, "
                f"tau_prime={self.tau_prime})")


class LevelSetSummary:
    """Amplitude roots and period attached to a Hamiltonian level H0.

    period_tau_prime is in tau' units; period_rescaled multiplies by
    lambda**8 / varepsilon**2.  feasible is False when the radical of the
    root formula is negative (no real amplitude roots).
    """

    def __init__(self, H0, r_minus, r_plus, period_tau_prime,
                 period_rescaled, feasible=True):
        self.H0 = H0
        self.r_minus = r_minus
        self.r_plus = r_plus
        self.period_tau_prime = period_tau_prime
        self.period_rescaled = period_rescaled
        self.feasible = feasible


def x0_asymptotic(s, r, a, npar):
    """Leading-order response of the forced fast oscillation.

    x0(s) ~ (2 f / lambda**2) cos(s - a/2) / (2 - lambda**-2 r cos 2s),
    with error O(lambda**-4).  The phase sign in cos(s - a/2) follows the
    drive 4 f cos(s - a/2) of the forced equation; the alternative plus
    convention fails to solve it (checked numerically, the mismatch is
    O(1) rather than O(lambda**-4)).

    Parameters
    ----------
    s : float or ndarray
    r : float
        Parametric amplitude (2|k| in envelope terms); needs |r|/lambda**2
        well below 2.
    a : float
        Forcing phase in radians.
    npar : NondimParams

    Raises
    ------
    DenominatorNearZero
        If min_s (2 - lambda**-2 r cos 2s) < 0.1.
    """
    lam2 = npar.lam**2
    if 2.0 - abs(r) / lam2 < 0.1:
        raise DenominatorNearZero(
            f"denominator 2 - r/lambda^2 cos 2s reaches "
            f"{2.0 - abs(r) / lam2:.3g}")
    s = np.asarray(s, dtype=float)
    den = 2.0 - (r / lam2) * np.cos(2.0 * s)
    out = (2.0 * npar.f / lam2) * np.cos(s - 0.5 * a) / den
    return out if out.ndim else float(out)


def _domain_parts(K1, K2):
    rho2 = K1 * K1 + K2 * K2
    if rho2 >= 1.0:
        raise DomainError(f"|K|^2 = {rho2:.6g} outside the unit disk")
    P = np.sqrt(1.0 - rho2)
    N = rho2 - K1
    D = K1 * (1.0 - rho2) - N * P
    return rho2, P, N, D


def hamiltonian(K1, K2, A=1.0, Omega=1.0):
    """Envelope Hamiltonian H = (A^2/2 pi Omega^3) (|K|^2-K1)/D with
    D = K1(1-|K|^2) - (|K|^2-K1) sqrt(1-|K|^2).

    Raises
    ------
    DomainError
        If |K|**2 >= 1.
    SingularDenominator
        If |D| < 1e-12 (the singular oval through K = 0).
    """
    _, _, N, D = _domain_parts(float(K1), float(K2))
    if abs(D) < 1e-12:
        raise SingularDenominator(f"denominator {D:.3g} at K=({K1}, {K2})")
    C = A * A / (2.0 * np.pi * Omega**3)
    return C * N / D


def hamiltonian_gradient(K1, K2, A=1.0, Omega=1.0):
    """Analytic (dH/dK1, dH/dK2) by the quotient rule.

    Validated against central finite differences; same domain errors as
    `hamiltonian`.
    """
    K1 = float(K1)
    K2 = float(K2)
    rho2, P, N, D = _domain_parts(K1, K2)
    if abs(D) < 1e-12:
        raise SingularDenominator(f"denominator {D:.3g} at K=({K1}, {K2})")
    C = A * A / (2.0 * np.pi * Omega**3)
    dN1 = 2.0 * K1 - 1.0
    dN2 = 2.0 * K2
    dD1 = (1.0 - rho2) - 2.0 * K1 * K1 - dN1 * P + N * K1 / P
    dD2 = -2.0 * K1 * K2 - dN2 * P + N * K2 / P
    H1 = C * (dN1 * D - N * dD1) / (D * D)
    H2 = C * (dN2 * D - N * dD2) / (D * D)
    return H1, H2


def canonical_field(A=1.0, Omega=1.0, grad_fn=None):
    """VectorField of dK1/dtau' = dH/dK2, dK2/dtau' = -dH/dK1.

    A custom grad_fn(K1, K2) -> (H1, H2) swaps in a different Hamiltonian
    while keeping the domain guard.

    Raises LeftDomain through its evaluations once |K|**2 > 1 - 1e-9.
    """
    if grad_fn is None:
        def grad_fn(K1, K2):
            return hamiltonian_gradient(K1, K2, A, Omega)

    def rhs(t, y):
        if y[0] * y[0] + y[1] * y[1] > DOMAIN_RIM:
            raise LeftDomain(f"|K| reached the unit circle at tau'={t:.6g}")
        H1, H2 = grad_fn(y[0], y[1])
        return np.array([H2, -H1])

    return VectorField(2, rhs)


def envelope_flow(init, tau_prime_end, h, A=1.0, Omega=1.0):
    """RK4 trajectory of the canonical envelope equations.

    Parameters
    ----------
    init : EnvelopeState or length-2 sequence (K1, K2)
    tau_prime_end, h : float

    Returns
    -------
    TimeSeries of (K1, K2)

    Raises
    ------
    LeftDomain
        If the flow reaches |K|**2 > 1 - 1e-9.
    SingularDenominator
        If it runs into the denominator's zero set.
    """
    if isinstance(init, EnvelopeState):
        y0 = np.array([init.K1, init.K2])
    else:
        y0 = np.asarray(init, dtype=float)
    field = canonical_field(A, Omega)
    grid = IntegrationGrid(0.0, float(tau_prime_end), float(h))
    return rk4_integrate(field, y0, grid)


def amplitude_roots(H0, A=1.0, Omega=1.0):
    """Amplitude roots r-+ of a Hamiltonian level.

    r_pm = [(A^2 - 2 pi Omega^3 H0) +- sqrt(-A^4 + 4 A^2 pi Omega^3 H0
    + 4 pi^2 Omega^6 H0^2)] / (4 pi Omega^3 H0).  The orbit's max envelope
    scales as (lambda**2/varepsilon) max(|r-|, |r+|).

    Returns (r_minus, r_plus) following the literal -+ of the formula.

    Raises
    ------
    ZeroLevel
        If H0 = 0 (the formula divides by it).
    InfeasibleLevel
        If the radical is negative.
    """
    H0 = float(H0)
    if H0 == 0.0:
        raise ZeroLevel("H0 = 0 has no amplitude roots")
    b = 2.0 * np.pi * Omega**3 * H0
    radical = -A**4 + 2.0 * A * A * b + b * b
    if radical < 0.0:
        raise InfeasibleLevel(f"radical {radical:.6g} < 0 at H0 = {H0:.6g}")
    root = np.sqrt(radical)
    return (A * A - b - root) / (2.0 * b), (A * A - b + root) / (2.0 * b)


def axis_level_points(H0, A=1.0, Omega=1.0):
    """Points x in (-1, 1) with H(x, 0) = H0, in closed form.

    On the K2 = 0 axis the Hamiltonian collapses to -C/(1 + x + P) with
    P = sqrt(1 - x**2), which reduces to a quadratic in 1 + x.  Returns a
    sorted (possibly empty) list; positive levels never intersect the
    axis (the axis values are all negative).
    """
    H0 = float(H0)
    C = A * A / (2.0 * np.pi * Omega**3)
    if H0 == 0.0:
        return []
    S = -C / H0
    if S <= 0.0:
        return []
    disc = (S + 1.0) ** 2 - 2.0 * S * S
    if disc < 0.0:
        return []
    out = []
    for sign in (-1.0, 1.0):
        u = 0.5 * ((S + 1.0) + sign * np.sqrt(disc))
        x = u - 1.0
        if -1.0 < x < 1.0 and S - u >= -1e-12:  # P = S - u must be >= 0
            out.append(x)
    # a near-zero discriminant returns the double root twice, split by
    # sqrt(eps); anything closer than the turning-band scale is one point
    out.sort()
    merged = []
    for x in out:
        if not merged or x - merged[-1] > 1e-6:
            merged.append(x)
    return merged


def stationary_initial_data(npar):
    """Full-system initial state of the stationary envelope solution.

    (x, x', y, y') = (f/lambda**2, 0, -lambda**2/(varepsilon sqrt 2), 0).
    """
    if npar.varepsilon <= 0.0:
        raise ValueError("varepsilon must be positive for the stationary "
                         "initial data")
    lam2 = npar.lam**2
    return np.array([npar.f / lam2, 0.0,
                     -lam2 / (npar.varepsilon * np.sqrt(2.0)), 0.0])


def locate_equilibrium(A=1.0, Omega=1.0, seed=(1.0 / np.sqrt(2.0), 0.0),
                       grad_fn=None):
    """Newton-refine a zero of the Hamiltonian gradient and classify it.

    Returns a dict with the refined point, the gradient norm there, the
    finite-difference Hessian, its determinant, and the classification
    ("centre" for det > 0, "saddle" for det < 0) -- for a canonical flow
    the Hessian sign of the Hamiltonian decides the linearized type.
    """
    if grad_fn is None:
        def grad_fn(K1, K2):
            return hamiltonian_gradient(K1, K2, A, Omega)

    x, y = float(seed[0]), float(seed[1])
    d = 1e-6

    def hess(x, y):
        gxp = grad_fn(x + d, y)
        gxm = grad_fn(x - d, y)
        gyp = grad_fn(x, y + d)
        gym = grad_fn(x, y - d)
        return np.array([
            [(gxp[0] - gxm[0]) / (2 * d), (gyp[0] - gym[0]) / (2 * d)],
            [(gxp[1] - gxm[1]) / (2 * d), (gyp[1] - gym[1]) / (2 * d)],
        ])

    for _ in range(60):
        g = np.array(grad_fn(x, y))
        if np.hypot(g[0], g[1]) < 1e-13:
            break
        Hm = hess(x, y)
        det = Hm[0, 0] * Hm[1, 1] - Hm[0, 1] * Hm[1, 0]
        if det == 0.0:
            break
        dx = (Hm[1, 1] * g[0] - Hm[0, 1] * g[1]) / det
        dy = (-Hm[1, 0] * g[0] + Hm[0, 0] * g[1]) / det
        x, y = x - dx, y - dy
    g = np.array(grad_fn(x, y))
    Hm = hess(x, y)
    det = float(Hm[0, 0] * Hm[1, 1] - Hm[0, 1] * Hm[1, 0])
    kind = "centre" if det > 0.0 else ("saddle" if det < 0.0 else "degenerate")
    return {
        "K1": x, "K2": y,
        "grad_norm": float(np.hypot(g[0], g[1])),
        "hessian": Hm,
        "det_hessian": det,
        "classification": kind,
    }


def _bisect(f, a, b, iters=90):
    fa = f(a)
    fb = f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise ValueError(f"no sign change on [{a:.6g}, {b:.6g}]")
    for _ in range(iters):
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if fa * fm < 0.0:
            b = m
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def _refine_axis_point(value_fn, H0, x_guess, span):
    """Bisect value(x, 0) - H0 in an expanding bracket around x_guess."""
    f = lambda x: value_fn(x, 0.0) - H0
    w = max(1e-6, 1e-3 * span)
    for _ in range(12):
        a, b = x_guess - w, x_guess + w
        try:
            return _bisect(f, a, b)
        except ValueError:
            w *= 2.0
    raise NotClosedOrbit(
        f"could not pin the level crossing near K1 = {x_guess:.6g}")


def _rk4_step(f, y, dt):
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _flow_return_time(grad_fn, seed_K1, step, t_max):
    """Poincare return to K2 = 0 (two crossings = one period).

    Returns (T_flow, other_axis_K1, max_abs_K2) or raises NotClosedOrbit.
    """

    def f(y):
        if y[0] * y[0] + y[1] * y[1] > DOMAIN_RIM:
            raise LeftDomain("orbit reached the unit circle")
        H1, H2 = grad_fn(y[0], y[1])
        return np.array([H2, -H1])

    def refine(y, t):
        # Newton in time: advance by dt = -K2 / K2' until K2 ~ 0
        for _ in range(10):
            dt = -y[1] / f(y)[1]
            if abs(dt) < 1e-15 * max(t, 1.0):
                break
            y = _rk4_step(f, y, dt)
            t += dt
        return y, t

    y = np.array([float(seed_K1), 0.0])
    t = 0.0
    crossings = 0
    other_K1 = None
    max_K2 = 0.0
    prev_sign = 0.0
    n_max = int(np.ceil(t_max / step))
    for i in range(n_max):
        y_new = _rk4_step(f, y, step)
        t_new = t + step
        max_K2 = max(max_K2, abs(y_new[1]))
        s = np.sign(y_new[1])
        if prev_sign != 0.0 and s != 0.0 and s != prev_sign:
            yc, tc = refine(y, t)
            crossings += 1
            if crossings == 1:
                other_K1 = yc[0]
            else:
                return tc, other_K1, max_K2
        if s != 0.0:
            prev_sign = s
        y, t = y_new, t_new
    raise NotClosedOrbit(
        f"flow did not return to the section within tau' = {t_max:.6g}")


def _contour_time(value_fn, grad_fn, H0, x_lo, x_hi, K2_max_hint,
                  band=TURNING_BAND, n_mid=1200, n_corner=240):
    """Level-set line integral: T = closed-path integral of dK1/(dH/dK2).

    The path is the H = H0 orbit, symmetric in K2.  The upper half is
    parametrized by K1 between the axis crossings, except within `band`
    of each crossing where the integrand is singular and K2 takes over as
    the parameter.  Composite Simpson everywhere; the K1 segment uses a
    cosine substitution to cluster nodes toward the bands.
    """

    def upper_K2(K1):
        hi = min(K2_max_hint * 1.5 + 1e-3,
                 np.sqrt(max(DOMAIN_RIM - K1 * K1, 0.0)))

        def g(K2):
            return value_fn(K1, K2) - H0

        try:
            return _bisect(g, 0.0, hi)
        except ValueError as exc:
            raise TurningPointResolutionError(
                f"no K2 crossing above K1 = {K1:.6g}") from exc

    def simpson(vals, dx):
        n = len(vals) - 1
        return dx / 3.0 * (vals[0] + vals[-1]
                           + 4.0 * np.sum(vals[1:-1:2])
                           + 2.0 * np.sum(vals[2:-2:2]))

    # middle segment, K1 parameter with K1 = c - w cos(phi)
    a, b = x_lo + band, x_hi - band
    if not b > a:
        raise TurningPointResolutionError(
            "orbit thinner than two turning bands")
    c, w = 0.5 * (a + b), 0.5 * (b - a)
    if n_mid % 2:
        n_mid += 1
    phi = np.linspace(0.0, np.pi, n_mid + 1)
    vals = np.empty(n_mid + 1)
    for i, p in enumerate(phi):
        K1 = c - w * np.cos(p)
        K2 = upper_K2(K1)
        H2 = grad_fn(K1, K2)[1]
        if H2 == 0.0:
            raise TurningPointResolutionError(
                f"dH/dK2 = 0 inside the K1 segment at K1 = {K1:.6g}")
        vals[i] = w * np.sin(p) / abs(H2)
    T_mid = simpson(vals, np.pi / n_mid)

    # corner pieces, K2 parameter from the axis up to the junction height
    if n_corner % 2:
        n_corner += 1
    T_corner = 0.0
    for x_end, inward in ((x_hi, -1.0), (x_lo, 1.0)):
        K2_b = upper_K2(x_end + inward * band)
        nodes = np.linspace(0.0, K2_b, n_corner + 1)
        cvals = np.empty(n_corner + 1)
        for i, K2 in enumerate(nodes):
            lo = x_end + inward * 1.5 * band
            hi = x_end - inward * 0.5 * band
            rim = np.sqrt(max(DOMAIN_RIM - K2 * K2, 0.0))
            hi = float(np.clip(hi, -rim, rim))

            def g(K1):
                return value_fn(K1, K2) - H0

            try:
                K1 = _bisect(g, min(lo, hi), max(lo, hi))
            except ValueError as exc:
                raise TurningPointResolutionError(
                    f"corner bracket failed at K2 = {K2:.6g} near "
                    f"K1 = {x_end:.6g}") from exc
            H1 = grad_fn(K1, K2)[0]
            if H1 == 0.0:
                raise TurningPointResolutionError(
                    f"dH/dK1 = 0 in the corner band at K2 = {K2:.6g}")
            cvals[i] = 1.0 / abs(H1)
        T_corner += simpson(cvals, K2_b / n_corner)

    return 2.0 * (T_mid + T_corner)


def dual_period(value_fn, grad_fn, seed_K1, step, t_max, band=TURNING_BAND,
                n_mid=1200, n_corner=240):
    """Orbit period by two independent methods.

    (i) Poincare return time of the canonical flow through the K2 = 0
    section; (ii) the level-set contour integral of dK1/(dH/dK2) along
    the closed orbit.  Works for any Hamiltonian even in K2 via the
    callables value_fn(K1, K2) and grad_fn(K1, K2) -> (H1, H2).

    Returns
    -------
    (T_flow, T_contour)

    Raises
    ------
    NotClosedOrbit, TurningPointResolutionError, LeftDomain,
    SingularDenominator
    """
    T_flow, other_K1, max_K2 = _flow_return_time(grad_fn, seed_K1, step,
                                                 t_max)
    H0 = value_fn(float(seed_K1), 0.0)
    span = abs(other_K1 - seed_K1)
    xa = _refine_axis_point(value_fn, H0, float(seed_K1), span)
    xb = _refine_axis_point(value_fn, H0, float(other_K1), span)
    x_lo, x_hi = min(xa, xb), max(xa, xb)
    T_contour = _contour_time(value_fn, grad_fn, H0, x_lo, x_hi, max_K2,
                              band=band, n_mid=n_mid, n_corner=n_corner)
    return T_flow, T_contour


def period(H0, A=1.0, Omega=1.0, lam=3.0, varepsilon=0.2):
    """Dual-method period of the envelope orbit on the level H = H0.

    Seeds the orbit at an axis crossing of the level, runs both period
    methods, and reports the tau'-period together with its
    lambda**8/varepsilon**2 rescaling.

    Raises
    ------
    ZeroLevel, InfeasibleLevel
        From the amplitude-root formula.
    NotClosedOrbit
        If the level has no axis crossing, or its arc fails to close
        (this Hamiltonian's level arcs terminate on the singular set, so
        closed orbits may simply not exist at the requested level --
        reported honestly rather than patched).
    """
    r_minus, r_plus = amplitude_roots(H0, A, Omega)
    points = axis_level_points(H0, A, Omega)
    if not points:
        raise NotClosedOrbit(
            f"level H0 = {H0:.6g} never crosses the K2 = 0 axis inside "
            f"the domain")
    eq = locate_equilibrium(A, Omega)
    T_scale = 2.0 * np.pi / np.sqrt(abs(eq["det_hessian"]))
    last_exc = None
    for seed in points:
        try:
            T_flow, T_contour = dual_period(
                lambda x, y: hamiltonian(x, y, A, Omega),
                lambda x, y: hamiltonian_gradient(x, y, A, Omega),
                seed, step=T_scale / 1000.0, t_max=8.0 * T_scale)
        except (LeftDomain, SingularDenominator, NotClosedOrbit,
                DomainError) as exc:
            last_exc = exc
            continue
        if abs(T_flow - T_contour) > 0.01 * abs(T_flow):
            raise NotClosedOrbit(
                f"flow and contour periods disagree: {T_flow:.6g} vs "
                f"{T_contour:.6g}")
        T = 0.5 * (T_flow + T_contour)
        return LevelSetSummary(H0, r_minus, r_plus, T,
                               T * lam**8 / varepsilon**2)
    raise NotClosedOrbit(
        f"no closed orbit found on level H0 = {H0:.6g}: every axis seed "
        f"fails ({last_exc})") from last_exc
