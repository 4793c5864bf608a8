"""Pure numpy/Python fallback for the compiled kernels.

Same call signatures and return conventions as the Cython module
``_kernels``.  Trajectory loops are plain Python over float scalars (orders
of magnitude slower than the extension but dependency-free); the monodromy
grid is vectorized across cells, with the two fundamental columns packed
into one complex state.
"""

from math import cos, pi

import numpy as np

_LIMIT = 1e12


def coupled_rk4(init, t0, h, n_steps, stride, nu, omega, eps, A, Omega, delta):
    """RK4 trajectory of the coupled system, storing every stride-th step.

    Returns (states, bad): bad is -1 on success, else the 1-based step
    index at which the state left the divergence limit.
    """
    x, xp, y, yp = (float(v) for v in init)
    om2 = omega * omega
    Om2 = Omega * Omega
    ed = eps * delta
    half_Om = 0.5 * Omega
    n_out = n_steps // stride
    out = np.empty((n_out + 1, 4))
    out[0] = (x, xp, y, yp)
    m = 1
    h2 = 0.5 * h
    h6 = h / 6.0
    for i in range(n_steps):
        t = t0 + i * h
        c1 = cos(half_Om * t)
        c2 = cos(half_Om * (t + h2))
        c3 = cos(half_Om * (t + h))

        a1 = xp
        b1 = -nu * xp - om2 * x + eps * x * y + A * c1
        g1 = yp
        d1 = -Om2 * y + ed * x * x

        x2 = x + h2 * a1
        xp2 = xp + h2 * b1
        y2 = y + h2 * g1
        yp2 = yp + h2 * d1
        a2 = xp2
        b2 = -nu * xp2 - om2 * x2 + eps * x2 * y2 + A * c2
        g2 = yp2
        d2 = -Om2 * y2 + ed * x2 * x2

        x3 = x + h2 * a2
        xp3 = xp + h2 * b2
        y3 = y + h2 * g2
        yp3 = yp + h2 * d2
        a3 = xp3
        b3 = -nu * xp3 - om2 * x3 + eps * x3 * y3 + A * c2
        g3 = yp3
        d3 = -Om2 * y3 + ed * x3 * x3

        x4 = x + h * a3
        xp4 = xp + h * b3
        y4 = y + h * g3
        yp4 = yp + h * d3
        a4 = xp4
        b4 = -nu * xp4 - om2 * x4 + eps * x4 * y4 + A * c3
        g4 = yp4
        d4 = -Om2 * y4 + ed * x4 * x4

        x += h6 * (a1 + 2.0 * (a2 + a3) + a4)
        xp += h6 * (b1 + 2.0 * (b2 + b3) + b4)
        y += h6 * (g1 + 2.0 * (g2 + g3) + g4)
        yp += h6 * (d1 + 2.0 * (d2 + d3) + d4)

        if not (abs(x) < _LIMIT and abs(xp) < _LIMIT
                and abs(y) < _LIMIT and abs(yp) < _LIMIT):
            return out, i + 1
        if (i + 1) % stride == 0:
            out[m] = (x, xp, y, yp)
            m += 1
    return out, -1


def _coupled_rhs(t, x, xp, y, yp, nu, om2, Om2, eps, ed, A, half_Om):
    return (xp,
            -nu * xp - om2 * x + eps * x * y + A * cos(half_Om * t),
            yp,
            -Om2 * y + ed * x * x)


def coupled_abm4(init, t0, h, n_steps, stride, nu, omega, eps, A, Omega, delta):
    """Adams-Bashforth-Moulton (PECE) trajectory; RK4 startup for 3 steps."""
    x, xp, y, yp = (float(v) for v in init)
    om2 = omega * omega
    Om2 = Omega * Omega
    ed = eps * delta
    half_Om = 0.5 * Omega
    n_out = n_steps // stride
    out = np.empty((n_out + 1, 4))
    out[0] = (x, xp, y, yp)
    m = 1
    h2 = 0.5 * h
    h6 = h / 6.0
    h24 = h / 24.0

    hist = [_coupled_rhs(t0, x, xp, y, yp, nu, om2, Om2, eps, ed, A, half_Om)]
    n_start = min(3, n_steps)
    for i in range(n_start):
        t = t0 + i * h
        a1, b1, g1, d1 = hist[-1]
        a2, b2, g2, d2 = _coupled_rhs(t + h2, x + h2 * a1, xp + h2 * b1,
                                      y + h2 * g1, yp + h2 * d1,
                                      nu, om2, Om2, eps, ed, A, half_Om)
        a3, b3, g3, d3 = _coupled_rhs(t + h2, x + h2 * a2, xp + h2 * b2,
                                      y + h2 * g2, yp + h2 * d2,
                                      nu, om2, Om2, eps, ed, A, half_Om)
        a4, b4, g4, d4 = _coupled_rhs(t + h, x + h * a3, xp + h * b3,
                                      y + h * g3, yp + h * d3,
                                      nu, om2, Om2, eps, ed, A, half_Om)
        x += h6 * (a1 + 2.0 * (a2 + a3) + a4)
        xp += h6 * (b1 + 2.0 * (b2 + b3) + b4)
        y += h6 * (g1 + 2.0 * (g2 + g3) + g4)
        yp += h6 * (d1 + 2.0 * (d2 + d3) + d4)
        if not (abs(x) < _LIMIT and abs(xp) < _LIMIT
                and abs(y) < _LIMIT and abs(yp) < _LIMIT):
            return out, i + 1
        if (i + 1) % stride == 0:
            out[m] = (x, xp, y, yp)
            m += 1
        hist.append(_coupled_rhs(t0 + (i + 1) * h, x, xp, y, yp,
                                 nu, om2, Om2, eps, ed, A, half_Om))

    f0, f1, f2, f3 = hist[3], hist[2], hist[1], hist[0]
    for i in range(3, n_steps):
        t_next = t0 + (i + 1) * h
        px = x + h24 * (55.0 * f0[0] - 59.0 * f1[0] + 37.0 * f2[0] - 9.0 * f3[0])
        pxp = xp + h24 * (55.0 * f0[1] - 59.0 * f1[1] + 37.0 * f2[1] - 9.0 * f3[1])
        py = y + h24 * (55.0 * f0[2] - 59.0 * f1[2] + 37.0 * f2[2] - 9.0 * f3[2])
        pyp = yp + h24 * (55.0 * f0[3] - 59.0 * f1[3] + 37.0 * f2[3] - 9.0 * f3[3])
        fp = _coupled_rhs(t_next, px, pxp, py, pyp,
                          nu, om2, Om2, eps, ed, A, half_Om)
        x += h24 * (9.0 * fp[0] + 19.0 * f0[0] - 5.0 * f1[0] + f2[0])
        xp += h24 * (9.0 * fp[1] + 19.0 * f0[1] - 5.0 * f1[1] + f2[1])
        y += h24 * (9.0 * fp[2] + 19.0 * f0[2] - 5.0 * f1[2] + f2[2])
        yp += h24 * (9.0 * fp[3] + 19.0 * f0[3] - 5.0 * f1[3] + f2[3])
        if not (abs(x) < _LIMIT and abs(xp) < _LIMIT
                and abs(y) < _LIMIT and abs(yp) < _LIMIT):
            return out, i + 1
        if (i + 1) % stride == 0:
            out[m] = (x, xp, y, yp)
            m += 1
        f3, f2, f1 = f2, f1, f0
        f0 = _coupled_rhs(t_next, x, xp, y, yp,
                          nu, om2, Om2, eps, ed, A, half_Om)
    return out, -1


def monodromy_grid(Q, R, n_steps):
    """Monodromy matrices of u'' + (Q - 2R cos 2s) u = 0 over s in [0, 2pi].

    Q, R are flat arrays of equal length; one matrix per entry.  The two
    fundamental columns (u(0), u'(0)) = (1, 0) and (0, 1) ride in the real
    and imaginary parts of a complex state, which the linear equation keeps
    separated.

    The determinant of each monodromy matrix is accumulated alongside as the
    running product of the per-step transfer-matrix determinants, in closed
    form.  Computing det(M) from the final entries instead would cancel
    catastrophically at strongly unstable cells, where the entries reach
    exp(2 pi Re(lambda_1)) and the subtraction loses every significant digit
    of the drift.

    Returns (m11, m12, m21, m22, det) as float arrays.
    """
    Q = np.ascontiguousarray(Q, dtype=float)
    R = np.ascontiguousarray(R, dtype=float)
    n = Q.shape[0]
    h = 2.0 * pi / n_steps
    steps = np.arange(n_steps)
    c0 = np.cos(2.0 * (steps * h))
    ch = np.cos(2.0 * (steps * h + 0.5 * h))
    c1 = np.cos(2.0 * (steps * h + h))

    u = np.ones(n, dtype=complex)
    p = np.zeros(n, dtype=complex)
    p += 1j
    det = np.ones(n)
    R2 = 2.0 * R
    h2 = 0.5 * h
    h6 = h / 6.0
    hsq = h * h
    for i in range(n_steps):
        W0 = Q - R2 * c0[i]
        Wh = Q - R2 * ch[i]
        W1 = Q - R2 * c1[i]
        k1u = p
        k1p = -W0 * u
        k2u = p + h2 * k1p
        k2p = -Wh * (u + h2 * k1u)
        k3u = p + h2 * k2p
        k3p = -Wh * (u + h2 * k2u)
        k4u = p + h * k3p
        k4p = -W1 * (u + h * k3u)
        u = u + h6 * (k1u + 2.0 * (k2u + k3u) + k4u)
        p = p + h6 * (k1p + 2.0 * (k2p + k3p) + k4p)
        # det of the one-step map (alpha, beta; gamma, delta), exact in
        # W0, Wh, W1 -- every factor is 1 + O(h^6 W^3), so the product
        # stays perfectly conditioned no matter how large M grows.
        alpha = 1.0 - (hsq / 6.0) * (W0 + 2.0 * Wh) \
            + (hsq * hsq / 24.0) * W0 * Wh
        beta = h * (1.0 - (hsq / 6.0) * Wh)
        gamma = (h / 6.0) * (-W0 - 4.0 * Wh - W1
                             + (hsq / 2.0) * Wh * (W0 + W1))
        dd = 1.0 - (hsq / 6.0) * (2.0 * Wh + W1) \
            + (hsq * hsq / 24.0) * W1 * Wh
        det *= alpha * dd - beta * gamma
    return (np.ascontiguousarray(u.real), np.ascontiguousarray(u.imag),
            np.ascontiguousarray(p.real), np.ascontiguousarray(p.imag),
            det)
