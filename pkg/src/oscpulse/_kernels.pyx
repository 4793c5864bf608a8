# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: coupled-system trajectories and monodromy grids."""

from libc.math cimport cos, fabs, M_PI

import numpy as np

from cython.parallel cimport prange

cdef double _LIMIT = 1e12


def coupled_rk4(double[::1] init, double t0, double h, long n_steps, long stride,
                double nu, double omega, double eps, double A, double Omega,
                double delta):
    """RK4 trajectory of the coupled system, storing every stride-th step.

    Returns (states, bad): bad is -1 on success, else the 1-based step
    index at which the state left the divergence limit.
    """
    cdef long n_out = n_steps // stride
    out_arr = np.empty((n_out + 1, 4))
    cdef double[:, ::1] out = out_arr
    cdef double x = init[0], xp = init[1], y = init[2], yp = init[3]
    cdef double om2 = omega * omega, Om2 = Omega * Omega
    cdef double ed = eps * delta, half_Om = 0.5 * Omega
    cdef double h2 = 0.5 * h, h6 = h / 6.0
    cdef double t, c1, c2, c3
    cdef double a1, b1, g1, d1, a2, b2, g2, d2
    cdef double a3, b3, g3, d3, a4, b4, g4, d4
    cdef double x2, xp2, y2, yp2, x3, xp3, y3, yp3, x4, xp4, y4, yp4
    cdef long i, m = 1
    out[0, 0] = x
    out[0, 1] = xp
    out[0, 2] = y
    out[0, 3] = yp
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

        x = x + h6 * (a1 + 2.0 * (a2 + a3) + a4)
        xp = xp + h6 * (b1 + 2.0 * (b2 + b3) + b4)
        y = y + h6 * (g1 + 2.0 * (g2 + g3) + g4)
        yp = yp + h6 * (d1 + 2.0 * (d2 + d3) + d4)

        if not (fabs(x) < _LIMIT and fabs(xp) < _LIMIT
                and fabs(y) < _LIMIT and fabs(yp) < _LIMIT):
            return out_arr, i + 1
        if (i + 1) % stride == 0:
            out[m, 0] = x
            out[m, 1] = xp
            out[m, 2] = y
            out[m, 3] = yp
            m += 1
    return out_arr, -1


def coupled_abm4(double[::1] init, double t0, double h, long n_steps, long stride,
                 double nu, double omega, double eps, double A, double Omega,
                 double delta):
    """Adams-Bashforth-Moulton (PECE) trajectory; RK4 startup for 3 steps."""
    cdef long n_out = n_steps // stride
    out_arr = np.empty((n_out + 1, 4))
    cdef double[:, ::1] out = out_arr
    cdef double x = init[0], xp = init[1], y = init[2], yp = init[3]
    cdef double om2 = omega * omega, Om2 = Omega * Omega
    cdef double ed = eps * delta, half_Om = 0.5 * Omega
    cdef double h2 = 0.5 * h, h6 = h / 6.0, h24 = h / 24.0
    cdef double t, t_next, c1, c2, c3
    cdef double a1, b1, g1, d1, a2, b2, g2, d2
    cdef double a3, b3, g3, d3, a4, b4, g4, d4
    cdef double x2, xp2, y2, yp2, x3, xp3, y3, yp3, x4, xp4, y4, yp4
    cdef double px, pxp, py, pyp
    # f-history: index 0 is the newest sample
    cdef double f0x, f0xp, f0y, f0yp, f1x, f1xp, f1y, f1yp
    cdef double f2x, f2xp, f2y, f2yp, f3x, f3xp, f3y, f3yp
    cdef double fpx, fpxp, fpy, fpyp
    cdef long i, m = 1, n_start
    out[0, 0] = x
    out[0, 1] = xp
    out[0, 2] = y
    out[0, 3] = yp

    f3x = xp
    f3xp = -nu * xp - om2 * x + eps * x * y + A * cos(half_Om * t0)
    f3y = yp
    f3yp = -Om2 * y + ed * x * x
    # placeholders until the startup fills them
    f2x = f2xp = f2y = f2yp = 0.0
    f1x = f1xp = f1y = f1yp = 0.0
    f0x = f0xp = f0y = f0yp = 0.0

    n_start = 3 if n_steps > 3 else n_steps
    for i in range(n_start):
        t = t0 + i * h
        c1 = cos(half_Om * t)
        c2 = cos(half_Om * (t + h2))
        c3 = cos(half_Om * (t + h))
        if i == 0:
            a1 = f3x
            b1 = f3xp
            g1 = f3y
            d1 = f3yp
        elif i == 1:
            a1 = f2x
            b1 = f2xp
            g1 = f2y
            d1 = f2yp
        else:
            a1 = f1x
            b1 = f1xp
            g1 = f1y
            d1 = f1yp

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

        x = x + h6 * (a1 + 2.0 * (a2 + a3) + a4)
        xp = xp + h6 * (b1 + 2.0 * (b2 + b3) + b4)
        y = y + h6 * (g1 + 2.0 * (g2 + g3) + g4)
        yp = yp + h6 * (d1 + 2.0 * (d2 + d3) + d4)

        if not (fabs(x) < _LIMIT and fabs(xp) < _LIMIT
                and fabs(y) < _LIMIT and fabs(yp) < _LIMIT):
            return out_arr, i + 1
        if (i + 1) % stride == 0:
            out[m, 0] = x
            out[m, 1] = xp
            out[m, 2] = y
            out[m, 3] = yp
            m += 1
        t_next = t0 + (i + 1) * h
        if i == 0:
            f2x = xp
            f2xp = -nu * xp - om2 * x + eps * x * y + A * cos(half_Om * t_next)
            f2y = yp
            f2yp = -Om2 * y + ed * x * x
        elif i == 1:
            f1x = xp
            f1xp = -nu * xp - om2 * x + eps * x * y + A * cos(half_Om * t_next)
            f1y = yp
            f1yp = -Om2 * y + ed * x * x
        else:
            f0x = xp
            f0xp = -nu * xp - om2 * x + eps * x * y + A * cos(half_Om * t_next)
            f0y = yp
            f0yp = -Om2 * y + ed * x * x

    for i in range(3, n_steps):
        t_next = t0 + (i + 1) * h
        px = x + h24 * (55.0 * f0x - 59.0 * f1x + 37.0 * f2x - 9.0 * f3x)
        pxp = xp + h24 * (55.0 * f0xp - 59.0 * f1xp + 37.0 * f2xp - 9.0 * f3xp)
        py = y + h24 * (55.0 * f0y - 59.0 * f1y + 37.0 * f2y - 9.0 * f3y)
        pyp = yp + h24 * (55.0 * f0yp - 59.0 * f1yp + 37.0 * f2yp - 9.0 * f3yp)
        c1 = cos(half_Om * t_next)
        fpx = pxp
        fpxp = -nu * pxp - om2 * px + eps * px * py + A * c1
        fpy = pyp
        fpyp = -Om2 * py + ed * px * px
        x = x + h24 * (9.0 * fpx + 19.0 * f0x - 5.0 * f1x + f2x)
        xp = xp + h24 * (9.0 * fpxp + 19.0 * f0xp - 5.0 * f1xp + f2xp)
        y = y + h24 * (9.0 * fpy + 19.0 * f0y - 5.0 * f1y + f2y)
        yp = yp + h24 * (9.0 * fpyp + 19.0 * f0yp - 5.0 * f1yp + f2yp)
        if not (fabs(x) < _LIMIT and fabs(xp) < _LIMIT
                and fabs(y) < _LIMIT and fabs(yp) < _LIMIT):
            return out_arr, i + 1
        if (i + 1) % stride == 0:
            out[m, 0] = x
            out[m, 1] = xp
            out[m, 2] = y
            out[m, 3] = yp
            m += 1
        f3x = f2x
        f3xp = f2xp
        f3y = f2y
        f3yp = f2yp
        f2x = f1x
        f2xp = f1xp
        f2y = f1y
        f2yp = f1yp
        f1x = f0x
        f1xp = f0xp
        f1y = f0y
        f1yp = f0yp
        f0x = xp
        f0xp = -nu * xp - om2 * x + eps * x * y + A * cos(half_Om * t_next)
        f0y = yp
        f0yp = -Om2 * y + ed * x * x
    return out_arr, -1


def monodromy_grid(double[::1] Q, double[::1] R, long n_steps):
    """Monodromy matrices of u'' + (Q - 2R cos 2s) u = 0 over s in [0, 2pi].

    One matrix per (Q[j], R[j]) pair; cells run in parallel.  det(M) is
    accumulated as the running product of closed-form one-step determinants,
    because forming it from the final entries cancels catastrophically once
    the entries grow to exp(2 pi Re(lambda_1)) at strongly unstable cells.
    Returns (m11, m12, m21, m22, det) as float arrays.
    """
    cdef long n = Q.shape[0]
    m11_arr = np.empty(n)
    m12_arr = np.empty(n)
    m21_arr = np.empty(n)
    m22_arr = np.empty(n)
    det_arr = np.empty(n)
    cdef double[::1] m11 = m11_arr
    cdef double[::1] m12 = m12_arr
    cdef double[::1] m21 = m21_arr
    cdef double[::1] m22 = m22_arr
    cdef double[::1] det = det_arr

    cdef double h = 2.0 * M_PI / n_steps
    cdef double h2 = 0.5 * h, h6 = h / 6.0
    cdef double hsq = h * h
    c0_arr = np.cos(2.0 * (np.arange(n_steps) * h))
    ch_arr = np.cos(2.0 * (np.arange(n_steps) * h + 0.5 * h))
    c1_arr = np.cos(2.0 * (np.arange(n_steps) * h + h))
    cdef double[::1] c0 = c0_arr
    cdef double[::1] ch = ch_arr
    cdef double[::1] c1 = c1_arr

    cdef long j, i
    cdef double q, r2, W0, Wh, W1
    cdef double u1, p1, u2, p2, u1n, p1n, u2n, p2n
    cdef double k1u, k1p, k2u, k2p, k3u, k3p, k4u, k4p
    cdef double dprod, sa, sb, sc, sd

    for j in prange(n, nogil=True, schedule="static"):
        u1 = 1.0
        p1 = 0.0
        u2 = 0.0
        p2 = 1.0
        dprod = 1.0
        q = Q[j]
        r2 = 2.0 * R[j]
        for i in range(n_steps):
            W0 = q - r2 * c0[i]
            Wh = q - r2 * ch[i]
            W1 = q - r2 * c1[i]

            k1u = p1
            k1p = -W0 * u1
            k2u = p1 + h2 * k1p
            k2p = -Wh * (u1 + h2 * k1u)
            k3u = p1 + h2 * k2p
            k3p = -Wh * (u1 + h2 * k2u)
            k4u = p1 + h * k3p
            k4p = -W1 * (u1 + h * k3u)
            u1n = u1 + h6 * (k1u + 2.0 * (k2u + k3u) + k4u)
            p1n = p1 + h6 * (k1p + 2.0 * (k2p + k3p) + k4p)

            k1u = p2
            k1p = -W0 * u2
            k2u = p2 + h2 * k1p
            k2p = -Wh * (u2 + h2 * k1u)
            k3u = p2 + h2 * k2p
            k3p = -Wh * (u2 + h2 * k2u)
            k4u = p2 + h * k3p
            k4p = -W1 * (u2 + h * k3u)
            u2n = u2 + h6 * (k1u + 2.0 * (k2u + k3u) + k4u)
            p2n = p2 + h6 * (k1p + 2.0 * (k2p + k3p) + k4p)

            u1 = u1n
            p1 = p1n
            u2 = u2n
            p2 = p2n

            # closed-form det of the one-step transfer matrix
            sa = 1.0 - (hsq / 6.0) * (W0 + 2.0 * Wh) \
                + (hsq * hsq / 24.0) * W0 * Wh
            sb = h * (1.0 - (hsq / 6.0) * Wh)
            sc = (h / 6.0) * (-W0 - 4.0 * Wh - W1
                              + (hsq / 2.0) * Wh * (W0 + W1))
            sd = 1.0 - (hsq / 6.0) * (2.0 * Wh + W1) \
                + (hsq * hsq / 24.0) * W1 * Wh
            dprod = dprod * (sa * sd - sb * sc)
        m11[j] = u1
        m12[j] = u2
        m21[j] = p1
        m22[j] = p2
        det[j] = dprod
    return m11_arr, m12_arr, m21_arr, m22_arr, det_arr
