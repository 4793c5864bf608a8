"""Tests for the Mathieu monodromy, exponents, index, and forced response."""

import numpy as np
import pytest

from oscpulse import floquet
from oscpulse.errors import NonFiniteState
from oscpulse.floquet import MathieuParams
from oscpulse.integrators import IntegrationGrid, VectorField, rk4_integrate


def test_constant_coefficient_stable():
    # u'' + 36 u = 0: pure oscillation, multiplicators on the unit circle
    res = floquet.monodromy(36.0, 0.0)
    assert res.re_lambda1 == 0.0
    rho1, rho2 = res.multiplicators
    assert abs(abs(rho1) - 1.0) < 1e-12
    assert abs(abs(rho2) - 1.0) < 1e-12
    assert abs(res.det - 1.0) < 1e-9


def test_constant_coefficient_exponential():
    # u'' = u: cosh/sinh monodromy, Re lambda_1 = 1
    res = floquet.monodromy(-1.0, 0.0)
    assert abs(res.re_lambda1 - 1.0) < 1e-6
    m = res.monodromy
    two_pi = 2.0 * np.pi
    assert abs(m[0, 0] - np.cosh(two_pi)) < 1e-6 * np.cosh(two_pi)
    assert abs(m[1, 0] - np.sinh(two_pi)) < 1e-6 * np.sinh(two_pi)


def test_first_tongue_unstable():
    res = floquet.monodromy(1.0, 0.5)
    assert res.re_lambda1 > 0.0


def test_multiplicator_product_and_ordering():
    for Q, R in [(36.0, 10.0), (30.0, 40.0), (1.0, 0.5), (40.0, 2.0)]:
        res = floquet.monodromy(Q, R)
        rho1, rho2 = res.multiplicators
        assert abs(rho1 * rho2 - 1.0) < 1e-9
        lam1, lam2 = res.char_exponents
        assert lam1.real >= lam2.real
        if abs(res.trace) <= 2.0:
            assert res.re_lambda1 == 0.0
            assert lam1.imag >= 0.0
        else:
            assert res.re_lambda1 > 0.0


def test_negative_trace_half_integer_exponent():
    # Period-doubling tongue: negative multiplicators, Im lambda = 1/2
    res = floquet.monodromy(1.0, 0.5)
    if res.trace < -2.0:
        lam1, _ = res.char_exponents
        assert abs(lam1.imag - 0.5) < 1e-12


def test_symmetry_in_sign_of_R():
    for Q, R in [(36.0, 7.0), (28.5, 15.25), (45.0, 60.0)]:
        a = floquet.monodromy(Q, R).re_lambda1
        b = floquet.monodromy(Q, -R).re_lambda1
        assert abs(a - b) < 1e-9


def test_overflow_raises():
    # growth exp(2 pi sqrt(|Q|)) passes the double limit beyond |Q| ~ 1.27e4
    with pytest.raises(NonFiniteState):
        floquet.monodromy(-4.0e4, 0.0)


def test_exponent_against_brute_force_growth():
    # per-2pi log growth over 20 periods, renormalized each period
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 3:
        Q = rng.uniform(25.0, 49.0)
        R = rng.uniform(0.0, 64.0)
        res = floquet.monodromy(Q, R)
        if res.re_lambda1 < 0.05:
            continue
        checked += 1

        def rhs(s, y, Q=Q, R=R):
            return np.array([y[1], -(Q - 2.0 * R * np.cos(2.0 * s)) * y[0]])

        field = VectorField(2, rhs)
        y = np.array([1.0, 0.0])
        logs = []
        for k in range(20):
            grid = IntegrationGrid(2.0 * np.pi * k, 2.0 * np.pi * (k + 1),
                                   2.0 * np.pi / 2000.0)
            ts = rk4_integrate(field, y, grid)
            y = ts.states[-1]
            nrm = np.hypot(y[0], y[1])
            logs.append(np.log(nrm))
            y = y / nrm
        growth = np.mean(logs[10:]) / (2.0 * np.pi)
        assert abs(growth - res.re_lambda1) < 0.02 * res.re_lambda1


def test_damping_substitution():
    # x0 = u exp(-2 mu s) maps the damped equation onto Q = q - 4 mu^2
    q, r, mu = 36.0, 5.0, 0.1
    Q = q - 4.0 * mu ** 2

    def damped(s, y):
        return np.array([
            y[1],
            -4.0 * mu * y[1] - (q - 2.0 * r * np.cos(2.0 * s)) * y[0],
        ])

    def undamped(s, y):
        return np.array([y[1], -(Q - 2.0 * r * np.cos(2.0 * s)) * y[0]])

    grid = IntegrationGrid(0.0, 2.0 * np.pi, 2.0 * np.pi / 4000.0)
    # matching initial data: x0(0) = u(0), x0'(0) = u'(0) - 2 mu u(0)
    x = rk4_integrate(VectorField(2, damped), np.array([1.0, -2.0 * mu]),
                      grid)
    u = rk4_integrate(VectorField(2, undamped), np.array([1.0, 0.0]), grid)
    s = grid.times()
    recon = u.states[:, 0] * np.exp(-2.0 * mu * s)
    assert np.max(np.abs(x.states[:, 0] - recon)) < 1e-8


def test_surface_zero_R_column_and_shape():
    surf = floquet.stability_surface((25.0, 49.0), (0.0, 0.0), 0.25)
    assert surf.re_lambda1.shape == (97, 1)
    assert np.all(surf.re_lambda1 == 0.0)


def test_surface_det_and_dichotomy_sample():
    surf = floquet.stability_surface((25.0, 49.0), (0.0, 64.0), 4.0)
    assert np.max(np.abs(surf.det - 1.0)) < 1e-9
    stable = np.abs(surf.trace) <= 2.0
    assert np.all(surf.re_lambda1[stable] == 0.0)
    assert np.all(surf.re_lambda1[~stable] > 0.0)
    rows = list(surf.rows())
    assert len(rows) == surf.re_lambda1.size
    assert rows[0][:2] == (25.0, 0.0)
    assert rows[1][:2] == (25.0, 4.0)


def test_section_matches_surface():
    Rv, re1, thr = floquet.stability_section(36.0, (0.0, 64.0), 1.0, mu=0.1)
    assert thr == 0.2
    surf = floquet.stability_surface((36.0, 36.0), (0.0, 64.0), 1.0)
    assert np.array_equal(re1, surf.re_lambda1[0])
    # the solid curve rises above the dissipation level somewhere
    assert re1.max() > thr


def test_damped_multiplicator_values():
    val = floquet.damped_multiplicator(36.0, 0.0, 0.1)
    assert abs(val - np.exp(-0.4 * np.pi)) < 1e-12
    # zero damping reduces to the plain multiplicator
    res = floquet.monodromy(30.0, 20.0)
    val = floquet.damped_multiplicator(30.0, 20.0, 0.0)
    assert abs(val - np.exp(2.0 * np.pi * res.re_lambda1)) < 1e-12


def test_integral_index_constant_cases():
    tau = np.linspace(0.0, 50.0, 201)
    lam = floquet.integral_index(tau, np.zeros_like(tau), 36.0, 0.1)
    assert np.allclose(lam, -0.2 * tau, rtol=0.0, atol=1e-12)
    lam0 = floquet.integral_index(tau, np.zeros_like(tau), 36.0, 0.0)
    assert np.all(lam0 == 0.0)


def test_mathieu_params():
    mp = MathieuParams(q=36.0, r=-3.0, mu=0.1, a=0.7, f=1.0)
    assert mp.Q == 36.0 - 0.04
    assert mp.R == 3.0
    k = 0.4 * np.exp(1j * 1.1)
    mp = MathieuParams.from_envelope(3.0, k, mu=0.05)
    assert mp.q == 36.0
    assert abs(mp.r - 0.8) < 1e-15
    assert abs(mp.a - 1.1) < 1e-12
    with pytest.raises(ValueError):
        MathieuParams(q=1.0, r=0.0, mu=-0.5)


def test_particular_solution_zero_forcing():
    mp = MathieuParams(q=36.0, r=2.0, mu=0.1, a=0.3, f=0.0)
    ts = floquet.particular_solution(mp, 2.0 * np.pi, 2.0 * np.pi / 1000.0)
    assert np.all(ts.states == 0.0)


def test_particular_solution_constant_coefficients():
    # r = 0, mu = 0: driven oscillator with closed-form zero-init response
    q, a, f = 36.0, 0.8, 1.0
    mp = MathieuParams(q=q, r=0.0, mu=0.0, a=a, f=f)
    h = 2.0 * np.pi / 4000.0
    ts = floquet.particular_solution(mp, 4.0 * np.pi, h)
    s = ts.times
    amp = 4.0 * f / (q - 1.0)
    w = np.sqrt(q)
    closed = amp * (np.cos(s - 0.5 * a)
                    - np.cos(0.5 * a) * np.cos(w * s)
                    - np.sin(0.5 * a) * np.sin(w * s) / w)
    assert np.max(np.abs(ts.states[:, 0] - closed)) < 1e-6
