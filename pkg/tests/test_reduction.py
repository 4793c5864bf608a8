import numpy as np
import pytest

from oscpulse import reduction as red
from oscpulse.errors import DomainError
from oscpulse.oscillator import NondimParams

NPAR = NondimParams(3.0, 0.2, 1.0, 0.1, 1.0)


def test_potential_special_values():
    assert red.response_potential(0.0, 0.0) == 0.5
    assert red.response_potential(*red.CENTRE) == pytest.approx(
        np.sqrt(2.0) - 1.0, abs=1e-14)
    with pytest.raises(DomainError):
        red.response_potential(0.8, 0.7)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(2)
    d = 1e-7
    for _ in range(10):
        x, y = rng.uniform(-0.7, 0.7, 2)
        g = red.response_gradient(x, y)
        fd1 = (red.response_potential(x + d, y)
               - red.response_potential(x - d, y)) / (2 * d)
        fd2 = (red.response_potential(x, y + d)
               - red.response_potential(x, y - d)) / (2 * d)
        assert abs(g[0] - fd1) < 1e-6
        assert abs(g[1] - fd2) < 1e-6


def test_gradient_vanishes_at_centre():
    g = red.response_gradient(*red.CENTRE)
    assert np.hypot(*g) < 1e-14


def test_hessian_determinant_constant():
    # FD Hessian of Phi at the centre against the closed form 20 sqrt2 - 28
    x0, y0 = red.CENTRE
    h = 1e-5
    f = red.response_potential
    pxx = (f(x0 + h, y0) - 2 * f(x0, y0) + f(x0 - h, y0)) / h**2
    pyy = (f(x0, y0 + h) - 2 * f(x0, y0) + f(x0, y0 - h)) / h**2
    assert pxx * pyy == pytest.approx(red.DET_HESS_PHI, rel=1e-6)


def test_orbit_periods_dual_methods():
    # frozen values from step- and node-converged runs
    expected = {-0.45: 1.2053206, -0.25: 1.0383829, -0.05: 0.8427483}
    for seed in red.DEFAULT_ORBIT_SEEDS:
        T_flow, T_contour = red.orbit_period(seed, NPAR)
        assert abs(T_flow - T_contour) / T_flow < 1e-5
        assert T_flow == pytest.approx(expected[seed], abs=2e-6)


def test_small_orbit_approaches_linearized_period():
    T_flow, _ = red.orbit_period(red.CENTRE[0] + 0.01, NPAR)
    T_lin = red.linearized_period(NPAR)
    assert abs(T_flow - T_lin) / T_lin < 2e-3


def test_through_zero_level_is_exact_circle():
    for psi in np.linspace(0.3, 5.9, 9):
        K1 = 0.5 * (np.cos(psi) - 1.0)
        K2 = 0.5 * np.sin(psi)
        assert red.response_potential(K1, K2) == pytest.approx(0.5,
                                                               abs=1e-12)


def test_through_zero_period_converged():
    T = red.through_zero_period(NPAR, n=50000)
    assert T == pytest.approx(0.7935102948, abs=1e-8)
    assert abs(T - red.through_zero_period(NPAR, n=400000)) < 1e-8


def test_pulsation_period_table():
    table = red.pulsation_period_table(NPAR)
    assert table["tau"] == pytest.approx(5206.221, abs=1e-2)
    assert table["theta"] == pytest.approx(table["tau"] / 0.04, rel=1e-12)
    assert table["t"] == table["theta"]
    assert table["tau_prime"] * NPAR.lam**8 == pytest.approx(table["tau"])


def test_brute_force_field_matches_averaged_hamiltonian():
    rows = red.field_direction_report(NPAR)
    assert len(rows) == 5
    for row in rows:
        assert row["angle_vs_averaged"] < 1e-12
        assert row["scale_coefficient"] == pytest.approx(9.0, abs=1e-9)
        # the closed-form Hamiltonian's field genuinely points elsewhere
        assert row["angle_vs_closed_form"] > 0.5


def test_brute_force_field_at_origin():
    v = red.averaged_field_numeric(0.0, 0.0, NPAR)
    # F(0) = 1/8, so the field is (0, -c/4) with c = 9
    assert v[0] == pytest.approx(0.0, abs=1e-12)
    assert v[1] == pytest.approx(-2.25, abs=1e-9)


def test_axis_identity():
    assert red.axis_identity_residual() < 1e-12


def test_reduced_flow_conserves_and_closes():
    T_lin = red.linearized_period(NPAR)
    ts = red.reduced_flow((-0.25, 0.0), 1.0383829, T_lin / 4000, NPAR)
    H = np.array([red.reduced_hamiltonian(x, y, NPAR)
                  for x, y in ts.states[::50]])
    assert (H.max() - H.min()) / abs(H[0]) < 1e-9
    assert np.hypot(*(ts.states[-1] - ts.states[0])) < 1e-5
