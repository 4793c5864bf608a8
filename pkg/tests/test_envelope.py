import numpy as np
import pytest

from oscpulse import envelope as env
from oscpulse.errors import (DenominatorNearZero, DomainError,
                             InfeasibleLevel, NotClosedOrbit,
                             SingularDenominator, ZeroLevel)
from oscpulse.oscillator import NondimParams

NPAR = NondimParams(3.0, 0.2, 1.0, 0.1, 1.0)


def test_hamiltonian_hand_values():
    # on-axis critical point value and one off-axis point, closed forms
    assert env.hamiltonian(1 / np.sqrt(2), 0.0) == pytest.approx(
        (1 - np.sqrt(2)) / (2 * np.pi), abs=1e-14)
    assert env.hamiltonian(0.0, 0.5) == pytest.approx(
        -2 / np.sqrt(3) / (2 * np.pi), abs=1e-14)


def test_hamiltonian_even_in_K2():
    for x, y in [(0.3, 0.4), (-0.5, 0.2), (0.1, 0.7)]:
        assert env.hamiltonian(x, y) == env.hamiltonian(x, -y)


def test_hamiltonian_domain_and_singular():
    with pytest.raises(DomainError):
        env.hamiltonian(0.8, 0.7)
    with pytest.raises(DomainError):
        env.hamiltonian(1.0, 0.0)
    with pytest.raises(SingularDenominator):
        env.hamiltonian(0.0, 0.0)


def test_gradient_zero_at_critical_point():
    g = env.hamiltonian_gradient(1 / np.sqrt(2), 0.0)
    assert np.hypot(*g) < 1e-10


def test_gradient_axis_component_vanishes():
    # H is even in K2 so dH/dK2 = 0 exactly on the axis
    for x in (-0.6, -0.2, 0.3, 0.9):
        assert env.hamiltonian_gradient(x, 0.0)[1] == 0.0


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(11)
    d = 1e-7
    checked = 0
    while checked < 20:
        x, y = rng.uniform(-0.75, 0.75, 2)
        try:
            g = env.hamiltonian_gradient(x, y)
        except (DomainError, SingularDenominator):
            continue
        fd1 = (env.hamiltonian(x + d, y) - env.hamiltonian(x - d, y)) / (2 * d)
        fd2 = (env.hamiltonian(x, y + d) - env.hamiltonian(x, y - d)) / (2 * d)
        scale = max(1.0, np.hypot(*g))
        assert abs(g[0] - fd1) / scale < 1e-6
        assert abs(g[1] - fd2) / scale < 1e-6
        checked += 1


def test_flow_conserves_hamiltonian():
    ts = env.envelope_flow((0.4, 0.2), 2.0, 1e-3)
    H = np.array([env.hamiltonian(x, y) for x, y in ts.states[::25]])
    assert (H.max() - H.min()) / abs(H[0]) < 1e-9


def test_flow_stationary_at_equilibrium():
    x0 = 1 / np.sqrt(2)
    ts = env.envelope_flow((x0, 0.0), 100.0, 0.01)
    drift = np.hypot(ts.states[:, 0] - x0, ts.states[:, 1])
    assert drift.max() < 1e-9


def test_flow_reversible_under_K2_reflection():
    # (K1, K2, tau') -> (K1, -K2, -tau') maps trajectories to trajectories
    fwd = env.envelope_flow((0.4, 0.2), 1.0, 1e-3)
    end = fwd.states[-1]
    back = env.envelope_flow((end[0], -end[1]), 1.0, 1e-3)
    mirrored = fwd.states[::-1] * np.array([1.0, -1.0])
    assert np.max(np.abs(back.states - mirrored)) < 1e-8


def test_flow_left_domain():
    from oscpulse.errors import LeftDomain
    with pytest.raises(LeftDomain):
        env.envelope_flow((0.9999999999, 0.0), 1.0, 1e-3)


def test_amplitude_roots_reference_level():
    r_minus, r_plus = env.amplitude_roots(1.0 / (4.0 * np.pi))
    assert abs(r_minus - 0.0) < 1e-12
    assert abs(r_plus - 1.0) < 1e-12


def test_amplitude_roots_degenerate_level():
    # radical vanishes at H0 = (sqrt 2 - 1)/(2 pi); double root 1/sqrt 2
    H0 = (np.sqrt(2) - 1) / (2 * np.pi)
    r_minus, r_plus = env.amplitude_roots(H0)
    assert r_minus == pytest.approx(1 / np.sqrt(2), abs=1e-7)
    assert r_plus == pytest.approx(1 / np.sqrt(2), abs=1e-7)


def test_amplitude_roots_back_substitution():
    rng = np.random.default_rng(5)
    for H0 in rng.uniform(0.07, 0.5, 6):
        b = 2 * np.pi * H0
        for r in env.amplitude_roots(H0):
            resid = b * r * r - (1 - b) * r + (1 - 2 * b) / (2 * b)
            assert abs(resid) < 1e-10


def test_amplitude_roots_errors():
    with pytest.raises(ZeroLevel):
        env.amplitude_roots(0.0)
    with pytest.raises(InfeasibleLevel):
        env.amplitude_roots(0.05)


def test_axis_level_points():
    # positive levels never reach the axis
    assert env.axis_level_points(1.0 / (4.0 * np.pi)) == []
    # critical level: the axis crossing is the critical point itself
    # double root: conditioning limits accuracy to sqrt(eps)
    H_c = (1 - np.sqrt(2)) / (2 * np.pi)
    pts = env.axis_level_points(H_c)
    assert len(pts) == 1
    assert pts[0] == pytest.approx(1 / np.sqrt(2), abs=1e-6)
    # a deeper level crosses once, near the rim
    pts = env.axis_level_points(-0.5)
    assert len(pts) == 1
    assert env.hamiltonian(pts[0], 0.0) == pytest.approx(-0.5, abs=1e-12)


def test_period_raises_not_closed_orbit():
    with pytest.raises(NotClosedOrbit):
        env.period(1.0 / (4.0 * np.pi))
    with pytest.raises(NotClosedOrbit):
        env.period(-0.5)


def test_dual_period_engine_known_periods():
    # circular orbits of H = (x^2+y^2)/2 have period exactly 2 pi
    Tf, Tc = env.dual_period(lambda x, y: 0.5 * (x * x + y * y),
                             lambda x, y: (x, y),
                             0.6, step=2 * np.pi / 4000, t_max=20.0)
    assert Tf == pytest.approx(2 * np.pi, abs=1e-12)
    assert Tc == pytest.approx(2 * np.pi, abs=1e-6)
    # anisotropic H = (x^2 + 4 y^2)/2 halves the period
    Tf, Tc = env.dual_period(lambda x, y: 0.5 * (x * x + 4 * y * y),
                             lambda x, y: (x, 4 * y),
                             0.5, step=np.pi / 4000, t_max=20.0)
    assert Tf == pytest.approx(np.pi, abs=1e-12)
    assert Tc == pytest.approx(np.pi, abs=1e-6)


def test_locate_equilibrium_classifies_saddle():
    eq = env.locate_equilibrium()
    assert eq["classification"] == "saddle"
    assert eq["K1"] == pytest.approx(1 / np.sqrt(2), abs=1e-9)
    assert abs(eq["K2"]) < 1e-12
    assert eq["grad_norm"] < 1e-10
    assert eq["det_hessian"] < 0


def test_x0_asymptotic_zero_parametric_term():
    s = np.linspace(0.0, 10.0, 101)
    out = env.x0_asymptotic(s, 0.0, 0.8, NPAR)
    expect = (NPAR.f / NPAR.lam**2) * np.cos(s - 0.4)
    assert np.max(np.abs(out - expect)) < 1e-14
    assert isinstance(env.x0_asymptotic(1.0, 0.0, 0.8, NPAR), float)


def test_x0_asymptotic_denominator_guard():
    with pytest.raises(DenominatorNearZero):
        env.x0_asymptotic(0.0, 17.2, 0.0, NPAR)


def test_stationary_initial_data():
    init = env.stationary_initial_data(NPAR)
    assert init == pytest.approx(
        [1.0 / 9.0, 0.0, -9.0 / (0.2 * np.sqrt(2.0)), 0.0], abs=1e-12)
    with pytest.raises(ValueError):
        env.stationary_initial_data(NondimParams(3.0, 0.0, 1.0, 0.0, 1.0))


def test_envelope_state_validation():
    s = env.EnvelopeState(0.3, -0.4, 1.5)
    assert s.K1 == 0.3 and s.K2 == -0.4 and s.tau_prime == 1.5
    with pytest.raises(DomainError):
        env.EnvelopeState(0.8, 0.7)
