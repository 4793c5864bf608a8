"""Compiled extension vs pure numpy kernels on identical inputs."""

import numpy as np
import pytest

from oscpulse import _purekernels

compiled = pytest.importorskip(
    "oscpulse._kernels", reason="compiled extension not built")

PAPER = dict(nu=0.1, omega=3.0, eps=0.2, A=1.0, Omega=1.0, delta=1.0)


def test_rk4_trajectories_match():
    init = np.zeros(4)
    h = 2.0 * np.pi / 600.0
    a, fa = compiled.coupled_rk4(init, 0.0, h, 6000, 10, **PAPER)
    b, fb = _purekernels.coupled_rk4(init, 0.0, h, 6000, 10, **PAPER)
    assert fa == fb == -1
    np.testing.assert_allclose(np.asarray(a), np.asarray(b),
                               rtol=1e-10, atol=1e-13)


def test_abm4_trajectories_match():
    init = np.array([0.1, 0.0, -0.2, 0.05])
    h = 2.0 * np.pi / 600.0
    a, fa = compiled.coupled_abm4(init, 0.0, h, 6000, 10, **PAPER)
    b, fb = _purekernels.coupled_abm4(init, 0.0, h, 6000, 10, **PAPER)
    assert fa == fb == -1
    np.testing.assert_allclose(np.asarray(a), np.asarray(b),
                               rtol=1e-10, atol=1e-13)


def test_divergence_flag_matches():
    # negative stiffness blows up immediately in both backends
    bad = dict(PAPER, omega=0.0, eps=50.0, delta=50.0, A=100.0)
    init = np.array([10.0, 0.0, 10.0, 0.0])
    _, fa = compiled.coupled_rk4(init, 0.0, 0.5, 4000, 1, **bad)
    _, fb = _purekernels.coupled_rk4(init, 0.0, 0.5, 4000, 1, **bad)
    assert fa == fb
    assert fa != -1


def test_monodromy_grid_matches():
    Q, R = np.meshgrid(np.array([25.0, 36.0, 42.25]),
                       np.array([0.0, 10.0, 30.0]), indexing="ij")
    args = (Q.ravel(), R.ravel(), 2000)
    out_c = compiled.monodromy_grid(*args)
    out_p = _purekernels.monodromy_grid(*args)
    for a, b in zip(out_c, out_p):
        np.testing.assert_allclose(np.asarray(a), np.asarray(b),
                                   rtol=1e-9, atol=1e-12)
    det = np.asarray(out_c[4])
    np.testing.assert_allclose(det, 1.0, atol=1e-6)
