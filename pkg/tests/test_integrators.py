import numpy as np
import pytest

from oscpulse.errors import GridTooShort, NonFiniteState
from oscpulse.integrators import (IntegrationGrid, VectorField, abm4_integrate,
                                  rk4_integrate)

INTEGRATORS = [rk4_integrate, abm4_integrate]


def exp_field():
    return VectorField(1, lambda t, y: y.copy())


def harmonic_field():
    return VectorField(2, lambda t, y: np.array([y[1], -y[0]]))


@pytest.mark.parametrize("integrate", INTEGRATORS)
def test_zero_field_constant(integrate):
    field = VectorField(1, lambda t, y: np.zeros(1))
    ts = integrate(field, [3.5], IntegrationGrid(0.0, 1.0, 0.1))
    assert np.all(ts.states == 3.5)


@pytest.mark.parametrize("integrate", INTEGRATORS)
def test_exponential(integrate):
    ts = integrate(exp_field(), [1.0], IntegrationGrid(0.0, 1.0, 0.01))
    assert abs(ts.states[-1, 0] - np.e) < 1e-9


@pytest.mark.parametrize("integrate", INTEGRATORS)
def test_harmonic_return(integrate):
    ts = integrate(harmonic_field(), [1.0, 0.0],
                   IntegrationGrid(0.0, 2.0 * np.pi, 1e-3))
    assert np.max(np.abs(ts.states[-1] - [1.0, 0.0])) < 1e-8


@pytest.mark.parametrize("integrate", INTEGRATORS)
def test_initial_row_exact(integrate):
    init = np.array([0.3, -0.7])
    ts = integrate(harmonic_field(), init, IntegrationGrid(0.0, 1.0, 0.1))
    assert np.all(ts.states[0] == init)


def _max_error_exp(integrate, h):
    grid = IntegrationGrid(0.0, 1.0, h)
    ts = integrate(exp_field(), [1.0], grid)
    return np.max(np.abs(ts.states[:, 0] - np.exp(grid.times())))


def _max_error_harmonic(integrate, h):
    grid = IntegrationGrid(0.0, 2.0 * np.pi, h)
    ts = integrate(harmonic_field(), [1.0, 0.0], grid)
    t = grid.times()
    exact = np.column_stack([np.cos(t), -np.sin(t)])
    return np.max(np.abs(ts.states - exact))


@pytest.mark.parametrize("integrate", INTEGRATORS)
def test_fourth_order_exponential(integrate):
    ratio = _max_error_exp(integrate, 0.02) / _max_error_exp(integrate, 0.01)
    assert 14.0 <= ratio <= 18.0


@pytest.mark.parametrize("integrate", INTEGRATORS)
def test_fourth_order_harmonic(integrate):
    coarse = _max_error_harmonic(integrate, 2.0 * np.pi / 400)
    fine = _max_error_harmonic(integrate, 2.0 * np.pi / 800)
    assert 14.0 <= coarse / fine <= 18.0


@pytest.mark.parametrize("integrate", INTEGRATORS)
def test_divergence_aborts(integrate):
    # y' = y**2 from y(0) = 2 blows up at t = 0.5
    field = VectorField(1, lambda t, y: y * y)
    with pytest.raises(NonFiniteState):
        integrate(field, [2.0], IntegrationGrid(0.0, 1.0, 0.01))


def test_abm4_grid_too_short():
    with pytest.raises(GridTooShort):
        abm4_integrate(exp_field(), [1.0], IntegrationGrid(0.0, 0.03, 0.01))


def test_bad_init_length():
    with pytest.raises(ValueError):
        rk4_integrate(harmonic_field(), [1.0], IntegrationGrid(0.0, 1.0, 0.1))


def test_grid_validation():
    with pytest.raises(ValueError):
        IntegrationGrid(1.0, 0.0, 0.1)
    with pytest.raises(ValueError):
        IntegrationGrid(0.0, 1.0, -0.1)
