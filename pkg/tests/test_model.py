import numpy as np
import pytest

from seslab.model import (DimensionalParams, ModelParams, ParameterError, SystemState,
                          complete_weights, integrate, nondimensionalize, rhs, star_weights,
                          steady_state)


def test_alpha_is_derived():
    p = ModelParams(b=[1.0, 2.0], nu=[0.25, 0.75], rho=[0.1, 0.2])
    assert np.allclose(p.alpha, [0.75, 0.25])
    assert p.replace(nu=[0.5, 0.5]).alpha.tolist() == [0.5, 0.5]


@pytest.mark.parametrize("kw", [
    dict(b=[0.0], nu=[0.5], rho=[0.5]),
    dict(b=[1.0], nu=[1.5], rho=[0.5]),
    dict(b=[1.0, 1.0], nu=[0.5], rho=[0.5, 0.5]),
    dict(b=[1.0], nu=[0.5], rho=[float("nan")]),
])
def test_invalid_parameters(kw):
    with pytest.raises(ParameterError):
        ModelParams(**kw)


def test_negative_stock_rejected():
    with pytest.raises(ParameterError):
        SystemState(-0.1, [0.0])


def test_weight_builders():
    assert np.allclose(complete_weights(4).sum(axis=1), 1.0)
    w = star_weights(4)
    assert np.allclose(w[0, 1:], 1 / 3) and np.allclose(w[1:, 0], 1.0)
    assert w[1, 2] == 0


def test_nondimensionalize():
    dim = DimensionalParams(carrying_capacity=2.0, growth_rate=0.5, attribution=[1.0],
                            social_value=[2.0], scarcity_threshold=[1.0], weights=[[0.0]])
    p = nondimensionalize(dim)
    # total = a K + r s = 2 + 1
    assert p.b[0] == pytest.approx(3.0 / 0.25)
    assert p.alpha[0] == pytest.approx(2.0 / 3.0)
    assert p.rho[0] == pytest.approx(0.5)


def test_rhs_vanishes_at_single_equilibrium():
    p = ModelParams(b=[0.7], nu=[0.3], rho=[0.4])
    dx, dy = rhs(p, SystemState(0.4, [0.6]))
    assert dx == pytest.approx(0.0) and dy[0] == pytest.approx(0.0)


def test_integrate_keeps_stock_positive_and_sorted():
    p = ModelParams(b=[1.0], nu=[0.5], rho=[0.5])
    traj = integrate(p, SystemState(1e-6, [2.0]), 30.0, n_samples=301)
    assert np.all(traj.x > 0)
    assert traj.rows().shape == (301, 3)
    assert traj.header() == ["t", "x", "y_1"]


def test_extinct_stock_stays_extinct():
    p = ModelParams(b=[1.0], nu=[0.5], rho=[0.5])
    traj = integrate(p, SystemState(0.0, [0.1]), 5.0)
    assert np.all(traj.x == 0.0)
    # y' = -b alpha rho with x = 0
    assert traj.y[0, -1] == pytest.approx(0.1 - 0.25 * 5.0)


def test_integrate_rejects_bad_horizon():
    p = ModelParams(b=[1.0], nu=[0.5], rho=[0.5])
    with pytest.raises(ParameterError):
        integrate(p, SystemState(0.5, [0.0]), 0.0)
    with pytest.raises(ParameterError):
        integrate(p, SystemState(0.5, [0.0, 0.0]), 1.0)


def test_steady_state_converges():
    p = ModelParams(b=[1.0], nu=[0.5], rho=[0.3])
    res = steady_state(p, SystemState(0.8, [0.0]))
    assert res.converged
    assert res.state.x == pytest.approx(0.3, abs=1e-7)
    assert res.state.y[0] == pytest.approx(0.7, abs=1e-7)
