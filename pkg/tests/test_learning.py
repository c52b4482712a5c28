import numpy as np
import pytest

from seslab import learning
from seslab.equilibria import equilibrium_dual
from seslab.model import ModelParams, ParameterError


def test_equilibrium_is_dual_steady_state_at_nash():
    eq = learning.learning_equilibrium(0.3, 0.7)
    p = ModelParams(b=[1, 1], nu=[0.3, 0.7], rho=[eq.rho1, eq.rho2], weights=[[0, 1], [1, 0]])
    rep = equilibrium_dual(p)
    assert rep.x_bar == pytest.approx(eq.x, abs=1e-13)
    assert rep.y_bar == pytest.approx((eq.y1, eq.y2), abs=1e-13)


def test_stock_sits_nearer_the_less_social_player():
    # the lower-nu player's environmentalism dominates the stock
    eq = learning.learning_equilibrium(0.2, 0.8)
    assert abs(eq.x - eq.rho1) < abs(eq.x - eq.rho2)


def test_eigenvalues_and_slope_product():
    stab = learning.learning_stability(learning.LearningParams(0.3, 0.6))
    p = stab.slope_product
    assert p == pytest.approx((4 * 0.3**2 * 0.6**2 - 0.3**2) / (4 * 0.3 * 0.6))
    assert stab.eigenvalues[0] == pytest.approx(-1 + np.sqrt(complex(p)))
    assert stab.stable


def test_complex_eigenvalues_when_product_negative():
    stab = learning.learning_stability(learning.LearningParams(0.05, 0.9))
    assert stab.slope_product < 0
    assert stab.eigenvalues[0].imag != 0 and stab.eigenvalues[0].real == pytest.approx(-1)


def test_stability_round_trip():
    stab = learning.learning_stability(learning.LearningParams(0.4, 0.5, b1=2.0))
    assert learning.LearningStability.from_dict(stab.to_dict()) == stab


def test_simulation_reaches_equilibrium():
    p = learning.LearningParams(0.75, 0.25)
    init = learning.LearningState(0.5, 0.0, 0.0, 0.8, 0.2)
    traj = learning.simulate_learning(p, init, 200.0, n_samples=201)
    eq = learning.learning_equilibrium(0.75, 0.25)
    assert np.allclose(traj.final.as_vector(), eq.as_vector(), atol=1e-5)
    assert traj.header() == ("t", "x", "y1", "y2", "rho1", "rho2")
    assert len(traj.rows()) == 201


def test_invalid_inputs():
    with pytest.raises(ParameterError):
        learning.LearningParams(1.0, 0.5)
    with pytest.raises(ParameterError):
        learning.LearningState(-1.0, 0, 0, 0, 0)
    with pytest.raises(ParameterError):
        learning.simulate_learning(learning.LearningParams(0.5, 0.5),
                                   learning.LearningState(0.5, 0, 0, 0.5, 0.5), 0.0)
