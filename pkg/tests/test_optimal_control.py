import math

import numpy as np
import pytest

from seslab import optimal_control as oc


def test_saddle_point_closed_form():
    sp = oc.saddle_point(0.5)
    assert sp.z_hat == pytest.approx(4.0)
    assert sp.lambda_hat == pytest.approx(-1 / 3)
    assert sp.y_hat == pytest.approx(0.75) and sp.x_hat == pytest.approx(0.25)
    dz, dl = oc.ham_rhs(sp.z_hat, sp.lambda_hat, 0.5)
    assert dz == pytest.approx(0.0, abs=1e-15) and dl == pytest.approx(0.0, abs=1e-15)


def test_stable_direction_is_an_eigenvector():
    sp = oc.saddle_point(0.3)
    jac = oc.ham_jacobian(sp.z_hat, sp.lambda_hat, 0.3)
    v = np.array(sp.stable_direction)
    assert np.allclose(jac @ v, sp.eigenvalues[0] * v)


def test_no_saddle_when_discounting_is_heavy():
    with pytest.raises(oc.RegimeError):
        oc.saddle_point(1.0)


def test_lambda_slope_example():
    assert oc.lambda_ode_rhs(2.0, -0.5, 0.5) == pytest.approx(0.25)


def test_lambda_slope_singular_on_nullcline():
    # z' = 0 where lambda = 1/(1 - z)
    with pytest.raises(oc.SingularityError):
        oc.lambda_ode_rhs(3.0, -0.5, 0.5)


def test_hamiltonian_domain():
    assert math.isfinite(oc.current_value_hamiltonian(2.0, -0.2, 0.5))
    with pytest.raises(oc.DomainError):
        oc.current_value_hamiltonian(2.0, -2.0, 0.5)


@pytest.mark.parametrize("kw", [dict(delta=0.0), dict(delta=0.5, mu=-1), dict(delta=0.5, beta_el=0),
                                dict(delta=0.5, x0=0.0)])
def test_invalid_ocp_params(kw):
    with pytest.raises(oc.ParameterError):
        oc.OcpParams(**kw)


def test_sustainable_law_passes_through_saddle():
    law = oc.synthesize_feedback(0.5, n_grid=200)
    assert law.regime == "sustainable"
    assert law.y_star(law.z_hat) == pytest.approx(0.75, rel=1e-12)
    assert np.all(np.diff(law.z) > 0)
    u = -law.lam * law.z
    assert np.all((u > 0) & (u < 2.0))
    with pytest.raises(oc.DomainError):
        law.u_of_s(math.log(law.z[-1]) + 1.0)


def test_stationarity_identity():
    # along the optimal curve the Hamiltonian equals delta times the value
    delta, x0 = 0.5, 0.5
    law = oc.synthesize_feedback(delta)
    tr = oc.simulate_optimal(oc.OcpParams(delta, x0=x0), law, 200.0)
    h = oc.current_value_hamiltonian(1 / x0, float(law.lambda_of(1 / x0)), delta)
    value = tr.objective
    # H_c is written in z = 1/x coordinates, so ln x enters with a minus sign
    assert h == pytest.approx(delta * value, abs=1e-6)


def test_manifold_residual_short_forward_window():
    law = oc.synthesize_feedback(0.5)
    gap, reached = oc.manifold_residual(law, 2.0, 10.0)
    assert gap < 1e-4 and reached > 0
    gap_back, _ = oc.manifold_residual(law, 2.0, 50.0, backward=True)
    assert gap_back < 1e-4


def test_unsustainable_law_follows_asymptote():
    law = oc.synthesize_feedback(2.0)
    assert law.regime == "unsustainable"
    assert law.spread < 1e-8
    s = math.log(law.z[-1])
    assert float(law.u_of_s(s)) == pytest.approx(oc.hotelling_asymptote(s, 2.0), rel=1e-6)
    # beyond the table the asymptote takes over
    assert float(law.u_of_s(s + 5)) == pytest.approx(oc.hotelling_asymptote(s + 5, 2.0))


@pytest.mark.parametrize("x0,branch", [(0.1, "right_manifold"), (0.4, "left_manifold"),
                                       (0.25, "stationary")])
def test_branch_labels(x0, branch):
    law = oc.synthesize_feedback(0.5, n_grid=100)
    tr = oc.simulate_optimal(oc.OcpParams(0.5, x0=x0), law, 20.0, n_samples=101)
    assert tr.branch == branch
    assert tr.header() == ("t", "x", "y", "utility")
    assert len(tr.rows()) == 101


def test_law_for_other_delta_is_rejected():
    law = oc.synthesize_feedback(0.5, n_grid=50)
    with pytest.raises(oc.ParameterError):
        oc.simulate_optimal(oc.OcpParams(0.6), law, 1.0)


def test_sustainability_labels():
    assert oc.sustainability_check(oc.OcpParams(0.5)) == "strongly_sustainable"
    assert oc.sustainability_check(oc.OcpParams(2.0, mu=1.0)) == "sustainable"
    assert oc.sustainability_check(oc.OcpParams(2.0, mu=0.5)) == "unsustainable"
