"""Closed forms against exact rational values computed independently with a CAS."""

import numpy as np
import pytest

from seslab.equilibria import (EquilibriumReport, classify_efforts, comparative_statics_dual,
                               dual_partials, equilibrium, equilibrium_dual, equilibrium_numerical,
                               equilibrium_star, equilibrium_well_mixed)
from seslab.model import ModelParams, ParameterError, complete_weights, star_weights

DYAD = [[0, 1], [1, 0]]


def test_single():
    rep = equilibrium(ModelParams(b=[2.0], nu=[0.4], rho=[0.3]))
    assert rep.x_bar == pytest.approx(0.3)
    assert rep.y_bar == pytest.approx((0.7,))
    assert rep.classification == "self_reliant"


def test_single_negative_rho_has_no_equilibrium():
    assert not equilibrium(ModelParams(b=[1.0], nu=[0.4], rho=[-0.1])).exists


def test_dual_frozen():
    rep = equilibrium_dual(ModelParams(b=[1, 1], nu=[0.9, 0.1], rho=[0.9, 0.1], weights=DYAD))
    assert rep.x_bar == pytest.approx(9 / 82, abs=1e-14)
    assert rep.y_bar == pytest.approx((329 / 820, 401 / 820), abs=1e-14)


def test_well_mixed_frozen_three():
    p = ModelParams(b=[1, 1, 1], nu=[0.2, 0.5, 0.8], rho=[0.3, 0.5, 0.7], weights=complete_weights(3))
    rep = equilibrium_well_mixed(p)
    assert rep.x_bar == pytest.approx(5 / 14, abs=1e-14)
    assert rep.y_bar == pytest.approx((11 / 30, 5 / 42, 11 / 70), abs=1e-14)


def test_well_mixed_frozen_four_free_riding():
    p = ModelParams(b=[1] * 4, nu=[0.1, 0.3, 0.6, 0.9], rho=[0.2, 0.4, 0.1, 0.9])
    rep = equilibrium(p)
    assert rep.source == "closed_form_well_mixed"
    assert rep.x_bar == pytest.approx(261 / 1090, abs=1e-14)
    assert rep.y_bar == pytest.approx((199 / 436, -99 / 1090, 1133 / 4360, 589 / 4360), abs=1e-14)
    assert rep.classification == "free_riding"
    assert rep.subsidizers == (1,)


def test_star_frozen():
    p = ModelParams(b=[1] * 4, nu=[0.3, 0.5, 0.7, 0.4], rho=[0.2, 0.6, 0.4, 0.5],
                    weights=star_weights(4))
    rep = equilibrium_star(p)
    assert rep.x_bar == pytest.approx(409 / 1390, abs=1e-14)
    assert rep.y_bar == pytest.approx(tuple(v / 2780 for v in (949, 99, 823, 91)), abs=1e-14)


def test_star_matches_simulation():
    p = ModelParams(b=[1.0, 0.8, 1.2, 0.9, 1.1], nu=[0.4, 0.6, 0.3, 0.5, 0.7],
                    rho=[0.3, 0.5, 0.2, 0.6, 0.4], weights=star_weights(5))
    closed = equilibrium(p)
    num = equilibrium_numerical(p)
    assert num.exists
    assert np.allclose(closed.state.as_vector(), num.state.as_vector(), atol=1e-6)


def test_degenerate_societies():
    rep = equilibrium_dual(ModelParams(b=[1, 1], nu=[1, 1], rho=[0.2, 0.4], weights=DYAD))
    assert rep.family
    rep = equilibrium_dual(ModelParams(b=[1, 1], nu=[0, 0], rho=[0.2, 0.4], weights=DYAD))
    assert not rep.exists
    rep = equilibrium_well_mixed(ModelParams(b=[1] * 3, nu=[0, 0, 0.5], rho=[0.1, 0.2, 0.3]))
    assert not rep.exists


def test_wrong_topology_raises():
    with pytest.raises(ParameterError):
        equilibrium_star(ModelParams(b=[1] * 3, nu=[0.5] * 3, rho=[0.5] * 3))


def test_classify_efforts():
    assert classify_efforts([0.2, 0.3])[0] == "self_reliant"
    assert classify_efforts([-0.2, -0.3])[0] == "restorative"
    assert classify_efforts([0.0, 0.3])[0] == "boundary"
    label, riders, subs = classify_efforts([0.5, -0.1, 0.2])
    assert (label, riders, subs) == ("free_riding", (0, 2), (1,))


def test_report_round_trip():
    rep = equilibrium(ModelParams(b=[1, 1], nu=[0.9, 0.1], rho=[0.9, 0.1], weights=DYAD))
    assert EquilibriumReport.from_dict(rep.to_dict()) == rep


def test_partials_match_finite_differences():
    point = dict(nu1=0.3, nu2=0.6, rho1=0.7, rho2=0.2)
    names = {"nu_1": "nu1", "nu_2": "nu2", "rho_1": "rho1", "rho_2": "rho2"}

    def state(**kw):
        p = ModelParams(b=[1, 1], nu=[kw["nu1"], kw["nu2"]], rho=[kw["rho1"], kw["rho2"]],
                        weights=DYAD)
        return equilibrium_dual(p).state.as_vector()

    analytic = dual_partials(**point)
    h = 1e-6
    for pname, key in names.items():
        up, dn = dict(point), dict(point)
        up[key] += h
        dn[key] -= h
        fd = (state(**up) - state(**dn)) / (2 * h)
        for k, var in enumerate(("x_bar", "y_bar_1", "y_bar_2")):
            assert analytic[(var, pname)] == pytest.approx(fd[k], abs=1e-7)


def test_comparative_statics_signs():
    signs = comparative_statics_dual(0.3, 0.6, 0.7, 0.2)
    assert signs[("x_bar", "rho_1")] == "+"
    assert signs[("y_bar_1", "rho_1")] == "-"
    assert comparative_statics_dual(0.3, 0.6, 0.4, 0.4)[("x_bar", "nu_1")] == "0"
