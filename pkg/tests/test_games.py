import numpy as np
import pytest

from seslab import games
from seslab.model import ParameterError


def test_best_response_maximizes_payoff():
    nu1, nu2, rho2 = 0.4, 0.7, 0.3
    br = games.best_response(nu1, nu2, rho2)
    grid = np.linspace(br - 0.2, br + 0.2, 401)
    pay = [games.payoffs(nu1, nu2, r, rho2)[0] for r in grid]
    assert grid[int(np.argmax(pay))] == pytest.approx(br, abs=1e-3)


def test_best_response_is_affine():
    s = games.best_response_slope(0.3, 0.6)
    assert games.best_response(0.3, 0.6, 0.7) == pytest.approx(games.best_response(0.3, 0.6, 0.2) + 0.5 * s)


def test_best_response_undefined_cases():
    with pytest.raises(ParameterError):
        games.best_response(0.5, 0.0, 0.3)
    with pytest.raises(ParameterError):
        games.best_response(1.0, 0.5, 0.3)


def test_nash_is_mutual_best_response():
    r1, r2 = games.nash_equilibrium(0.35, 0.8)
    assert games.best_response(0.35, 0.8, r2) == pytest.approx(r1, abs=1e-12)
    assert games.best_response(0.8, 0.35, r1) == pytest.approx(r2, abs=1e-12)


@pytest.mark.parametrize("nu1,nu2", [(0.5, 0.5), (0.05, 0.95), (0.9, 0.1), (0.2, 0.3)])
def test_iteration_reaches_nash(nu1, nu2):
    (r1, r2), k = games.nash_by_iteration(nu1, nu2)
    assert (r1, r2) == pytest.approx(games.nash_equilibrium(nu1, nu2), abs=1e-11)
    assert k < 1000


def test_symmetric_nash_on_welfare_line_only_at_one():
    assert games.tragicness(0.5, 0.5).tragicness > games.tragicness(0.9, 0.9).tragicness > 0


def test_cournot_fixture_matches_closed_form():
    fx = games.cournot_fixture(10.0, 1.0, 1.0)
    (q1, q2), _ = games.iterate_best_response(fx["best_response"], (0.0, 0.0))
    assert (q1, q2) == pytest.approx(fx["closed_form"], abs=1e-10)
    assert fx["profit"](q1, q2) == pytest.approx(9.0)


def test_tragicness_round_trip():
    rep = games.tragicness(0.3, 0.6)
    assert games.TragicnessReport.from_dict(rep.to_dict()) == rep


@pytest.mark.parametrize("pattern,label", [((3, 1, 4, 2), "Type1"), ((1, 2, 3, 4), "Type9"),
                                           ((4, 3, 2, 1), "unlisted"), ((1, 1, 2, 3), "degenerate")])
def test_classify_pattern(pattern, label):
    assert games.classify_pattern(np.array(pattern, float)) == label


def test_prisoners_dilemma_pattern_is_tragic():
    # a textbook dilemma for player 1 at (CC, CD, DC, DD) ranks as 3, 1, 4, 2
    assert games.GAME_TYPES[(3, 1, 4, 2)] in games.TRAGIC_TYPES


def test_discrete_game_symmetry_and_round_trip():
    g = games.build_discrete_game(0.2, 0.7, 0.3, 0.6)
    m = g.bimatrix
    assert m[0, 1, 0] == pytest.approx(m[1, 0, 1])
    assert m[0, 0, 0] == pytest.approx(m[0, 0, 1])
    again = games.DiscreteGame.from_dict(g.to_dict())
    assert again.label == g.label and np.allclose(again.bimatrix, m)
    assert set(g.resource_at_nash()) == set(g.nash)


def test_discrete_game_input_checks():
    with pytest.raises(ParameterError):
        games.build_discrete_game(0.7, 0.2, 0.3, 0.6)
    with pytest.raises(ParameterError):
        games.build_discrete_game(0.2, 0.7, 0.6, 0.3)


def test_sweeps_are_rectangular():
    rows = games.sweep_continuous(5, 5)
    assert len(rows) == 25
    assert all(set(r) == set(games.CONTINUOUS_COLUMNS) for r in rows)
    assert any(r["error"] for r in rows)
    drows = games.sweep_discrete(0.3, 0.6, 6)
    assert len(drows) == 15
