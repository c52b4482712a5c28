import numpy as np
import pytest

from seslab import network
from seslab.model import ModelParams, ParameterError, SystemState, complete_weights, star_weights


def test_net_influence_and_leadership():
    p = ModelParams(b=[1, 1, 1], nu=[0.2, 0.5, 0.8], rho=[0.3] * 3, weights=complete_weights(3))
    ni = network.net_influence(p)
    assert ni.sum() == pytest.approx(0.0)
    # the least social agent is followed by the more social ones
    assert network.leadership(p) == ["leader", "neutral", "follower"]


def test_influence_matrix_validation():
    with pytest.raises(ParameterError):
        network.InfluenceNetwork([[1.0, 0.0], [0.0, 0.0]])
    with pytest.raises(ParameterError):
        network.InfluenceNetwork([[0.0, -1.0], [1.0, 0.0]])


def test_complete_graph_spectrum():
    g = np.ones((5, 5)) - np.eye(5)
    spec = network.laplacian_spectrum(network.InfluenceNetwork(g))
    assert spec.symmetric and spec.components == 1
    assert np.allclose(spec.eigenvalues, [0, 5, 5, 5, 5])
    assert spec.algebraic_connectivity == pytest.approx(5.0)


def test_directed_star_spectrum_is_real():
    p = ModelParams(b=[1] * 4, nu=[0.5] * 4, rho=[0.5] * 4, weights=star_weights(4))
    spec = network.laplacian_spectrum(network.InfluenceNetwork.from_params(p))
    assert not spec.symmetric
    assert np.isrealobj(spec.eigenvalues)
    assert spec.eigenvalues[0] == pytest.approx(0.0, abs=1e-12)


def _two_group_instance():
    # groups {0, 1} and {2, 3, 4}; uniform cross weights, members identical inside a group
    w = np.array([
        [0.0, 0.5, 1 / 6, 1 / 6, 1 / 6],
        [0.5, 0.0, 1 / 6, 1 / 6, 1 / 6],
        [0.25, 0.25, 0.0, 0.25, 0.25],
        [0.25, 0.25, 0.25, 0.0, 0.25],
        [0.25, 0.25, 0.25, 0.25, 0.0],
    ])
    return ModelParams(b=[1, 1, 2, 2, 2], nu=[0.3, 0.3, 0.6, 0.6, 0.6],
                       rho=[0.2, 0.2, 0.7, 0.7, 0.7], weights=w)


def test_classification_of_semi_homogeneous():
    p = _two_group_instance()
    part = network.Partition([(0, 1), (2, 3, 4)])
    cls = network.classify_network(p, part)
    assert cls.semi_homogeneous and not cls.homogeneous
    # cross in-degrees 0.5 and 0.5 but out-degrees differ with unequal group sizes
    assert cls.strongest in ("semi_homogeneous", "symmetric_semi_homogeneous")


def test_partition_must_cover():
    p = _two_group_instance()
    with pytest.raises(ParameterError):
        network.classify_network(p, network.Partition([(0, 1), (2, 3)]))


def test_homogeneous_exact_aggregation_matches_simulation():
    n = 4
    p = ModelParams(b=[1.5] * n, nu=[0.4] * n, rho=[0.3] * n, weights=complete_weights(n))
    part = network.Partition([tuple(range(n))])
    block = network.aggregate_exact(p, part)
    assert block.sizes == (4,)
    t, xb, Yb = network.integrate_block(block, 0.6, np.array([0.0]), 50.0)
    from seslab.model import StepControl, integrate
    full = integrate(p, SystemState(0.6, np.zeros(n)), 50.0, StepControl(1e-10, 1e-12), t_eval=t)
    assert np.max(np.abs(full.x - xb)) < 1e-5
    assert np.max(np.abs(full.y.sum(axis=0) - Yb[0])) < 1e-5
    assert network.BlockModelParams.from_dict(block.to_dict()).sizes == block.sizes


def test_aggregate_exact_refuses_unclassified():
    p = ModelParams(b=[1, 2, 3], nu=[0.2, 0.5, 0.7], rho=[0.1, 0.4, 0.8])
    with pytest.raises(network.ClassificationError):
        network.aggregate_exact(p, network.Partition([(0, 1, 2)]))


def test_self_directed_instance_is_neutral():
    p = network.self_directed_instance(30, 4)
    assert np.max(np.abs(network.net_influence(p))) < 1e-12
    ba, ph = network.aggregate_self_directed(p)
    assert ba == pytest.approx(float(np.mean(p.b * p.alpha)))
    assert 0 < ph < 1


def test_aggregate_self_directed_rejects_leaders():
    p = ModelParams(b=[1, 1, 1], nu=[0.2, 0.5, 0.8], rho=[0.3] * 3)
    with pytest.raises(network.ClassificationError):
        network.aggregate_self_directed(p)


def test_approximate_aggregate_rejects_nonfinite_guess():
    p = network.self_directed_instance(5, 0)
    with pytest.raises(ParameterError):
        network.aggregate_approximate(p, (float("nan"), 0.5), SystemState(0.5, np.zeros(5)), 10.0)
