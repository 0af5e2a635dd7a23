import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meritfame.errors import ZeroFitnessSeed, ZeroLinkSeed
from meritfame.fenwick import FenwickTree
from meritfame.model import FiniteTable, GeometricDecay, ModelParams, PointMass, SeedGraphSpec
from meritfame.simulator import (
    MultiplexGraph,
    build_seed_graph,
    grow,
    make_rng,
    sample_target_by_fitness,
    sample_target_by_total_degree,
    step,
)


class ScriptedRng:
    """Hands out pre-set uniforms so a step's targets can be predicted."""

    def __init__(self, uniforms, theta=1.0):
        self.uniforms = list(uniforms)
        self.theta = theta

    def random(self, size=None):
        if size is None:
            return self.uniforms.pop(0)
        out = np.array(self.uniforms[:size])
        del self.uniforms[:size]
        return out


# --- Fenwick tree --------------------------------------------------------------

@given(st.lists(st.integers(0, 20), min_size=1, max_size=80), st.data())
@settings(max_examples=150, deadline=None)
def test_fenwick_matches_naive(weights, data):
    tree = FenwickTree(weights)
    cum = np.cumsum(weights)
    for c in range(len(weights) + 1):
        assert tree.prefix(c) == (cum[c - 1] if c else 0)
    if cum[-1] > 0:
        target = data.draw(st.floats(0, float(cum[-1]), exclude_max=True))
        expected = int(np.searchsorted(cum, target, side="right"))
        assert tree.find(target) == expected
        assert weights[tree.find(target)] > 0


def test_fenwick_add_and_rounding_guard():
    tree = FenwickTree([1.0, 2.0, 0.0])
    tree.add(2, 3.0)
    assert tree.total() == 6.0
    assert tree.weight(2) == 3.0
    # a target at or past the total still lands on a live entry
    assert tree.find(6.0) == 2
    tree = FenwickTree([1.0, 0.0])
    assert tree.find(5.0) == 0


def test_fenwick_frequencies():
    g = MultiplexGraph()
    for th in (1.0, 1.0, 2.0):
        g.add_node(th, 0)
    rng = make_rng(5)
    draws = np.array([sample_target_by_fitness(g, rng) for _ in range(10 ** 6)])
    freq = np.bincount(draws, minlength=3) / len(draws)
    np.testing.assert_allclose(freq, [0.25, 0.25, 0.5], atol=0.01)


def test_fitness_sampling_degenerate():
    g = MultiplexGraph()
    g.add_node(0.0, 0)
    g.add_node(5.0, 0)
    rng = make_rng(0)
    assert {sample_target_by_fitness(g, rng) for _ in range(1000)} == {1}
    single = MultiplexGraph()
    single.add_node(2.0, 0)
    assert sample_target_by_fitness(single, rng) == 0


# --- degree pool -----------------------------------------------------------------

def _two_node_graph(q0, q1):
    g = MultiplexGraph()
    g.add_node(1.0, 0)
    g.add_node(1.0, 0)
    g.add_node(1.0, 0)
    for _ in range(q0):
        g.add_edge(2, 2, 0)
    for _ in range(q1):
        g.add_edge(2, 2, 1)
    return g


def test_degree_pool_enumeration():
    g = _two_node_graph(2, 6)
    # every index of the pool is equally likely
    hits = np.bincount([g.receipts[i] for i in range(len(g.receipts))], minlength=3) / len(g.receipts)
    np.testing.assert_allclose(hits, [0.25, 0.75, 0.0])
    rng = make_rng(9)
    draws = np.array([sample_target_by_total_degree(g, rng) for _ in range(200_000)])
    assert abs(np.mean(draws == 0) - 0.25) < 0.005
    assert not np.any(draws == 2)


def test_degree_pool_small():
    g = _two_node_graph(2, 1)
    assert list(g.receipts) == [0, 0, 1]
    rng = make_rng(1)
    draws = np.array([sample_target_by_total_degree(g, rng) for _ in range(60_000)])
    assert abs(np.mean(draws == 0) - 2 / 3) < 0.01
    g = _two_node_graph(4, 0)
    assert {sample_target_by_total_degree(g, rng) for _ in range(100)} == {0}


def test_degree_pool_empty():
    g = MultiplexGraph()
    g.add_node(1.0, 0)
    with pytest.raises(ValueError):
        sample_target_by_total_degree(g, make_rng(0))


def test_zero_degree_node_never_gets_fame_link():
    # node 2 has total degree 0
    spec = SeedGraphSpec(n0=3, pattern="explicit", layer1_edges=[(0, 1)], layer2_edges=[(1, 0)],
                         fitness_values=[1.0, 1.0, 1.0])
    params = ModelParams(1, 5, PointMass(1.0), seed_graph=spec)
    g = build_seed_graph(spec, params.fitness, make_rng(0))
    step(g, params, make_rng(4))
    l2_targets = g.edges(2)[1:, 1]
    assert not np.any(l2_targets == 2)


# --- seed graph ------------------------------------------------------------------

def test_ring_seed():
    g = build_seed_graph(SeedGraphSpec(n0=5), GeometricDecay(0.9), make_rng(0))
    assert len(g.dst1) == 5 and len(g.dst2) == 5
    assert g.k == [1] * 5 and g.ell == [1] * 5
    assert [tuple(e) for e in g.edges(1)] == [(i, (i + 1) % 5) for i in range(5)]


def test_seed_errors():
    with pytest.raises(ZeroLinkSeed):
        build_seed_graph(SeedGraphSpec(n0=3, pattern="explicit"), PointMass(1.0), make_rng(0))
    with pytest.raises(ZeroFitnessSeed):
        build_seed_graph(SeedGraphSpec(n0=3, fitness_values=[0, 0, 0]), PointMass(1.0), make_rng(0))


# --- step / grow -----------------------------------------------------------------

def test_step_uses_pre_arrival_state():
    spec = SeedGraphSpec(n0=2, pattern="explicit", layer1_edges=[(0, 1)], fitness_values=[1.0, 3.0])
    params = ModelParams(2, 2, PointMass(1.0), seed_graph=spec)
    g = build_seed_graph(spec, params.fitness, make_rng(0))
    # fitness weights (1, 3): u=0.1 -> node 0, u=0.9 -> node 1; the pool is [1]
    step(g, params, ScriptedRng([0.1, 0.9, 0.0, 0.99]))
    assert [tuple(e) for e in g.edges(1)] == [(0, 1), (2, 0), (2, 1)]
    # both layer-2 links see the one-entry pool, not the node-0 receipt added this step
    assert [tuple(e) for e in g.edges(2)] == [(2, 1), (2, 1)]
    assert g.k == [1, 2, 0] and g.ell == [0, 2, 0]
    assert g.birth_time == [0, 0, 1]
    g.check_invariants()


def test_single_live_fitness_node():
    spec = SeedGraphSpec(n0=4, fitness_values=[0.0, 2.0, 0.0, 0.0])
    params = ModelParams(3, 1, FiniteTable([(0, 0.9), (1, 0.1)]), t_max=1, seed_graph=spec)
    g = grow(params)
    assert list(g.edges(1)[4:, 1]) == [1, 1, 1]


def test_link_counting():
    params = ModelParams(2, 4, GeometricDecay(0.9), t_max=100_000, rng_seed=3)
    g = grow(params)
    # 20 ring links plus (2 + 4) per arrival
    assert g.n_links == 20 + 6 * 100_000 == 600_020
    assert g.n_nodes == 100_010
    assert sum(g.k) == 10 + 2 * 100_000
    assert sum(g.ell) == 10 + 4 * 100_000
    g.check_invariants()


def test_zero_steps():
    params = ModelParams(2, 4, GeometricDecay(0.9), t_max=0, rng_seed=3)
    g = grow(params)
    ref = build_seed_graph(params.seed_graph, params.fitness, make_rng(3))
    assert g.n_nodes == 10 and g.theta == ref.theta and g.k == ref.k


def test_invariants_and_quarantine():
    params = ModelParams(2, 3, FiniteTable([(0, 0.3), (1, 0.4), (3, 0.3)]), t_max=3000, rng_seed=21)
    g = grow(params)
    g.check_invariants()
    theta, k, ell, birth = g.arrays()
    newcomers = birth > 0
    assert np.all(k[newcomers & (theta == 0)] == 0)
    # targets always predate the source
    for layer in (1, 2):
        e = g.edges(layer)[10:]
        assert np.all(e[:, 1] < e[:, 0])
    rec = g.node(5)
    assert (rec.id, rec.k, rec.ell) == (5, g.k[5], g.ell[5])


def test_determinism():
    params = ModelParams(2, 4, GeometricDecay(0.9), t_max=2000, rng_seed=99)
    a, b = grow(params), grow(params)
    assert np.array_equal(a.edges(1), b.edges(1))
    assert np.array_equal(a.edges(2), b.edges(2))
    assert a.theta == b.theta
    c = grow(params.replace(rng_seed=100))
    assert not np.array_equal(a.edges(2), c.edges(2))


def test_mean_degree(acceptance_graph):
    q = np.asarray(acceptance_graph.k) + np.asarray(acceptance_graph.ell)
    assert abs(q.mean() - 6) < 0.01
