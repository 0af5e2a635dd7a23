import json
import math

import numpy as np
import pytest

from meritfame.analytics import conditional_total_degree_pdf, expected_total_degree
from meritfame.errors import InsufficientSample, InsufficientThetaDiversity
from meritfame.model import GeometricDecay, ModelParams, PointMass, SeedGraphSpec
from meritfame.simulator import build_seed_graph, grow, make_rng
from meritfame.stats import (
    EmpiricalJoint,
    Tolerances,
    compare,
    empirical_from_analytic,
    empirical_from_arrays,
    empirical_from_graph,
    expected_hill_exponent,
    fit_mean_vs_fitness,
    fit_tail_exponent,
    hill_estimate,
    tv_distance,
    tv_from_pmfs,
)

P24 = ModelParams(2, 4, GeometricDecay(0.9))


def _power_law_sample(alpha, q_min, n, seed):
    # continuous Pareto rounded to integers, matching the q_min - 1/2 convention
    u = make_rng(seed).random(n)
    return np.floor((q_min - 0.5) * (1 - u) ** (-1 / (alpha - 1)) + 0.5).astype(int)


def test_seed_ring_counts():
    g = build_seed_graph(SeedGraphSpec(n0=5), PointMass(1.0), make_rng(0))
    emp = empirical_from_graph(g)
    assert emp.kl_counts == {1.0: {(1, 1): 5}}
    assert list(emp.q_counts[1.0]) == [0, 0, 5]


def test_counts_conserved():
    params = ModelParams(2, 3, GeometricDecay(0.7), t_max=3000, rng_seed=4)
    g = grow(params)
    emp = empirical_from_graph(g, params)
    assert emp.total_nodes == 10 + 3000
    for th in emp.thetas:
        diag = np.zeros(len(emp.q_counts[th]))
        for (k, ell), n in emp.kl_counts[th].items():
            diag[k + ell] += n
        assert np.array_equal(diag, emp.q_counts[th])
        assert sum(emp.kl_counts[th].values()) == emp.node_count(th)


def test_censoring_drops_young_nodes():
    theta = [1.0, 1.0, 1.0, 1.0]
    emp = empirical_from_arrays(theta, [0, 1, 2, 3], [0, 0, 0, 0], birth_time=[0, 50, 90, 100],
                                t_max=100, censor_fraction=0.1)
    assert emp.total_nodes == 3
    with pytest.raises(ValueError):
        empirical_from_arrays(theta, [0] * 4, [0] * 4, censor_fraction=0.1)


def test_merge_is_associative():
    a = empirical_from_arrays([1, 2], [1, 0], [0, 3])
    b = empirical_from_arrays([1, 1], [5, 1], [0, 0])
    c = empirical_from_arrays([3], [0], [0])
    left = a.merge(b).merge(c)
    right = a.merge(b.merge(c))
    assert left.kl_counts == right.kl_counts
    for th in left.thetas:
        assert np.array_equal(left.q_counts[th], right.q_counts[th])
    assert left.kl_counts[1.0] == {(1, 0): 2, (5, 0): 1}


def test_tv_basic():
    p = np.array([0.2, 0.5, 0.3])
    assert tv_from_pmfs(p, p) == 0.0
    assert tv_from_pmfs([1, 0], [0, 1]) == 1.0
    # residual mass beyond the support counts as its own cell
    assert abs(tv_from_pmfs([0.5], [0.5, 0.5]) - 0.5) < 1e-15


def test_tv_symmetric_and_triangle():
    rng = make_rng(17)
    for _ in range(200):
        p, r, s = (rng.dirichlet(np.ones(8)) for _ in range(3))
        assert tv_from_pmfs(p, r) == tv_from_pmfs(r, p)
        assert tv_from_pmfs(p, s) <= tv_from_pmfs(p, r) + tv_from_pmfs(r, s) + 1e-15
        assert 0 <= tv_from_pmfs(p, r) <= 1


def test_tv_against_own_closed_form():
    emp = empirical_from_analytic(P24, [1.0, 2.0], q_max=5000)
    for th in (1.0, 2.0):
        assert tv_distance(emp, th, P24) < 1e-12


def test_tv_needs_sample():
    emp = empirical_from_arrays([1.0] * 10, [1] * 10, [0] * 10)
    with pytest.raises(InsufficientSample):
        tv_distance(emp, 1.0, P24)


def test_hill_synthetic():
    q = _power_law_sample(4.0, 50, 10 ** 4, seed=2)
    values, counts = np.unique(q, return_counts=True)
    alpha, err, n = hill_estimate(values, counts, 50)
    assert n == 10 ** 4
    assert abs(alpha - 4.0) <= 0.1
    assert abs(err - (alpha - 1) / 100) < 1e-12


def test_hill_scale_invariant():
    q = _power_law_sample(3.0, 20, 5000, seed=3)
    values, counts = np.unique(q, return_counts=True)
    a1 = hill_estimate(values, counts, 20)[0]
    a2 = hill_estimate(values, 7 * counts, 20)[0]
    assert abs(a1 - a2) < 1e-12


def test_fit_tail_needs_sample():
    emp = empirical_from_arrays([1.0] * 50, list(range(50)), [0] * 50)
    with pytest.raises(InsufficientSample):
        fit_tail_exponent(emp, q_min=10)


def test_mean_fit_exact():
    thetas = [1.0, 2.0, 3.0, 5.0, 8.0]
    q_counts = {}
    for th in thetas:
        # two-point law with the closed-form mean
        m = expected_total_degree(th, P24)
        lo = math.floor(m)
        c = np.zeros(lo + 2)
        c[lo], c[lo + 1] = 1000 * (lo + 1 - m), 1000 * (m - lo)
        q_counts[th] = c
    emp = EmpiricalJoint({}, q_counts)
    slope, intercept = fit_mean_vs_fitness(emp)
    assert abs(slope - 6 / 9) < 1e-13
    assert abs(intercept) < 1e-13


def test_mean_fit_needs_diversity():
    g = grow(ModelParams(1, 1, PointMass(1.0), t_max=2000, rng_seed=1))
    with pytest.raises(InsufficientThetaDiversity):
        fit_mean_vs_fitness(empirical_from_graph(g))


def test_compare_on_closed_form_input():
    # with exponent 4 the mean lost past q_max is small (a few 1e-6 of the
    # slope, from the highest-fitness nodes, and ~2e-5 on the intercept)
    params = ModelParams(8, 4, GeometricDecay(0.9))
    thetas = params.fitness.support(1 - 1e-6)
    emp = empirical_from_analytic(params, thetas, q_max=10 ** 5, scale=1e7)
    rep = compare(params, emp, tol=Tolerances(tv_min_nodes=1))
    assert max(rep.tv.values()) < 1e-12
    assert abs(rep.slope - 12 / 9) < 1e-5 and abs(rep.intercept) < 1e-4
    # fitness values past the 1 - 1e-6 support cut carry ~2e-4 of the mean
    assert abs(rep.mean_degree - 12) < 1e-3
    assert rep.flags["tv"] and rep.flags["slope"] and rep.flags["intercept"] and rep.flags["mean_degree"]
    d = json.loads(rep.to_json())
    assert set(d["flags"]) == {"tv", "slope", "intercept", "mean_degree", "tail"}
    assert "slope" in rep.format_table()


def test_compare_small_sample_not_evaluable():
    params = P24.replace(t_max=100)
    g = grow(params)
    rep = compare(params, empirical_from_graph(g, params))
    assert all(v is None for v in rep.flags.values())
    assert not rep.evaluable and not rep.passed


def test_hill_matches_closed_form_prediction(tail_params, tail_graph):
    emp = empirical_from_graph(tail_graph, tail_params)
    alpha, err = fit_tail_exponent(emp, q_min=50)
    expected = expected_hill_exponent(tail_params, q_min=50)
    assert abs(alpha - expected) <= 3 * err
