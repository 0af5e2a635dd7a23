"""
Empirical degree statistics of simulated graphs and their comparison
with the closed-form steady state.
"""
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .analytics import (
    conditional_total_degree_pdf,
    expected_total_degree_overall,
    log_total_degree_pdf,
    tail_exponent,
    total_degree_tail,
)
from .errors import InsufficientSample, InsufficientThetaDiversity

__all__ = [
    "EmpiricalJoint",
    "empirical_from_graph",
    "empirical_from_arrays",
    "empirical_from_analytic",
    "tv_from_pmfs",
    "tv_distance",
    "fit_tail_exponent",
    "hill_estimate",
    "expected_hill_exponent",
    "fit_mean_vs_fitness",
    "Tolerances",
    "ComparisonReport",
    "compare",
]


@dataclass
class EmpiricalJoint:
    """
    Node counts by fitness: ``kl_counts[theta][(k, ell)]`` and
    ``q_counts[theta][q]``. Counts may be fractional weights (used when an
    analytic table stands in for simulated data); ``kl_counts`` is then
    left empty and ``beyond[theta]`` holds the weight past the last
    tabulated degree.
    """

    kl_counts: dict
    q_counts: dict
    t_max: int = 0
    censor_fraction: float = 0.0
    provenance: dict = field(default_factory=dict)
    beyond: dict = field(default_factory=dict)

    @property
    def thetas(self):
        return sorted(self.q_counts)

    def node_count(self, theta):
        c = self.q_counts.get(theta)
        return 0 if c is None else float(c.sum()) + self.beyond.get(theta, 0.0)

    @property
    def total_nodes(self):
        return sum(self.node_count(th) for th in self.q_counts)

    def conditional_q_pmf(self, theta):
        return self.q_counts[theta] / self.node_count(theta)

    def mean_q(self, theta):
        # weight in ``beyond`` has unknown degree and is left out
        c = self.q_counts[theta]
        return float(np.dot(np.arange(len(c)), c) / c.sum())

    def mean_q_overall(self):
        pooled = self.pooled_q_counts()
        return float(np.dot(np.arange(len(pooled)), pooled) / pooled.sum())

    def pooled_q_counts(self):
        size = max(len(c) for c in self.q_counts.values())
        out = np.zeros(size)
        for c in self.q_counts.values():
            out[:len(c)] += c
        return out

    def merge(self, other):
        """Combine counts from two independent replicas."""
        kl = {th: dict(d) for th, d in self.kl_counts.items()}
        for th, d in other.kl_counts.items():
            tgt = kl.setdefault(th, {})
            for key, n in d.items():
                tgt[key] = tgt.get(key, 0) + n
        q = {th: c.copy() for th, c in self.q_counts.items()}
        for th, c in other.q_counts.items():
            if th in q:
                a = q[th]
                size = max(len(a), len(c))
                merged = np.zeros(size, dtype=np.result_type(a, c))
                merged[:len(a)] += a
                merged[:len(c)] += c
                q[th] = merged
            else:
                q[th] = c.copy()
        beyond = dict(self.beyond)
        for th, n in other.beyond.items():
            beyond[th] = beyond.get(th, 0.0) + n
        return EmpiricalJoint(kl, q, self.t_max, self.censor_fraction,
                              {"merged": [self.provenance, other.provenance]}, beyond)


def empirical_from_arrays(theta, k, ell, birth_time=None, t_max=0, censor_fraction=0.0, provenance=None):
    """
    Count nodes by (theta, k, ell).

    With ``censor_fraction > 0``, nodes born in the final
    ``censor_fraction * t_max`` steps are dropped.
    """
    theta = np.asarray(theta, dtype=float)
    k = np.asarray(k, dtype=np.int64)
    ell = np.asarray(ell, dtype=np.int64)
    keep = np.ones(len(theta), dtype=bool)
    if censor_fraction > 0:
        if birth_time is None:
            raise ValueError("censoring needs birth times")
        keep = np.asarray(birth_time) <= (1 - censor_fraction) * t_max
    theta, k, ell = theta[keep], k[keep], ell[keep]
    kl_counts, q_counts = {}, {}
    for th in np.unique(theta):
        sel = theta == th
        ks, ls = k[sel], ell[sel]
        pairs, counts = np.unique(np.column_stack([ks, ls]), axis=0, return_counts=True)
        kl_counts[float(th)] = {(int(a), int(b)): int(n) for (a, b), n in zip(pairs, counts)}
        q_counts[float(th)] = np.bincount(ks + ls)
    return EmpiricalJoint(kl_counts, q_counts, t_max, censor_fraction, dict(provenance or {}))


def empirical_from_graph(graph, params=None, censor_fraction=0.0):
    theta, k, ell, birth = graph.arrays()
    prov = {"n_nodes": graph.n_nodes, "steps": graph.time}
    if params is not None:
        prov.update(beta1=params.beta1, beta2=params.beta2, rng_seed=params.rng_seed)
    return empirical_from_arrays(theta, k, ell, birth, graph.time, censor_fraction, prov)


def empirical_from_analytic(params, thetas, q_max, scale=1e6):
    """Weighted counts proportional to the closed-form P(q, theta)."""
    q_counts, beyond = {}, {}
    qs = np.arange(q_max + 1)
    for th in thetas:
        q_counts[float(th)] = scale * np.exp(log_total_degree_pdf(qs, th, params))
        beyond[float(th)] = scale * total_degree_tail(q_max + 1, th, params)
    return EmpiricalJoint({}, q_counts, 0, 0.0, {"source": "analytic", "q_max": q_max}, beyond)


def tv_from_pmfs(p, r):
    """
    Total variation between two sub-stochastic vectors on ``0..len-1``.

    Whatever mass each vector leaves unassigned is treated as one extra
    shared "beyond" cell.
    """
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    size = max(len(p), len(r))
    pp = np.zeros(size)
    rr = np.zeros(size)
    pp[:len(p)] = p
    rr[:len(r)] = r
    d = 0.5 * np.abs(pp - rr).sum() + 0.5 * abs((1 - pp.sum()) - (1 - rr.sum()))
    return float(min(1.0, max(0.0, d)))


def tv_distance(emp, theta, params, q_cap=None, min_nodes=200):
    """
    Total variation between empirical and closed-form P(q | theta) on
    ``q <= q_cap`` plus the residual mass beyond. ``q_cap`` defaults to the
    largest observed degree.
    """
    n = emp.node_count(theta)
    if n < min_nodes:
        raise InsufficientSample(f"{n:g} nodes with theta={theta}, need {min_nodes}")
    e = emp.conditional_q_pmf(theta)
    if q_cap is None:
        q_cap = len(e) - 1
    e = e[:q_cap + 1]
    a = conditional_total_degree_pdf(np.arange(q_cap + 1), theta, params)
    return tv_from_pmfs(e, a)


def hill_estimate(values, counts, q_min):
    """Discrete power-law MLE from a histogram: returns (alpha, stderr, n)."""
    values = np.asarray(values, dtype=float)
    counts = np.asarray(counts, dtype=float)
    sel = (values >= q_min) & (counts > 0)
    n = counts[sel].sum()
    if n == 0:
        return math.nan, math.nan, 0.0
    s = np.dot(counts[sel], np.log(values[sel] / (q_min - 0.5)))
    alpha = 1 + n / s
    return float(alpha), float((alpha - 1) / math.sqrt(n)), float(n)


def fit_tail_exponent(emp, q_min=50, min_tail=100):
    """
    Hill-type estimate of the pooled total-degree tail exponent,
    ``alpha = 1 + n / sum(log(q_i / (q_min - 1/2)))`` over q_i >= q_min,
    with standard error ``(alpha - 1) / sqrt(n)``.
    """
    pooled = emp.pooled_q_counts()
    alpha, err, n = hill_estimate(np.arange(len(pooled)), pooled, q_min)
    if n < min_tail:
        raise InsufficientSample(f"{n:g} nodes with q >= {q_min}, need {min_tail}")
    return alpha, err


def expected_hill_exponent(params, q_min=50, q_max=100_000, mass=1 - 1e-9):
    """
    Value the Hill estimator converges to on an infinite sample from the
    closed-form pooled degree law, truncated at ``q_max`` (beyond which a
    pure power law with the asymptotic exponent is assumed).
    """
    qs = np.arange(q_min, q_max + 1, dtype=float)
    pooled = np.zeros(len(qs))
    tail = 0.0
    for th in params.fitness.support(mass):
        if params.fitness.pmf(th) == 0 or th == 0:
            continue
        pooled += np.exp(log_total_degree_pdf(qs, th, params))
        tail += total_degree_tail(q_max + 1, th, params)
    gamma = tail_exponent(params)
    logs = np.log(qs / (q_min - 0.5))
    total = pooled.sum() + tail
    mean_log = (np.dot(pooled, logs) + tail * (math.log(q_max / (q_min - 0.5)) + 1 / (gamma - 1))) / total
    return float(1 + 1 / mean_log)


def fit_mean_vs_fitness(emp, min_nodes=500, min_thetas=3):
    """Weighted least squares of mean total degree on fitness; weights are node counts."""
    xs, ys, ws = [], [], []
    for th in emp.thetas:
        n = emp.node_count(th)
        if n >= min_nodes:
            xs.append(th)
            ys.append(emp.mean_q(th))
            ws.append(n)
    if len(xs) < min_thetas:
        raise InsufficientThetaDiversity(
            f"{len(xs)} fitness values with >= {min_nodes} nodes, need {min_thetas}")
    x, y, w = map(np.asarray, (xs, ys, ws))
    xm = np.dot(w, x) / w.sum()
    ym = np.dot(w, y) / w.sum()
    sxx = np.dot(w, (x - xm) ** 2)
    if sxx == 0:
        raise InsufficientThetaDiversity("all qualifying fitness values coincide")
    slope = np.dot(w, (x - xm) * (y - ym)) / sxx
    return float(slope), float(ym - slope * xm)


@dataclass(frozen=True)
class Tolerances:
    tv_max: float = 0.05
    tv_min_nodes: int = 1000
    slope_rel: float = 0.05
    intercept_abs: float = 0.2
    mean_degree_rel: float = 0.005
    mean_degree_min_nodes: int = 1000
    tail_abs: float = 0.3
    q_min: int = 50
    min_tail: int = 100
    mean_min_nodes: int = 500
    censor_fraction: float = 0.1


@dataclass
class ComparisonReport:
    """
    Theory-vs-simulation numbers and pass flags.

    A flag is ``True``/``False`` when the check ran and ``None`` when the
    sample was too small to evaluate it.
    """

    tolerances: dict
    n_nodes: float
    t_max: int
    tv: dict = field(default_factory=dict)
    tv_nodes: dict = field(default_factory=dict)
    tail_exponent: float = math.nan
    tail_stderr: float = math.nan
    tail_target: float = math.nan
    slope: float = math.nan
    intercept: float = math.nan
    slope_target: float = math.nan
    mean_degree: float = math.nan
    mean_degree_target: float = math.nan
    flags: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return all(v is True for v in self.flags.values())

    @property
    def evaluable(self):
        return all(v is not None for v in self.flags.values())

    @property
    def failed(self):
        return any(v is False for v in self.flags.values())

    def to_dict(self):
        d = asdict(self)
        d["tv"] = {repr(k): v for k, v in self.tv.items()}
        d["tv_nodes"] = {repr(k): v for k, v in self.tv_nodes.items()}
        d["passed"] = self.passed
        return d

    def to_json(self, path=None):
        text = json.dumps(self.to_dict(), indent=2, allow_nan=True) + "\n"
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    def format_table(self):
        def flag(name):
            v = self.flags.get(name)
            return "n/a " if v is None else ("PASS" if v else "FAIL")

        tol = self.tolerances
        lines = [f"nodes={self.n_nodes:g}  steps={self.t_max}", ""]
        lines.append(f"{'check':<22}{'value':>14}{'target':>14}{'tol':>10}  result")
        if self.tv:
            worst = max(self.tv, key=self.tv.get)
            lines.append(f"{'tv max (theta=%g)' % worst:<22}{self.tv[worst]:>14.4f}{0:>14}{tol['tv_max']:>10}  {flag('tv')}")
        else:
            lines.append(f"{'tv':<22}{'-':>14}{0:>14}{tol['tv_max']:>10}  {flag('tv')}")
        lines.append(f"{'slope':<22}{self.slope:>14.4f}{self.slope_target:>14.4f}{tol['slope_rel']:>10}  {flag('slope')}")
        lines.append(f"{'intercept':<22}{self.intercept:>14.4f}{0:>14}{tol['intercept_abs']:>10}  {flag('intercept')}")
        lines.append(f"{'mean degree':<22}{self.mean_degree:>14.4f}{self.mean_degree_target:>14.4f}"
                     f"{tol['mean_degree_rel']:>10}  {flag('mean_degree')}")
        lines.append(f"{'tail exponent':<22}{self.tail_exponent:>14.4f}{self.tail_target:>14.4f}"
                     f"{tol['tail_abs']:>10}  {flag('tail')}")
        if self.tv:
            lines += ["", f"{'theta':>8}{'nodes':>10}{'tv':>10}"]
            for th in sorted(self.tv):
                lines.append(f"{th:>8g}{self.tv_nodes[th]:>10g}{self.tv[th]:>10.4f}")
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines)


def compare(params, emp_all, emp_censored=None, tol=Tolerances()):
    """
    Run every theory-vs-simulation check.

    ``emp_all`` holds every node and feeds the mean-degree, slope and tail
    checks; ``emp_censored`` (young nodes dropped) feeds the conditional
    distance check. If it is omitted ``emp_all`` is used for both.
    """
    if emp_censored is None:
        emp_censored = emp_all
    rep = ComparisonReport(tolerances=asdict(tol), n_nodes=emp_all.total_nodes, t_max=emp_all.t_max)

    for th in emp_censored.thetas:
        n = emp_censored.node_count(th)
        if n >= tol.tv_min_nodes:
            rep.tv[th] = tv_distance(emp_censored, th, params, min_nodes=tol.tv_min_nodes)
            rep.tv_nodes[th] = n
    if rep.tv:
        rep.flags["tv"] = all(d <= tol.tv_max for d in rep.tv.values())
    else:
        rep.flags["tv"] = None
        rep.notes.append(f"no fitness value has {tol.tv_min_nodes} nodes; distance check not evaluable")

    rep.slope_target = (params.beta1 + params.beta2) / params.mu
    try:
        rep.slope, rep.intercept = fit_mean_vs_fitness(emp_all, min_nodes=tol.mean_min_nodes)
        rep.flags["slope"] = abs(rep.slope - rep.slope_target) <= tol.slope_rel * rep.slope_target
        rep.flags["intercept"] = abs(rep.intercept) <= tol.intercept_abs
    except InsufficientSample as e:
        rep.flags["slope"] = rep.flags["intercept"] = None
        rep.notes.append(f"mean-vs-fitness fit not evaluable: {e}")

    rep.mean_degree = emp_all.mean_q_overall()
    rep.mean_degree_target = expected_total_degree_overall(params)
    if emp_all.total_nodes >= tol.mean_degree_min_nodes:
        rep.flags["mean_degree"] = abs(rep.mean_degree - rep.mean_degree_target) <= \
            tol.mean_degree_rel * rep.mean_degree_target
    else:
        # the seed graph still dominates the average
        rep.flags["mean_degree"] = None
        rep.notes.append(f"{emp_all.total_nodes:g} nodes, need {tol.mean_degree_min_nodes} for the mean-degree check")

    rep.tail_target = tail_exponent(params)
    try:
        rep.tail_exponent, rep.tail_stderr = fit_tail_exponent(emp_all, tol.q_min, tol.min_tail)
        rep.flags["tail"] = abs(rep.tail_exponent - rep.tail_target) <= tol.tail_abs
    except InsufficientSample as e:
        rep.flags["tail"] = None
        rep.notes.append(f"tail fit not evaluable: {e}")
    return rep
