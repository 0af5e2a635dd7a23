"""
Monte-Carlo growth of the two-layer network.

Each step appends one node. Its ``beta1`` layer-1 links pick targets with
probability proportional to fitness, and its ``beta2`` layer-2 links pick
targets with probability proportional to total in-degree ``k + ell``. All
draws in a step see the state before the newcomer arrived, and are made
with replacement, so multi-edges are possible.
"""
import csv
from array import array
from dataclasses import dataclass

import numpy as np

from .errors import ZeroFitnessSeed, ZeroLinkSeed
from .fenwick import FenwickTree

__all__ = [
    "NodeRecord",
    "MultiplexGraph",
    "make_rng",
    "build_seed_graph",
    "step",
    "grow",
    "sample_target_by_fitness",
    "sample_target_by_total_degree",
    "write_edges",
    "write_nodes",
]


@dataclass(frozen=True)
class NodeRecord:
    id: int
    theta: float
    k: int
    ell: int
    birth_time: int


class MultiplexGraph:
    """
    Growing directed two-layer graph.

    Per-node state lives in parallel lists (``theta``, ``k``, ``ell``,
    ``birth_time``); edges are stored per layer as source/target arrays.
    ``receipts`` holds one entry per received link in either layer and is
    the sampling pool for degree-proportional attachment.
    """

    def __init__(self):
        self.theta = []
        self.k = []
        self.ell = []
        self.birth_time = []
        self.src1 = array("q")
        self.dst1 = array("q")
        self.src2 = array("q")
        self.dst2 = array("q")
        self.receipts = array("q")
        self.theta_sum = 0.0
        self.fitness_index = FenwickTree()
        self.time = 0

    @property
    def n_nodes(self):
        return len(self.theta)

    @property
    def n_links(self):
        return len(self.dst1) + len(self.dst2)

    def add_node(self, theta, birth_time):
        self.theta.append(theta)
        self.k.append(0)
        self.ell.append(0)
        self.birth_time.append(birth_time)
        self.theta_sum += theta
        self.fitness_index.append(theta)
        return len(self.theta) - 1

    def add_edge(self, layer, source, target):
        if layer == 1:
            self.src1.append(source)
            self.dst1.append(target)
            self.k[target] += 1
        else:
            self.src2.append(source)
            self.dst2.append(target)
            self.ell[target] += 1
        self.receipts.append(target)

    def node(self, i):
        return NodeRecord(i, self.theta[i], self.k[i], self.ell[i], self.birth_time[i])

    def nodes(self):
        return [self.node(i) for i in range(self.n_nodes)]

    def arrays(self):
        """Per-node state as numpy arrays: ``theta, k, ell, birth_time``."""
        return (
            np.asarray(self.theta, dtype=float),
            np.asarray(self.k, dtype=np.int64),
            np.asarray(self.ell, dtype=np.int64),
            np.asarray(self.birth_time, dtype=np.int64),
        )

    def edges(self, layer):
        """``(m, 2)`` int array of (source, target) pairs for ``layer``."""
        src, dst = (self.src1, self.dst1) if layer == 1 else (self.src2, self.dst2)
        return np.column_stack([np.frombuffer(src, dtype=np.int64), np.frombuffer(dst, dtype=np.int64)]) \
            if len(src) else np.zeros((0, 2), dtype=np.int64)

    def check_invariants(self):
        k = np.bincount(np.frombuffer(self.dst1, dtype=np.int64), minlength=self.n_nodes) if len(self.dst1) \
            else np.zeros(self.n_nodes, dtype=np.int64)
        ell = np.bincount(np.frombuffer(self.dst2, dtype=np.int64), minlength=self.n_nodes) if len(self.dst2) \
            else np.zeros(self.n_nodes, dtype=np.int64)
        assert np.array_equal(k, self.k), "layer-1 in-degrees out of sync with edge list"
        assert np.array_equal(ell, self.ell), "layer-2 in-degrees out of sync with edge list"
        assert len(self.receipts) == int(k.sum() + ell.sum())
        assert np.array_equal(np.bincount(np.frombuffer(self.receipts, dtype=np.int64), minlength=self.n_nodes),
                              k + ell)
        assert abs(self.theta_sum - sum(self.theta)) <= 1e-9 * max(1.0, self.theta_sum)


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def build_seed_graph(spec, dist, rng):
    """Initial graph described by a ``SeedGraphSpec``."""
    g = MultiplexGraph()
    if spec.fitness_values is None:
        thetas = [float(v) for v in dist.sample(rng, spec.n0)]
    else:
        thetas = list(spec.fitness_values)
    if not sum(thetas) > 0:
        raise ZeroFitnessSeed("seed graph has zero total fitness")
    if spec.pattern == "ring":
        ring = [(i, (i + 1) % spec.n0) for i in range(spec.n0)]
        edges1, edges2 = ring, ring
    else:
        edges1, edges2 = spec.layer1_edges, spec.layer2_edges
    if len(edges1) + len(edges2) == 0:
        raise ZeroLinkSeed("seed graph has no links")
    for th in thetas:
        g.add_node(th, 0)
    for s, t in edges1:
        g.add_edge(1, s, t)
    for s, t in edges2:
        g.add_edge(2, s, t)
    return g


def sample_target_by_fitness(graph, rng, u=None):
    """Node drawn with probability theta_x / sum(theta)."""
    if u is None:
        u = rng.random()
    index = graph.fitness_index
    return index.find(u * index.total())


def sample_target_by_total_degree(graph, rng, u=None):
    """Node drawn with probability (k_x + ell_x) / sum(k + ell)."""
    pool = graph.receipts
    if not pool:
        raise ValueError("degree pool is empty")
    if u is None:
        u = rng.random()
    return pool[int(u * len(pool))]


def step(graph, params, rng):
    """Append one node and wire its links against the pre-arrival state."""
    b1, b2 = params.beta1, params.beta2
    theta = params.fitness.sample(rng)
    u = rng.random(b1 + b2).tolist()
    index = graph.fitness_index
    total = index.total()
    pool = graph.receipts
    size = len(pool)
    targets1 = [index.find(u[i] * total) for i in range(b1)]
    targets2 = [pool[int(u[b1 + j] * size)] for j in range(b2)]
    graph.time += 1
    new = graph.add_node(theta, graph.time)
    for t in targets1:
        graph.add_edge(1, new, t)
    for t in targets2:
        graph.add_edge(2, new, t)
    return graph


def grow(params, rng=None, progress=None):
    """
    Build the seed graph and advance it ``params.t_max`` steps.

    ``rng`` defaults to a PCG64 generator seeded with ``params.rng_seed``.
    """
    if rng is None:
        rng = make_rng(params.rng_seed)
    graph = build_seed_graph(params.seed_graph, params.fitness, rng)
    for i in range(params.t_max):
        step(graph, params, rng)
        if progress is not None and (i + 1) % 10000 == 0:
            progress(i + 1)
    return graph


def write_edges(graph, path):
    """Edge list, one ``layer<TAB>source<TAB>target`` line per edge."""
    with open(path, "w", newline="\n") as fh:
        for layer, (src, dst) in ((1, (graph.src1, graph.dst1)), (2, (graph.src2, graph.dst2))):
            fh.writelines(f"{layer}\t{s}\t{t}\n" for s, t in zip(src, dst))


def write_nodes(graph, path):
    """Node table CSV with header ``id,theta,k,ell,birth_time``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "theta", "k", "ell", "birth_time"])
        for i in range(graph.n_nodes):
            w.writerow([i, repr(graph.theta[i]), graph.k[i], graph.ell[i], graph.birth_time[i]])


def read_nodes(path):
    """Inverse of ``write_nodes``: returns ``theta, k, ell, birth_time`` arrays."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 1], data[:, 2].astype(np.int64), data[:, 3].astype(np.int64), data[:, 4].astype(np.int64)
