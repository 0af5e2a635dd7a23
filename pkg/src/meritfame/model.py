"""
Experiment parameterization: fitness distributions, seed graph spec and
the ``ModelParams`` bundle, plus the JSON config round trip.
"""
import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

__all__ = [
    "FitnessDistribution",
    "PointMass",
    "GeometricDecay",
    "FiniteTable",
    "SeedGraphSpec",
    "ModelParams",
    "mean_fitness",
    "fitness_pmf",
    "sample_fitness",
    "params_to_dict",
    "params_from_dict",
    "load_params",
    "dump_params",
]

_PROB_TOL = 1e-12


class FitnessDistribution:
    """Base class for discrete fitness laws with nonnegative support."""

    kind = None

    @property
    def mean(self):
        raise NotImplementedError

    def pmf(self, theta):
        raise NotImplementedError

    def sample(self, rng, size=None):
        raise NotImplementedError

    def support(self, mass=1 - 1e-12):
        """Support points (ascending) covering at least ``mass`` probability."""
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class PointMass(FitnessDistribution):
    theta0: float
    kind = "point_mass"

    def __post_init__(self):
        if not (math.isfinite(self.theta0) and self.theta0 > 0):
            raise ConfigError(f"point mass needs theta0 > 0 (mean fitness must be positive), got {self.theta0}")

    @property
    def mean(self):
        return float(self.theta0)

    def pmf(self, theta):
        return 1.0 if theta == self.theta0 else 0.0

    def sample(self, rng, size=None):
        if size is None:
            return float(self.theta0)
        return np.full(size, float(self.theta0))

    def support(self, mass=1 - 1e-12):
        return np.array([float(self.theta0)])

    def to_dict(self):
        return {"kind": self.kind, "params": {"theta0": self.theta0}}


@dataclass(frozen=True)
class GeometricDecay(FitnessDistribution):
    """rho(theta) = (1 - a) a**theta on theta = 0, 1, 2, ..."""

    a: float
    kind = "geometric_decay"

    def __post_init__(self):
        if not (0 < self.a < 1):
            raise ConfigError(f"geometric decay needs 0 < a < 1, got {self.a}")

    @property
    def mean(self):
        return self.a / (1 - self.a)

    def pmf(self, theta):
        if theta < 0 or theta != math.floor(theta):
            return 0.0
        return (1 - self.a) * self.a ** theta

    def sample(self, rng, size=None):
        # inverse CDF: P(theta >= m) = a**m
        u = 1.0 - rng.random(size)
        draws = np.floor(np.log(u) / math.log(self.a))
        if size is None:
            return float(draws)
        return draws

    def support(self, mass=1 - 1e-12):
        # smallest m with 1 - a**(m+1) >= mass
        m = max(0, math.ceil(math.log(1 - mass) / math.log(self.a)) - 1)
        return np.arange(m + 1, dtype=float)

    def to_dict(self):
        return {"kind": self.kind, "params": {"a": self.a}}


@dataclass(frozen=True)
class FiniteTable(FitnessDistribution):
    """Finitely supported law given as (theta, probability) pairs."""

    thetas: tuple
    probs: tuple
    kind = "finite_table"

    def __init__(self, pairs):
        pairs = [(float(t), float(p)) for t, p in pairs]
        if not pairs:
            raise ConfigError("finite table needs at least one (theta, p) pair")
        merged = {}
        for t, p in pairs:
            if not (math.isfinite(t) and t >= 0):
                raise ConfigError(f"fitness values must be nonnegative, got {t}")
            if not p >= 0:
                raise ConfigError(f"probabilities must be nonnegative, got {p}")
            merged[t] = merged.get(t, 0.0) + p
        total = math.fsum(merged.values())
        if abs(total - 1) > _PROB_TOL:
            raise ConfigError(f"probabilities sum to {total!r}, not 1")
        thetas = tuple(sorted(merged))
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "probs", tuple(merged[t] for t in thetas))
        if not self.mean > 0:
            raise ConfigError("mean fitness is zero; layer-1 attachment would be undefined")

    @property
    def mean(self):
        return sum(t * p for t, p in zip(self.thetas, self.probs))

    def pmf(self, theta):
        for t, p in zip(self.thetas, self.probs):
            if t == theta:
                return p
        return 0.0

    def sample(self, rng, size=None):
        cdf = np.cumsum(self.probs)
        u = rng.random(size)
        idx = np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)
        out = np.asarray(self.thetas)[idx]
        if size is None:
            return float(out)
        return out

    def support(self, mass=1 - 1e-12):
        return np.array([t for t, p in zip(self.thetas, self.probs) if p > 0])

    def to_dict(self):
        return {"kind": self.kind, "params": {"table": [[t, p] for t, p in zip(self.thetas, self.probs)]}}


def mean_fitness(dist):
    return dist.mean


def fitness_pmf(dist, theta):
    return dist.pmf(theta)


def sample_fitness(dist, rng, size=None):
    return dist.sample(rng, size)


@dataclass(frozen=True)
class SeedGraphSpec:
    """
    Initial network before the first arrival.

    ``pattern`` is ``"ring"`` (directed ring i -> i+1 mod n0 in both layers)
    or ``"explicit"``, in which case ``layer1_edges``/``layer2_edges`` give
    (source, target) pairs. ``fitness_values`` of ``None`` means the seed
    fitness is sampled from the model's distribution.
    """

    n0: int = 10
    pattern: str = "ring"
    layer1_edges: tuple = ()
    layer2_edges: tuple = ()
    fitness_values: tuple = None

    def __post_init__(self):
        if not (isinstance(self.n0, int) and self.n0 >= 2):
            raise ConfigError(f"seed graph needs n0 >= 2, got {self.n0!r}")
        if self.pattern not in ("ring", "explicit"):
            raise ConfigError(f"unknown seed pattern {self.pattern!r}")
        for name in ("layer1_edges", "layer2_edges"):
            edges = tuple(tuple(int(v) for v in e) for e in getattr(self, name))
            for e in edges:
                if len(e) != 2 or not all(0 <= v < self.n0 for v in e):
                    raise ConfigError(f"{name}: edge {e} does not join two seed nodes in [0, {self.n0})")
            object.__setattr__(self, name, edges)
        if self.fitness_values is not None:
            vals = tuple(float(v) for v in self.fitness_values)
            if len(vals) != self.n0:
                raise ConfigError(f"expected {self.n0} seed fitness values, got {len(vals)}")
            if any(not (math.isfinite(v) and v >= 0) for v in vals):
                raise ConfigError("seed fitness values must be nonnegative")
            object.__setattr__(self, "fitness_values", vals)

    def to_dict(self):
        if self.pattern == "ring":
            pattern = "ring"
        else:
            pattern = {
                "kind": "explicit",
                "layer1": [list(e) for e in self.layer1_edges],
                "layer2": [list(e) for e in self.layer2_edges],
            }
        if self.fitness_values is None:
            assignment = "sample"
        else:
            assignment = {"kind": "explicit", "values": list(self.fitness_values)}
        return {"n0": self.n0, "pattern": pattern, "fitness_assignment": assignment}


@dataclass(frozen=True)
class ModelParams:
    """Everything that defines one experiment."""

    beta1: int
    beta2: int
    fitness: FitnessDistribution
    t_max: int = 100_000
    rng_seed: int = 0
    seed_graph: SeedGraphSpec = field(default_factory=SeedGraphSpec)

    def __post_init__(self):
        for name in ("beta1", "beta2"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if isinstance(self.t_max, bool) or not isinstance(self.t_max, int) or self.t_max < 0:
            raise ConfigError(f"t_max must be a nonnegative integer, got {self.t_max!r}")
        if not (isinstance(self.rng_seed, int) and 0 <= self.rng_seed < 2 ** 64):
            raise ConfigError(f"rng_seed must be a 64-bit unsigned integer, got {self.rng_seed!r}")
        if not isinstance(self.fitness, FitnessDistribution):
            raise ConfigError("fitness must be a FitnessDistribution")

    @property
    def mu(self):
        return self.fitness.mean

    def replace(self, **changes):
        from dataclasses import replace
        return replace(self, **changes)


# --- JSON config -------------------------------------------------------------

_FITNESS_KINDS = {
    "point_mass": lambda p: PointMass(float(p["theta0"])),
    "geometric_decay": lambda p: GeometricDecay(float(p["a"])),
    "finite_table": lambda p: FiniteTable(p["table"]),
}


def params_to_dict(params):
    return {
        "beta1": params.beta1,
        "beta2": params.beta2,
        "fitness": params.fitness.to_dict(),
        "t_max": params.t_max,
        "rng_seed": params.rng_seed,
        "seed_graph": params.seed_graph.to_dict(),
    }


def _key_line(text, key):
    if text is None:
        return None
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    if m is None:
        return None
    return text.count("\n", 0, m.start()) + 1


def _seed_from_dict(d):
    d = dict(d)
    kw = {"n0": d.get("n0", 10)}
    pattern = d.get("pattern", "ring")
    if pattern == "ring":
        kw["pattern"] = "ring"
    elif isinstance(pattern, dict) and pattern.get("kind") == "explicit":
        kw["pattern"] = "explicit"
        kw["layer1_edges"] = pattern.get("layer1", [])
        kw["layer2_edges"] = pattern.get("layer2", [])
    else:
        raise ConfigError(f"unknown seed pattern {pattern!r}")
    assignment = d.get("fitness_assignment", "sample")
    if assignment == "sample":
        pass
    elif isinstance(assignment, dict) and assignment.get("kind") == "explicit":
        kw["fitness_values"] = assignment["values"]
    else:
        raise ConfigError(f"unknown fitness assignment {assignment!r}")
    return SeedGraphSpec(**kw)


def params_from_dict(d, text=None):
    """
    Build ``ModelParams`` from a decoded config document.

    ``text`` is the raw JSON source; when given, validation errors carry the
    line of the offending key.
    """
    required = ("beta1", "beta2", "fitness", "t_max")
    for key in required:
        if key not in d:
            raise ConfigError(f"missing required field {key!r}")

    def build(key, fn):
        try:
            return fn()
        except ConfigError as e:
            raise ConfigError(str(e), line=_key_line(text, key)) from None
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"{key}: {e}", line=_key_line(text, key)) from None

    def fitness():
        f = d["fitness"]
        if f.get("kind") not in _FITNESS_KINDS:
            raise ConfigError(f"unknown fitness kind {f.get('kind')!r}")
        return _FITNESS_KINDS[f["kind"]](f.get("params", {}))

    dist = build("fitness", fitness)
    seed = build("seed_graph", lambda: _seed_from_dict(d.get("seed_graph", {})))
    values = {}
    for key in ("beta1", "beta2", "t_max", "rng_seed"):
        v = d.get(key, 0)
        if isinstance(v, float) and v.is_integer():
            v = int(v)
        values[key] = v
        probe = {"beta1": 1, "beta2": 1, "t_max": 1, "rng_seed": 0}
        probe[key] = v
        build(key, lambda: ModelParams(fitness=dist, seed_graph=seed, **probe))
    return ModelParams(fitness=dist, seed_graph=seed, **values)


def load_params(path):
    """Read a JSON experiment config from ``path``."""
    with open(path) as fh:
        text = fh.read()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e.msg} (column {e.colno})", line=e.lineno) from None
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object", line=1)
    return params_from_dict(d, text)


def dump_params(params, path=None):
    text = json.dumps(params_to_dict(params), indent=2, sort_keys=False) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
