"""
Growing a merit/fame multiplex
==============================

Each arrival draws a fitness from rho, links beta1 times in layer 1 to
nodes picked in proportion to fitness, and beta2 times in layer 2 to nodes
picked in proportion to total in-degree q = k + ell.

Run with ``python notebooks/01_grow_network.py``.
"""

# %%
import numpy as np

from meritfame import GeometricDecay, ModelParams, grow, make_rng, sample_fitness

params = ModelParams(beta1=2, beta2=4, fitness=GeometricDecay(0.9), t_max=50_000, rng_seed=1)
print("mean fitness mu =", params.mu)

# %%
# Fitness draws are integers with P(theta) = (1 - a) a**theta.
draws = sample_fitness(params.fitness, make_rng(0), 100_000)
print("sample mean of theta:", draws.mean())
print("P(theta=0) empirical / exact:", np.mean(draws == 0), params.fitness.pmf(0))

# %%
graph = grow(params)
theta, k, ell, birth = graph.arrays()
q = k + ell
print("nodes:", graph.n_nodes, " links:", graph.n_links)
print("mean total in-degree:", q.mean(), "(steady state: beta1 + beta2 =", params.beta1 + params.beta2, ")")

# %%
# Zero-fitness nodes never receive merit links, and with no links they
# are invisible to the fame layer too.
zero = (theta == 0) & (birth > 0)
print("zero-fitness newcomers:", zero.sum(), " max degree among them:", q[zero].max())

# %%
# Mean degree grows linearly with fitness (slope (beta1+beta2)/mu = 2/3).
for th in range(0, 25, 4):
    sel = theta == th
    print(f"theta={th:2d}  nodes={sel.sum():6d}  mean q={q[sel].mean():7.3f}  predicted={(6 * th / 9):7.3f}")

# %%
# The layer-1 and layer-2 degrees of the biggest hubs.
top = np.argsort(q)[-5:][::-1]
for i in top:
    print(f"node {i:6d}  theta={theta[i]:4.0f}  k={k[i]:5d}  ell={ell[i]:5d}  born at t={birth[i]}")
