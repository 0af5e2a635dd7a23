"""
Closed-form steady state
========================

Data behind three pictures: the P(q, theta) surface for beta1=2,
beta2=4, the parallel power-law tails for beta1=8, beta2=4, and the
straight line of mean degree against fitness. CSVs land in ``out/notebooks``.
"""

# %%
import os

import numpy as np

from meritfame import (
    GeometricDecay,
    ModelParams,
    expected_total_degree,
    joint_pdf,
    log_total_degree_pdf,
    tail_exponent,
    total_degree_table,
)

OUT = os.path.join("out", "notebooks")
os.makedirs(OUT, exist_ok=True)

params = ModelParams(2, 4, GeometricDecay(0.9))

# %%
# Surface: log(1/P(q, theta)) on a q x theta grid.
rows = []
for th in range(0, 31):
    table = total_degree_table(60, float(th), params)
    rows += [(th, q, lp) for q, lp in enumerate(table.log_p)]
surface = np.array(rows)
np.savetxt(os.path.join(OUT, "surface_b2_4.csv"), surface, delimiter=",",
           header="theta,q,log_p", comments="", fmt=["%d", "%d", "%.12g"])
print("surface rows:", len(surface))

# %%
# The joint law vanishes at k=0, ell>0: nobody links by fame to a node
# nobody has linked to yet.
print("P(0, 3 | theta=2) =", joint_pdf(0, 3, 2.0, params))
print("P(1, 2 | theta=2) =", joint_pdf(1, 2, 2.0, params))

# %%
# Tails: slope of log P(q|theta) against log q for beta1=8, beta2=4.
tail_params = ModelParams(8, 4, GeometricDecay(0.9))
qs = np.unique(np.round(np.logspace(0, 4, 300)))
curves = {}
for th in (1.0, 2.0, 5.0):
    curves[th] = log_total_degree_pdf(qs, th, tail_params) - np.log(tail_params.fitness.pmf(th))
    big = qs >= 1000
    slope = np.polyfit(np.log(qs[big]), curves[th][big], 1)[0]
    print(f"theta={th:g}: slope over q in [1e3, 1e4] = {slope:.4f}  (asymptote {-tail_exponent(tail_params):g})")
np.savetxt(os.path.join(OUT, "tails_b8_4.csv"), np.column_stack([qs] + list(curves.values())), delimiter=",",
           header="q,theta1,theta2,theta5", comments="", fmt="%.12g")

# %%
# The vertical gaps between curves settle to constants.
d = curves[1.0] - curves[5.0]
for q0 in (10, 100, 1000, 10000):
    print(f"q={q0:5d}  log P(q|1) - log P(q|5) = {d[np.searchsorted(qs, q0)]:.4f}")

# %%
# Mean degree is linear in fitness with zero intercept.
thetas = np.arange(0, 40)
means = [expected_total_degree(t, params) for t in thetas]
np.savetxt(os.path.join(OUT, "mean_vs_theta.csv"), np.column_stack([thetas, means]), delimiter=",",
           header="theta,mean_q", comments="", fmt="%.12g")
print("slope:", means[1] - means[0])
