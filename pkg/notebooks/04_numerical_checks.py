"""
Numerical checks
================

The Gamma-ratio series, Stirling rows and the two routes to the joint law,
checked against each other. Same table as ``meritfame selfcheck``.
"""

# %%
import math

from meritfame import gamma_ratio_sum_rhs, gamma_ratio_weighted_sum_rhs, log_stirling_row, stirling1u_exact
from meritfame.checks import gamma_ratio_partial_sum, selfcheck_rows

# %%
# sum_q Gamma(q+y)/Gamma(q+x+y) = Gamma(y) / ((x-1) Gamma(x+y-1))
for x, y in ((2.0, 1.0), (2.5, 1.5), (1.5, 0.5)):
    s = gamma_ratio_partial_sum(x, y)
    print(f"x={x} y={y}: partial {s.partial:.12f} + tail {s.tail:.3e} = {s.total:.12f}"
          f"   closed form {gamma_ratio_sum_rhs(x, y):.12f}")

s = gamma_ratio_partial_sum(1.5, 2.0, weighted=True)
print("weighted, x=1.5 y=2:", s.total, gamma_ratio_weighted_sum_rhs(1.5, 2.0))

# %%
# Stirling numbers of the first kind: log-space rows against exact integers.
row = log_stirling_row(25)
print("[25, 3] exact:", stirling1u_exact(25, 3), " from logs:", f"{math.exp(row[3]):.6e}")

# %%
for r in selfcheck_rows(10 ** 5):
    print(f"{r.name:<32} {r.deviation:.3e}  (tol {r.tolerance:g})  {'ok' if r.ok else 'FAILED'}")
