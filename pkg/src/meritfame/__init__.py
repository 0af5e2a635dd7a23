"""
Growing two-layer network with intrinsic fitness.

Layer-1 ("merit") links attach in proportion to a node's fixed fitness;
layer-2 ("fame") links attach in proportion to its total in-degree across
both layers. The package simulates that growth and evaluates the exact
steady-state joint laws of fitness and degrees.
"""
__version__ = "0.1.0"

from .analytics import (
    JointDistributionTable,
    conditional_total_degree_pdf,
    expected_total_degree,
    expected_total_degree_overall,
    joint_pdf,
    joint_table,
    log_total_degree_pdf,
    recurrence_oracle,
    tail_exponent,
    total_degree_pdf,
    total_degree_table,
)
from .model import FiniteTable, GeometricDecay, ModelParams, PointMass, SeedGraphSpec, load_params, sample_fitness
from .simulator import MultiplexGraph, grow, make_rng
from .special import (
    gamma_ratio_sum_rhs,
    gamma_ratio_weighted_sum_rhs,
    log_gamma,
    log_stirling_row,
    stirling1u_exact,
)
from .stats import (
    compare,
    empirical_from_graph,
    expected_hill_exponent,
    fit_mean_vs_fitness,
    fit_tail_exponent,
    tv_distance,
)
