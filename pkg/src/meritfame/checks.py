"""
Numerical self-checks: brute-force partial sums for the Gamma-ratio
series, and the grids used by ``meritfame selfcheck``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .analytics import joint_table, log_total_degree_pdf, recurrence_oracle
from .model import GeometricDecay, ModelParams
from .special import (
    gamma_ratio_sum_rhs,
    gamma_ratio_weighted_sum_rhs,
    log_stirling_row,
    stirling1u_exact,
)

IDENTITY_X = (1.5, 2.0, 2.5, 3.0, 5.0)
IDENTITY_Y = (0.5, 1.0, 2.0, 9.0)
ORACLE_BETAS = ((1, 1), (2, 4), (8, 4))
ORACLE_THETAS = (0.0, 1.0, 2.0, 5.0)


@dataclass(frozen=True)
class SeriesSum:
    partial: float   # sum of the first n terms
    tail: float      # Euler-Maclaurin estimate of the remainder
    lower: float     # monotone bracket on the remainder
    upper: float

    @property
    def total(self):
        return self.partial + self.tail


def _ratio_terms(s, y, n_terms):
    # Gamma(q+y) / Gamma(q+y+s) for q < n_terms, by the product of term ratios
    q = np.arange(n_terms - 1, dtype=float)
    ratios = (q + y) / (q + y + s)
    first = math.exp(math.lgamma(y) - math.lgamma(y + s))
    return first * np.concatenate(([1.0], np.cumprod(ratios)))


def _ratio_tail(s, y, start):
    # remainder sum_{q >= start} Gamma(q+y)/Gamma(q+y+s), using the
    # approximant (q + c)**-s, c = y + (s-1)/2, accurate to O(q**-2)
    c = y + (s - 1) / 2

    def integral(a):
        return (a + c) ** (1 - s) / (s - 1)

    g = (start + c) ** -s
    dg = -s * (start + c) ** (-s - 1)
    est = integral(start) + g / 2 - dg / 12
    return est, integral(start), integral(start - 1)


def gamma_ratio_partial_sum(x, y, n_terms=10 ** 6, weighted=False):
    """
    Brute-force value of

        sum_q Gamma(q+y) / Gamma(q+x+y)            (weighted=False)
        sum_q q Gamma(q+y) / Gamma(q+x+y+1)        (weighted=True)

    as ``n_terms`` explicit terms plus a tail estimate. Terms come from a
    running product of ratios, not from Gamma evaluations.
    """
    if not weighted:
        terms = _ratio_terms(x, y, n_terms)
        tail, lo, hi = _ratio_tail(x, y, n_terms)
        return SeriesSum(float(np.sum(terms)), tail, lo, hi)
    terms = np.arange(n_terms) * _ratio_terms(x + 1, y, n_terms)
    # q / Gamma(q+x+y+1) = 1 / Gamma(q+x+y) - (x+y) / Gamma(q+x+y+1)
    t1, lo1, hi1 = _ratio_tail(x, y, n_terms)
    t2, lo2, hi2 = _ratio_tail(x + 1, y, n_terms)
    return SeriesSum(float(np.sum(terms)), t1 - (x + y) * t2, lo1 - (x + y) * hi2, hi1 - (x + y) * lo2)


@dataclass(frozen=True)
class CheckRow:
    name: str
    deviation: float
    tolerance: float

    @property
    def ok(self):
        return self.deviation <= self.tolerance


def _rel(a, b):
    return abs(a - b) / abs(b)


def _log_rel_dev(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    both_zero = np.isneginf(a) & np.isneginf(b)
    with np.errstate(invalid="ignore"):
        d = np.abs(np.expm1(a - b))
    d = np.where(both_zero, 0.0, d)
    return float(np.nan_to_num(d, nan=np.inf).max())


def identity_rows(n_terms=10 ** 6, tol=1e-5):
    worst_plain = worst_weighted = 0.0
    for x in IDENTITY_X:
        for y in IDENTITY_Y:
            s = gamma_ratio_partial_sum(x, y, n_terms)
            worst_plain = max(worst_plain, _rel(s.total, gamma_ratio_sum_rhs(x, y)))
            s = gamma_ratio_partial_sum(x, y, n_terms, weighted=True)
            worst_weighted = max(worst_weighted, _rel(s.total, gamma_ratio_weighted_sum_rhs(x, y)))
    return [
        CheckRow("gamma-ratio series", worst_plain, tol),
        CheckRow("weighted gamma-ratio series", worst_weighted, tol),
    ]


def oracle_rows(span=50, tol=1e-10):
    worst_oracle = worst_marg = 0.0
    mask = np.add.outer(np.arange(span + 1), np.arange(span + 1)) <= span
    for b1, b2 in ORACLE_BETAS:
        params = ModelParams(b1, b2, GeometricDecay(0.9))
        for th in ORACLE_THETAS:
            closed = joint_table(span, span, th, params).log_p
            rec = recurrence_oracle(span, span, th, params).log_p
            worst_oracle = max(worst_oracle, _log_rel_dev(closed[mask], rec[mask]))
            marg = []
            for q in range(span + 1):
                diag = closed[np.arange(q + 1), q - np.arange(q + 1)]
                marg.append(np.logaddexp.reduce(diag))
            total = log_total_degree_pdf(np.arange(span + 1), th, params)
            worst_marg = max(worst_marg, _log_rel_dev(marg, total))
    return [
        CheckRow("closed form vs recurrence", worst_oracle, tol),
        CheckRow("marginal vs summed joint", worst_marg, 1e-9),
    ]


def stirling_rows(n=25, tol=1e-10):
    worst = 0.0
    for m in range(n + 1):
        row = log_stirling_row(m).values
        for k in range(m + 1):
            exact = stirling1u_exact(m, k)
            if exact == 0:
                if row[k] != -math.inf:
                    worst = math.inf
                continue
            worst = max(worst, abs(row[k] - math.log(exact)))
    return [CheckRow(f"log Stirling rows n<={n}", worst, tol)]


def selfcheck_rows(n_terms=10 ** 6):
    return stirling_rows() + identity_rows(n_terms) + oracle_rows()
