"""
Steady-state distributions of the two-layer fitness model.

Notation follows the growth rule: ``A = (beta1 + beta2) / beta2``,
``G = 1 + beta1 * theta / mu`` and the per-layer-1-link weight
``w = A * beta1 * theta / mu``. The joint law of layer-1 degree ``k``,
layer-2 degree ``ell`` and fitness is

    P(k, ell, theta) = [k+ell, k] A w**k Gamma(A G) / Gamma(A G + k + ell + 1) rho(theta)

and summing over ``k`` with ``q = k + ell`` fixed gives

    P(q, theta) = A Gamma(A G) / Gamma(w) * Gamma(q + w) / Gamma(q + 1 + A G) rho(theta).

Note ``A G = A + w``. All probabilities here are joint in ``theta``
(they sum to ``rho(theta)``); divide by ``rho(theta)`` for conditionals.
"""
import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResourceError
from .special import iter_log_stirling_rows, log_binomial_general, log_gamma, log_stirling_row

__all__ = [
    "ClosedFormContext",
    "JointDistributionTable",
    "closed_form_context",
    "log_joint_pdf",
    "joint_pdf",
    "joint_table",
    "recurrence_oracle",
    "log_total_degree_pdf",
    "total_degree_pdf",
    "total_degree_pdf_binomial",
    "conditional_total_degree_pdf",
    "total_degree_table",
    "total_degree_tail",
    "normalization_cutoff",
    "tail_exponent",
    "expected_total_degree",
    "expected_total_degree_overall",
    "truncated_mean_total_degree",
    "JOINT_GRID_CAP",
    "TOTAL_Q_CAP",
]

JOINT_GRID_CAP = 500
TOTAL_Q_CAP = 10 ** 7


def _log(x):
    return math.log(x) if x > 0 else -math.inf


@dataclass(frozen=True)
class ClosedFormContext:
    """Constants of the closed forms at one fitness value."""

    theta: float
    A: float
    G_theta: float
    log_w: float
    rho_theta: float

    @property
    def w(self):
        return math.exp(self.log_w)

    @property
    def AG(self):
        return self.A * self.G_theta


def closed_form_context(theta, params):
    b1, b2, mu = params.beta1, params.beta2, params.mu
    A = (b1 + b2) / b2
    return ClosedFormContext(
        theta=float(theta),
        A=A,
        G_theta=1 + b1 * theta / mu,
        log_w=_log(A * theta * b1 / mu),
        rho_theta=params.fitness.pmf(theta),
    )


@dataclass(frozen=True)
class JointDistributionTable:
    """
    Dense table of log-probabilities at a fixed fitness.

    ``kind`` is ``"joint"`` (``log_p[k, ell]``) or ``"total"``
    (``log_p[q]``); ``source`` is ``"closed_form"``, ``"recurrence"`` or
    ``"empirical"``. Cells outside the computed region hold ``-inf``.
    """

    theta: float
    kind: str
    source: str
    log_p: np.ndarray

    @property
    def p(self):
        return np.exp(self.log_p)

    def mass(self):
        return float(np.exp(self.log_p).sum())

    def to_csv(self, path, with_log=True):
        """
        Write ``theta,k,ell,p`` (joint) or ``theta,q,p`` (total) rows.

        With ``with_log`` a ``log_p`` column is added; total tables also get
        ``log_inv_p``, the log of 1/P used for surface plots.
        """
        with open(path, "w", newline="") as fh:
            write_table_rows(csv.writer(fh, lineterminator="\n"), [self], with_log, header=True)


def write_table_rows(writer, tables, with_log=True, header=True):
    if not tables:
        return
    kind = tables[0].kind
    if header:
        cols = ["theta", "k", "ell", "p"] if kind == "joint" else ["theta", "q", "p"]
        if with_log:
            cols.append("log_p")
            if kind == "total":
                cols.append("log_inv_p")
        writer.writerow(cols)
    for t in tables:
        if t.kind == "joint":
            for (k, ell), lp in np.ndenumerate(t.log_p):
                row = [repr(t.theta), k, ell, repr(float(np.exp(lp)))]
                if with_log:
                    row.append(repr(float(lp)))
                writer.writerow(row)
        else:
            for q, lp in enumerate(t.log_p):
                row = [repr(t.theta), q, repr(float(np.exp(lp)))]
                if with_log:
                    row += [repr(float(lp)), repr(float(-lp))]
                writer.writerow(row)


def _k_term(k, log_w):
    # w**k with 0**0 = 1
    k = np.asarray(k)
    if log_w == -math.inf:
        return np.where(k == 0, 0.0, -np.inf)
    return k * log_w


def log_joint_pdf(k, ell, theta, params):
    """log P(k, ell, theta); ``-inf`` off the support."""
    if k < 0 or ell < 0:
        return -math.inf
    c = closed_form_context(theta, params)
    if c.rho_theta == 0:
        return -math.inf
    n = k + ell
    log_st = log_stirling_row(n)[k]
    if log_st == -math.inf:
        return -math.inf
    return float(
        log_st + math.log(c.A) + _k_term(k, c.log_w)
        + log_gamma(c.AG) - log_gamma(c.AG + n + 1) + math.log(c.rho_theta)
    )


def joint_pdf(k, ell, theta, params):
    """P(k, ell, theta): fraction of nodes with fitness theta and degrees (k, ell)."""
    return math.exp(log_joint_pdf(k, ell, theta, params))


def joint_table(max_k, max_ell, theta, params):
    """Closed-form ``(max_k+1, max_ell+1)`` table of log P(k, ell, theta)."""
    if max_k > JOINT_GRID_CAP or max_ell > JOINT_GRID_CAP:
        raise ResourceError(f"joint grid capped at {JOINT_GRID_CAP} per axis")
    c = closed_form_context(theta, params)
    out = np.full((max_k + 1, max_ell + 1), -np.inf)
    if c.rho_theta == 0:
        return JointDistributionTable(float(theta), "joint", "closed_form", out)
    n_max = max_k + max_ell
    ns = np.arange(n_max + 1)
    log_denom = log_gamma(c.AG + ns + 1.0)
    base = math.log(c.A) + log_gamma(c.AG) + math.log(c.rho_theta)
    for row in iter_log_stirling_rows(n_max):
        n = row.n
        ks = np.arange(max(0, n - max_ell), min(n, max_k) + 1)
        if len(ks) == 0:
            continue
        out[ks, n - ks] = row.values[ks] + _k_term(ks, c.log_w) + base - log_denom[n]
    return JointDistributionTable(float(theta), "joint", "closed_form", out)


def recurrence_oracle(max_k, max_ell, theta, params, cap=JOINT_GRID_CAP):
    """
    Joint table by forward iteration of the steady-state difference equation

        P(k, ell) = [w P(k-1, ell) + (k+ell-1) P(k, ell-1)] / (A G + k + ell)

    with ``P(0, 0) = rho / G`` and zero outside ``k, ell >= 0``. Carried out
    in log space, without Stirling numbers or Gamma functions, so it is an
    independent check on ``joint_table``.
    """
    if max_k > cap or max_ell > cap:
        raise ResourceError(f"recurrence grid capped at {cap} per axis")
    c = closed_form_context(theta, params)
    ninf = -math.inf
    out = [[ninf] * (max_ell + 1) for _ in range(max_k + 1)]
    if c.rho_theta == 0:
        return JointDistributionTable(float(theta), "joint", "recurrence", np.array(out))
    log_w, AG = c.log_w, c.AG
    out[0][0] = math.log(c.rho_theta) - math.log(c.G_theta)
    for k in range(max_k + 1):
        row = out[k]
        prev = out[k - 1] if k > 0 else None
        for ell in range(max_ell + 1):
            if k == 0 and ell == 0:
                continue
            n = k + ell
            a = log_w + prev[ell] if prev is not None else ninf
            b = math.log(n - 1) + row[ell - 1] if (ell > 0 and n > 1) else ninf
            hi = max(a, b)
            if hi == ninf:
                row[ell] = ninf
                continue
            s = hi + math.log1p(math.exp(min(a, b) - hi))
            row[ell] = s - math.log(AG + n)
    return JointDistributionTable(float(theta), "joint", "recurrence", np.array(out))


def log_total_degree_pdf(q, theta, params):
    """
    log P(q, theta) for scalar or array ``q``.

    For theta > 0 this is the Gamma-ratio form. At theta = 0 that form is
    0/0, so the value comes from the joint law directly: only k = 0
    contributes and [q, 0] vanishes for q >= 1.
    """
    qa = np.asarray(q, dtype=float)
    c = closed_form_context(theta, params)
    if c.rho_theta == 0:
        out = np.full(qa.shape, -np.inf)
    elif c.log_w == -math.inf:
        # sum_k joint(k, q-k, 0) = joint(0, q, 0) = rho A Gamma(A) / Gamma(A+q+1) [q, 0]
        out = np.where(qa == 0,
                       math.log(c.rho_theta) + math.log(c.A) + log_gamma(c.A) - log_gamma(c.A + 1.0),
                       -np.inf)
    else:
        w = c.w
        base = math.log(c.A) + log_gamma(c.AG) - log_gamma(w) + math.log(c.rho_theta)
        out = np.asarray(base + log_gamma(qa + w) - log_gamma(qa + 1.0 + c.AG))
    if out.ndim == 0:
        return float(out)
    return out


def total_degree_pdf(q, theta, params):
    """P(q, theta): fraction of nodes with fitness theta and total in-degree q."""
    out = np.exp(log_total_degree_pdf(q, theta, params))
    return float(out) if np.ndim(out) == 0 else out


def total_degree_pdf_binomial(q, theta, params):
    """P(q, theta) through generalized binomial coefficients; theta > 0 only."""
    c = closed_form_context(theta, params)
    if c.rho_theta == 0:
        return 0.0
    if theta <= 0:
        raise DomainError("binomial form is singular at theta = 0")
    A, AG = c.A, c.AG
    log_val = (math.log(A / (A + 1))
               + log_binomial_general(AG - 1, A)
               - log_binomial_general(AG + q, A + 1)
               + math.log(c.rho_theta))
    return math.exp(log_val)


def conditional_total_degree_pdf(q, theta, params):
    """P(q | theta)."""
    rho = params.fitness.pmf(theta)
    if rho == 0:
        raise DomainError(f"theta={theta} is outside the fitness support")
    return np.exp(log_total_degree_pdf(q, theta, params) - math.log(rho))


def total_degree_table(max_q, theta, params):
    if max_q > TOTAL_Q_CAP:
        raise ResourceError(f"total-degree table capped at q={TOTAL_Q_CAP}")
    log_p = np.atleast_1d(log_total_degree_pdf(np.arange(max_q + 1), theta, params))
    return JointDistributionTable(float(theta), "total", "closed_form", log_p)


def total_degree_tail(q, theta, params):
    """
    Sum of P(q', theta) over q' >= q, in closed form.

    Telescoping ``u(q) = Gamma(q + w) / Gamma(q + w + A)``, which satisfies
    ``u(q) - u(q+1) = A Gamma(q + w) / Gamma(q + w + A + 1)``, gives
    ``tail(q) = rho A Gamma(A G) / Gamma(w) * u(q) / A``.
    """
    c = closed_form_context(theta, params)
    if c.rho_theta == 0:
        return 0.0
    if c.log_w == -math.inf:
        return c.rho_theta if q <= 0 else 0.0
    w = c.w
    log_val = (log_gamma(c.AG) - log_gamma(w) + math.log(c.rho_theta)
               + log_gamma(q + w) - log_gamma(q + w + c.A))
    return math.exp(log_val)


def normalization_cutoff(theta, params, eps=1e-7):
    """Smallest q such that P(q' > q | theta) < eps, found from the tail bound."""
    rho = params.fitness.pmf(theta)
    if rho == 0:
        raise DomainError(f"theta={theta} is outside the fitness support")
    if total_degree_tail(1, theta, params) / rho < eps:
        return 0
    hi = 1
    while total_degree_tail(hi + 1, theta, params) / rho >= eps:
        hi *= 2
        if hi > TOTAL_Q_CAP:
            raise ResourceError("normalization cutoff exceeds the total-degree cap")
    lo = hi // 2
    while lo < hi:
        mid = (lo + hi) // 2
        if total_degree_tail(mid + 1, theta, params) / rho < eps:
            hi = mid
        else:
            lo = mid + 1
    return lo


def tail_exponent(params):
    """Exponent of the power-law tail P(q, theta) ~ q**-(2 + beta1/beta2)."""
    return 2 + params.beta1 / params.beta2


def expected_total_degree(theta, params):
    """Mean total degree of a node with fitness theta: (beta1 + beta2) theta / mu."""
    if theta < 0:
        raise DomainError("fitness must be nonnegative")
    return (params.beta1 + params.beta2) * theta / params.mu


def expected_total_degree_overall(params):
    return float(params.beta1 + params.beta2)


def truncated_mean_total_degree(theta, params, q_max):
    """sum_{q <= q_max} q P(q | theta)."""
    qs = np.arange(q_max + 1, dtype=float)
    p = conditional_total_degree_pdf(qs, theta, params)
    return float(np.sum(qs * p))
