"""
Special functions used by the closed-form distributions.

Everything here works in log space: unsigned Stirling numbers of the first
kind overflow a double near n = 170 and the Gamma ratios in the degree
distributions do so much earlier, so callers combine logs and exponentiate
last.
"""
import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, ResourceError

__all__ = [
    "LogStirlingRow",
    "log_gamma",
    "stirling1u_exact",
    "log_stirling_row",
    "iter_log_stirling_rows",
    "log_binomial_general",
    "gamma_ratio_sum_rhs",
    "gamma_ratio_weighted_sum_rhs",
    "STIRLING_ROW_CAP",
    "EXACT_STIRLING_CAP",
]

STIRLING_ROW_CAP = 5000
EXACT_STIRLING_CAP = 25

# Lanczos approximation, g = 7, n = 9 (Godfrey's coefficients).
_LANCZOS_G = 7.0
_LANCZOS_COEF = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _log_gamma_lanczos(x):
    # valid for x >= 0.5; x is a float ndarray
    z = x - 1.0
    series = np.full_like(z, _LANCZOS_COEF[0])
    for i in range(1, len(_LANCZOS_COEF)):
        series += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(series)


def log_gamma(x):
    """
    Natural log of the Gamma function for positive real arguments.

    Accepts a scalar or an array; returns the same shape. Arguments below
    one half are shifted up with ``Gamma(x) = Gamma(x + 1) / x`` before the
    Lanczos series is applied.

    Raises
    ------
    DomainError
        If any argument is not strictly positive.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(arr > 0):
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    small = arr < 0.5
    shifted = np.where(small, arr + 1.0, arr)
    out = _log_gamma_lanczos(shifted)
    if np.any(small):
        out = np.where(small, out - np.log(arr), out)
    if out.ndim == 0:
        return float(out)
    return out


@lru_cache(maxsize=None)
def _exact_row(n):
    if n == 0:
        return (1,)
    prev = _exact_row(n - 1)
    m = n - 1
    row = [0] * (n + 1)
    for k in range(1, n + 1):
        left = prev[k - 1]
        right = prev[k] if k <= m else 0
        row[k] = left + m * right
    return tuple(row)


def stirling1u_exact(n, k):
    """Exact unsigned Stirling number of the first kind ``[n, k]`` for n <= 25."""
    if not (0 <= n <= EXACT_STIRLING_CAP):
        raise DomainError(f"n must lie in [0, {EXACT_STIRLING_CAP}], got {n}")
    if not (0 <= k <= n):
        raise DomainError(f"k must lie in [0, n], got k={k}, n={n}")
    return _exact_row(n)[k]


@dataclass(frozen=True)
class LogStirlingRow:
    """Row ``n`` of log unsigned Stirling numbers; ``values[k] = log [n, k]``."""

    n: int
    values: np.ndarray

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return len(self.values)


def _next_log_row(row, n):
    # row holds log [n, k] for k = 0..n; returns log [n+1, k] for k = 0..n+1
    nxt = np.full(n + 2, -np.inf)
    shifted = row + math.log(n) if n > 0 else np.full_like(row, -np.inf)
    # [n+1, k] = [n, k-1] + n [n, k]
    nxt[1:n + 1] = np.logaddexp(row[:n], shifted[1:n + 1])
    nxt[n + 1] = row[n]
    nxt[0] = shifted[0]
    return nxt


def iter_log_stirling_rows(n_max):
    """
    Yield ``LogStirlingRow`` objects for n = 0, 1, ..., n_max.

    Only the active row is retained, so streaming over all rows up to
    ``n_max`` costs O(n_max) memory.
    """
    if n_max > STIRLING_ROW_CAP:
        raise ResourceError(f"Stirling rows capped at n={STIRLING_ROW_CAP}, asked for {n_max}")
    row = np.zeros(1)
    yield LogStirlingRow(0, row)
    for n in range(n_max):
        row = _next_log_row(row, n)
        yield LogStirlingRow(n + 1, row)


class _RowCache:
    """Keeps the highest row computed so far and extends it on demand."""

    def __init__(self):
        self._lock = threading.Lock()
        self._n = 0
        self._row = np.zeros(1)

    def get(self, n):
        with self._lock:
            if n < self._n:
                return _cached_lower_row(n)
            row, m = self._row, self._n
            while m < n:
                row = _next_log_row(row, m)
                m += 1
            self._row, self._n = row, m
            return row


@lru_cache(maxsize=64)
def _cached_lower_row(n):
    for r in iter_log_stirling_rows(n):
        pass
    return r.values


_ROW_CACHE = _RowCache()


def log_stirling_row(n, cap=STIRLING_ROW_CAP):
    """
    Log of row ``n`` of the unsigned Stirling numbers of the first kind.

    Built with the recurrence ``[n+1, k] = [n, k-1] + n [n, k]`` carried out
    with two-term log-sum-exp. ``log 0`` is ``-inf``.
    """
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    if n > cap:
        raise ResourceError(f"Stirling rows capped at n={cap}, asked for {n}")
    values = _ROW_CACHE.get(n).copy()
    values.setflags(write=False)
    return LogStirlingRow(n, values)


def log_binomial_general(a, b):
    """log of Gamma(a+1) / (Gamma(b+1) Gamma(a-b+1)) for real a, b."""
    if not (a + 1 > 0 and b + 1 > 0 and a - b + 1 > 0):
        raise DomainError(f"log_binomial_general needs a+1, b+1, a-b+1 > 0; got a={a}, b={b}")
    return log_gamma(a + 1) - log_gamma(b + 1) - log_gamma(a - b + 1)


def _check_xy(x, y):
    if not x > 1:
        raise DomainError(f"series diverges for x <= 1, got x={x}")
    if not y > 0:
        raise DomainError(f"y must be positive, got y={y}")


def gamma_ratio_sum_rhs(x, y):
    """Closed form of sum_{q>=0} Gamma(q+y) / Gamma(q+x+y) for x > 1, y > 0."""
    _check_xy(x, y)
    return math.exp(log_gamma(y) - log_gamma(y - 1 + x)) / (x - 1)


def gamma_ratio_weighted_sum_rhs(x, y):
    """Closed form of sum_{q>=0} q Gamma(q+y) / Gamma(q+x+y+1) for x > 1, y > 0."""
    _check_xy(x, y)
    # y * Gamma(y) folded into Gamma(y + 1) so small y stays finite
    log_val = log_gamma(y + 1) - log_gamma(x + y - 1)
    return math.exp(log_val) / (x * (x - 1) * (x + y - 1))
