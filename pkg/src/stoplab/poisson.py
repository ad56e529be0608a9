"""Closed forms for stopping problems on the unit-rate planar Poisson process.

Horizon T is the remaining time. Quantities covered:

* ``v(T) = 2/T``: continuous uniform loss, optimal beta strategy b = 2;
* beta strategies (hyperbolic threshold b/(T - t)) and their laws;
* ``delta_k``: cutoffs of the integer-loss problem, ``u(T)`` its value;
* ``w(T) = e^T u(T)``: the same problem with loss (floor(x) + 1) e^{T-t};
* ``h(t)``: forward-time value for loss x + 1/t on [0, 1].
"""
from __future__ import annotations

import bisect
import math
import sys
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import DomainError, ExtendTableError
from .moser import _check_positive_int

T0 = math.exp(-math.pi / 2)  # cutoff for h, value e^{pi/2} before it
MIN_TOL = 1e-14
DEFAULT_TOL = 1e-10

_EPS = sys.float_info.epsilon


def _check_horizon(T: float) -> float:
    if not T > 0:
        raise DomainError(f"horizon must be positive, got {T!r}")
    return float(T)


# -- continuous uniform limit ------------------------------------------------

def v(T: float) -> float:
    return 2.0 / _check_horizon(T)


def v_rhs(value: float) -> float:
    """Right-hand side of v' = -v**2/2."""
    return -0.5 * value * value


def beta_threshold(b: float, T: float, t: float) -> float:
    """Acceptance threshold b/(T - t) of the beta strategy at time t < T."""
    if not 0 <= t < T:
        raise DomainError(f"need 0 <= t < T, got t={t!r}, T={T!r}")
    return b / (T - t)


def beta_mean(b: float) -> float:
    """Expected accepted value of the beta strategy with T = 1."""
    if not b > 1:
        raise DomainError(f"expected loss is infinite for b <= 1, got b={b!r}")
    return b * b / (2 * (b - 1))


def continuous_fit_residual(b: float) -> float:
    """b - b**2/(2(b-1)); vanishes only at the optimal coefficient b = 2."""
    return b - beta_mean(b)


def beta_stop_time_cdf(b: float, t: float) -> float:
    if not b > 0:
        raise DomainError(f"b must be positive, got {b!r}")
    if not 0 <= t <= 1:
        raise DomainError(f"t must lie in [0, 1], got {t!r}")
    return 1.0 - (1.0 - t) ** b


def beta_stop_time_moments(b: float) -> tuple[float, float]:
    """Mean and variance of the beta(1, b) stopping time."""
    if not b > 0:
        raise DomainError(f"b must be positive, got {b!r}")
    return 1.0 / (b + 1), b / ((b + 1) ** 2 * (b + 2))


def stopped_value_density(b: float, x: float) -> float:
    """Density of the accepted value: uniform on [0, b], Pareto tail beyond."""
    if not b > 1:
        raise DomainError(f"b must exceed 1, got {b!r}")
    if x < 0:
        raise DomainError(f"x must be nonnegative, got {x!r}")
    if x <= b:
        return 1.0 / (b + 1)
    return (b / x) ** (b + 1) / (b + 1)


def stopped_value_cdf(b: float, x):
    """CDF matching :func:`stopped_value_density`; vectorised over x."""
    if not b > 1:
        raise DomainError(f"b must exceed 1, got {b!r}")
    x = np.asarray(x, dtype=float)
    safe = np.maximum(x, b)
    out = np.where(x <= b, np.clip(x, 0, None) / (b + 1), 1.0 - (b / safe) ** b / (b + 1))
    return out if out.ndim else float(out)


# -- cutoffs -----------------------------------------------------------------

def _term(j):
    """log(1 + 2/j) / (j + 1), the j-th summand of delta_k."""
    return np.log1p(2.0 / j) / (j + 1.0)


def _tail_integral(a: float) -> tuple[float, float]:
    """Integral of the summand over [a, inf), after substituting y = 1/s."""
    val, err = integrate.quad(lambda y: math.log1p(2.0 * y) / (y * (1.0 + y)), 0.0, 1.0 / a,
                              epsabs=0.0, epsrel=1e-13, limit=200)
    return val, err


def _tail_bracket(J: int) -> tuple[float, float]:
    """Midpoint and half-width of an interval containing sum_{j >= J} term(j).

    The summand is convex and decreasing, so the trapezoid rule overestimates
    and the midpoint rule underestimates each unit integral.
    """
    upper, e1 = _tail_integral(J - 0.5)
    lower, e2 = _tail_integral(float(J))
    lower += 0.5 * float(_term(J))
    return 0.5 * (upper + lower), 0.5 * (upper - lower) + e1 + e2


@dataclass(frozen=True)
class CutoffTable:
    """delta_1 > delta_2 > ... > delta_{k_max}; every entry within ``tail_bound``."""

    k_max: int
    delta: np.ndarray  # delta[k - 1] = delta_k
    tail_bound: float

    def __getitem__(self, k: int) -> float:
        if k == 0:
            return math.inf
        if not 1 <= k <= self.k_max:
            raise ExtendTableError(f"cutoff table holds k <= {self.k_max}, asked for {k}")
        return float(self.delta[k - 1])

    def count_above(self, T: float) -> int:
        """Number of tabulated k with delta_k > T."""
        # delta is decreasing; bisect on the negated, increasing sequence
        return bisect.bisect_left(self._neg, -T)

    @property
    def _neg(self) -> list[float]:
        cached = self.__dict__.get("_neg_cache")
        if cached is None:
            cached = (-self.delta).tolist()
            object.__setattr__(self, "_neg_cache", cached)
        return cached


@lru_cache(maxsize=32)
def cutoffs(k_max: int, tol: float = DEFAULT_TOL) -> CutoffTable:
    """delta_k = sum_{j >= k} log(1 + 2/j)/(j + 1) for k = 1..k_max, to within tol."""
    k_max = _check_positive_int("k_max", k_max)
    if not tol >= MIN_TOL:
        raise DomainError(f"tolerance {tol!r} is below attainable precision {MIN_TOL}")
    J = max(k_max + 1, 64)
    while True:
        tail, half_width = _tail_bracket(J)
        if half_width <= tol / 2:
            break
        J *= 2
    terms = _term(np.arange(1, J, dtype=float))
    # suffix sums from the small end, Neumaier-compensated
    delta = np.empty(J - 1)
    s, c = tail, 0.0
    for i in range(J - 2, -1, -1):
        x = terms[i]
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
        delta[i] = s + c
    # float roundoff of the summands and of the compensated sum
    rounding = 8 * _EPS * delta[0]
    out = delta[:k_max].copy()
    out.flags.writeable = False
    return CutoffTable(k_max, out, half_width + rounding)


def cutoffs_by_recursion(delta_1: float, k_max: int) -> np.ndarray:
    """delta_{k+1} = delta_k - log(1 + 2/k)/(k + 1) started from delta_1."""
    out = np.empty(k_max)
    out[0] = delta_1
    for k in range(1, k_max):
        out[k] = out[k - 1] - float(_term(k))
    return out


def exp_cutoff_by_product(k: int, n_factors: int = 100_000) -> tuple[float, float]:
    """e^{delta_k} from the infinite product of (1 + 2/j)^{1/(j+1)}, j >= k.

    Returns the value and an error bound. The product is truncated after
    ``n_factors`` factors and the remaining factor is bracketed by integrals.
    """
    k = _check_positive_int("k", k)
    prod = 1.0
    for j in range(k, k + n_factors):
        prod *= (1.0 + 2.0 / j) ** (1.0 / (j + 1))
    tail, half_width = _tail_bracket(k + n_factors)
    value = prod * math.exp(tail)
    return value, value * (half_width + 4 * n_factors * _EPS)


@lru_cache(maxsize=1)
def default_cutoffs() -> CutoffTable:
    return cutoffs(2000, DEFAULT_TOL)


def table_for(T: float, tol: float = DEFAULT_TOL) -> CutoffTable:
    """A table deep enough to evaluate u and w at horizon T."""
    T = _check_horizon(T)
    need = math.ceil(2.0 / T) + 1
    if need <= 2000 and tol == DEFAULT_TOL:
        return default_cutoffs()
    return cutoffs(max(need, 16), tol)


# -- integer-loss value functions ---------------------------------------------

def _bracket(T: float, table: CutoffTable) -> int:
    """k with delta_{k+1} <= T < delta_k (k = 0 means T >= delta_1)."""
    k = table.count_above(T)
    if k >= table.k_max:
        raise ExtendTableError(
            f"horizon {T!r} lies below delta_{table.k_max}; extend the cutoff table"
        )
    return k


def u(T: float, table: CutoffTable | None = None) -> float:
    """Limit value of stopping with integer loss floor(x)."""
    T = _check_horizon(T)
    table = table or table_for(T)
    k = _bracket(T, table)
    if k == 0:
        return math.exp(table[1] - T)
    return 0.5 * k * (math.exp((k + 1) * (table[k] - T)) + 1.0)


def u_rhs(value: float) -> float:
    """-sum_{j >= 0} (value - j)_+, the right-hand side of the ODE for u."""
    if value < 0:
        return 0.0
    m = math.floor(value)
    return -((m + 1) * value - m * (m + 1) / 2)


def w(T: float, table: CutoffTable | None = None) -> float:
    """Value with penalised loss (floor(x) + 1) e^{T-t}; equals e^T u(T)."""
    return math.exp(T) * u(T, table)


def w_rhs(T: float, value: float) -> float:
    """-sum_{j >= 1} (value - e^T j)_+."""
    scale = math.exp(T)
    m = math.floor(value / scale)
    if m < 1:
        return 0.0
    return -(m * value - scale * m * (m + 1) / 2)


def w_lower_bound(T: float) -> float:
    """2/(1 - e^{-T}), the value of the homogeneous relaxation."""
    T = _check_horizon(T)
    return 2.0 / -math.expm1(-T)


def w_upper_bound(T: float) -> float:
    """e^T tan((pi - T)/2), i.e. h(e^{-T}); defined for T < pi/2."""
    T = _check_horizon(T)
    if not T < math.pi / 2:
        raise DomainError(f"upper bound needs T < pi/2, got {T!r}")
    return h(inverse_time_change(T))


def u_sandwich(T: float) -> tuple[float, float]:
    """(2/T - 1)_+ and 2/T."""
    T = _check_horizon(T)
    return max(2.0 / T - 1.0, 0.0), 2.0 / T


def acceptance_level(T: float, table: CutoffTable | None = None) -> int:
    """Number of integer values accepted with horizon T left, i.e. 1 + #{k: delta_k >= T}."""
    T = _check_horizon(T)
    table = table or table_for(T)
    k = bisect.bisect_right(table._neg, -T)
    if k >= table.k_max:
        raise ExtendTableError(f"horizon {T!r} lies below delta_{table.k_max}")
    return k + 1


# -- forward-time upper bound ------------------------------------------------

def h(t: float) -> float:
    """Value of loss x + 1/t on the unit-rate process over forward time [t, 1]."""
    if not 0 < t < 1:
        raise DomainError(f"t must lie in (0, 1), got {t!r}")
    if t < T0:
        return math.exp(math.pi / 2)
    return math.tan((math.pi + math.log(t)) / 2) / t


def h_rhs(t: float, value: float) -> float:
    return value * value / 2 + 1 / (2 * t * t) - value / t


# -- prophet benchmarks and time change ----------------------------------------

def prophet_continuous(T: float) -> float:
    return 1.0 / _check_horizon(T)


def prophet_discrete(T: float) -> float:
    return 1.0 / math.expm1(_check_horizon(T))


def prophet_crossing(lo: float = 1.0, hi: float = 3.0, xtol: float = 1e-12) -> float:
    """Horizon where 1/(e^T - 1) meets 2/T - 1, found by bisection."""
    def gap(T):
        return prophet_discrete(T) - (2.0 / T - 1.0)

    glo, ghi = gap(lo), gap(hi)
    if glo * ghi > 0:
        raise DomainError("crossing is not bracketed")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        gm = gap(mid)
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def time_change(t: float) -> float:
    """Forward time t in (0, 1] to logarithmic horizon T = -log t."""
    if not 0 < t <= 1:
        raise DomainError(f"t must lie in (0, 1], got {t!r}")
    return -math.log(t)


def inverse_time_change(T: float) -> float:
    if not T >= 0:
        raise DomainError(f"T must be nonnegative, got {T!r}")
    return math.exp(-T)
