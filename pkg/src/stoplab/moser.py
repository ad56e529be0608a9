"""Moser's problem: accept one of n i.i.d. uniform[0, 1] draws, minimising the
expected accepted value.

The stopping value with n draws to go obeys V_n = V_{n-1} - V_{n-1}**2 / 2 and
the optimal rule accepts draw j iff U_j <= V_{n-j}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

EULER_GAMMA = 0.577215664901533
# direct harmonic summation up to here, asymptotic expansion beyond
HARMONIC_DIRECT_MAX = 10**6


@dataclass(frozen=True)
class ValueSequence:
    """Stopping values V_1..V_{horizon_max}; ``values[0]`` is unused (nan)."""

    horizon_max: int
    values: np.ndarray

    def __getitem__(self, n: int) -> float:
        if not 1 <= n <= self.horizon_max:
            raise IndexError(n)
        return float(self.values[n])

    def __len__(self) -> int:
        return self.horizon_max


@dataclass(frozen=True)
class HarmonicBounds:
    n: int
    lower: float
    upper: float
    harmonic: float

    def contains(self, value: float) -> bool:
        return self.lower <= value < self.upper


@dataclass(frozen=True)
class ThresholdRule:
    """Accept draw j (1-based) iff its value is at most ``thresholds[j-1]``.

    There are n - 1 finite thresholds; the last step accepts anything.
    """

    n: int
    thresholds: tuple[float, ...]

    def threshold(self, step: int) -> float | None:
        """Threshold at ``step``, or None for the forced final step."""
        if not 1 <= step <= self.n:
            raise IndexError(step)
        if step == self.n:
            return None
        return self.thresholds[step - 1]

    def accepts(self, step: int, value: float) -> bool:
        th = self.threshold(step)
        return th is None or value <= th


def _check_positive_int(name: str, n: int) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"{name} must be a positive integer, got {n!r}")
    return int(n)


def moser_recursion(start: float, steps: int) -> np.ndarray:
    """Iterate v -> v - v**2/2 ``steps`` times from ``start`` (returned first)."""
    out = np.empty(steps + 1)
    v = start
    out[0] = v
    for i in range(1, steps + 1):
        v = v - 0.5 * v * v
        out[i] = v
    return out


def moser_values(n_max: int) -> ValueSequence:
    n_max = _check_positive_int("n_max", n_max)
    values = np.empty(n_max + 1)
    values[0] = np.nan  # V_0 is the "accept anything" sentinel, never used in arithmetic
    values[1:] = moser_recursion(0.5, n_max - 1)
    values.flags.writeable = False
    return ValueSequence(n_max, values)


def harmonic_number(n: int) -> float:
    n = _check_positive_int("n", n)
    if n <= HARMONIC_DIRECT_MAX:
        return math.fsum(1.0 / k for k in range(1, n + 1))
    return math.log(n) + EULER_GAMMA + 1.0 / (2 * n)


def moser_bounds(n: int) -> HarmonicBounds:
    n = _check_positive_int("n", n)
    h = harmonic_number(n)
    return HarmonicBounds(n=n, lower=2.0 / (n + h + 2), upper=2.0 / (n + h + 1), harmonic=h)


def moser_rule(n: int) -> ThresholdRule:
    n = _check_positive_int("n", n)
    seq = moser_values(n)
    # step j uses V_{n-j}
    thresholds = tuple(float(seq.values[n - j]) for j in range(1, n))
    return ThresholdRule(n, thresholds)
