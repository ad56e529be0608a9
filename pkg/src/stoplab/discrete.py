"""Stopping i.i.d. draws from the discrete uniform law on {0, ..., N-1}."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .moser import _check_positive_int


@dataclass(frozen=True)
class DiscreteValueTable:
    """V_{n,N} for n = 1..n_max; ``values[0]`` is unused (nan)."""

    N: int
    n_max: int
    values: np.ndarray

    def __getitem__(self, n: int) -> float:
        if not 1 <= n <= self.n_max:
            raise IndexError(n)
        return float(self.values[n])


@dataclass(frozen=True)
class FiniteCutoffRule:
    """``accept_from[k]`` is the first step at which a draw equal to k is accepted.

    Every draw is accepted at step n regardless.
    """

    N: int
    n: int
    accept_from: tuple[int, ...]

    def accepts(self, step: int, k: int) -> bool:
        return step >= self.n or step >= self.accept_from[k]

    def accepted_mask(self, step: int) -> np.ndarray:
        if step >= self.n:
            return np.ones(self.N, dtype=bool)
        return np.asarray(self.accept_from) <= step


def positive_part_sum(v: float, N: int) -> float:
    """sum_{k=0}^{N-1} (v - k)_+ in closed form."""
    if v < 0:
        return 0.0
    m = min(math.floor(v), N - 1)
    return (m + 1) * v - m * (m + 1) / 2


def discrete_values(n_max: int, N: int) -> DiscreteValueTable:
    n_max = _check_positive_int("n_max", n_max)
    N = _check_positive_int("N", N)
    values = np.empty(n_max + 1)
    values[0] = np.nan
    v = (N - 1) / 2
    values[1] = v
    for n in range(2, n_max + 1):
        v = v - positive_part_sum(v, N) / N
        values[n] = v
    values.flags.writeable = False
    return DiscreteValueTable(N, n_max, values)


def value_matrix(N_range: range, n_range: range) -> np.ndarray:
    """matrix[i, j] = V_{n_range[j], N_range[i]}."""
    N_range, n_range = list(N_range), list(n_range)
    if not N_range or not n_range:
        raise DomainError("ranges must be nonempty")
    n_hi = max(n_range)
    out = np.empty((len(N_range), len(n_range)))
    for i, N in enumerate(N_range):
        table = discrete_values(n_hi, N)
        out[i] = [table[n] for n in n_range]
    return out


def shifted_value(n: int, N: int) -> float:
    """Stopping value for the uniform law on {1, ..., N}."""
    return discrete_values(n, N)[n] + 1.0


def finite_cutoff_rule(n: int, N: int, strict: bool = False) -> FiniteCutoffRule:
    """Optimal cutoff rule; ties k == V_{n-j,N} are accepted unless ``strict``."""
    n = _check_positive_int("n", n)
    N = _check_positive_int("N", N)
    table = discrete_values(n, N)
    accept_from = []
    for k in range(N):
        j = 1
        while j < n:
            cont = table[n - j]
            if k < cont or (not strict and k == cont):
                break
            j += 1
        accept_from.append(j)
    return FiniteCutoffRule(N, n, tuple(accept_from))


def evaluate_cutoff_rule(rule: FiniteCutoffRule) -> float:
    """Exact expected loss of a cutoff rule by forward recursion over steps."""
    ks = np.arange(rule.N)
    survive = 1.0
    loss = 0.0
    for j in range(1, rule.n + 1):
        mask = rule.accepted_mask(j)
        loss += survive * ks[mask].sum() / rule.N
        survive *= 1.0 - mask.sum() / rule.N
    return loss
