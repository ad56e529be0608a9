"""Lindley's problem: stop on relative ranks Y_j ~ uniform{1..j} to minimise
E[Y_theta (n+1)/(theta+1)], the expected overall rank of the accepted item.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ExtendTableError
from .moser import _check_positive_int
from .poisson import CutoffTable


@dataclass(frozen=True)
class RankDpResult:
    """Backward induction output.

    ``stage_values[j-1]`` is W_j, the optimal expected loss on reaching step j
    before Y_j is seen; ``acceptance[j-1]`` is the largest relative rank
    accepted at step j.
    """

    n: int
    R_n: float
    stage_values: np.ndarray
    acceptance: np.ndarray


@dataclass(frozen=True)
class MemorylessRankRule:
    """``accept_from[r-1]``: first step at which relative rank r is accepted.

    A value of n + 1 means never; every rank is accepted at step n regardless.
    """

    n: int
    accept_from: np.ndarray

    def accepted_upto(self, step: int) -> int:
        """Largest relative rank accepted at ``step`` (0 if none)."""
        if step >= self.n:
            return self.n
        m = int(np.searchsorted(self.accept_from, step, side="right"))
        return min(m, step)


def lindley_values(n: int) -> RankDpResult:
    n = _check_positive_int("n", n)
    W = np.empty(n)
    acc = np.empty(n, dtype=np.int64)
    scale = n + 1
    w_next = scale / 2
    W[n - 1] = w_next
    acc[n - 1] = n
    for j in range(n - 1, 0, -1):
        factor = scale / (j + 1)
        # ranks r with r * factor <= W_{j+1} are accepted
        m = min(j, math.floor(w_next / factor))
        w_next = (factor * m * (m + 1) / 2 + (j - m) * w_next) / j
        W[j - 1] = w_next
        acc[j - 1] = m
    W.flags.writeable = False
    acc.flags.writeable = False
    return RankDpResult(n, float(W[0]), W, acc)


def rule_from_thresholds(n: int, acceptance) -> MemorylessRankRule:
    """Turn per-step largest accepted ranks (nondecreasing) into a rule."""
    acceptance = np.asarray(acceptance)
    ranks = np.arange(1, n + 1)
    # first step j with acceptance[j-1] >= r
    first = np.searchsorted(acceptance[: n - 1], ranks, side="left") + 1
    return MemorylessRankRule(n, np.minimum(first, n))


def optimal_rank_rule(result: RankDpResult) -> MemorylessRankRule:
    return rule_from_thresholds(result.n, result.acceptance)


def constant_rule(n: int, step: int) -> MemorylessRankRule:
    """Stop at ``step`` whatever is observed."""
    return MemorylessRankRule(n, np.full(n, step, dtype=np.int64))


def delta_rank_rule(n: int, table: CutoffTable) -> MemorylessRankRule:
    """Accept relative rank r from step ceil(n e^{-delta_r})."""
    n = _check_positive_int("n", n)
    if table.k_max < n - 1:
        raise ExtendTableError(f"rule for n={n} needs cutoffs up to k={n - 1}, table has {table.k_max}")
    r = n - 1
    first = np.ceil(n * np.exp(-table.delta[:r])).astype(np.int64)
    first = np.clip(first, 1, n)
    return MemorylessRankRule(n, np.append(first, n))


def evaluate_rank_rule(rule: MemorylessRankRule) -> float:
    """Exact expected loss of a memoryless rule with forced stop at step n."""
    n = rule.n
    survive = 1.0
    loss = 0.0
    for j in range(1, n + 1):
        m = rule.accepted_upto(j)
        if m == 0:
            continue
        # mean of r (n+1)/(j+1) over r = 1..m, each with probability 1/j
        loss += survive * (m * (m + 1) / 2) * (n + 1) / ((j + 1) * j)
        survive *= 1.0 - m / j
    return loss


def brute_force_rank_value(n: int) -> Fraction:
    """Minimum exact expected loss over every memoryless rule, found by
    enumerating all acceptance sets per step and all relative-rank sequences.
    Exponential in n; meant for n <= 5.
    """
    n = _check_positive_int("n", n)
    sequences = list(itertools.product(*(range(1, j + 1) for j in range(1, n + 1))))
    weight = Fraction(1, math.factorial(n))
    per_step = [
        [frozenset(c) for size in range(j + 1) for c in itertools.combinations(range(1, j + 1), size)]
        for j in range(1, n)
    ]
    best = None
    for sets in itertools.product(*per_step):
        total = Fraction(0)
        for ys in sequences:
            for j, y in enumerate(ys, start=1):
                if j == n or y in sets[j - 1]:
                    total += Fraction(y * (n + 1), j + 1)
                    break
        value = total * weight
        if best is None or value < best:
            best = value
    return best
