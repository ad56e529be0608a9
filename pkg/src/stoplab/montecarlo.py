"""Seeded Monte Carlo for the stopping problems.

Samples are generated in fixed-size chunks; chunk i of an experiment draws
from a Philox stream keyed by (seed, label, i). Chunk outputs are concatenated
in chunk order before any reduction, so results depend only on the seed and
parameters, never on the number of workers.
"""
from __future__ import annotations

import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from . import poisson
from .discrete import FiniteCutoffRule
from .errors import DomainError
from .lindley import MemorylessRankRule
from .moser import moser_values
from .poisson import CutoffTable

CHUNK = 1 << 16


@dataclass(frozen=True)
class Atom:
    t: float
    x: float


@dataclass(frozen=True)
class SimEstimate:
    mean: float
    stderr: float
    n_samples: int
    seed: int
    label: str

    def zscore(self, reference: float) -> float:
        return (self.mean - reference) / self.stderr if self.stderr > 0 else (
            0.0 if self.mean == reference else math.inf)


@dataclass(frozen=True)
class CutoffStopOutcome:
    stop_time: float
    box: int
    penalised_loss: float | None = None


def stream(seed: int, label: str, index: int = 0) -> np.random.Generator:
    """Counter-based generator for chunk ``index`` of experiment ``label``."""
    key = zlib.crc32(label.encode("utf-8"))
    ss = np.random.SeedSequence(entropy=int(seed) % 2**64, spawn_key=(key, index))
    return np.random.Generator(np.random.Philox(ss))


def run_chunks(label: str, seed: int, reps: int, draw: Callable, workers: int = 1) -> list:
    """Call ``draw(rng, size)`` once per chunk and return outputs in chunk order."""
    if reps < 1:
        raise DomainError(f"reps must be positive, got {reps!r}")
    sizes = [CHUNK] * (reps // CHUNK)
    if reps % CHUNK:
        sizes.append(reps % CHUNK)

    def job(i):
        return draw(stream(seed, label, i), sizes[i])

    if workers <= 1:
        return [job(i) for i in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, range(len(sizes))))


def summarize(samples: np.ndarray, seed: int, label: str) -> SimEstimate:
    n = samples.size
    if n < 2:
        raise DomainError("need at least two samples for a standard error")
    mean = float(np.mean(samples))
    sd = float(np.std(samples, ddof=1))
    return SimEstimate(mean, sd / math.sqrt(n), n, seed, label)


def summarize_variance(samples: np.ndarray, seed: int, label: str) -> SimEstimate:
    """Sample variance with its delta-method standard error sqrt((m4 - s^4)/n)."""
    n = samples.size
    centred = samples - samples.mean()
    var = float(np.sum(centred**2) / (n - 1))
    m4 = float(np.mean(centred**4))
    return SimEstimate(var, math.sqrt(max(m4 - var * var, 0.0) / n), n, seed, label)


def _collect(label, seed, reps, draw, workers):
    parts = run_chunks(label, seed, reps, draw, workers)
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate(cols) for cols in zip(*parts))
    return np.concatenate(parts)


# -- beta strategies -----------------------------------------------------------

def threshold_stops(b: float, T: float, rng: np.random.Generator, size: int):
    """Stop times and accepted values of the beta strategy with coefficient b.

    The stop time is drawn by inverting its survival (1 - t/T)^b; given the
    stop time t the accepted value is uniform on [0, b/(T - t)].
    """
    survival = 1.0 - rng.random(size)  # in (0, 1]
    t = T * (1.0 - survival ** (1.0 / b))
    x = rng.random(size) * b / (T - t)
    return t, x


def sample_threshold_stop(b: float, T: float, seed: int) -> tuple[float, float]:
    if not b > 1 or not T > 0:
        raise DomainError(f"need b > 1 and T > 0, got b={b!r}, T={T!r}")
    t, x = threshold_stops(b, T, stream(seed, "threshold-single"), 1)
    return float(t[0]), float(x[0])


@dataclass(frozen=True)
class ThresholdSimResult:
    value: SimEstimate
    stop_time: SimEstimate
    stop_time_var: SimEstimate
    times: np.ndarray
    values: np.ndarray


def simulate_threshold(b: float, T: float, reps: int, seed: int, workers: int = 1) -> ThresholdSimResult:
    if not b > 1 or not T > 0:
        raise DomainError(f"need b > 1 and T > 0, got b={b!r}, T={T!r}")
    label = f"threshold b={b!r} T={T!r}"
    t, x = _collect(label, seed, reps, lambda rng, size: threshold_stops(b, T, rng, size), workers)
    return ThresholdSimResult(
        value=summarize(x, seed, label + " value"),
        stop_time=summarize(t, seed, label + " time"),
        stop_time_var=summarize_variance(t, seed, label + " time variance"),
        times=t,
        values=x,
    )


# -- integer-loss cutoff rules -------------------------------------------------

class _GrowingTable:
    """Cutoff lookup that deepens itself when a scan runs past the end."""

    def __init__(self, table: CutoffTable):
        self.table = table

    def __getitem__(self, k: int) -> float:
        if k > self.table.k_max:
            self.table = poisson.cutoffs(max(2 * self.table.k_max, k + 1), poisson.DEFAULT_TOL)
        return self.table[k]


def cutoff_stops(table: CutoffTable, T: float, penalised: bool, rng: np.random.Generator, size: int):
    """Stop times and box indices for the optimal integer-loss rule.

    Box k (values in [k, k+1)) receives unit-rate arrivals and becomes
    acceptable at a_k = (T - delta_k)_+, or (T - delta_{k+1})_+ when penalised.
    The scan stops once a_k reaches the earliest candidate found so far.
    """
    lookup = _GrowingTable(table)
    best = np.full(size, np.inf)
    box = np.full(size, -1, dtype=np.int64)
    k = 0
    while True:
        level = k + 1 if penalised else k  # cutoff index governing box k
        a = 0.0 if level == 0 else max(T - lookup[level], 0.0)
        active = np.flatnonzero(a < best)
        if active.size == 0:
            break
        cand = a + rng.standard_exponential(active.size)
        hit = cand < np.minimum(best[active], T)
        best[active[hit]] = cand[hit]
        box[active[hit]] = k
        k += 1
    return best, box


def penalised_loss(T: float, stop_time, box):
    return (np.asarray(box) + 1) * np.exp(T - np.asarray(stop_time))


def sample_cutoff_stop(table: CutoffTable, T: float, penalised: bool, seed: int) -> CutoffStopOutcome:
    T = float(T)
    if not T > 0:
        raise DomainError(f"horizon must be positive, got {T!r}")
    s, k = cutoff_stops(table, T, penalised, stream(seed, "cutoff-single"), 1)
    loss = float(penalised_loss(T, s[0], k[0])) if penalised else None
    return CutoffStopOutcome(float(s[0]), int(k[0]), loss)


def simulate_cutoff(table: CutoffTable, T: float, penalised: bool, reps: int, seed: int,
                    workers: int = 1) -> SimEstimate:
    """Mean loss of the optimal integer-loss rule (penalised: (k+1) e^{T-s})."""
    if not T > 0:
        raise DomainError(f"horizon must be positive, got {T!r}")
    label = f"cutoff T={T!r} penalised={penalised}"
    s, k = _collect(label, seed, reps, lambda rng, size: cutoff_stops(table, T, penalised, rng, size), workers)
    loss = penalised_loss(T, s, k) if penalised else k.astype(float)
    return summarize(loss, seed, label)


# -- discrete-time problems ----------------------------------------------------

def moser_discrete_losses(rule: FiniteCutoffRule, rng: np.random.Generator, size: int) -> np.ndarray:
    """Play floor(N U_j) draws against ``rule``; accept at step n regardless."""
    loss = np.zeros(size)
    alive = np.arange(size)
    af = np.asarray(rule.accept_from)
    for j in range(1, rule.n + 1):
        k = np.floor(rule.N * rng.random(alive.size)).astype(np.int64)
        stop = np.ones(alive.size, dtype=bool) if j == rule.n else af[k] <= j
        loss[alive[stop]] = k[stop]
        alive = alive[~stop]
        if alive.size == 0:
            break
    return loss


def simulate_moser_discrete(rule: FiniteCutoffRule, reps: int, seed: int, workers: int = 1) -> SimEstimate:
    label = f"discrete n={rule.n} N={rule.N}"
    losses = _collect(label, seed, reps, lambda rng, size: moser_discrete_losses(rule, rng, size), workers)
    return summarize(losses, seed, label)


def lindley_losses(rule: MemorylessRankRule, rng: np.random.Generator, size: int) -> np.ndarray:
    """Relative ranks Y_j = floor(j U_j) + 1 played against ``rule``.

    Steps where no rank is acceptable are skipped without drawing.
    """
    n = rule.n
    loss = np.zeros(size)
    alive = np.arange(size)
    for j in range(1, n + 1):
        m = rule.accepted_upto(j)
        if m == 0:
            continue
        y = np.floor(j * rng.random(alive.size)).astype(np.int64) + 1
        stop = y <= m
        loss[alive[stop]] = y[stop] * (n + 1) / (j + 1)
        alive = alive[~stop]
        if alive.size == 0:
            break
    return loss


def simulate_lindley(rule: MemorylessRankRule, reps: int, seed: int, workers: int = 1) -> SimEstimate:
    label = f"lindley n={rule.n}"
    losses = _collect(label, seed, reps, lambda rng, size: lindley_losses(rule, rng, size), workers)
    return summarize(losses, seed, label)


# -- inhomogeneous process -------------------------------------------------------

def sample_inhomogeneous_strip(t_lo: float, t_hi: float, x_max: float, seed: int,
                               rng: np.random.Generator | None = None) -> list[Atom]:
    """Atoms of the rate-1/t process on [t_lo, t_hi] x [0, x_max]."""
    if not t_lo > 0:
        raise DomainError(f"t_lo must be positive (intensity is infinite at 0), got {t_lo!r}")
    if not t_hi > t_lo or not x_max > 0:
        raise DomainError("need t_lo < t_hi and x_max > 0")
    rng = rng or stream(seed, "strip")
    count = rng.poisson(x_max * math.log(t_hi / t_lo))
    times = t_lo * (t_hi / t_lo) ** rng.random(count)
    values = x_max * rng.random(count)
    return [Atom(float(t), float(x)) for t, x in zip(times, values)]


def homogenised(atoms: list[Atom]) -> list[Atom]:
    """Map (t, y) -> (t, y/t), which turns rate 1/t into unit rate."""
    return [Atom(a.t, a.x / a.t) for a in atoms]


# -- convergence of the discrete Moser rule ----------------------------------------

def moser_scaled_stops(n: int, b: float, T: float, rng: np.random.Generator, size: int):
    """(T sigma/n, n U_sigma / T) for the rule with thresholds a_m = (b/2) V_m.

    sigma is drawn by inverting its survival function prod (1 - a_{n-i});
    given sigma = j the accepted draw is uniform on [0, a_{n-j}], or on
    [0, 1] at the forced last step.
    """
    vals = moser_values(n).values
    thresholds = np.minimum((b / 2) * vals[n - 1:0:-1], 1.0)  # steps 1..n-1
    survival = np.cumprod(1.0 - thresholds)  # P(sigma > j), j = 1..n-1
    v = rng.random(size)
    # sigma = first j with P(sigma > j) <= v
    j = np.searchsorted(-survival, -v, side="left") + 1
    cap = np.append(thresholds, 1.0)
    u = rng.random(size) * cap[j - 1]
    return T * j / n, n * u / T


@dataclass(frozen=True)
class KSRow:
    n: int
    ks_time: float
    ks_value: float
    mean_value: float
    mean_value_stderr: float


def ks_convergence_check(n_grid, T: float = 1.0, b: float = 2.0, reps: int = 100_000,
                         seed: int = 0) -> list[KSRow]:
    """KS distances of the scaled stop time and value to their Poisson limits.

    Every n reuses the same random stream, so differences between rows
    reflect n rather than sampling noise.
    """
    rows = []
    for n in n_grid:
        t, x = _collect("moser-ks", seed, reps, lambda rng, size: moser_scaled_stops(n, b, T, rng, size), 1)
        ks_t = stats.kstest(t, lambda s: 1.0 - np.clip(1.0 - s / T, 0, 1) ** b).statistic
        ks_x = stats.kstest(x, lambda s: poisson.stopped_value_cdf(b, np.asarray(s) * T)).statistic
        est = summarize(x, seed, f"moser-ks n={n}")
        rows.append(KSRow(int(n), float(ks_t), float(ks_x), est.mean, est.stderr))
    return rows
