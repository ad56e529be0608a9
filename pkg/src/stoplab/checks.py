"""Cross-validation suite behind ``stoplab verify``.

Every check returns :class:`CheckResult` rows with the measured quantity next
to what it is compared against. Nothing here reads the clock, so reports are
reproducible byte for byte.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import discrete, lindley, montecarlo, moser, poisson

# printed value table, rows N = 2..10, columns n = 1..10 (two decimals, truncated)
REFERENCE_MATRIX = np.array([
    [0.50, 0.25, 0.12, 0.06, 0.03, 0.01, 0.00, 0.00, 0.00, 0.00],
    [1.00, 0.66, 0.44, 0.29, 0.19, 0.13, 0.08, 0.05, 0.03, 0.02],
    [1.50, 1.00, 0.75, 0.56, 0.42, 0.31, 0.23, 0.17, 0.13, 0.10],
    [2.00, 1.40, 1.04, 0.82, 0.65, 0.52, 0.42, 0.33, 0.27, 0.21],
    [2.50, 1.75, 1.33, 1.05, 0.87, 0.72, 0.60, 0.50, 0.41, 0.34],
    [3.00, 2.14, 1.65, 1.32, 1.08, 0.92, 0.78, 0.67, 0.57, 0.49],
    [3.50, 2.50, 1.93, 1.57, 1.30, 1.10, 0.95, 0.83, 0.73, 0.63],
    [4.00, 2.88, 2.25, 1.83, 1.54, 1.31, 1.13, 0.99, 0.88, 0.78],
    [4.50, 3.25, 2.55, 2.08, 1.75, 1.50, 1.30, 1.14, 1.01, 0.91],
])
REFERENCE_DIAGONAL = {11: 0.94, 12: 0.97, 13: 0.99, 14: 1.01, 15: 1.03, 16: 1.05, 17: 1.07}
REFERENCE_CUTOFFS = (1.353, 0.803, 0.572, 0.445, 0.363, 0.303, 0.266, 0.235, 0.210, 0.190, 0.173)
MATRIX_TOL = 0.011
CUTOFF_TOL = 5e-4
Z_LIMIT = 4.0
MC_REPS = 10**6
KS_REPS = 10**5


@dataclass(frozen=True)
class CheckResult:
    criterion: str
    name: str
    passed: bool
    measured: str
    expected: str


def _fmt(x, digits: int = 12) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float | np.floating):
        return format(float(x), f".{digits}g")
    if isinstance(x, (list, tuple)):
        return " ".join(_fmt(v, digits) for v in x)
    return str(x)


def _row(criterion, name, passed, measured, expected) -> CheckResult:
    return CheckResult(criterion, name, bool(passed), _fmt(measured), _fmt(expected))


def _mc_row(criterion, name, est: montecarlo.SimEstimate, reference: float) -> CheckResult:
    z = est.zscore(reference)
    return _row(criterion, name, abs(z) <= Z_LIMIT, f"{_fmt(est.mean)} (z={z:+.3f})",
                f"{_fmt(reference)} within {Z_LIMIT:g} stderr")


def moser_limit() -> list[CheckResult]:
    seq = moser.moser_values(10**4)
    scaled = [n * seq[n] for n in (10, 100, 1000, 10**4)]
    return [
        _row("1", "n*V_n at n=1e4 in [1.99, 2]", 1.99 <= scaled[-1] <= 2.0, scaled[-1], "[1.99, 2]"),
        _row("1", "n*V_n increasing along 10..1e4", all(np.diff(scaled) > 0), scaled, "increasing"),
    ]


def value_matrix() -> list[CheckResult]:
    mat = discrete.value_matrix(range(2, 11), range(1, 11))
    dev = float(np.max(np.abs(mat - REFERENCE_MATRIX)))
    diag = [discrete.discrete_values(n, n)[n] for n in REFERENCE_DIAGONAL]
    ddev = max(abs(d - r) for d, r in zip(diag, REFERENCE_DIAGONAL.values()))
    return [
        _row("2", "matrix N=2..10 x n=1..10 max deviation", dev <= MATRIX_TOL, dev, f"<= {MATRIX_TOL}"),
        _row("2", "diagonal V_{n,n}, n=11..17 max deviation", ddev <= MATRIX_TOL, ddev, f"<= {MATRIX_TOL}"),
    ]


def cutoff_values() -> list[CheckResult]:
    table = poisson.cutoffs(1000, 1e-12)
    first = table.delta[: len(REFERENCE_CUTOFFS)]
    dev = np.abs(first - np.array(REFERENCE_CUTOFFS))
    k = np.arange(1, 1001)
    kd = k * table.delta
    bounds_ok = bool(np.all(kd < 2) and np.all(kd > 2 - 2 / (k + 1)))
    resid = np.abs(np.diff(table.delta) + np.log1p(2.0 / k[:-1]) / (k[:-1] + 1))
    worst = int(np.argmax(dev)) + 1
    return [
        _row("3", f"delta_1..11 max deviation from table (worst k={worst})", float(dev.max()) <= CUTOFF_TOL,
             float(dev.max()), f"<= {CUTOFF_TOL}"),
        _row("3", "2-2/(k+1) < k*delta_k < 2 for k<=1000", bounds_ok,
             f"min gap {_fmt(float(min((kd - (2 - 2 / (k + 1))).min(), (2 - kd).min())))}", "> 0"),
        _row("3", "cutoff recursion residual", float(resid.max()) < 1e-9, float(resid.max()), "< 1e-9"),
    ]


def limit_values() -> list[CheckResult]:
    table = poisson.default_cutoffs()
    u1 = poisson.u(1.0, table)
    cmrs = math.exp(table[1])
    peak = poisson.h(poisson.T0)
    return [
        _row("4", "u(1)", abs(u1 - 1.513) <= 1e-3, u1, "1.513 +- 0.001"),
        _row("4", "exp(delta_1)", abs(cmrs - 3.869) <= 1e-3, cmrs, "3.869 +- 0.001"),
        _row("4", "h(t0) = exp(pi/2)", abs(peak - 4.8104773) < 1e-7, peak, "4.8104773"),
        _row("4", "t0 = exp(-pi/2)", abs(poisson.T0 - 0.2078796) < 1e-7, poisson.T0, "0.2078796"),
    ]


def _fd(f: Callable[[float], float], x: float, step: float = 1e-6) -> float:
    return (f(x + step) - f(x - step)) / (2 * step)


def ode_residuals() -> list[CheckResult]:
    table = poisson.default_cutoffs()
    breaks = table.delta[:100]

    def off_breaks(grid):
        return [T for T in grid if np.min(np.abs(breaks - T)) > 1e-4]

    Tgrid = off_breaks(np.round(np.arange(0.05, 3.0001, 0.01), 10))
    ures = max(abs(_fd(lambda T: poisson.u(T, table), T) - poisson.u_rhs(poisson.u(T, table))) for T in Tgrid)
    wres = max(abs(_fd(lambda T: poisson.w(T, table), T) - poisson.w_rhs(T, poisson.w(T, table))) for T in Tgrid)
    tgrid = [t for t in np.round(np.arange(0.21, 0.99, 0.01), 10)]
    hres = max(abs(_fd(poisson.h, t) - poisson.h_rhs(t, poisson.h(t))) for t in tgrid)
    step = 1e-6
    fit = []
    for k in range(1, 6):
        d = table[k]
        right = (poisson.u(d + step, table) - poisson.u(d, table)) / step
        left = (poisson.u(d, table) - poisson.u(d - step, table)) / step
        fit.append(abs(right - left))
    return [
        _row("5", "u ODE residual", ures < 1e-4, ures, "< 1e-4"),
        _row("5", "h ODE residual", hres < 1e-4, hres, "< 1e-4"),
        _row("5", "w ODE residual", wres < 1e-4, wres, "< 1e-4"),
        _row("5", "smooth fit of u at delta_1..5", max(fit) < 1e-3, max(fit), "< 1e-3"),
    ]


def beta_laws(seed: int = 0, reps: int = MC_REPS) -> list[CheckResult]:
    grid = np.round(np.arange(1.1, 5.0 + 5e-4, 0.001), 6)
    means = np.array([poisson.beta_mean(b) for b in grid])
    b_star = float(grid[np.argmin(means)])
    sim = montecarlo.simulate_threshold(2.0, 1.0, reps, seed)
    mean_t, var_t = poisson.beta_stop_time_moments(2.0)
    return [
        _row("6", "argmin of b^2/(2(b-1)) on [1.1, 5]", abs(b_star - 2) <= 1e-3, b_star, "2.000 +- 0.001"),
        _mc_row("6", "beta_2 mean value", sim.value, 2.0),
        _mc_row("6", "beta_2 mean stop time", sim.stop_time, mean_t),
        _mc_row("6", "beta_2 stop time variance", sim.stop_time_var, var_t),
    ]


def cutoff_rule_simulation(seed: int = 0, reps: int = MC_REPS) -> list[CheckResult]:
    table = poisson.default_cutoffs()
    plain = montecarlo.simulate_cutoff(table, 1.0, False, reps, seed)
    pen = montecarlo.simulate_cutoff(table, 2.0, True, reps, seed)
    return [
        _mc_row("7", "cutoff rule loss at T=1 vs u(1)", plain, poisson.u(1.0, table)),
        _mc_row("7", "penalised loss at T=2 vs exp(delta_1)", pen, math.exp(table[1])),
    ]


def lindley_checks() -> list[CheckResult]:
    exact = {1: 1.0, 2: 1.5, 3: 5 / 3}
    dev = max(abs(lindley.lindley_values(n).R_n - r) for n, r in exact.items())
    grid = [2**i for i in range(18)]  # up to 131072 > 1e5
    grid = [n for n in grid if n <= 10**5] + [10**5]
    rs = [lindley.lindley_values(n).R_n for n in grid]
    increasing = all(np.diff(rs) > 0)
    bounded = max(rs) < 3.8695
    n = 10**4
    rn = lindley.lindley_values(n).R_n
    rule_loss = lindley.evaluate_rank_rule(lindley.delta_rank_rule(n, poisson.cutoffs(n)))
    brute = max(abs(float(lindley.brute_force_rank_value(m)) - lindley.lindley_values(m).R_n) for m in range(1, 6))
    return [
        _row("8", "R_1, R_2, R_3 exact", dev <= 1e-12, dev, "<= 1e-12"),
        _row("8", "R_n increasing along doubling n to 1e5", increasing, rs[-1], "increasing"),
        _row("8", "R_n < 3.8695 throughout", bounded, max(rs), "< 3.8695"),
        _row("8", "delta rule loss at n=1e4 minus R_n", 0 <= rule_loss - rn <= 0.05, rule_loss - rn, "[0, 0.05]"),
        _row("8", "brute force vs DP, n<=5", brute <= 1e-12, brute, "<= 1e-12"),
    ]


def sandwiches() -> list[CheckResult]:
    table = poisson.default_cutoffs()
    Ts = np.round(np.arange(1, 501) * 0.01, 10)
    u_ok = all(poisson.u_sandwich(T)[0] <= poisson.u(T, table) <= poisson.u_sandwich(T)[1] for T in Ts)
    Ws = np.round(np.arange(2, 155) * 0.01, 10)
    w_ok = all(poisson.w_lower_bound(T) < poisson.w(T, table) < poisson.w_upper_bound(T) for T in Ws)
    cross = poisson.prophet_crossing()
    return [
        _row("9", "(2/T-1)_+ <= u(T) <= 2/T on 0.01-grid of (0, 5]", u_ok, u_ok, "true"),
        _row("9", "2/(1-e^-T) < w(T) < e^T tan((pi-T)/2) on (0.01, 1.55)", w_ok, w_ok, "true"),
        _row("9", "prophet crossing", abs(cross - 1.594) <= 1e-3, cross, "1.594 +- 0.001"),
    ]


def moser_convergence(seed: int = 0, reps: int = KS_REPS) -> list[CheckResult]:
    rows = montecarlo.ks_convergence_check([100, 1000, 10**4], T=1.0, b=2.0, reps=reps, seed=seed)
    kt = [r.ks_time for r in rows]
    kx = [r.ks_value for r in rows]
    last = rows[-1]
    return [
        _row("10", "KS(stop time) strictly decreasing in n", all(np.diff(kt) < 0), kt, "decreasing"),
        _row("10", "KS(value) strictly decreasing in n", all(np.diff(kx) < 0), kx, "decreasing"),
        _row("10", "mean scaled value at n=1e4", abs(last.mean_value - 2) <= 0.05, last.mean_value, "2 +- 0.05"),
    ]


def worker_independence(seed: int = 0, reps: int = 200_000) -> list[CheckResult]:
    table = poisson.default_cutoffs()
    one = montecarlo.simulate_cutoff(table, 1.0, False, reps, seed, workers=1)
    many = montecarlo.simulate_cutoff(table, 1.0, False, reps, seed, workers=4)
    same = (one.mean, one.stderr) == (many.mean, many.stderr)
    return [_row("11", "seeded estimate identical for 1 and 4 workers", same, same, "true")]


FAST = (moser_limit, value_matrix, cutoff_values, limit_values, ode_residuals, lindley_checks, sandwiches)
SEEDED = (beta_laws, cutoff_rule_simulation, moser_convergence, worker_independence)


def run_suite(suite: str = "all", seed: int = 0) -> list[CheckResult]:
    rows: list[CheckResult] = []
    for check in FAST:
        rows.extend(check())
    if suite == "all":
        for check in SEEDED:
            rows.extend(check(seed=seed))
    elif suite != "fast":
        raise ValueError(f"unknown suite {suite!r}")
    return rows
