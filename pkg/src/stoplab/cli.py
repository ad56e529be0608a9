"""``stoplab`` command line: tables, curves and simulations as CSV or JSON."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import checks, discrete, lindley, montecarlo, moser, poisson
from .errors import DomainError

DEFAULT_SEED = 0
DEFAULT_DIGITS = 12
COMMANDS = ("values", "matrix", "cutoffs", "curve", "simulate", "lindley", "verify")
CURVES = ("u", "v", "w", "h", "prophet_continuous", "prophet_discrete",
          "u_lower", "u_upper", "w_lower", "w_upper")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    output_format: str = "csv"
    output_path: str | None = None
    digits: int = DEFAULT_DIGITS


def parse_range(text: str, step: float | None = None, integer: bool = True) -> list:
    """Inclusive ``a..b`` (or a single value, or a comma list)."""
    try:
        if ".." in text:
            lo_s, hi_s = text.split("..", 1)
            if integer:
                lo, hi = int(lo_s), int(hi_s)
                stride = int(step) if step else 1
                if stride < 1 or hi < lo:
                    raise ValueError
                return list(range(lo, hi + 1, stride))
            lo, hi = float(lo_s), float(hi_s)
            stride = step if step else 0.01
            if stride <= 0 or hi < lo:
                raise ValueError
            count = int(math.floor((hi - lo) / stride + 1e-9)) + 1
            return [round(lo + i * stride, 12) for i in range(count)]
        conv = int if integer else float
        return [conv(part) for part in text.split(",")]
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected a..b, a value or a comma list") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="output_format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", dest="output_path", default=None, help="file path; default stdout")
    common.add_argument("--digits", type=int, default=DEFAULT_DIGITS, help="significant digits")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)

    parser = argparse.ArgumentParser(prog="stoplab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("values", parents=[common], help="Moser values V_n with harmonic bounds")
    p.add_argument("--n", required=True, help="horizon(s), e.g. 10 or 1..10")
    p.add_argument("--N", default=None, help="also tabulate discrete V_{n,N}")

    p = sub.add_parser("matrix", parents=[common], help="discrete values V_{n,N}")
    p.add_argument("--N", default="2..10")
    p.add_argument("--n", default="1..10")

    p = sub.add_parser("cutoffs", parents=[common], help="cutoff sequence delta_k")
    p.add_argument("--k", type=int, default=11)
    p.add_argument("--tol", type=float, default=poisson.DEFAULT_TOL)

    p = sub.add_parser("curve", parents=[common], help="limit value curves on a grid, or cutoff staircases")
    p.add_argument("--which", default="u,v", help=f"comma list from {', '.join(CURVES)}, or 'steps'")
    p.add_argument("--T", default="0.05..3", help="grid a..b (for h this is forward time t)")
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--k", type=int, default=20, help="staircase depth for --which steps")

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo estimates")
    p.add_argument("--strategy", choices=("beta", "cutoff", "discrete", "lindley"), required=True)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--b", type=float, default=2.0)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--N", type=int, default=10)
    p.add_argument("--reps", type=int, default=100_000)
    p.add_argument("--penalised", action="store_true")
    p.add_argument("--rule", choices=("optimal", "delta"), default="optimal")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("lindley", parents=[common], help="expected-rank values R_n")
    p.add_argument("--n", required=True)
    p.add_argument("--rule", choices=("delta",), default=None)

    p = sub.add_parser("verify", parents=[common], help="run the cross-validation suite")
    p.add_argument("--suite", choices=("all", "fast"), default="all")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    shared = {"command", "output_format", "output_path", "digits", "seed"}
    params = {k: v for k, v in vars(ns).items() if k not in shared}
    if ns.digits < 1:
        raise UsageError("--digits must be positive")
    return RunConfig(ns.command, params, ns.seed, ns.output_format, ns.output_path, ns.digits)


# -- commands ----------------------------------------------------------------------
# each returns (header, rows)

def cmd_values(cfg: RunConfig):
    ns = parse_range(cfg.params["n"])
    if min(ns) < 1:
        raise DomainError("horizons must be positive")
    seq = moser.moser_values(max(ns))
    header = ["n", "V_n", "lower_bound", "upper_bound"]
    N = cfg.params.get("N")
    disc = None
    if N is not None:
        disc = discrete.discrete_values(max(ns), parse_range(N)[0])
        header.append("V_nN")
    rows = []
    for n in ns:
        bounds = moser.moser_bounds(n)
        row = [n, seq[n], bounds.lower, bounds.upper]
        if disc is not None:
            row.append(disc[n])
        rows.append(row)
    return header, rows


def cmd_matrix(cfg: RunConfig):
    Ns = parse_range(cfg.params["N"])
    ns = parse_range(cfg.params["n"])
    mat = discrete.value_matrix(Ns, ns)
    header = ["N"] + [f"n={n}" for n in ns]
    return header, [[N, *row] for N, row in zip(Ns, mat.tolist())]


def cmd_cutoffs(cfg: RunConfig):
    table = poisson.cutoffs(cfg.params["k"], cfg.params["tol"])
    return ["k", "delta_k"], [[k, table[k]] for k in range(1, table.k_max + 1)]


def _curve_value(name: str, x: float, table) -> float:
    if name == "u":
        return poisson.u(x, table)
    if name == "v":
        return poisson.v(x)
    if name == "w":
        return poisson.w(x, table)
    if name == "h":
        return poisson.h(x)
    if name == "prophet_continuous":
        return poisson.prophet_continuous(x)
    if name == "prophet_discrete":
        return poisson.prophet_discrete(x)
    if name == "u_lower":
        return poisson.u_sandwich(x)[0]
    if name == "u_upper":
        return poisson.u_sandwich(x)[1]
    if name == "w_lower":
        return poisson.w_lower_bound(x)
    if name == "w_upper":
        return poisson.w_upper_bound(x)
    raise UsageError(f"unknown curve {name!r}")


def cmd_curve(cfg: RunConfig):
    which = [w.strip() for w in cfg.params["which"].split(",") if w.strip()]
    if which == ["steps"]:
        table = poisson.cutoffs(cfg.params["k"])
        # horizon T = delta_k is where value k starts being accepted
        rows = [[table[k], k + 1] for k in range(1, table.k_max + 1)]
        return ["T", "level"], rows
    bad = [w for w in which if w not in CURVES]
    if bad or not which:
        raise UsageError(f"unknown curve(s) {bad}; choose from {', '.join(CURVES)} or 'steps'")
    grid = parse_range(cfg.params["T"], cfg.params["step"], integer=False)
    if min(grid) <= 0:
        raise DomainError("curve grid must be positive")
    table = poisson.table_for(min(grid))
    rows = [[x, *(_curve_value(w, x, table) for w in which)] for x in grid]
    return ["T", *which], rows


def _sim_row(est: montecarlo.SimEstimate, reference: float):
    return [est.label, est.mean, est.stderr, est.n_samples, est.seed, reference]


def cmd_simulate(cfg: RunConfig):
    p = cfg.params
    seed, reps, workers = cfg.seed, p["reps"], p["workers"]
    header = ["label", "mean", "stderr", "n_samples", "seed", "reference"]
    strategy = p["strategy"]
    if strategy == "beta":
        res = montecarlo.simulate_threshold(p["b"], p["T"], reps, seed, workers)
        mean_t, var_t = poisson.beta_stop_time_moments(p["b"])
        rows = [
            _sim_row(res.value, poisson.beta_mean(p["b"]) / p["T"]),
            _sim_row(res.stop_time, mean_t * p["T"]),
            _sim_row(res.stop_time_var, var_t * p["T"] ** 2),
        ]
    elif strategy == "cutoff":
        table = poisson.table_for(p["T"])
        est = montecarlo.simulate_cutoff(table, p["T"], p["penalised"], reps, seed, workers)
        ref = poisson.w(p["T"], table) if p["penalised"] else poisson.u(p["T"], table)
        rows = [_sim_row(est, ref)]
    elif strategy == "discrete":
        rule = discrete.finite_cutoff_rule(p["n"], p["N"])
        est = montecarlo.simulate_moser_discrete(rule, reps, seed, workers)
        rows = [_sim_row(est, discrete.discrete_values(p["n"], p["N"])[p["n"]])]
    else:
        n = p["n"]
        if p["rule"] == "delta":
            rule = lindley.delta_rank_rule(n, poisson.cutoffs(max(n, 16)))
        else:
            rule = lindley.optimal_rank_rule(lindley.lindley_values(n))
        est = montecarlo.simulate_lindley(rule, reps, seed, workers)
        rows = [_sim_row(est, lindley.evaluate_rank_rule(rule))]
    return header, rows


def cmd_lindley(cfg: RunConfig):
    ns = parse_range(cfg.params["n"])
    header = ["n", "R_n"]
    if cfg.params["rule"] == "delta":
        header.append("delta_rule_loss")
        table = poisson.cutoffs(max(max(ns), 16))
    rows = []
    for n in ns:
        row = [n, lindley.lindley_values(n).R_n]
        if cfg.params["rule"] == "delta":
            row.append(lindley.evaluate_rank_rule(lindley.delta_rank_rule(n, table)))
        rows.append(row)
    return header, rows


def cmd_verify(cfg: RunConfig):
    results = checks.run_suite(cfg.params["suite"], cfg.seed)
    rows = [[r.criterion, r.name, "pass" if r.passed else "FAIL", r.measured, r.expected] for r in results]
    return ["criterion", "check", "status", "measured", "expected"], rows


HANDLERS = {
    "values": cmd_values, "matrix": cmd_matrix, "cutoffs": cmd_cutoffs, "curve": cmd_curve,
    "simulate": cmd_simulate, "lindley": cmd_lindley, "verify": cmd_verify,
}


# -- output ------------------------------------------------------------------------

def _cell(x, digits: int):
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), f".{digits}g")
    return str(x)


def render(header, rows, fmt: str, digits: int) -> str:
    cells = [[_cell(x, digits) for x in row] for row in rows]
    if fmt == "json":
        def jsonable(raw, text):
            if isinstance(raw, (int, np.integer)) and not isinstance(raw, bool):
                return int(raw)
            if isinstance(raw, (float, np.floating)):
                return float(text)
            return text
        objs = [{h: jsonable(raw, text) for h, raw, text in zip(header, row, crow)}
                for row, crow in zip(rows, cells)]
        return json.dumps(objs, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(cells)
    return buf.getvalue()


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        header, rows = HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"stoplab: usage error: {exc}", file=stderr)
        return 2
    except DomainError as exc:
        print(f"stoplab: {exc}", file=stderr)
        return 1
    text = render(header, rows, cfg.output_format, cfg.digits)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if cfg.command == "verify" and any(r[2] != "pass" for r in rows):
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
