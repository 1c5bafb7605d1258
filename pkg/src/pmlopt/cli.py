"""Command-line interface: ``pmlopt design | evaluate | compare | simulate``.

Exit codes: 0 on success, 2 for invalid input, 3 when the requested design
method does not apply.  Set ``PMLOPT_LOG_LEVEL`` (e.g. ``DEBUG``) for logs on
stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .core import DesignReport, Mechanism, Prior, make_mechanism, make_prior
from .design import AUTO, design
from .errors import MethodPrecondition, PMLError
from .experiments import (DEFAULT_TAIL, ESTIMATORS, METHODS, CompareRow, SimulationConfig, SimulationRow, compare,
                          compare_csv, exp_grid, resolve_eps, simulate, simulation_csv, step_grid)
from .leakage import epsilon_m, max_zeros_per_column, pml_per_outcome, region_table, satisfies, zeros_per_column
from .utility import mechanism_utility, mi_utility, tv_utility

log = logging.getLogger("pmlopt")

EXIT_INPUT = 2
EXIT_PRECONDITION = 3
FILE_TOL = 1e-9
UNITS = {"nats": 1.0, "bits": 1.0 / math.log(2.0)}


def parse_prior(text: str) -> Prior:
    try:
        values = [float(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise PMLError(f"cannot parse prior {text!r}: {exc}") from None
    return make_prior(values)


def load_mechanism(path: str | Path) -> tuple[Mechanism, Prior | None]:
    """Read a mechanism from JSON or CSV; JSON design reports also yield their prior.

    JSON may be a bare row-major array, ``{"matrix": [...]}`` or a design
    report with a ``mechanism`` field.  CSV holds one matrix row per line; a
    non-numeric first line is taken as a header.
    """
    path = Path(path)
    text = path.read_text()
    prior = None
    if path.suffix.lower() == ".json" or text.lstrip().startswith(("[", "{")):
        data = json.loads(text)
        if isinstance(data, dict) and "mechanism" in data:
            prior = make_prior(data["prior"]["probs"]) if "prior" in data else None
            data = data["mechanism"]
        matrix = data["matrix"] if isinstance(data, dict) else data
    else:
        rows = [r for r in csv.reader(text.splitlines()) if r and any(c.strip() for c in r)]
        try:
            float(rows[0][0])
        except (ValueError, IndexError):
            rows = rows[1:]
        try:
            matrix = [[float(c) for c in r] for r in rows]
        except ValueError as exc:
            raise PMLError(f"non-numeric entry in {path}: {exc}") from None
        if len({len(r) for r in matrix}) > 1:
            raise PMLError(f"ragged matrix in {path}")
    return make_mechanism(matrix, tol=FILE_TOL), prior


def cmd_design(prior: Prior, eps: float, method: str = AUTO, utility: str = "mi") -> DesignReport:
    return design(prior, eps, method, utility)


def cmd_evaluate(mech: Mechanism, prior: Prior, eps: float | None = None) -> dict[str, Any]:
    """Leakage audit of ``mech`` under ``prior`` (all values in nats)."""
    if mech.n_inputs != prior.n:
        raise PMLError(f"mechanism has {mech.n_inputs} rows but prior has {prior.n} symbols")
    eps_m = epsilon_m(mech, prior)
    per = pml_per_outcome(mech, prior)
    mass = prior.probs @ mech.matrix
    zeros = zeros_per_column(mech)
    limit = max_zeros_per_column(prior, eps_m)
    table = region_table(prior)
    out: dict[str, Any] = {
        "pml_per_outcome": [None if math.isnan(v) else float(v) for v in per],
        "epsilon_m": eps_m,
        "eps_max": prior.eps_max,
        "region": table.region_of(eps_m),
        "region_boundaries": list(table.boundaries),
        "zeros_per_column": [int(z) for z in zeros],
        "max_zeros_allowed": limit,
        "zero_limit_respected": bool(all(z <= limit for z, m in zip(zeros, mass) if m > 0)),
        "utility": {"mi": mechanism_utility(mi_utility(prior), mech),
                    "tv": mechanism_utility(tv_utility(prior), mech)},
    }
    if eps is not None:
        out["eps"] = eps
        out["satisfies"] = satisfies(mech, prior, eps)
    return out


def cmd_compare(prior: Prior, grid: Sequence[float], utility: str = "mi") -> list[CompareRow]:
    return compare(prior, grid, utility)


def cmd_simulate(config: SimulationConfig) -> list[SimulationRow]:
    return simulate(config)


def _eps_from_args(prior: Prior, args: argparse.Namespace) -> float:
    if args.eps_frac is not None:
        return args.eps_frac * prior.eps_max
    return float(args.eps_nats)


def _convert_report(d: dict[str, Any], scale: float, units: str) -> dict[str, Any]:
    for key in ("epsilon_requested", "epsilon_achieved", "utility"):
        d[key] *= scale
    d["units"] = units
    return d


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _run_design(args: argparse.Namespace) -> int:
    prior = parse_prior(args.prior)
    report = cmd_design(prior, _eps_from_args(prior, args), args.method, args.utility)
    data = _convert_report(report.to_dict(), UNITS[args.units], args.units)
    _emit(json.dumps(data, indent=2) + "\n", args.output)
    return 0


def _run_evaluate(args: argparse.Namespace) -> int:
    mech, file_prior = load_mechanism(args.mechanism)
    if args.prior:
        prior = parse_prior(args.prior)
    elif file_prior is not None:
        prior = file_prior
    else:
        raise PMLError("--prior is required unless the file is a design report")
    out = cmd_evaluate(mech, prior, args.eps)
    scale = UNITS[args.units]
    out["pml_per_outcome"] = [None if v is None else v * scale for v in out["pml_per_outcome"]]
    out["epsilon_m"] *= scale
    out["eps_max"] *= scale
    out["region_boundaries"] = [b * scale for b in out["region_boundaries"]]
    out["utility"] = {k: v * scale for k, v in out["utility"].items()}
    out["units"] = args.units
    _emit(json.dumps(out, indent=2) + "\n", args.output)
    return 0


def _grid_from_args(prior: Prior, args: argparse.Namespace) -> np.ndarray:
    if args.step is not None:
        start = resolve_eps(prior, args.start)
        stop = resolve_eps(prior, args.stop)
        return step_grid(prior, start, stop, args.step)
    return exp_grid(prior, args.points, args.tail)


def _run_compare(args: argparse.Namespace) -> int:
    prior = parse_prior(args.prior)
    rows = cmd_compare(prior, _grid_from_args(prior, args), args.utility)
    _emit(compare_csv(rows, UNITS[args.units]), args.output)
    return 0


def _split(text: str | Sequence[str]) -> tuple[str, ...]:
    if isinstance(text, str):
        return tuple(s.strip() for s in text.split(",") if s.strip())
    return tuple(text)


def build_config(args: argparse.Namespace) -> SimulationConfig:
    """Merge an optional JSON config file with command-line flags (flags win)."""
    conf: dict[str, Any] = {}
    if args.config:
        conf = json.loads(Path(args.config).read_text())
        if not isinstance(conf, dict):
            raise PMLError("config file must hold a JSON object")
    for key in ("prior", "start", "stop", "step", "n", "trials", "seed", "estimators", "methods"):
        value = getattr(args, key)
        if value is not None:
            conf[key] = value
    if "prior" not in conf:
        raise PMLError("a prior is required (--prior or config file)")
    p = conf["prior"]
    prior = parse_prior(p) if isinstance(p, str) else make_prior(p)
    start = resolve_eps(prior, conf.get("start", 0.0))
    stop = resolve_eps(prior, conf.get("stop", "eps_max"))
    grid = step_grid(prior, start, stop, float(conf.get("step", 0.005)))
    return SimulationConfig(
        prior=prior,
        grid=tuple(float(e) for e in grid),
        n=int(conf.get("n", 1000)),
        trials=int(conf.get("trials", 10)),
        seed=int(conf.get("seed", 0)),
        estimators=_split(conf.get("estimators", ESTIMATORS)),
        methods=_split(conf.get("methods", METHODS)),
    )


def _run_simulate(args: argparse.Namespace) -> int:
    config = build_config(args)
    log.info("simulating %d eps values x %d trials, n = %d", len(config.grid), config.trials, config.n)
    _emit(simulation_csv(cmd_simulate(config)), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pmlopt", description="Design and audit PML-constrained mechanisms.")
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", help="design an optimal eps-PML mechanism (JSON)")
    d.add_argument("--prior", required=True, help="comma-separated probabilities")
    g = d.add_mutually_exclusive_group(required=True)
    g.add_argument("--eps-nats", type=float, help="leakage bound in nats")
    g.add_argument("--eps-frac", type=float, help="leakage bound as a fraction of eps_max")
    d.add_argument("--method", default=AUTO, choices=[AUTO, "binary", "high_privacy", "uniform", "lp", "oracle"])
    d.add_argument("--utility", default="mi", choices=["mi", "tv"])
    d.add_argument("--units", default="nats", choices=list(UNITS))
    d.add_argument("--output", help="write to file instead of stdout")
    d.set_defaults(run=_run_design)

    e = sub.add_parser("evaluate", help="audit the leakage of a mechanism file (JSON)")
    e.add_argument("mechanism", help="mechanism as JSON (row-major) or CSV")
    e.add_argument("--prior", help="comma-separated probabilities")
    e.add_argument("--eps", type=float, help="also check eps-PML at this level (nats)")
    e.add_argument("--units", default="nats", choices=list(UNITS))
    e.add_argument("--output")
    e.set_defaults(run=_run_evaluate)

    c = sub.add_parser("compare", help="optimal vs calibrated randomized response utility (CSV)")
    c.add_argument("--prior", required=True)
    c.add_argument("--utility", default="mi", choices=["mi", "tv"])
    c.add_argument("--points", type=int, default=101, help="grid size, e^eps evenly spaced (default 101)")
    c.add_argument("--tail", type=float, default=DEFAULT_TAIL, help="gap between last point and eps_max")
    c.add_argument("--start", default="0", help="with --step: first eps (nats, eps_max or eps_k)")
    c.add_argument("--stop", default="eps_max", help="with --step: last eps, inclusive below eps_max")
    c.add_argument("--step", type=float, help="use an evenly spaced eps grid with this step")
    c.add_argument("--units", default="nats", choices=list(UNITS))
    c.add_argument("--output")
    c.set_defaults(run=_run_compare)

    s = sub.add_parser("simulate", help="synthetic-data experiment with empirical estimators (CSV)")
    s.add_argument("--config", help="JSON file with any of the fields below")
    s.add_argument("--prior")
    s.add_argument("--start", help="first eps (nats, eps_max or eps_k); default 0")
    s.add_argument("--stop", help="last eps; default eps_max (excluded)")
    s.add_argument("--step", type=float, help="grid step in nats; default 0.005")
    s.add_argument("--n", type=int, help="samples per trial; default 1000")
    s.add_argument("--trials", type=int, help="default 10")
    s.add_argument("--seed", type=int, help="default 0")
    s.add_argument("--estimators", help=f"comma-separated subset of {','.join(ESTIMATORS)}")
    s.add_argument("--methods", help=f"comma-separated subset of {','.join(METHODS)}")
    s.add_argument("--output")
    s.set_defaults(run=_run_simulate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    level = getattr(logging, os.environ.get("PMLOPT_LOG_LEVEL", "WARNING").upper(), logging.WARNING)
    logging.basicConfig(level=level if isinstance(level, int) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except MethodPrecondition as exc:
        print(f"pmlopt: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except BrokenPipeError:
        # downstream reader closed early (e.g. ``| head``)
        sys.stderr.close()
        return 0
    except (PMLError, ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"pmlopt: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
