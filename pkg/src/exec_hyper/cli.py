"""Command-line front end.

Usage:
    exec-hyper solve --k 0.5                  # JSON solve report
    exec-hyper trajectory --k 0.5 --n-samples 101
    exec-hyper sweep-k --k-list 0.125,0.5,2,8
    exec-hyper shoot-plot --k 0.5             # data behind the v0 root plot
    exec-hyper verify --k 1                   # oracle residuals, nonzero exit on failure

Parameters default to the unit example (lambda = sigma = eta = X = T = 1,
k = 1/2, gamma = 0). ``--config file.json`` supplies values which flags then
override. ``EXEC_HYPER_LOG`` (quiet, info, debug) sets stderr verbosity.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from . import solver, verify
from .errors import ExecHyperError, NoRootError, ValidationError
from .model import ModelParams, legendre_check

log = logging.getLogger("exec_hyper")

COMMANDS = ("solve", "trajectory", "sweep-k", "verify", "shoot-plot")
DEFAULT_FORMAT = {
    "solve": "json",
    "trajectory": "csv",
    "sweep-k": "csv",
    "verify": "json",
    "shoot-plot": "csv",
}
PARAM_DEFAULTS = {"gamma": 0.0, "eta": 1.0, "lam": 1.0, "sigma": 1.0, "k": 0.5, "X": 1.0, "T": 1.0}
# Config-file key -> internal name.
CONFIG_KEYS = {
    "gamma": "gamma",
    "eta": "eta",
    "lambda": "lam",
    "lam": "lam",
    "sigma": "sigma",
    "k": "k",
    "X": "X",
    "T": "T",
    "n_samples": "n_samples",
    "n-samples": "n_samples",
    "k_list": "k_list",
    "k-list": "k_list",
    "format": "format",
    "output": "output",
}
FIELD_LABELS = {"lam": "lambda", "n_samples": "n-samples", "k_list": "k-list"}

VERIFY_STEPS = 4096
# name -> (limit, relation); a check passes when ``value <relation> limit``.
VERIFY_LIMITS = {
    "boundary_x0_error": (1e-6, "<"),
    "boundary_xT_error": (1e-9, "<"),
    "beltrami_max_residual": (1e-6, "<"),
    "oracle_max_deviation": (1e-5, "<"),
    "cross_validate_deviation": (1e-5, "<"),
    "reduction_residual": (1e-4, "<"),
    "rk4_x0_error": (1e-4, "<"),
    "round_trip_max_error": (1e-8, "<"),
    "legendre_min": (0.0, ">"),
    "closed_form_k1_deviation": (1e-7, "<"),
}

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


@dataclass(frozen=True)
class CliConfig:
    command: str
    params: ModelParams
    n_samples: int = 201
    k_list: tuple = ()
    output_path: Optional[str] = None
    format: str = "csv"


# -- formatting ---------------------------------------------------------------


def fmt_csv(x: float) -> str:
    return format(float(x), ".12g")


def _json_number(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """Serialise with 17 significant digits for every float."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return _json_number(float(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + to_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def report_to_dict(report: solver.SolveReport) -> dict:
    sh = report.shooting
    return {
        "params": report.params.as_dict(),
        "v0": sh.v0,
        "residual": sh.residual,
        "iterations": sh.iterations,
        "bracket": list(sh.bracket),
        "cost": report.cost,
        "checks": dict(report.checks),
        "trajectory": [
            {"t": pt.t, "x": pt.x, "v": pt.v, "beltrami_residual": pt.beltrami_residual}
            for pt in report.trajectory.points
        ],
    }


def error_payload(exc: Exception) -> dict:
    kind = getattr(exc, "kind", "error")
    body = {"kind": kind, "message": str(exc)}
    if isinstance(exc, NoRootError):
        body["boundary_time"] = exc.boundary_time
    return {"error": body}


def _csv_writer(buf: io.StringIO):
    return csv.writer(buf, lineterminator="\n")


def trajectory_csv(report: solver.SolveReport) -> str:
    buf = io.StringIO()
    w = _csv_writer(buf)
    w.writerow(["t", "x", "v", "beltrami_residual"])
    for pt in report.trajectory.points:
        w.writerow([fmt_csv(pt.t), fmt_csv(pt.x), fmt_csv(pt.v), fmt_csv(pt.beltrami_residual)])
    return buf.getvalue()


# -- configuration ------------------------------------------------------------


def _parse_k_list(text) -> tuple:
    if isinstance(text, (list, tuple)):
        items = list(text)
    else:
        items = [s for s in str(text).split(",") if s.strip()]
    if not items:
        raise ValidationError("k_list", "must contain at least one exponent")
    try:
        return tuple(float(s) for s in items)
    except (TypeError, ValueError):
        raise ValidationError("k_list", f"could not parse {text!r} as numbers") from None


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ValidationError("config", f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError("config", f"invalid JSON in {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ValidationError("config", "top level must be a JSON object")
    values = {}
    for key, value in raw.items():
        if key not in CONFIG_KEYS:
            raise ValidationError("config", f"unknown key {key!r}")
        values[CONFIG_KEYS[key]] = value
    return values


def build_config(args: argparse.Namespace) -> CliConfig:
    values = dict(PARAM_DEFAULTS)
    values.update(n_samples=201, k_list=None, format=None, output=None)
    if args.config:
        values.update(_load_config_file(args.config))
    for name in ("gamma", "eta", "lam", "sigma", "k", "X", "T", "n_samples", "k_list", "format", "output"):
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag

    for name in PARAM_DEFAULTS:
        try:
            values[name] = float(values[name])
        except (TypeError, ValueError):
            raise ValidationError(name, f"must be a real number, got {values[name]!r}") from None
    params = ModelParams(**{name: values[name] for name in PARAM_DEFAULTS})

    n = values["n_samples"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 3:
        raise ValidationError("n_samples", f"must be an integer >= 3, got {n!r}")

    k_list: tuple = ()
    if args.command == "sweep-k":
        if values["k_list"] is None:
            raise ValidationError("k_list", "required for sweep-k")
        k_list = _parse_k_list(values["k_list"])
        for k in k_list:
            if not (math.isfinite(k) and k > 0):
                raise ValidationError("k_list", f"exponents must be > 0, got {k}")

    fmt = values["format"] or DEFAULT_FORMAT[args.command]
    if fmt not in ("csv", "json"):
        raise ValidationError("format", f"must be csv or json, got {fmt!r}")
    return CliConfig(args.command, params, n, k_list, values["output"], fmt)


# -- commands -----------------------------------------------------------------
# Each returns (exit status, text to write).


def run_solve(cfg: CliConfig):
    report = solver.solve(cfg.params, cfg.n_samples)
    if cfg.format == "csv":
        return EXIT_OK, trajectory_csv(report)
    return EXIT_OK, to_json(report_to_dict(report)) + "\n"


def run_trajectory(cfg: CliConfig):
    report = solver.solve(cfg.params, cfg.n_samples)
    if cfg.format == "json":
        return EXIT_OK, to_json(report_to_dict(report)["trajectory"]) + "\n"
    return EXIT_OK, trajectory_csv(report)


def run_sweep_k(cfg: CliConfig):
    status = EXIT_OK
    buf = io.StringIO()
    w = _csv_writer(buf)
    groups = []
    if cfg.format == "csv":
        w.writerow(["k", "t", "x", "v"])
    for k in cfg.k_list:
        p = replace(cfg.params, k=k)
        try:
            report = solver.solve(p, cfg.n_samples)
        except ExecHyperError as exc:
            status = EXIT_FAILURE
            log.error("sweep-k: k=%s failed: %s", k, exc)
            if cfg.format == "csv":
                buf.write(f"# k={fmt_csv(k)} failed: {getattr(exc, 'kind', 'error')}: {exc}\n")
            else:
                groups.append({"k": k, **error_payload(exc)})
            continue
        if cfg.format == "csv":
            for pt in report.trajectory.points:
                w.writerow([fmt_csv(k), fmt_csv(pt.t), fmt_csv(pt.x), fmt_csv(pt.v)])
        else:
            groups.append({"k": k, "v0": report.v0, "trajectory": report_to_dict(report)["trajectory"]})
    if cfg.format == "json":
        return status, to_json(groups) + "\n"
    return status, buf.getvalue()


def run_shoot_plot(cfg: CliConfig):
    p = cfg.params
    try:
        shooting = solver.solve_v0(p)
    except NoRootError as exc:
        shooting, failure = None, exc
        grid = p.X / p.T * np.logspace(-2.0, 1.0, cfg.n_samples)
    else:
        failure = None
        grid = shooting.v0 * np.logspace(-1.0, 1.0, cfg.n_samples)
    rows = [(float(v), solver.shooting_lhs(p, float(v))) for v in grid]

    if cfg.format == "json":
        payload = {"T": p.T, "samples": [{"v0": v, "lhs": lhs} for v, lhs in rows]}
        if shooting is not None:
            payload["v0"] = shooting.v0
        else:
            payload.update(error_payload(failure))
        return (EXIT_OK if failure is None else EXIT_FAILURE), to_json(payload) + "\n"

    buf = io.StringIO()
    w = _csv_writer(buf)
    w.writerow(["v0", "lhs"])
    for v, lhs in rows:
        w.writerow([fmt_csv(v), fmt_csv(lhs)])
    if shooting is not None:
        buf.write(f"# solution v0={fmt_csv(shooting.v0)} T={fmt_csv(p.T)}\n")
        return EXIT_OK, buf.getvalue()
    buf.write(
        f"# no-root: T={fmt_csv(p.T)} >= zero-speed depletion time "
        f"{fmt_csv(failure.boundary_time)}; every lhs < T\n"
    )
    return EXIT_FAILURE, buf.getvalue()


def verification_checks(p: ModelParams, n_samples: int, n_steps: int = VERIFY_STEPS) -> dict:
    """Run the solver and every oracle; return ``{name: {value, limit, op, pass}}``."""
    report = solver.solve(p, n_samples, oracle_steps=n_steps)
    v0 = report.v0
    values = dict(report.checks)
    values["cross_validate_deviation"] = verify.cross_validate(p, report, n_steps)
    ode = verify.integrate_first_order(p, v0, n_steps)
    values["reduction_residual"] = verify.reduction_check(p, ode)
    values["rk4_x0_error"] = abs(float(ode.x_values[0]) - p.X)
    values["round_trip_max_error"] = max(
        abs(solver.implicit_time_of_x(p, v0, pt.x) - pt.t) for pt in report.trajectory.points
    )
    values["legendre_min"] = min(
        legendre_check(p, pt.v) for pt in report.trajectory.points if pt.v > 0
    )
    if p.k == 1:
        values["closed_form_k1_deviation"] = max(
            abs(pt.x - solver.closed_form_k1(p, pt.t)) for pt in report.trajectory.points
        )
    checks = {}
    for name, value in values.items():
        limit, op = VERIFY_LIMITS[name]
        ok = value < limit if op == "<" else value > limit
        checks[name] = {"value": float(value), "limit": limit, "op": op, "pass": bool(ok)}
    return {"params": p.as_dict(), "v0": v0, "checks": checks}


def run_verify(cfg: CliConfig):
    result = verification_checks(cfg.params, cfg.n_samples)
    passed = all(c["pass"] for c in result["checks"].values())
    result["passed"] = passed
    for name, c in result["checks"].items():
        if not c["pass"]:
            log.error("verify: %s = %.3g fails %s %g", name, c["value"], c["op"], c["limit"])
    status = EXIT_OK if passed else EXIT_FAILURE
    if cfg.format == "csv":
        buf = io.StringIO()
        w = _csv_writer(buf)
        w.writerow(["check", "value", "op", "limit", "pass"])
        for name, c in result["checks"].items():
            w.writerow([name, fmt_csv(c["value"]), c["op"], fmt_csv(c["limit"]), int(c["pass"])])
        return status, buf.getvalue()
    return status, to_json(result) + "\n"


RUNNERS = {
    "solve": run_solve,
    "trajectory": run_trajectory,
    "sweep-k": run_sweep_k,
    "verify": run_verify,
    "shoot-plot": run_shoot_plot,
}


# -- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambda", dest="lam", type=float, help="risk aversion")
    common.add_argument("--sigma", type=float, help="volatility")
    common.add_argument("--eta", type=float, help="temporary impact coefficient")
    common.add_argument("--gamma", type=float, help="permanent impact coefficient")
    common.add_argument("--k", type=float, help="temporary impact exponent")
    common.add_argument("--X", type=float, help="initial holdings")
    common.add_argument("--T", type=float, help="horizon")
    common.add_argument("--n-samples", dest="n_samples", type=int, help="grid size (default 201)")
    common.add_argument("--k-list", dest="k_list", help="comma-separated exponents for sweep-k")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--output", help="output file (default: standard output)")
    common.add_argument("--config", help="JSON file of parameter values; flags override it")

    parser = argparse.ArgumentParser(
        prog="exec-hyper",
        description="Optimal liquidation under power-law temporary impact.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "solve": "solve for the terminal speed and write the full report",
        "trajectory": "write the sampled holdings path as CSV",
        "sweep-k": "solve once per impact exponent, long-format CSV",
        "verify": "run the ODE and closed-form oracles",
        "shoot-plot": "sample the shooting equation around its root",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def configure_logging() -> None:
    level = {
        "quiet": logging.CRITICAL + 1,
        "info": logging.INFO,
        "debug": logging.DEBUG,
    }.get(os.environ.get("EXEC_HYPER_LOG", "quiet").lower(), logging.CRITICAL + 1)
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        cfg = build_config(args)
    except ValidationError as exc:
        label = FIELD_LABELS.get(exc.field, exc.field)
        message = str(exc).replace(f"{exc.field}:", f"{label}:", 1)
        print(f"exec-hyper: invalid parameter {message}", file=sys.stderr)
        return EXIT_USAGE

    try:
        status, text = RUNNERS[cfg.command](cfg)
    except ExecHyperError as exc:
        print(f"exec-hyper: {exc.kind}: {exc}", file=sys.stderr)
        if cfg.format == "json":
            _emit(to_json(error_payload(exc)) + "\n", cfg.output_path)
        return EXIT_FAILURE
    try:
        _emit(text, cfg.output_path)
    except OSError as exc:
        print(f"exec-hyper: cannot write output: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return status


if __name__ == "__main__":
    sys.exit(main())
