"""Command line front end.

Every subcommand writes a JSON report envelope::

    {"command": ..., "method": ..., "inputs": {...}, "outputs": {...},
     "tool_version": ..., "seed": ...}

``inputs`` is self-contained (parameter files are inlined), so
:func:`replay` can recompute ``outputs`` from a report alone.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import __version__
from .errors import FiniteBinomError
from .fitter import fit
from .io import ingest, load_moments, load_params, parse_moments, read_prices, write_report
from .model import ModelParams
from .moments import LimitParams, moment_binomial, moment_limit, moment_multigroup
from .oracle import enumerate_moment
from .simulator import SimConfig, estimate_moments

MODES = ("exact", "limit", "binomial", "mc")


def _num_out(v):
    # keeps exact inputs exact when echoed
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else int(v)
    return v


def _horizon(t):
    if isinstance(t, str):
        t = float(t)
    return int(t) if float(t).is_integer() else float(t)


def _int_horizon(t) -> int:
    t = _horizon(t)
    if not isinstance(t, int):
        raise ValueError(f"this mode needs an integer horizon, got {t!r}")
    return t


def _moment_report(method, values, errors=None) -> dict:
    return {"method": method,
            "orders": list(range(1, len(values) + 1)),
            "values": list(values),
            "errors": list(errors) if errors is not None else None}


def _compute_moments(inputs: dict, workers: int = 1) -> dict:
    params = ModelParams.from_dict(inputs["params"])
    mode = inputs["mode"]
    n_max = inputs["n_max"]
    backend = inputs.get("backend", "float")
    if mode == "exact":
        t = _horizon(inputs["t"])
        vals = [moment_multigroup(params, t, n, backend) for n in range(1, n_max + 1)]
        return _moment_report("exact", vals)
    if mode == "limit":
        t = _int_horizon(inputs["t"])
        q = [Fraction(c, params.total_investors) for c in params.counts]
        vals = [moment_limit(LimitParams(q, params.factors, t, n), backend)
                for n in range(1, n_max + 1)]
        return _moment_report("limit", vals)
    if mode == "binomial":
        t = _int_horizon(inputs["t"])
        if params.num_groups != 2 or params.num_inactive != 0:
            raise ValueError("binomial mode needs two groups and no inactive investors")
        d, u = params.factors
        q_u = Fraction(params.counts[1], params.total_investors)
        vals = [moment_binomial(q_u, u, d, t, n, backend) for n in range(1, n_max + 1)]
        return _moment_report("binomial", vals)
    if mode == "mc":
        t = _int_horizon(inputs["t"])
        res = estimate_moments(SimConfig(params, t, inputs["paths"], n_max, inputs["seed"]),
                               workers=workers)
        return _moment_report("monte-carlo", res.moments, res.standard_errors)
    raise ValueError(f"unknown mode {mode!r}")


def _compute(command: str, inputs: dict, workers: int = 1) -> dict:
    if command == "moments":
        return _compute_moments(inputs, workers)
    if command == "fit":
        res = fit(parse_moments(inputs["moments"]), inputs["g"], inputs["anchor"],
                  inputs.get("total"))
        return res.to_dict()
    if command == "ingest":
        return {"moments": ingest(inputs["prices"], inputs["stride"], inputs["n_max"]),
                "windows": (len(inputs["prices"]) - 1) // inputs["stride"]}
    if command == "simulate":
        params = ModelParams.from_dict(inputs["params"])
        cfg = SimConfig(params, inputs["t"], inputs["paths"], inputs["n_max"], inputs["seed"])
        return estimate_moments(cfg, workers=workers).to_dict()
    if command == "oracle":
        params = ModelParams.from_dict(inputs["params"])
        return {"n": inputs["n"], "value": enumerate_moment(params, inputs["t"], inputs["n"],
                                                             inputs.get("budget"))}
    raise ValueError(f"unknown command {command!r}")


_METHOD = {"fit": "fit", "ingest": "ingest", "simulate": "monte-carlo", "oracle": "oracle"}


def _envelope(command: str, inputs: dict, workers: int = 1) -> dict:
    # worker count never changes the outputs, so it is not echoed
    outputs = _compute(command, inputs, workers)
    method = outputs["method"] if command == "moments" else _METHOD[command]
    return {"command": command, "method": method, "inputs": inputs, "outputs": outputs,
            "tool_version": __version__, "seed": inputs.get("seed")}


def replay(report: dict) -> dict:
    """Recompute a report from its echoed inputs."""
    return _envelope(report["command"], report["inputs"])


def _inputs(args) -> dict:
    cmd = args.command
    if cmd == "moments":
        inputs = {"params": load_params(args.params).to_dict(), "t": _horizon(args.t),
                  "n_max": args.n_max, "mode": args.mode, "backend": args.backend}
        if args.mode == "mc":
            inputs.update(paths=args.paths, seed=args.seed)
        return inputs
    if cmd == "fit":
        return {"moments": [_num_out(v) for v in load_moments(args.moments)],
                "g": args.g, "anchor": args.anchor, "total": args.total}
    if cmd == "ingest":
        return {"prices": read_prices(args.prices), "stride": args.stride, "n_max": args.n_max}
    if cmd == "simulate":
        return {"params": load_params(args.params).to_dict(), "t": args.t,
                "paths": args.paths, "seed": args.seed, "n_max": args.n_max}
    if cmd == "oracle":
        return {"params": load_params(args.params).to_dict(), "t": args.t, "n": args.n,
                "budget": args.budget}
    raise ValueError(cmd)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finitebinom",
        description="Moments, simulation and moment fitting for the finite-investor binomial model.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", help="moments of the log return")
    p.add_argument("--params", required=True)
    p.add_argument("--t", required=True, help="horizon (real for --mode exact with float backend)")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--mode", choices=MODES, default="exact")
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", choices=("float", "rational"), default="float")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="-")

    p = sub.add_parser("fit", help="fit model parameters to 2g raw moments")
    p.add_argument("--moments", required=True)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--anchor", type=int, required=True)
    p.add_argument("--total", type=int, default=None)
    p.add_argument("--out", default="-")

    p = sub.add_parser("ingest", help="sample moments of log returns from a price CSV")
    p.add_argument("--prices", required=True)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--out", default="-")

    p = sub.add_parser("simulate", help="Monte Carlo sample moments")
    p.add_argument("--params", required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--paths", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="-")

    p = sub.add_parser("oracle", help="moment by exhaustive path enumeration")
    p.add_argument("--params", required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--budget", type=int, default=None,
                   help="max paths (default: $FINITEBINOM_ENUM_BUDGET or 10^7)")
    p.add_argument("--out", default="-")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        inputs = _inputs(args)
        report = _envelope(args.command, inputs, getattr(args, "workers", 1))
        write_report(report, args.out)
    except (FiniteBinomError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
