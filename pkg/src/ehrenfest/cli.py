"""Command-line front end with deterministic, machine-readable output.

Every subcommand prints one output envelope to stdout: the command name,
the fully resolved parameter set (defaults and seeds included, so a run is
reproducible from its own header), the results, and the tool version.

JSON output is a single object with keys in fixed order; floats carry 17
significant digits, which round-trips float64 exactly.  CSV output is a
block of ``# key: value`` header comments followed by a header row and
data rows (distribution vectors become one row per state).  Non-finite
floats serialize as the strings inf/-inf/nan.  Site labels in CSV rows are
1-based.

Stochastic subcommands require an explicit ``--seed``; there is no silent
entropy source.  Exit codes: 0 success, 2 argument or parameter-range
errors (message on stderr), 1 unexpected runtime errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__, exact, montecarlo
from .chain import ChainParams, make_params, make_params_general
from .rng import MASK64


@dataclass
class OutputEnvelope:
    command: str
    params: dict
    results: dict
    tool_version: str = __version__
    csv_header: list = field(default_factory=list)
    csv_rows: list = field(default_factory=list)


def _scalar_text(value) -> str:
    """Deterministic text form of a scalar; floats get 17 significant digits."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(value)


def _json_value(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if not math.isfinite(x):
            return json.dumps(_scalar_text(x))
        return format(x, ".17g")
    if isinstance(value, dict):
        items = ",".join(f"{json.dumps(k)}:{_json_value(v)}" for k, v in value.items())
        return "{" + items + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ",".join(_json_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value)!r}")


def serialize(envelope: OutputEnvelope, fmt: str) -> str:
    """Render an envelope as a deterministic JSON or CSV byte stream."""
    if fmt == "json":
        body = {
            "command": envelope.command,
            "params": envelope.params,
            "results": envelope.results,
            "tool_version": envelope.tool_version,
        }
        return _json_value(body) + "\n"
    if fmt == "csv":
        lines = [f"# command: {envelope.command}"]
        for key, value in envelope.params.items():
            if isinstance(value, (list, tuple, np.ndarray)):
                text = ",".join(_scalar_text(v) for v in value)
            else:
                text = _scalar_text(value)
            lines.append(f"# {key}: {text}")
        lines.append(f"# tool_version: {envelope.tool_version}")
        lines.append(",".join(envelope.csv_header))
        for row in envelope.csv_rows:
            lines.append(",".join(_scalar_text(cell) for cell in row))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def _resolve_params(args) -> ChainParams:
    if getattr(args, "p0", None) is not None or getattr(args, "p1", None) is not None:
        if args.p is not None:
            raise ValueError("give either --p or the pair --p0/--p1, not both")
        if args.p0 is None or args.p1 is None:
            raise ValueError("--p0 and --p1 must be given together")
        return make_params_general(args.n, args.p0, args.p1)
    if args.p is None:
        raise ValueError("one of --p or --p0/--p1 is required")
    return make_params(args.n, args.p)


def _echo_params(params: ChainParams, **extra) -> dict:
    out = {"n_sites": params.n_sites, "p_up": params.p_up, "p_down": params.p_down}
    out.update(extra)
    return out


def _cmd_stationary(args) -> OutputEnvelope:
    params = _resolve_params(args)
    echo = _echo_params(params, log=args.log, format=args.format)
    if args.log:
        mass = exact.stationary_count_log(params)
        key, col = "log_mass", "log_mass"
    else:
        mass = exact.stationary_count(params)
        key, col = "mass", "mass"
    return OutputEnvelope(
        command="stationary",
        params=echo,
        results={key: mass},
        csv_header=["k", col],
        csv_rows=[(k, m) for k, m in enumerate(mass)],
    )


def _cmd_evolve(args) -> OutputEnvelope:
    params = make_params(args.n, args.p)
    if args.init == "uniform":
        dist = exact.uniform_distribution(args.n)
        init_echo = "uniform"
    else:
        try:
            init_k = int(args.init)
        except ValueError:
            raise ValueError(f"--init must be an integer or 'uniform', got {args.init!r}")
        dist = exact.delta_distribution(args.n, init_k)
        init_echo = init_k
    if args.steps < 0:
        raise ValueError(f"--steps must be non-negative, got {args.steps}")
    echo = _echo_params(
        params, init=init_echo, steps=args.steps, emit=args.emit, format=args.format
    )
    if args.emit == "dist":
        mass = exact.evolve_distribution(params, dist, args.steps)
        return OutputEnvelope(
            command="evolve",
            params=echo,
            results={"steps": args.steps, "mass": mass},
            csv_header=["k", "mass"],
            csv_rows=[(k, m) for k, m in enumerate(mass)],
        )
    target = exact.stationary_count(params)
    tv = [exact.total_variation(dist, target)]
    for _ in range(args.steps):
        dist = exact.evolve_distribution(params, dist, 1)
        tv.append(exact.total_variation(dist, target))
    return OutputEnvelope(
        command="evolve",
        params=echo,
        results={"tv": tv},
        csv_header=["t", "tv"],
        csv_rows=[(t, v) for t, v in enumerate(tv)],
    )


def _cmd_simulate(args) -> OutputEnvelope:
    params = make_params(args.n, args.p)
    burn_in = montecarlo.default_burn_in(args.n) if args.burn_in is None else args.burn_in
    seed = args.seed & MASK64
    echo = _echo_params(
        params, init=args.init, steps=args.steps, burn_in=burn_in, seed=seed,
        emit=args.emit, format=args.format,
    )
    if args.emit == "occupancy":
        hist = montecarlo.run_occupancy(params, args.init, args.steps, burn_in, seed)
        return OutputEnvelope(
            command="simulate",
            params=echo,
            results={"counts": hist.counts, "total_steps": hist.total_steps},
            csv_header=["k", "count"],
            csv_rows=[(k, int(c)) for k, c in enumerate(hist.counts)],
        )
    path = montecarlo.run_trajectory(params, args.init, args.steps, seed)
    states = path[burn_in:] if burn_in <= args.steps else path[:0]
    return OutputEnvelope(
        command="simulate",
        params=echo,
        results={"first_step": min(burn_in, args.steps + 1), "states": states},
        csv_header=["t", "k"],
        csv_rows=[(burn_in + i, int(s)) for i, s in enumerate(states)],
    )


def _require_mode(args) -> str:
    mc_flags = args.replicas is not None or args.seed is not None
    if args.exact and mc_flags:
        raise ValueError("choose either --exact or --replicas/--seed, not both")
    if args.exact:
        return "exact"
    if args.replicas is None:
        raise ValueError("one of --exact or --replicas is required")
    if args.seed is None:
        raise ValueError("--seed is required with --replicas (no silent entropy source)")
    return "monte-carlo"


def _estimate_results(est: montecarlo.EstimateWithCI) -> dict:
    return {
        "mean": est.mean,
        "std_error": est.std_error,
        "replicas": est.replicas,
        "master_seed": est.master_seed,
        "truncated": est.truncated,
    }


def _cmd_return_time(args) -> OutputEnvelope:
    params = make_params(args.n, args.p)
    mode = _require_mode(args)
    if mode == "exact":
        echo = _echo_params(params, state=args.state, mode=mode, format=args.format)
        neg_log = exact.expected_return_time_log(params, args.state)
        log10_value = neg_log / math.log(10.0)
        value = exact.expected_return_time(params, args.state)
        results = {"log10_value": log10_value}
        if math.isfinite(value):
            results["value"] = value
        return OutputEnvelope(
            command="return-time",
            params=echo,
            results=results,
            csv_header=["log10_value", "value"],
            csv_rows=[(log10_value, value)],
        )
    seed = args.seed & MASK64
    echo = _echo_params(
        params, state=args.state, mode=mode, replicas=args.replicas,
        seed=seed, format=args.format,
    )
    est = montecarlo.estimate_return_time(params, args.state, args.replicas, seed)
    return OutputEnvelope(
        command="return-time",
        params=echo,
        results=_estimate_results(est),
        csv_header=["mean", "std_error", "replicas", "master_seed", "truncated"],
        csv_rows=[(est.mean, est.std_error, est.replicas, est.master_seed, est.truncated)],
    )


def _cmd_absorb(args) -> OutputEnvelope:
    if args.n < 1:
        raise ValueError(f"--n must be a positive integer, got {args.n}")
    mode = _require_mode(args)
    if mode == "exact":
        echo = {
            "n_sites": args.n, "init": args.init, "mode": mode, "format": args.format,
        }
        value = exact.absorption_expectation(args.n, args.init)
        return OutputEnvelope(
            command="absorb",
            params=echo,
            results={"value": value},
            csv_header=["value"],
            csv_rows=[(value,)],
        )
    seed = args.seed & MASK64
    echo = {
        "n_sites": args.n, "init": args.init, "mode": mode,
        "replicas": args.replicas, "seed": seed, "format": args.format,
    }
    est = montecarlo.estimate_absorption_time(args.n, args.init, args.replicas, seed)
    return OutputEnvelope(
        command="absorb",
        params=echo,
        results=_estimate_results(est),
        csv_header=["mean", "std_error", "replicas", "master_seed", "truncated"],
        csv_rows=[(est.mean, est.std_error, est.replicas, est.master_seed, est.truncated)],
    )


def _cmd_spatial(args) -> OutputEnvelope:
    params = make_params(args.n, args.p)
    burn_in = montecarlo.default_burn_in(args.n)
    sample_every = args.n if args.sample_every is None else args.sample_every
    seed = args.seed & MASK64
    echo = _echo_params(
        params, steps=args.steps, burn_in=burn_in, sample_every=sample_every,
        seed=seed, emit=args.emit, format=args.format,
    )
    result = montecarlo.run_spatial_marginals(
        params, args.steps, burn_in, sample_every, seed
    )
    if args.emit == "marginals":
        return OutputEnvelope(
            command="spatial",
            params=echo,
            results={
                "per_site_frequency": result.per_site_frequency,
                "max_abs_pair_covariance": result.max_abs_pair_covariance,
                "samples": result.samples,
            },
            csv_header=["site", "frequency"],
            csv_rows=[(s + 1, f) for s, f in enumerate(result.per_site_frequency)],
        )
    if args.emit == "covariance":
        cov = result.pair_covariance
        rows = [
            (i + 1, j + 1, cov[i, j])
            for i in range(args.n)
            for j in range(i, args.n)
        ]
        return OutputEnvelope(
            command="spatial",
            params=echo,
            results={"samples": result.samples, "matrix": [list(r) for r in cov]},
            csv_header=["site_i", "site_j", "covariance"],
            csv_rows=rows,
        )
    bits = result.final_config.bits
    return OutputEnvelope(
        command="spatial",
        params=echo,
        results={"bits": bits},
        csv_header=["site", "bit"],
        csv_rows=[(s + 1, int(b)) for s, b in enumerate(bits)],
    )


def _cmd_gaussian_check(args) -> OutputEnvelope:
    try:
        n_list = [int(part) for part in args.n_list.split(",") if part]
    except ValueError:
        raise ValueError(f"--n-list must be comma-separated integers, got {args.n_list!r}")
    if not n_list:
        raise ValueError("--n-list must name at least one genome length")
    deviations = [exact.gaussian_deviation(make_params(n, args.p)) for n in n_list]
    echo = {
        "n_list": n_list, "p_up": args.p, "p_down": 1.0 - args.p, "format": args.format,
    }
    return OutputEnvelope(
        command="gaussian-check",
        params=echo,
        results={"n_list": n_list, "deviation": deviations},
        csv_header=["n", "deviation"],
        csv_rows=list(zip(n_list, deviations)),
    )


def _cmd_equilibrium(args) -> OutputEnvelope:
    params = make_params(args.n, args.p)
    echo = _echo_params(params, format=args.format)
    value = exact.equilibrium_state(params)
    results = {
        "value": value,
        "floor": int(math.floor(value)),
        "ceil": int(math.ceil(value)),
    }
    return OutputEnvelope(
        command="equilibrium",
        params=echo,
        results=results,
        csv_header=["value", "floor", "ceil"],
        csv_rows=[(value, results["floor"], results["ceil"])],
    )


def _add_format(sub) -> None:
    sub.add_argument("--format", choices=["json", "csv"], default="json",
                     help="output format (default: json)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ehrenfest",
        description="Exact analysis and seeded simulation of a biased "
                    "Ehrenfest chain over binary genome sites.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("stationary", help="stationary law of the counting chain")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--p", type=float)
    sub.add_argument("--p0", type=float, help="up-flip probability (two-parameter model)")
    sub.add_argument("--p1", type=float, help="down-flip probability (two-parameter model)")
    sub.add_argument("--log", action="store_true", help="emit natural-log masses")
    _add_format(sub)
    sub.set_defaults(handler=_cmd_stationary)

    sub = subs.add_parser("evolve", help="exact forward evolution of the count law")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--p", type=float, required=True)
    sub.add_argument("--init", required=True, help="initial count k, or 'uniform'")
    sub.add_argument("--steps", type=int, required=True)
    sub.add_argument("--emit", choices=["dist", "tv-curve"], default="dist")
    _add_format(sub)
    sub.set_defaults(handler=_cmd_evolve)

    sub = subs.add_parser("simulate", help="simulate the counting chain")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--p", type=float, required=True)
    sub.add_argument("--init", type=int, required=True)
    sub.add_argument("--steps", type=int, required=True)
    sub.add_argument("--seed", type=int, required=True)
    sub.add_argument("--burn-in", type=int, default=None,
                     help="steps to discard (default: 20 N ln(N+1))")
    sub.add_argument("--emit", choices=["occupancy", "trajectory"], required=True)
    _add_format(sub)
    sub.set_defaults(handler=_cmd_simulate)

    sub = subs.add_parser("return-time", help="expected first return time to a count")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--p", type=float, required=True)
    sub.add_argument("--state", type=int, required=True)
    sub.add_argument("--exact", action="store_true")
    sub.add_argument("--replicas", type=int)
    sub.add_argument("--seed", type=int)
    _add_format(sub)
    sub.set_defaults(handler=_cmd_return_time)

    sub = subs.add_parser("absorb", help="absorption time of the pure-uphill chain")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--init", type=int, default=0)
    sub.add_argument("--exact", action="store_true")
    sub.add_argument("--replicas", type=int)
    sub.add_argument("--seed", type=int)
    _add_format(sub)
    sub.set_defaults(handler=_cmd_absorb)

    sub = subs.add_parser("spatial", help="simulate the spatial chain")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--p", type=float, required=True)
    sub.add_argument("--steps", type=int, required=True)
    sub.add_argument("--seed", type=int, required=True)
    sub.add_argument("--sample-every", type=int, default=None,
                     help="thinning interval (default: N)")
    sub.add_argument("--emit", choices=["marginals", "covariance", "config"],
                     required=True)
    _add_format(sub)
    sub.set_defaults(handler=_cmd_spatial)

    sub = subs.add_parser("gaussian-check",
                          help="sup-CDF deviation from the Gaussian limit per N")
    sub.add_argument("--p", type=float, required=True)
    sub.add_argument("--n-list", required=True, help="comma-separated genome lengths")
    _add_format(sub)
    sub.set_defaults(handler=_cmd_gaussian_check)

    sub = subs.add_parser("equilibrium", help="count where up- and down-rates balance")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--p", type=float, required=True)
    _add_format(sub)
    sub.set_defaults(handler=_cmd_equilibrium)

    return parser


def dispatch(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        envelope = args.handler(args)
        payload = serialize(envelope, args.format)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except Exception as err:  # pragma: no cover - defensive
        print(f"error: {err}", file=sys.stderr)
        return 1
    sys.stdout.write(payload)
    return 0


def main(argv=None) -> int:
    return dispatch(argv)


if __name__ == "__main__":
    sys.exit(main())
