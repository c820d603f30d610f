"""Command-line front end.

Five subcommands: ``analyze`` (exact one-point report), ``sweep`` (CSV over a
p-grid), ``threshold`` (width and its ceilings), ``verify`` (property
suites), and ``mc`` (sampled estimates for arities the dense path cannot
reach). Single reports are JSON, sweeps are CSV; both open with the same
metadata block (version, seed, RNG id, config echo) so any two runs can be
diffed byte for byte. Floats in CSV are printed with 17 significant digits,
which round-trips IEEE doubles exactly.

Exit codes: 0 on success, 1 when a verification suite fails, 2 for usage
errors (bad flags, malformed inputs, hypothesis violations).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import bounds, mc, suites
from .booleans import (
    FamilySpec,
    build_family,
    family_spec,
    family_symmetry,
    parse_table_string,
)
from .measure import (
    dirichlet_energy,
    entropy,
    expectation,
    expectation_derivative,
    influences,
    variance,
)
from .threshold import threshold_width

__version__ = "0.1.0"

_CSV_HEADER = "p,mu,dmu_dp,c_ls,pqcls,thm41_rhs,pass"


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _config_echo(config: dict) -> str:
    return json.dumps(config, sort_keys=True, separators=(",", ":"))


def _emit_json(payload: dict, out) -> None:
    out.write(json.dumps(payload, indent=2))
    out.write("\n")


def _report_head(command: str, config: dict, seed=None, rng=None) -> dict:
    return {
        "version": __version__,
        "command": command,
        "seed": seed,
        "rng": rng,
        "config": config,
    }


def _family_from_flags(args, skip=()) -> FamilySpec:
    params = {}
    for key in ("n", "i", "k", "m", "len"):
        value = getattr(args, key, None)
        if value is not None and key not in skip:
            params[key] = value
    # Every dictator coordinate gives the same curve, so --i is optional.
    if args.family == "dictator" and "i" not in params:
        params["i"] = 1
    try:
        return family_spec(args.family, **params)
    except ValueError as exc:
        raise UsageError(str(exc))


def _build_target(args):
    """Dense function plus its config echo, from --family or --table flags."""
    if args.family is not None and args.table is not None:
        raise UsageError("give either --family or --table, not both")
    if args.family is not None:
        spec = _family_from_flags(args)
        return build_family(spec), {"family": spec.to_string()}
    if args.table is not None:
        return parse_table_string(args.table), {"table": args.table}
    raise UsageError("one of --family or --table is required")


def _parse_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"malformed grid {text!r}, expected start:stop:step")
    try:
        start, stop, step = (float(t) for t in parts)
    except ValueError:
        raise UsageError(f"malformed grid {text!r}, expected start:stop:step")
    if step <= 0.0 or stop < start:
        raise UsageError("grid needs stop >= start and step > 0")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    points = [start + k * step for k in range(count)]
    if points[0] <= 0.0 or points[-1] >= 1.0:
        raise UsageError("grid points must lie strictly inside (0,1)")
    return points


def _check_p(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise UsageError(f"p must lie inside (0,1), got {p}")
    return p


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_analyze(args, out) -> int:
    f, echo = _build_target(args)
    p = _check_p(args.p)
    echo["p"] = p

    payload = _report_head("analyze", echo)
    payload["n"] = f.n
    payload["p"] = p
    payload["mu"] = expectation(f, p)
    payload["variance"] = variance(f, p)
    payload["influences"] = [float(v) for v in influences(f, p)]
    payload["derivative"] = expectation_derivative(f, p)
    payload["energy"] = dirichlet_energy(f, p)
    payload["entropy"] = entropy(f, p)
    if f.n >= 2:
        payload["max_influence_bound"] = bounds.max_influence_bound_check(f, p).to_dict()
    else:
        payload["max_influence_bound"] = None
        payload["bound_note"] = "influence bound needs arity at least 2"
    _emit_json(payload, out)
    return 0


def _sweep_preamble(out, config: dict) -> None:
    out.write(f"# version: {__version__}\n")
    out.write("# seed: none\n")
    out.write("# rng: none\n")
    out.write(f"# config: {_config_echo(config)}\n")
    out.write(_CSV_HEADER + "\n")


def cmd_sweep(args, out) -> int:
    if (args.func is None) == (args.family is None):
        raise UsageError("give exactly one of --func or --family")
    grid = _parse_grid(args.grid)

    if args.func is not None:
        _sweep_preamble(out, {"func": args.func, "grid": args.grid})
        for p in grid:
            c = bounds.log_sobolev_constant(p)
            pqc = bounds.scaled_log_sobolev_constant(p)
            out.write(f"{_fmt(p)},,,{_fmt(c)},{_fmt(pqc)},,\n")
        return 0

    spec = _family_from_flags(args)
    f = build_family(spec)
    _sweep_preamble(out, {"family": spec.to_string(), "grid": args.grid})
    # The derivative lower bound needs a monotone set with a transitive
    # symmetry; families without one leave the last two columns empty.
    eligible = spec.kind != "parity" and family_symmetry(spec)[0] is not None
    for p in grid:
        mu = expectation(f, p)
        dmu = expectation_derivative(f, p)
        c = bounds.log_sobolev_constant(p)
        pqc = bounds.scaled_log_sobolev_constant(p)
        row = [_fmt(p), _fmt(mu), _fmt(dmu), _fmt(c), _fmt(pqc)]
        if eligible and 0.0 < mu < 1.0:
            rhs = bounds.derivative_bound_rhs(f.n, p, mu)
            row.append(_fmt(rhs))
            row.append("true" if dmu >= rhs - 1e-9 else "false")
        else:
            row.extend(["", ""])
        out.write(",".join(row) + "\n")
    return 0


def cmd_threshold(args, out) -> int:
    spec = _family_from_flags(args)
    if spec.kind == "parity":
        raise UsageError("threshold needs a nontrivial monotone family")
    if not 0.0 < args.eps < 0.5:
        raise UsageError(f"eps must lie in (0, 0.5), got {args.eps}")

    echo = {"family": spec.to_string(), "eps": args.eps}
    payload = _report_head("threshold", echo)
    payload["family"] = spec.to_string()
    payload["eps"] = args.eps
    payload["result"] = threshold_width(spec, args.eps).to_dict()
    try:
        tight, plain = bounds.width_bound_check(spec, args.eps)
        payload["width_bounds"] = {
            "scaled_constant": tight.to_dict(),
            "rate": plain.to_dict(),
        }
    except ValueError as exc:
        payload["width_bounds"] = None
        payload["bound_note"] = str(exc)
    _emit_json(payload, out)
    return 0


def cmd_verify(args, out) -> int:
    config = {"suite": args.suite, "trials": args.trials, "p": args.p, "n_max": args.n_max}
    try:
        result = suites.run_suite(
            args.suite, seed=args.seed, trials=args.trials, p=args.p, n_max=args.n_max
        )
    except KeyError as exc:
        raise UsageError(f"unknown suite {exc.args[0]!r}; choose from "
                         + ", ".join(suites.SUITE_NAMES))
    payload = _report_head("verify", config, seed=args.seed, rng=mc.RNG_ID)
    payload["result"] = result
    _emit_json(payload, out)
    return 0 if result["pass"] else 1


def _oracle_from_flags(args) -> tuple[mc.OracleFunction, dict]:
    if args.family == "connectivity":
        if args.m is None:
            raise UsageError("connectivity needs --m (vertex count)")
        return mc.connectivity_oracle(args.m), {"family": "connectivity", "m": args.m}
    # For `mc influence`, --i names the estimated coordinate; only the
    # dictator family also consumes it as a parameter.
    skip = ("i",) if args.mc_command == "influence" and args.family != "dictator" else ()
    spec = _family_from_flags(args, skip=skip)
    return mc.family_oracle(spec), {"family": spec.to_string()}


def cmd_mc(args, out) -> int:
    oracle, echo = _oracle_from_flags(args)
    workers = mc.worker_count(args.workers)

    if args.mc_command == "mu":
        p = _check_p(args.p)
        echo.update({"p": p, "samples": args.samples})
        payload = _report_head("mc mu", echo, seed=args.seed, rng=mc.RNG_ID)
        payload["workers"] = workers
        payload["n"] = oracle.n
        payload["estimate"] = mc.estimate_mu(
            oracle, p, args.samples, args.seed, workers=workers
        ).to_dict()
    elif args.mc_command == "influence":
        p = _check_p(args.p)
        if args.i is None:
            raise UsageError("mc influence needs --i (coordinate index)")
        echo.update({"p": p, "i": args.i, "samples": args.samples})
        payload = _report_head("mc influence", echo, seed=args.seed, rng=mc.RNG_ID)
        payload["workers"] = workers
        payload["n"] = oracle.n
        try:
            estimate = mc.estimate_influence(
                oracle, p, args.i, args.samples, args.seed, workers=workers
            )
        except ValueError as exc:
            raise UsageError(str(exc))
        payload["estimate"] = estimate.to_dict()
    else:
        echo.update(
            {
                "alpha": args.alpha,
                "samples_per_step": args.samples_per_step,
                "tol_p": args.tol_p,
            }
        )
        payload = _report_head("mc threshold", echo, seed=args.seed, rng=mc.RNG_ID)
        payload["workers"] = workers
        payload["n"] = oracle.n
        try:
            result = mc.mc_p_of_alpha(
                oracle,
                args.alpha,
                args.samples_per_step,
                args.tol_p,
                args.seed,
                workers=workers,
            )
        except ValueError as exc:
            raise UsageError(str(exc))
        payload["result"] = result.to_dict()

    _emit_json(payload, out)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_family_flags(parser, include_table: bool = False) -> None:
    parser.add_argument("--family", help="family name, e.g. or, majority, tribes")
    parser.add_argument("--n", type=int, help="arity, for families that take one")
    parser.add_argument("--i", type=int, help="coordinate index (dictator, influence)")
    parser.add_argument("--k", type=int, help="tribe size")
    parser.add_argument("--m", type=int, help="tribe count, or vertex count for connectivity")
    parser.add_argument("--len", type=int, help="run length for cyclic_run")
    if include_table:
        parser.add_argument("--table", help="explicit truth table, n=<arity>:hex=<hex>")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biascube",
        description="Influence, threshold, and functional-inequality analysis "
        "of Boolean functions under biased product measures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="exact one-point analysis of a function")
    _add_family_flags(pa, include_table=True)
    pa.add_argument("--p", type=float, required=True, help="bias in (0,1)")

    ps = sub.add_parser("sweep", help="CSV sweep over a p-grid")
    _add_family_flags(ps)
    ps.add_argument("--func", choices=("cls", "pqcls"), help="constant curve sweep")
    ps.add_argument("--grid", required=True, help="p-grid as start:stop:step")
    ps.add_argument("--out", help="output path (default stdout)")

    pt = sub.add_parser("threshold", help="threshold width and its ceilings")
    _add_family_flags(pt)
    pt.add_argument("--eps", type=float, required=True, help="level in (0, 0.5)")

    pv = sub.add_parser("verify", help="run a property suite")
    pv.add_argument("--suite", required=True, help="suite name")
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--trials", type=int, help="random instances per check")
    pv.add_argument("--p", type=float, help="bias override for exhaustive-n4")
    pv.add_argument("--n-max", dest="n_max", type=int, help="largest arity to scan")

    pm = sub.add_parser("mc", help="sampled estimates at any arity")
    mcsub = pm.add_subparsers(dest="mc_command", required=True)
    for name, help_text in (
        ("mu", "estimate the measure of the 1-set"),
        ("influence", "estimate one coordinate influence"),
        ("threshold", "bisect for the bias hitting a target level"),
    ):
        pmc = mcsub.add_parser(name, help=help_text)
        _add_family_flags(pmc)
        pmc.add_argument("--seed", type=int, default=0)
        pmc.add_argument("--workers", type=int, help=f"default from {mc.WORKERS_ENV}")
        if name in ("mu", "influence"):
            pmc.add_argument("--p", type=float, default=0.5)
            pmc.add_argument("--samples", type=int, default=100_000)
        if name == "threshold":
            pmc.add_argument("--alpha", type=float, required=True)
            pmc.add_argument("--samples-per-step", dest="samples_per_step",
                             type=int, default=4096)
            pmc.add_argument("--tol-p", dest="tol_p", type=float, default=1e-3)

    return parser


_DISPATCH = {
    "analyze": cmd_analyze,
    "sweep": cmd_sweep,
    "threshold": cmd_threshold,
    "verify": cmd_verify,
    "mc": cmd_mc,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep" and args.out is not None:
            with open(args.out, "w", newline="") as handle:
                return cmd_sweep(args, handle)
        return _DISPATCH[args.command](args, sys.stdout)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        message = str(exc)
        if "dense-table cap" in message:
            message += " (the mc subcommands sample at any arity)"
        print(f"error: {message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
