"""Command line entry point.

Exit codes: 0 pass, 1 invariant failure, 2 infeasible instance, 3 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import oracles
from .adversary import ReferenceGD, run_adversary, validate_claims
from .core import InfeasibleError, InstanceError, read_instance, save_instance, write_instance
from .harness import gen_random, ratio_sweep, run_cip, run_clp

EXIT_OK, EXIT_INVARIANT, EXIT_INFEASIBLE, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _load(path):
    try:
        return read_instance(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def cmd_solve_clp(args) -> int:
    inst = _load(args.instance)
    if inst.has_bounds:
        raise UsageError("instance has upper bounds; use solve-cip")
    rep = run_clp(inst, check_invariants=args.check_invariants, oracle=args.oracle)
    _emit(rep.dumps(), args.report)
    return rep.exit_code


def cmd_solve_cip(args) -> int:
    inst = _load(args.instance)
    if not inst.has_bounds:
        raise UsageError("instance has no upper bounds; use solve-clp")
    rep = run_cip(inst, args.seed, check_invariants=args.check_invariants, oracle=args.oracle)
    _emit(rep.dumps(), args.report)
    return rep.exit_code


def cmd_gen_random(args) -> int:
    try:
        inst = gen_random(args.n, args.m, args.k_max, (args.coeff_min, args.coeff_max),
                          args.u_max, args.density, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.out in (None, "-"):
        sys.stdout.write(save_instance(inst).decode())
    else:
        write_instance(inst, args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = _load(args.instance)
    if args.mode == "lp":
        res = oracles.lp_opt(inst)
    else:
        res = oracles.ip_opt(inst, limit=args.limit)
    _emit(json.dumps({"mode": args.mode, **res.to_dict()}, sort_keys=True) + "\n", args.report)
    return EXIT_INFEASIBLE if res.status is oracles.Status.INFEASIBLE else EXIT_OK


def cmd_adversary(args) -> int:
    try:
        algo = ReferenceGD(args.greediness)
        trace = run_adversary(algo, args.rho, max_phases=args.phases,
                              fast_forward=not args.no_fast_forward)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    claims = validate_claims(trace)
    doc = trace.to_dict()
    doc["greediness"] = str(algo.greediness)
    doc["checks"] = [{"claim": name, "phase": ph, "ok": ok} for name, ph, ok in claims.checks]
    doc["passed"] = claims.passed
    _emit(json.dumps(doc, sort_keys=True) + "\n", args.report)
    return EXIT_OK if claims.passed else EXIT_INVARIANT


def cmd_ratio_sweep(args) -> int:
    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {args.config}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config is not valid JSON: {exc}") from exc
    rows = ratio_sweep(config)
    _emit("".join(json.dumps(r, sort_keys=True) + "\n" for r in rows), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="onlinecover", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, fn, help_ in (("solve-clp", cmd_solve_clp, "fractional solver, no upper bounds"),
                            ("solve-cip", cmd_solve_cip, "box solver plus rounding")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--instance", required=True)
        if name == "solve-cip":
            s.add_argument("--seed", type=int, required=True)
        s.add_argument("--check-invariants", action="store_true")
        s.add_argument("--oracle", action="store_true", help="compute offline optima")
        s.add_argument("--report", default=None, help="output file (default stdout)")
        s.set_defaults(func=fn)

    g = sub.add_parser("gen-random", help="write a seeded random instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--k-max", type=int, required=True)
    g.add_argument("--coeff-min", type=float, default=0.1)
    g.add_argument("--coeff-max", type=float, default=2.0)
    g.add_argument("--u-max", type=int, default=None)
    g.add_argument("--density", type=float, default=None)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gen_random)

    o = sub.add_parser("oracle", help="offline LP or IP optimum")
    o.add_argument("--instance", required=True)
    o.add_argument("--mode", choices=("lp", "ip"), required=True)
    o.add_argument("--limit", type=int, default=oracles.ENUM_LIMIT)
    o.add_argument("--report", default=None)
    o.set_defaults(func=cmd_oracle)

    a = sub.add_parser("adversary", help="play the phase adversary against the reference scheme")
    a.add_argument("--rho", type=int, required=True)
    a.add_argument("--phases", type=int, default=3)
    a.add_argument("--greediness", type=str, default="1")
    a.add_argument("--no-fast-forward", action="store_true")
    a.add_argument("--report", default=None)
    a.set_defaults(func=cmd_adversary)

    r = sub.add_parser("ratio-sweep", help="realized competitive ratios per family")
    r.add_argument("--config", required=True)
    r.add_argument("--out", default=None)
    r.set_defaults(func=cmd_ratio_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InstanceError, oracles.SearchTooLarge) as exc:
        print(f"onlinecover: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleError as exc:
        print(f"onlinecover: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    raise SystemExit(main())
