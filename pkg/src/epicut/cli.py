"""Command line: ``gen``, ``root``, ``solve`` and ``profile``.

Exit codes: 0 success, 2 configuration error, 3 solve failure.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import os
import sys

from .bnc import SUMMARY_HEADER, optimal_value, solve_instance
from .forge import GENERATORS, InstanceFormatError, generate, read_instance, write_instance
from .rootloop import ConfigError, ExperimentConfig, run_root_loop, write_profile

EXIT_OK, EXIT_CONFIG, EXIT_SOLVE = 0, 2, 3

log = logging.getLogger("epicut")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _k_value(text: str):
    if text == "adaptive":
        return text
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"K must be an integer or 'adaptive', got {text!r}")


def _add_instance(p):
    p.add_argument("instance", nargs="?", help="BDZ1 instance file")
    p.add_argument("--family", choices=sorted(GENERATORS), help="generate the instance instead of reading it")
    p.add_argument("--seed", type=int, default=0)


def _add_run(p):
    p.add_argument("--rule", choices=["greedy", "cutpl"], default="greedy")
    p.add_argument("--time-limit", type=float, default=None, help="seconds (root or total, per subcommand)")
    p.add_argument("--clock", choices=["wall", "work"], default="wall",
                   help="'work' counts simplex effort and makes timings reproducible")
    p.add_argument("--workers", type=int, default=None, help="per-block threads (default EPICUT_WORKERS or 1)")
    p.add_argument("--oracle-check", action="store_true", help="verify every cut by enumeration (n <= 12)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="epicut", description="Sparse disjunctive cuts for block-diagonal binary programs.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    g = sub.add_parser("gen", help="write a seeded instance")
    g.add_argument("--family", choices=sorted(GENERATORS), required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    r = sub.add_parser("root", help="run the root cut loop and write its profile")
    _add_instance(r)
    _add_run(r)
    r.add_argument("--k", type=_k_value, default=4)
    r.add_argument("--method", choices=["isparse", "pb"], default="isparse")
    r.add_argument("--out", help="profile CSV path")
    r.add_argument("--no-zstar", action="store_true", help="skip the EXT solve that fills gap_closed_pct")

    s = sub.add_parser("solve", help="branch-and-cut with EXT, BBC or IBC")
    _add_instance(s)
    _add_run(s)
    s.add_argument("--k", type=_k_value, default="adaptive")
    s.add_argument("--mode", choices=["ext", "bbc", "ibc"], default="ibc")
    s.add_argument("--root-time-limit", type=float, default=1800.0)
    s.add_argument("--out", help="append the summary line to this file")

    pr = sub.add_parser("profile", help="root profiles for several K values into a directory")
    _add_instance(pr)
    _add_run(pr)
    pr.add_argument("--k", default="4,7,10,adaptive", help="comma-separated K values")
    pr.add_argument("--method", default="isparse", help="comma-separated methods (isparse, pb)")
    pr.add_argument("--out", required=True, help="output directory")
    return ap


@contextlib.contextmanager
def _config_phase():
    """Bad files and parameters during setup are configuration errors."""
    try:
        yield
    except ConfigError:
        raise
    except (InstanceFormatError, OSError, ValueError, argparse.ArgumentTypeError) as exc:
        raise ConfigError(str(exc)) from exc


def _load(args):
    with _config_phase():
        if args.instance and args.family:
            raise ConfigError("give either an instance file or --family, not both")
        if args.instance:
            return read_instance(args.instance)
        if args.family:
            return generate(args.family, args.seed)
        raise ConfigError("no instance: pass a BDZ1 file or --family")


def _config(args, **kw) -> ExperimentConfig:
    base = dict(rule=args.rule, clock=args.clock, workers=args.workers, oracle_check=args.oracle_check,
                seed=args.seed, instance=args.instance, family=args.family)
    base.update(kw)
    with _config_phase():
        return ExperimentConfig(**base).check()


def _z_star(problem, args):
    if getattr(args, "no_zstar", False):
        return None
    try:
        return optimal_value(problem, time_limit=args.time_limit or 3600.0)
    except RuntimeError as exc:
        log.warning("no z* available: %s", exc)
        return None


def _cmd_gen(args) -> int:
    with _config_phase():
        problem = generate(args.family, args.seed)
        write_instance(problem, args.out)
    print(f"wrote {args.out} ({problem.name}: n={problem.n}, N={problem.N})")
    return EXIT_OK


def _root_line(res) -> str:
    last = res.profile[-1]
    return (f"status={res.status} rounds={res.rounds} z_LP={res.z_lp!r} z_R={res.z_root!r} "
            f"gap_closed_pct={last.gap_closed_pct:.6f} K={res.K}")


def _cmd_root(args) -> int:
    problem = _load(args)
    cfg = _config(args, k=args.k, method=args.method, mode="root", out=args.out,
                  root_time_limit=args.time_limit or 1800.0)
    z_star = _z_star(problem, args)
    res = run_root_loop(problem, cfg, z_star=z_star)
    if args.out:
        write_profile(res.profile, args.out)
    print(_root_line(res))
    return EXIT_OK


def _cmd_solve(args) -> int:
    problem = _load(args)
    cfg = _config(args, k=args.k, mode=args.mode, time_limit=args.time_limit or 3600.0,
                  root_time_limit=args.root_time_limit, out=args.out)
    res, _ = solve_instance(problem, cfg)
    line = res.summary()
    print(SUMMARY_HEADER)
    print(line)
    if args.out:
        new = not os.path.exists(args.out)
        with open(args.out, "a") as fh:
            if new:
                fh.write(SUMMARY_HEADER + "\n")
            fh.write(line + "\n")
    return EXIT_SOLVE if res.status == "infeasible" else EXIT_OK


def _cmd_profile(args) -> int:
    problem = _load(args)
    with _config_phase():
        ks = [_k_value(t.strip()) for t in args.k.split(",") if t.strip()]
        methods = [m.strip() for m in args.method.split(",") if m.strip()]
        os.makedirs(args.out, exist_ok=True)
    z_star = _z_star(problem, args)
    for method in methods:
        for k in ks:
            cfg = _config(args, k=k, method=method, mode="root", root_time_limit=args.time_limit or 1800.0)
            res = run_root_loop(problem, cfg, z_star=z_star)
            path = os.path.join(args.out, f"profile_{method}_{args.rule}_k{k}.csv")
            write_profile(res.profile, path)
            print(f"{path}: {_root_line(res)}")
    return EXIT_OK


COMMANDS = {"gen": _cmd_gen, "root": _cmd_root, "solve": _cmd_solve, "profile": _cmd_profile}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as exc:
        print(f"epicut: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"epicut: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - any engine failure is a solve failure
        print(f"epicut: solve failed: {exc}", file=sys.stderr)
        return EXIT_SOLVE


if __name__ == "__main__":
    sys.exit(main())
