"""Command line entry point: ``reldesign {solve,design,table1,table2,heatmap,bench}``.

Any option may also come from a JSON file given with ``--config``; explicit
command-line options win. Exit codes: 0 success, 1 usage error, 2 solver
failure, 3 infeasible design.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from .design import DesignConfig, build_design_lp
from .entropy_nash import (ConvergenceError, DivergenceError, EntropyNashConfig,
                           GDConfig, gradient_descent, solve)
from .experiments import (mode_profile, run_heatmap, run_scalability, run_table1,
                          run_table2, write_csv)
from .game import enumerate_pure_nash, expected_social_cost, social_cost
from .io import GameFormatError, load_game, relationships_from_spec
from .lp import LPNumericalError
from .order_and_design import order_and_design
from .scenarios import make_prisoners_dilemma

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_INFEASIBLE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p):
    p.add_argument("--config", help="JSON file supplying default option values")
    p.add_argument("--out", help="write the result here instead of stdout")
    p.add_argument("--seed", type=int, default=0)


def _entropy_flags(p, lam=0.3):
    p.add_argument("--lambda", dest="lam", type=float, default=lam, help="entropy weight")
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=200)


def _gd_flags(p):
    p.add_argument("--gamma", type=float, default=1.0, help="L1 penalty coefficient")
    p.add_argument("--alpha", type=float, default=0.01, help="step size")
    p.add_argument("--beta", type=float, default=0.1, help="gradient-norm threshold")
    p.add_argument("--max-steps", type=int, default=2000)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="reldesign", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="equilibrium of a game file")
    _common(p)
    p.add_argument("--game", required=True)
    p.add_argument("--method", choices=("pure_nash", "entropy_nash"), default="entropy_nash")
    _entropy_flags(p)

    p = sub.add_parser("design", help="design relationship weights for a game file")
    _common(p)
    p.add_argument("--game", required=True)
    p.add_argument("--relationships", default="individual",
                   help="individual | all_people | reciprocity | JSON file")
    p.add_argument("--algorithm", choices=("oad", "gd"), default="oad")
    p.add_argument("--k", type=float, default=1.0, help="L1 budget for the design LP")
    p.add_argument("--sign-mode", choices=("signed", "nonnegative"), default="signed")
    p.add_argument("--lp-dump", help="write the design LP of the achieved target as text")
    _entropy_flags(p)
    _gd_flags(p)

    p = sub.add_parser("table1", help="n-player traffic comparison (CSV)")
    _common(p)
    p.add_argument("--ns", type=int, nargs="+", default=[2, 3, 4, 5])
    p.add_argument("--k", type=float, help="one budget for every n (default: per-n budgets)")
    p.add_argument("--no-gd", action="store_true")

    p = sub.add_parser("table2", help="relationship-type comparison (CSV)")
    _common(p)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--no-gd", action="store_true")
    _entropy_flags(p)
    _gd_flags(p)

    p = sub.add_parser("heatmap", help="social cost over a 2-weight grid (CSV)")
    _common(p)
    p.add_argument("--game", help="game file; defaults to the prisoner's dilemma")
    p.add_argument("--relationships", default="individual")
    p.add_argument("--grid", type=int, default=50)
    p.add_argument("--lambda", dest="lams", type=float, nargs="+", default=[0.3])
    p.add_argument("--solver", choices=("entropy_nash", "pure_nash_grid"),
                   default="entropy_nash")

    p = sub.add_parser("bench", help="runtime scaling in the number of players (CSV)")
    _common(p)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--timeout", type=float, default=300.0)
    p.add_argument("--algorithms", nargs="+", choices=("oad", "gd"), default=["oad", "gd"])
    p.add_argument("--k", type=float, default=1.0)
    return parser


def parse_args(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config) as f:
                conf = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config {args.config}: {exc}")
        if not isinstance(conf, dict):
            parser.error("config file must hold a JSON object")
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(k.replace("-", "_") for k in conf) - known - {"lambda"}
        if unknown:
            parser.error(f"unknown config keys: {sorted(unknown)}")
        defaults = {("lam" if k == "lambda" and "lam" in known else
                     "lams" if k == "lambda" else k.replace("-", "_")): v
                    for k, v in conf.items()}
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def _emit(text, out):
    if out:
        with open(out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _jsonable(x):
    return [[float(p) for p in xi] for xi in x]


def cmd_solve(args):
    g, V = load_game(args.game)
    if args.method == "pure_nash":
        profiles = enumerate_pure_nash(g)
        if not profiles:
            print("no pure Nash equilibrium", file=sys.stderr)
            return EXIT_SOLVER
        result = {"method": "pure_nash",
                  "equilibria": [{"profile": list(s), "social_cost": social_cost(g, V, s)}
                                 for s in profiles]}
    else:
        cfg = EntropyNashConfig(args.lam, args.epsilon, args.max_iter, args.seed)
        sol = solve(g, cfg)
        result = {"method": "entropy_nash", "lambda": args.lam,
                  "distributions": _jsonable(sol.x),
                  "expected_social_cost": expected_social_cost(g, V, sol.x),
                  "residual": sol.residual, "iterations": sol.iterations}
    _emit(json.dumps(result) + "\n", args.out)
    return EXIT_OK


def cmd_design(args):
    g, V = load_game(args.game)
    phi = relationships_from_spec(args.relationships, g.num_players)
    if args.algorithm == "oad":
        cfg = DesignConfig(args.k, args.sign_mode)
        res = order_and_design(g, V, phi, cfg)
        if not res.found:
            print(f"no profile could be designed within budget k={args.k} "
                  f"({res.profiles_visited} visited)", file=sys.stderr)
            return EXIT_INFEASIBLE
        if args.lp_dump:
            with open(args.lp_dump, "w") as f:
                f.write(build_design_lp(g, phi, res.target_profile, cfg).to_text())
        result = {"w": [float(v) for v in res.w], "profile": list(res.target_profile),
                  "achieved_cost": res.social_cost,
                  "elapsed_seconds": res.elapsed_seconds,
                  "steps_or_profiles_visited": res.profiles_visited}
    else:
        en = EntropyNashConfig(args.lam, args.epsilon, args.max_iter, args.seed)
        gd = GDConfig(args.alpha, args.beta, args.gamma, args.max_steps)
        t0 = time.perf_counter()
        res = gradient_descent(g, V, phi, en, gd)
        result = {"w": [float(v) for v in res.w], "profile": list(mode_profile(res.x)),
                  "distributions": _jsonable(res.x),
                  "achieved_cost": res.expected_social_cost,
                  "elapsed_seconds": time.perf_counter() - t0,
                  "steps_or_profiles_visited": res.steps,
                  "converged": res.converged}
    _emit(json.dumps(result) + "\n", args.out)
    print(f"{args.algorithm:>4}  profile={result['profile']}  "
          f"cost={result['achieved_cost']:.6g}  "
          f"steps={result['steps_or_profiles_visited']}  "
          f"time={result['elapsed_seconds']:.3g}s", file=sys.stderr)
    return EXIT_OK


def cmd_table1(args):
    budgets = None if args.k is None else {n: args.k for n in args.ns}
    rows = run_table1(args.ns, budgets, include_gd=not args.no_gd)
    _emit(write_csv(rows), args.out)
    return EXIT_OK


def cmd_table2(args):
    rows = run_table2(k=args.k, lam=args.lam, gamma=args.gamma, include_gd=not args.no_gd)
    _emit(write_csv(rows), args.out)
    return EXIT_OK


def cmd_heatmap(args):
    if args.game:
        g, V = load_game(args.game)
    else:
        g, V = make_prisoners_dilemma(), None
    phi = relationships_from_spec(args.relationships, g.num_players)
    maps = run_heatmap(g, phi, args.grid, args.lams, args.solver, V, args.seed)
    if len(maps) == 1:
        _emit(write_csv(next(iter(maps.values()))), args.out)
    else:
        # one file per entropy weight
        for lam, rows in maps.items():
            out = f"{args.out.rsplit('.', 1)[0]}_lambda{lam:g}.csv" if args.out else None
            if out is None:
                sys.stdout.write(f"# lambda={lam:g}\n")
            _emit(write_csv(rows), out)
    return EXIT_OK


def cmd_bench(args):
    rows, fits = run_scalability(range(args.n_min, args.n_max + 1), args.algorithms,
                                 args.repeats, args.timeout, args.k)
    for alg, (slope, icpt) in fits.items():
        rows.append({"n": "fit", "algorithm": alg, "slope": slope, "intercept": icpt})
    _emit(write_csv(rows), args.out)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "design": cmd_design, "table1": cmd_table1,
            "table2": cmd_table2, "heatmap": cmd_heatmap, "bench": cmd_bench}


def main(argv=None) -> int:
    args = parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (GameFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, DivergenceError, LPNumericalError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
