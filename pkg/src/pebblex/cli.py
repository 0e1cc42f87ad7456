"""Command-line interface: ``pebblex <command> ...``.

Exit codes: 0 success, 2 precondition error, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from . import experiments as ex
from . import hypoexp, mc
from .errors import BudgetExceeded, PreconditionError
from .graphs import parse_graph
from .multiset import (at_least_family, sample_geometric_batch, sample_uniform_total_batch,
                       solvability_family, total_at_least_family)
from .pebbling import METHODS, is_solvable
from .shadow import verify_shadow_bound
from .thresholds import (geometric_threshold, geometric_threshold_exact,
                         uniform_threshold_exact, uniform_threshold_mc)

EXIT_OK, EXIT_PRECONDITION, EXIT_BUDGET = 0, 2, 3


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise PreconditionError(f"expected comma-separated integers, got {text!r}") from exc


def _emit(args, payload, table: list[dict] | None = None):
    """Print ``payload`` as JSON, or ``table`` as CSV when ``--format csv``."""
    if args.format == "csv" and table is not None:
        res = ex.ExperimentResult(args.command, {}, table, args.seed)
        sys.stdout.write(res.to_csv())
    else:
        print(json.dumps(payload, indent=2, default=ex._json_default))


# -- commands -----------------------------------------------------------------------

def cmd_solve(args) -> int:
    graph = parse_graph(args.graph)
    verdict = is_solvable(graph, _ints(args.dist), args.method)
    _emit(args, {"graph": args.graph, "n": graph.n, **verdict.to_dict()},
          [{"graph": args.graph, **verdict.to_dict()}])
    return EXIT_OK


def cmd_sample(args) -> int:
    if args.graph:
        args.n = parse_graph(args.graph).n
    rng = mc.stream(args.seed, "sample")
    if args.model == "uniform":
        Z = sample_uniform_total_batch(args.n, int(args.total), args.count, rng)
    else:
        Z = sample_geometric_batch(args.n, args.total, args.count, rng)
    rows = [{"index": i, "counts": " ".join(map(str, r))} for i, r in enumerate(Z.tolist())]
    _emit(args, {"model": args.model, "n": args.n, "total": args.total,
                 "samples": Z.tolist()}, rows)
    return EXIT_OK


def _family(args):
    if args.graph:
        return solvability_family(parse_graph(args.graph), args.method)
    if args.at_least:
        return at_least_family(_ints(args.at_least))
    if args.total_at_least:
        n, k = _ints(args.total_at_least)
        return total_at_least_family(n, k)
    raise PreconditionError("give --graph, --at-least or --total-at-least")


def cmd_threshold(args) -> int:
    M = _family(args)
    if args.kind == "uniform":
        if args.exact:
            T = uniform_threshold_exact(M)
            est = {"value": T, "ci_low": T, "ci_high": T, "method": "exact"}
            exhausted = False
        else:
            r = uniform_threshold_mc(M, args.budget, args.seed, args.workers)
            est, exhausted = r.to_dict(), r.budget_exhausted
    else:
        if args.exact:
            x = geometric_threshold_exact(M)
            est = {"value": x, "ci_low": x, "ci_high": x, "method": "exact"}
            exhausted = False
        else:
            r = geometric_threshold(M, args.budget, args.seed, args.workers,
                                    rel_tol=args.rel_tol)
            est, exhausted = r.to_dict(), r.budget_exhausted
    payload = {"family": M.name, "kind": args.kind, **est}
    _emit(args, payload, [payload])
    return EXIT_BUDGET if exhausted else EXIT_OK


def cmd_shadow(args) -> int:
    rep = verify_shadow_bound(args.n, args.T, args.mode, args.trials, args.seed)
    d = rep.to_dict()
    _emit(args, d, [{k: v for k, v in d.items() if k != "violations"}
                    | {"violations": len(rep.violations)}])
    return EXIT_OK


def cmd_ydist(args) -> int:
    if not args.x and not args.asymp:
        raise PreconditionError("give --x and/or --asymp")
    rows = []
    for x in args.x or []:
        lp = hypoexp.log_cdf_Yinf(x)
        row = {"x": x, "value": lp.value, "log_value": lp.log_value,
               "method": f"series order {hypoexp.select_order(x)}" if x > 0 else "zero",
               "sf_Yinf": hypoexp.sf_Yinf(x),
               "tail_bound": hypoexp.tail_bound(x) if x > 0 else 1.0}
        if args.n:
            row["cdf_Yn"] = hypoexp.cdf_Yn_exact(args.n, x)
        rows.append(row)
    for cp in args.asymp or []:
        lp = hypoexp.asymp_log_cdf(cp)
        rows.append({"x": cp / 2 ** cp, "value": lp.value, "log_value": lp.log_value,
                     "method": f"asymptotic c'={cp}"})
    payload = {"constants": {"N": hypoexp.constants().N, "q": hypoexp.constants().q,
                             "K": hypoexp.constants().K}, "rows": rows}
    if args.chi:
        L, p, r = int(args.chi[0]), float(args.chi[1]), float(args.chi[2])
        est = hypoexp.chi_X(L, p, r, budget=args.budget, seed=args.seed, workers=args.workers)
        payload["chi"] = {"L": L, "p": p, "r": r, **asdict(est),
                          "bound": hypoexp.chi_upper_bound(L, p, r)}
    _emit(args, payload, rows)
    return EXIT_OK


def _knobs(args) -> ex.Knobs:
    base = ex.DESK_KNOBS if args.experiment == "spectrum" else ex.DEFAULT_KNOBS
    over = {k: getattr(args, k) for k in ("G0", "L0", "K", "n0", "n1", "eps")
            if getattr(args, k, None) is not None}
    return ex.Knobs(**{**asdict(base), **over})


def cmd_experiment(args) -> int:
    knobs = _knobs(args)
    if args.experiment == "path":
        res = ex.run_path_experiment(args.n or [1 << 10, 1 << 12, 1 << 14], args.budget,
                                     args.seed, args.workers, args.rel_tol)
    elif args.experiment == "bouquet":
        inst = [tuple(_ints(s)) for s in (args.instance or ["65536,1,9", "4096,16,15"])]
        res = ex.run_bouquet_experiment(inst, args.budget, args.seed, args.workers, knobs,
                                        args.rel_tol)
    elif args.experiment == "spectrum":
        res = ex.run_spectrum_experiment((args.n or [1 << 16])[0], args.points, knobs,
                                         args.measure, args.budget, args.seed, args.workers,
                                         args.rel_tol)
    else:
        res = ex.run_lower_bound_experiment(args.n or [100, 1000, 10000], args.mc_n,
                                            args.budget, args.seed, args.workers)
    if res.knobs is not None:
        print("knobs: " + ", ".join(f"{k}={v}" for k, v in asdict(res.knobs).items()),
              file=sys.stderr)
    if args.out:
        for path in res.write(args.out, args.format):
            print(f"wrote {path}", file=sys.stderr)
    else:
        sys.stdout.write(res.to_csv() if args.format == "csv" else res.to_json() + "\n")
    return EXIT_BUDGET if res.budget_exhausted else EXIT_OK


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=10_000,
                        help="Monte Carlo samples per query (default 10000)")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", help="output directory (experiments)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = argparse.ArgumentParser(prog="pebblex", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="decide solvability of a distribution")
    s.add_argument("--graph", required=True,
                   help="path:<n>, clique:<n>, bouquet:<n>:<g>:<L> or an edge-list file")
    s.add_argument("--dist", required=True, help="comma-separated pebble counts")
    s.add_argument("--method", choices=METHODS, default="auto")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("sample", parents=[common], help="draw random multisets")
    s.add_argument("--model", choices=("uniform", "geometric"), default="uniform")
    base = s.add_mutually_exclusive_group(required=True)
    base.add_argument("--n", type=int, help="base size")
    base.add_argument("--graph", help="use the vertex count of this graph literal")
    s.add_argument("--total", "--T", type=float, required=True,
                   help="exact total (uniform) or mean total (geometric)")
    s.add_argument("--count", type=int, default=10)
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("threshold", parents=[common], help="uniform or geometric threshold")
    s.add_argument("--kind", "--model", dest="kind", choices=("uniform", "geometric"),
                   default="geometric")
    s.add_argument("--graph", help="solvability family of this graph")
    s.add_argument("--at-least", help="family {f >= v} for the comma-separated vector v")
    s.add_argument("--total-at-least", help="'n,k': family {total >= k} on n points")
    s.add_argument("--method", choices=METHODS, default="auto")
    s.add_argument("--exact", action="store_true", help="exact enumeration instead of MC")
    s.add_argument("--rel-tol", type=float, default=0.01)
    s.set_defaults(func=cmd_threshold)

    s = sub.add_parser("shadow", parents=[common], help="shadow-bound checks")
    s.add_argument("action", choices=("verify",))
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--T", type=int, required=True)
    s.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    s.add_argument("--trials", type=int, default=1000)
    s.set_defaults(func=cmd_shadow)

    s = sub.add_parser("ydist", parents=[common], help="hypoexponential CDF values")
    s.add_argument("--x", type=float, nargs="+", help="evaluate P(Y <= x)")
    s.add_argument("--asymp", type=float, nargs="+", metavar="C",
                   help="leading asymptotic term of P(Y <= c/2^c)")
    s.add_argument("--n", type=int, help="also evaluate the n-term sum exactly")
    s.add_argument("--chi", nargs=3, metavar=("L", "P", "R"),
                   help="also estimate chi_X(L, p, r) and its bound")
    s.set_defaults(func=cmd_ydist)

    s = sub.add_parser("experiment", parents=[common], help="run an experiment")
    s.add_argument("experiment", choices=("path", "bouquet", "spectrum", "lower-bound"))
    s.add_argument("--n", type=int, nargs="+", help="sizes (spectrum uses the first)")
    s.add_argument("--instance", action="append", help="bouquet 'n,g,L' (repeatable)")
    s.add_argument("--points", type=int, default=9, help="spectrum grid size")
    s.add_argument("--measure", action="store_true", help="spectrum: measure each bouquet")
    s.add_argument("--mc-n", type=int, default=100, help="lower-bound: size of the MC check")
    s.add_argument("--rel-tol", type=float, default=0.02)
    for knob, typ in (("G0", int), ("L0", int), ("K", float), ("n0", int), ("n1", int),
                      ("eps", float)):
        s.add_argument(f"--{knob}", type=typ, dest=knob)
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
