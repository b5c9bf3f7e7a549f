"""Command-line front end.

Exit codes: 0 on success, 1 when an input fails validation (bad flags,
malformed files, out-of-range sizes), 2 when an LP solve fails.  Every
randomized subcommand takes ``--seed`` (default 0) and writes identical
bytes for identical arguments.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import __version__
from .errors import LpFailed, MwcError
from .graphs import load_graph, save_graph
from .instances import generate_gn, verify_gn
from .relaxation import align_embedding, load_embedding, save_embedding, solve_relaxation
from .schemes import RngState, load_config, round_embedding

HELP_WIDTH = 80

EVAL_FUNCTIONS = ("c_k", "c_inf", "c3", "d_bound")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Parser that reports usage errors through the validation exit code."""

    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _formatter(prog):
    # fixed width so help text does not depend on the terminal
    return argparse.RawDescriptionHelpFormatter(prog, width=HELP_WIDTH, max_help_position=30)


def _emit(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _fmt(x: float) -> str:
    return f"{float(x):.6f}"


def _dump_json(d: dict) -> str:
    return json.dumps(d, indent=2, sort_keys=True) + "\n"


# --- subcommands -----------------------------------------------------------------


def cmd_relax(args) -> int:
    g = load_graph(args.graph)
    emb, vol = solve_relaxation(g)
    save_embedding(emb, args.out)
    print(f"volume={_fmt(vol)}")
    return 0


def cmd_round(args) -> int:
    g = load_graph(args.graph)
    emb = load_embedding(args.embedding, g.node_count)
    cfg = load_config(args.scheme)
    inst = align_embedding(g, emb)
    lab, cost = round_embedding(cfg, inst, RngState(args.seed), args.trials)
    out = {"cost": float(cost), "labels": list(lab.label), "seed": args.seed, "trials": args.trials}
    if args.out:
        _emit(_dump_json(out), args.out)
    print(f"cost={_fmt(cost)}")
    return 0


def cmd_density(args) -> int:
    from .density import max_density_scan

    cfg = load_config(args.scheme)
    rep = max_density_scan(cfg, args.k, args.grid, args.eps, trials=args.trials,
                           rng=RngState(args.seed), method=args.method)
    _emit(rep.to_csv(), args.out)
    if args.out and args.out != "-":
        best = rep.argmax
        print(f"max_density={_fmt(best.mean)} stderr={_fmt(best.stderr)} method={best.method}")
    return 0


def cmd_search(args) -> int:
    from .discrete import save_distribution
    from .search import build_discrete_lp, solve_discrete_search

    if args.lp_out:
        from .lp import write_cplex_lp

        write_cplex_lp(build_discrete_lp(args.k, args.grid_n)[0], args.lp_out)
    d = solve_discrete_search(args.k, args.grid_n)
    if args.out:
        save_distribution(d, args.out)
    else:
        sys.stdout.write(_dump_json(d.to_dict()))
        return 0
    print(f"bound={_fmt(d.bound)} support={len(d.entries)}")
    return 0


def cmd_mesh_lp(args) -> int:
    from .search import build_mesh_lp, save_certificate, solve_mesh_lp

    if args.lp_out:
        from .lp import write_cplex_lp

        write_cplex_lp(build_mesh_lp(args.m, args.sources)[0], args.lp_out)
    c = solve_mesh_lp(args.m, args.sources)
    if args.out:
        save_certificate(c, args.out)
    else:
        sys.stdout.write(_dump_json(c.to_dict()))
        return 0
    print(f"W={_fmt(c.W)} gap={_fmt(c.gap_lower_bound)} mincut={_fmt(c.min_cut)}")
    return 0


def cmd_lowerbound(args) -> int:
    inst = generate_gn(args.n)
    if args.out_graph:
        save_graph(inst.graph, args.out_graph)
    if args.out_embedding:
        save_embedding(inst.embedding, args.out_embedding)
    rep = verify_gn(args.n)
    print(f"volume={rep.volume} mincut={rep.min_cut} ratio={_fmt(rep.ratio)}")
    return 0


def cmd_eval(args) -> int:
    from . import density as dn

    if args.fn in ("c_k", "d_bound") and args.k is None:
        raise UsageError(f"--fn {args.fn} needs --k")
    if args.fn == "c_k":
        v = dn.c_k(args.x1, args.x2, args.k)
    elif args.fn == "c_inf":
        v = dn.c_inf(args.x1, args.x2)
    elif args.fn == "c3":
        v = dn.c3(args.x1, args.x2)
    else:
        v = dn.d_bound(args.x1, args.x2, args.k)
    print(repr(float(v)))
    return 0


# --- parser ------------------------------------------------------------------------


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def _seed(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("seed must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mwcut", formatter_class=_formatter,
                description="LP relaxation, rounding schemes and gap instances for multiway cut.",
                epilog="Exit codes: 0 success, 1 validation error, 2 solver failure.\n"
                       "MWC_THREADS caps the worker threads of scans and rounding.")
    p.add_argument("--version", action="version", version=f"mwcut {__version__}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, helptext, desc):
        return sub.add_parser(name, help=helptext, description=desc, formatter_class=_formatter)

    s = add("relax", "solve the LP relaxation of a graph",
            "Solve the simplex-embedding LP of a graph file and write the optimal\n"
            "embedding (mwc-embedding text format). Prints volume=<LP value>.")
    s.add_argument("--graph", required=True, help="input graph file (mwc-graph text format)")
    s.add_argument("--out", required=True, help="output embedding file")
    s.set_defaults(func=cmd_relax)

    s = add("round", "round an embedding with a cutting scheme",
            "Sample --trials cuts from the scheme, keep the cheapest labeling and\n"
            "print cost=<value>. With --out, write JSON {cost, labels, seed, trials}.")
    s.add_argument("--graph", required=True, help="input graph file")
    s.add_argument("--embedding", required=True, help="input embedding file")
    s.add_argument("--scheme", required=True, help="scheme config (JSON with a 'variant' key)")
    s.add_argument("--trials", type=_positive_int, default=1000, help="number of sampled cuts (default 1000)")
    s.add_argument("--seed", type=_seed, default=0, help="random seed (default 0)")
    s.add_argument("--out", help="output labeling JSON")
    s.set_defaults(func=cmd_round)

    s = add("density", "scan the density of a cutting scheme",
            "Evaluate short aligned segments of length --eps centered at every point\n"
            "of the grid with step 1/--grid. Writes CSV rows\n"
            "alignment,x0..x{k-1},mean,stderr,method to --out (default stdout);\n"
            "with --out, prints max_density=<value> stderr=<value> method=<m>.")
    s.add_argument("--scheme", required=True, help="scheme config (JSON)")
    s.add_argument("--k", type=_positive_int, required=True, help="number of terminals")
    s.add_argument("--grid", type=_positive_int, required=True, help="grid resolution (>= 4)")
    s.add_argument("--eps", type=float, required=True, help="segment length (<= 1/(4 grid))")
    s.add_argument("--trials", type=int, default=100000, help="Monte-Carlo cuts per segment (default 100000)")
    s.add_argument("--seed", type=_seed, default=0, help="random seed (default 0)")
    s.add_argument("--method", choices=("auto", "exact", "mc"), default="auto",
                   help="evaluator; auto uses exact formulas when available (default auto)")
    s.add_argument("--out", help="output CSV file")
    s.set_defaults(func=cmd_density)

    s = add("search", "LP search over discrete sparc distributions",
            "Solve the discrete-sparc LP on an N-grid and write the optimal\n"
            "distribution as JSON {k, N, bound, entries:[{q, p}]} to --out\n"
            "(default stdout); with --out, prints bound=<value> support=<n>.")
    s.add_argument("--k", type=_positive_int, required=True, help="number of terminals (>= 3)")
    s.add_argument("--grid-n", type=_positive_int, required=True, help="grid size N")
    s.add_argument("--out", help="output distribution JSON")
    s.add_argument("--lp-out", help="also export the LP in CPLEX LP format")
    s.set_defaults(func=cmd_search)

    s = add("mesh-lp", "LP search for hard weightings of the triangular mesh",
            "Minimize the embedded volume of the M-mesh subject to every 3-way cut\n"
            "costing at least 1. Writes JSON {M, W, gap, min_cut, weights:[[u, v, w]]}\n"
            "to --out (default stdout); with --out, prints W, gap and mincut.")
    s.add_argument("--m", type=_positive_int, required=True, help="mesh subdivision M (<= 10)")
    s.add_argument("--sources", choices=("aux", "all"), default="aux",
                   help="distance sources: auxiliary nodes only, or every dual node (default aux)")
    s.add_argument("--out", help="output certificate JSON")
    s.add_argument("--lp-out", help="also export the LP in CPLEX LP format")
    s.set_defaults(func=cmd_mesh_lp)

    s = add("lowerbound", "generate and verify the gap instance G_N",
            "Build G_N on the 1/(3N) triangular grid, optionally write its graph and\n"
            "embedding files, and print volume=<11N+1> mincut=<12N> ratio=<value>.")
    s.add_argument("--n", type=_positive_int, required=True, help="instance size N (<= 30)")
    s.add_argument("--out-graph", help="output graph file")
    s.add_argument("--out-embedding", help="output embedding file")
    s.set_defaults(func=cmd_lowerbound)

    s = add("eval", "evaluate an analytic density function",
            "Print the value of c_k, c_inf, c3 or d_bound at (x1, x2).")
    s.add_argument("--fn", choices=EVAL_FUNCTIONS, required=True, help="function to evaluate")
    s.add_argument("--x1", type=float, required=True, help="first coordinate")
    s.add_argument("--x2", type=float, required=True, help="second coordinate")
    s.add_argument("--k", type=_positive_int, help="number of terminals (c_k and d_bound)")
    s.set_defaults(func=cmd_eval)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except LpFailed as exc:
        print(f"mwcut: solver failure: {exc}", file=sys.stderr)
        return 2
    except (MwcError, OSError, ValueError) as exc:
        print(f"mwcut: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
