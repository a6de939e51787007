"""Command-line front end.

Graph files are YAML mappings::

    d: <int>            symmetry rank
    n: <int>            number of vertex orbits
    edges:              one entry per edge orbit, 1-based orbit indices
      - [i, j, [s_1, ..., s_d]]

An entry joins v_{i,0} to v_{j,s}; repeat an entry for parallel orbits.
Lattices are given by ``--lattice "a,b;c,d"`` (rows of the matrix whose
columns generate the sublattice) or ``--diag N`` for diag(N, ..., N).
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import laplacian as lap
from . import mahler as mh
from .laurent import from_text, reciprocal, to_text
from .periodic_graph import PeriodicGraph, doubled, dumps, grid_graph, read_graph
from .quotient import (
    build_quotient,
    eigenvalue_product,
    spanning_tree_count,
    tau_deletion_contraction,
    MAX_DC_EDGES,
)
from .spectral import product_formula
from .sublattice import diagonal, parse_lattice

MAX_D = 8
MAX_N = 64


class UsageError(Exception):
    """Invalid input; reported on one line with exit status 2."""


def _load_graph(path: str) -> PeriodicGraph:
    try:
        g = read_graph(path)
    except OSError as exc:
        raise UsageError(f"cannot read graph file {path}: {exc.strerror}") from None
    except ValueError as exc:
        raise UsageError(f"invalid graph file {path}: {exc}") from None
    if g.d > MAX_D:
        raise UsageError(f"symmetry rank d={g.d} exceeds the limit {MAX_D}")
    if g.n > MAX_N:
        raise UsageError(f"n={g.n} vertex orbits exceed the limit {MAX_N}")
    return g


def _lattice(args, d: int):
    if args.lattice is not None and args.diag is not None:
        raise UsageError("give either --lattice or --diag, not both")
    try:
        if args.diag is not None:
            if args.diag < 1:
                raise UsageError("--diag must be positive")
            lat = diagonal(d, args.diag)
        elif args.lattice is not None:
            lat = parse_lattice(args.lattice)
        else:
            raise UsageError("a lattice is required (--lattice or --diag)")
    except ValueError as exc:
        raise UsageError(f"malformed lattice: {exc}") from None
    if lat.d != d:
        raise UsageError(f"lattice has dimension {lat.d} but the graph has d={d}")
    if lat.index > args.max_index:
        raise UsageError(f"lattice index {lat.index} exceeds --max-index {args.max_index}")
    return lat


def _require_nonzero(g: PeriodicGraph):
    delta = lap.laplacian_polynomial(g)
    test = lap.delta_is_zero(g, delta)
    if test:
        orbits = ",".join(str(v) for v in test.witness.orbits)
        raise UsageError(
            f"Laplacian polynomial is identically zero: vertex orbits {{{orbits}}} form a closed component"
        )
    return delta


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _emit_table(out, header, rows, fmt: str) -> None:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
        out.write(buf.getvalue())
    else:
        cells = [list(header)] + [[_fmt(v) for v in row] for row in rows]
        widths = [max(len(r[k]) for r in cells) for k in range(len(header))]
        for r in cells:
            out.write("  ".join(c.rjust(wd) for c, wd in zip(r, widths)).rstrip() + "\n")


# commands


def cmd_delta(args, out):
    g = _load_graph(args.graph)
    data = lap.laplacian_matrix(g)
    delta = data.delta
    out.write(to_text(delta) + "\n")
    zero = lap.delta_is_zero(g, delta)
    out.write(f"zero: {'yes' if zero else 'no'}\n")
    out.write(f"reciprocal: {'yes' if reciprocal(delta) == delta else 'no'}\n")
    blocks = lap.factor_blocks(g)
    out.write(f"blocks: {len(blocks)}\n")
    for part, f in blocks:
        orbits = ",".join(str(v) for v in part.orbits)
        out.write(f"  {{{orbits}}}: {to_text(f)}\n")
    return 0


def cmd_count(args, out):
    g = _load_graph(args.graph)
    lat = _lattice(args, g.d)
    start = time.perf_counter()
    h = build_quotient(g, lat, args.max_index)
    report = spanning_tree_count(h)
    elapsed = time.perf_counter() - start
    out.write(f"T = {report.T}\n")
    out.write(f"tau = [{', '.join(str(t) for t in report.tau_per_component)}]\n")
    out.write(f"n_lambda = {report.n_lambda}\n")
    out.write(f"log T = {report.log_T()!r}\n")
    if args.oracle:
        if h.edge_count <= MAX_DC_EDGES:
            dc = math.prod(tau_deletion_contraction(h.subgraph(c)) for c in h.components)
            out.write(f"deletion-contraction T = {dc} ({'agrees' if dc == report.T else 'DISAGREES'})\n")
        else:
            out.write(f"deletion-contraction skipped: {h.edge_count} edges > {MAX_DC_EDGES}\n")
        ev = eigenvalue_product(h, log=True)
        rel = abs(math.expm1(ev - report.log_T()))
        out.write(f"eigenvalue log T = {ev!r} (relative difference {rel:.3e})\n")
    print(f"time: {elapsed:.3f} s", file=sys.stderr)
    return 0


def cmd_verify_product(args, out):
    g = _load_graph(args.graph)
    _require_nonzero(g)
    lat = _lattice(args, g.d)
    exact = spanning_tree_count(build_quotient(g, lat, args.max_index)).log_T()
    res = product_formula(g, lat, max_index=args.max_index)
    header = ["index", "log_T_exact", "log_T_product", "abs_diff", "skipped_points"]
    row = [lat.index, exact, res.log_value, abs(exact - res.log_value), res.skipped]
    _emit_table(out, header, [row], args.format)
    return 0


def _scale(args):
    return 1 / math.log(2) if args.bits else 1.0


def cmd_mahler(args, out):
    if (args.poly is None) == (args.graph is None):
        raise UsageError("give a polynomial or --graph, not both")
    if args.graph is not None:
        f = _require_nonzero(_load_graph(args.graph))
    else:
        try:
            f = from_text(args.poly)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if f.is_zero():
            raise UsageError("Mahler measure of the zero polynomial is undefined")
    if args.grid is not None and args.grid**f.d > args.max_grid:
        raise UsageError(f"grid {args.grid}^{f.d} exceeds --max-grid {args.max_grid}")
    if args.method == "auto":
        est = mh.mahler_measure(f, args.grid, args.samples, args.seed)
    elif args.method == "jensen":
        if f.d != 1:
            raise UsageError("--method jensen needs a one-variable polynomial")
        est = mh.mahler_jensen(f)
    elif args.method == "grid":
        est = mh.mahler_quadrature(f, args.grid)
    else:
        est = mh.mahler_monte_carlo(f, args.samples, args.seed)
    k = _scale(args)
    header = ["polynomial", "value", "error_bound", "method", "samples_or_grid", "unit"]
    row = [to_text(f), est.value * k, est.error_bound * k, est.method, est.samples_or_grid,
           "bits" if args.bits else "nats"]
    _emit_table(out, header, [row], args.format)
    return 0


def _parse_range(text: str) -> list[int]:
    try:
        parts = [int(p) for p in text.split(":")]
    except ValueError:
        raise UsageError(f"malformed range {text!r}; use START:STOP[:STEP]") from None
    if len(parts) == 2:
        parts.append(1)
    if len(parts) != 3 or parts[2] < 1 or parts[0] < 1 or parts[1] < parts[0]:
        raise UsageError(f"malformed range {text!r}; use START:STOP[:STEP]")
    return list(range(parts[0], parts[1] + 1, parts[2]))


def _growth_row(payload):
    g, lat = payload
    report = spanning_tree_count(build_quotient(g, lat))
    return report.log_T() / lat.index, report.component_count


def cmd_converge(args, out):
    g = _load_graph(args.graph)
    delta = _require_nonzero(g)
    if args.lattice:
        try:
            lattices = [parse_lattice(s) for s in args.lattice]
        except ValueError as exc:
            raise UsageError(f"malformed lattice: {exc}") from None
    else:
        lattices = [diagonal(g.d, N) for N in _parse_range(args.diag_range)]
    for lat in lattices:
        if lat.d != g.d:
            raise UsageError(f"lattice {lat} has the wrong dimension")
        if lat.index > args.max_index:
            raise UsageError(f"lattice index {lat.index} exceeds --max-index {args.max_index}")
    est = mh.mahler_measure(delta, args.grid, seed=args.seed)
    payloads = [(g, lat) for lat in lattices]
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(_growth_row, payloads))
    else:
        results = [_growth_row(p) for p in payloads]
    k = _scale(args)
    header = ["min_length", "index", "components", "rate", "mahler", "discrepancy"]
    rows = [
        [lat.min_length, lat.index, comps, rate * k, est.value * k, abs(rate - est.value) * k]
        for lat, (rate, comps) in zip(lattices, results)
    ]
    _emit_table(out, header, rows, args.format)
    return 0


def cmd_grid_table(args, out):
    if not 1 <= args.d_max <= 4:
        raise UsageError("--d-max must be between 1 and 4")
    if args.grid is not None and args.grid ** min(args.d_max, 3) > args.max_grid:
        raise UsageError(f"grid exceeds --max-grid {args.max_grid}")
    rows = mh.grid_bound_report(args.d_max, args.grid, seed=args.seed)
    k = _scale(args)
    header = ["d", "mahler", "error_bound", "log_2d", "deficit", "method", "samples_or_grid"]
    table = [
        [r.d, r.estimate.value * k, r.estimate.error_bound * k, r.log_2d * k, r.deficit * k,
         r.estimate.method, r.estimate.samples_or_grid]
        for r in rows
    ]
    _emit_table(out, header, table, args.format)
    return 0


def cmd_gap_table(args, out):
    if args.s_max < 2:
        raise UsageError("--s-max must be at least 2")
    rows = mh.gap_report(args.s_max)
    k = _scale(args)
    header = ["s", "mahler", "error_bound", "at_least_log2"]
    table = [[r.s, r.estimate.value * k, r.estimate.error_bound * k, r.at_least_log2] for r in rows]
    _emit_table(out, header, table, args.format)
    return 0


def cmd_make_graph(args, out):
    if args.family == "gap":
        if args.size < 1:
            raise UsageError("gap family needs s >= 1")
        g = PeriodicGraph(1, 1, [(1, 1, (1,)), (1, 1, (args.size,))])
    else:
        if not 1 <= args.size <= MAX_D:
            raise UsageError(f"dimension must be between 1 and {MAX_D}")
        g = grid_graph(args.size)
        if args.family == "doubled-grid":
            g = doubled(g)
        elif args.family == "grid-drop-last":
            last = tuple(int(k == args.size - 1) for k in range(args.size))
            g = g.without(lambda e: e[2] == last)
    out.write(dumps(g))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="treegrowth",
        description="Spanning trees of torus quotients of periodic graphs and Mahler measures.",
        epilog=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "csv"], default="text")
    common.add_argument("--max-index", type=int, default=10**6, help="largest allowed lattice index")
    common.add_argument("--max-grid", type=int, default=mh.MAX_GRID_NODES, help="largest allowed quadrature node count")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1, help="worker processes for table commands")
    common.add_argument("--bits", action="store_true", help="report logarithms in bits")

    lattice = argparse.ArgumentParser(add_help=False)
    lattice.add_argument("--lattice", help='rows of the generating matrix, e.g. "2,0;0,2"')
    lattice.add_argument("--diag", type=int, help="use diag(N, ..., N)")

    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("delta", parents=[common], help="print the Laplacian polynomial")
    s.add_argument("graph")
    s.set_defaults(func=cmd_delta)

    s = sub.add_parser("count", parents=[common, lattice], help="exact spanning tree count of a quotient")
    s.add_argument("graph")
    s.add_argument("--oracle", action="store_true", help="cross-check with deletion-contraction and eigenvalues")
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("verify-product", parents=[common, lattice], help="exact log T against the root-of-unity product")
    s.add_argument("graph")
    s.set_defaults(func=cmd_verify_product)

    s = sub.add_parser("mahler", parents=[common], help="logarithmic Mahler measure")
    s.add_argument("poly", nargs="?", help='polynomial such as "4 - x1 - x1^-1 - x2 - x2^-1"')
    s.add_argument("--graph", help="use the Laplacian polynomial of this graph file")
    s.add_argument("--method", choices=["auto", "jensen", "grid", "monte-carlo"], default="auto")
    s.add_argument("--grid", type=int, help="midpoint nodes per axis")
    s.add_argument("--samples", type=int, default=mh.DEFAULT_SAMPLES)
    s.set_defaults(func=cmd_mahler)

    s = sub.add_parser("converge", parents=[common], help="growth-rate table log T / index against m(Delta)")
    s.add_argument("graph")
    s.add_argument("--diag-range", default="4:16:4", help="START:STOP[:STEP] for diag(N, ..., N)")
    s.add_argument("--lattice", action="append", help="explicit lattice; repeatable")
    s.add_argument("--grid", type=int)
    s.set_defaults(func=cmd_converge)

    s = sub.add_parser("grid-table", parents=[common], help="m(Delta(G_d)) against log 2d")
    s.add_argument("--d-max", type=int, default=3)
    s.add_argument("--grid", type=int)
    s.set_defaults(func=cmd_grid_table)

    s = sub.add_parser("gap-table", parents=[common], help="m(4 - x - 1/x - x^s - x^-s) for s = 2..s_max")
    s.add_argument("--s-max", type=int, default=10)
    s.set_defaults(func=cmd_gap_table)

    s = sub.add_parser("make-graph", parents=[common], help="write a graph file for a standard family")
    s.add_argument("family", choices=["grid", "doubled-grid", "grid-drop-last", "gap"])
    s.add_argument("size", type=int, help="dimension d, or s for the gap family")
    s.set_defaults(func=cmd_make_graph)
    return p


def run(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1 or args.max_index < 1 or args.max_grid < 1:
        print("error: guards and --threads must be positive", file=sys.stderr)
        return 2
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
