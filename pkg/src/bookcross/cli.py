"""Command-line front end.

Subcommands: graph, dds, zk, exact, sdp, table.  Output is a pretty
table by default; --format json/csv emit machine-readable rows with a
provenance tag per value (exact | formula | sdp-certified | lifted |
prior-bound).  Exit codes: 0 success, 2 input error, 3 budget exhausted
(partial results are still emitted, flagged).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import ceil, comb

from .chordgraph import InputError, build_chord_graph, write_edge_list
from .drawings import (
    count_crossings,
    dds_crossing_count,
    dds_drawing,
    prior_lower_ratio,
    write_drawing,
)
from .exact import Budget, encode_wcnf, emit_dimacs_wcnf, nu_exact

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3

CSV_COLUMNS = ["k", "n", "value", "provenance", "runtime_s"]


@dataclass
class CliConfig:
    cache_dir: str
    output_format: str = "pretty"
    time_budget: float = 600.0
    node_budget: int | None = None
    solver_tol: float = 1e-8
    threads: int = 1

    def __post_init__(self):
        if self.output_format not in ("pretty", "json", "csv"):
            raise InputError(f"unknown output format {self.output_format!r}")
        if self.time_budget <= 0 or (self.node_budget is not None and self.node_budget <= 0):
            raise InputError("budgets must be positive")
        if self.threads < 1:
            raise InputError("threads must be >= 1")


@dataclass
class Row:
    k: int
    n: int
    value: object
    provenance: str
    runtime_s: float = 0.0
    flags: str = ""


def _emit(rows: list[Row], cfg: CliConfig, out, command: str, extra: dict | None = None) -> None:
    rows = sorted(rows, key=lambda r: (r.k, r.n))
    if cfg.output_format == "csv":
        writer = csv.writer(out)
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            writer.writerow([r.k, r.n, r.value, r.provenance, f"{r.runtime_s:.3f}"])
        return
    if cfg.output_format == "json":
        payload = {
            "command": command,
            "rows": [
                {
                    "k": r.k,
                    "n": r.n,
                    "value": r.value,
                    "provenance": r.provenance,
                    "runtime_s": round(r.runtime_s, 3),
                    **({"flags": r.flags} if r.flags else {}),
                }
                for r in rows
            ],
            "metadata": {
                "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                **(extra or {}),
            },
        }
        out.write(json.dumps(payload, indent=2) + "\n")
        return
    widths = [6, 6, 16, 16, 10]
    header = ["k", "n", "value", "provenance", "runtime_s"]
    out.write("  ".join(h.ljust(w) for h, w in zip(header, widths)) + "\n")
    for r in rows:
        cells = [str(r.k), str(r.n), str(r.value), r.provenance + (f" [{r.flags}]" if r.flags else ""), f"{r.runtime_s:.2f}"]
        out.write("  ".join(c.ljust(w) for c, w in zip(cells, widths)) + "\n")


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w"), True


def cmd_graph(args, cfg: CliConfig, out) -> int:
    g = build_chord_graph(args.n)
    out.write(f"c chord-overlap graph, n={g.n}: {g.num_vertices} vertices, {g.num_edges} edges, {g.d - 1} orbits\n")
    write_edge_list(g, out)
    return EXIT_OK


def cmd_dds(args, cfg: CliConfig, out) -> int:
    dr = dds_drawing(args.n, args.k)
    crossings = count_crossings(dr)
    write_drawing(dr, out)
    out.write(f"crossings: {crossings}\n")
    return EXIT_OK


def cmd_zk(args, cfg: CliConfig, out) -> int:
    rows = [
        Row(k=args.k, n=n, value=dds_crossing_count(n, args.k), provenance="formula")
        for n in range(1, args.n_max + 1)
    ]
    _emit(rows, cfg, out, "zk")
    return EXIT_OK


def cmd_exact(args, cfg: CliConfig, out) -> int:
    budget = Budget(max_nodes=cfg.node_budget, max_seconds=cfg.time_budget)
    t0 = time.monotonic()
    res = nu_exact(args.n, args.k, budget)
    dt = time.monotonic() - t0
    if args.wcnf_out:
        g = build_chord_graph(args.n)
        with open(args.wcnf_out, "w") as fh:
            emit_dimacs_wcnf(encode_wcnf(g, args.k), fh, style=args.wcnf_style)
    row = Row(
        k=args.k,
        n=args.n,
        value=res.nu,
        provenance="exact" if res.proved_optimal else "upper-bound",
        runtime_s=dt,
        flags="" if res.proved_optimal else "budget-exceeded",
    )
    _emit([row], cfg, out, "exact", extra=res.to_json_dict())
    return EXIT_OK if res.proved_optimal else EXIT_BUDGET


def cmd_sdp(args, cfg: CliConfig, out) -> int:
    # imported lazily: pulls in the conic solver stack
    from .sdpbound import certify_bound, fj_dense, fj_reduced, update_bound_cache

    t0 = time.monotonic()
    if args.n % 2 == 1:
        sol = fj_reduced(args.n, args.k, tol=cfg.solver_tol)
    else:
        g = build_chord_graph(args.n)
        sol = fj_dense(g, args.k, tol=cfg.solver_tol, form="dual")
    if not sol.ok:
        raise InputError(f"solver failed: status={sol.status}")
    cb = certify_bound(args.n, args.k, sol)
    dt = time.monotonic() - t0
    cache_path = os.path.join(cfg.cache_dir, "bounds.jsonl")
    wrote = update_bound_cache(cache_path, cb, solver_tol=cfg.solver_tol)
    rows = [
        Row(
            k=args.k,
            n=args.n,
            value=cb.nu_lower,
            provenance="sdp-certified",
            runtime_s=dt,
            flags="" if wrote else "cache-kept-stronger",
        )
    ]
    if args.lift_to is not None:
        from .sdpbound import lift_bound

        lifted = lift_bound(args.n, cb.ratio, args.lift_to)
        rows.append(
            Row(k=args.k, n=args.lift_to, value=ceil(lifted), provenance="lifted",
                flags=f"from m={args.n}")
        )
    _emit(rows, cfg, out, "sdp", extra={
        "fj_value": cb.fj_value,
        "ratio": cb.ratio,
        "margin": cb.certificate_feasibility_margin,
        "method": cb.method,
        "cached": wrote,
    })
    return EXIT_OK


def _exact_cell(task):
    n, k, max_nodes, max_seconds = task
    t0 = time.monotonic()
    res = nu_exact(n, k, Budget(max_nodes=max_nodes, max_seconds=max_seconds))
    return n, k, res.nu, res.proved_optimal, time.monotonic() - t0


def cmd_table(args, cfg: CliConfig, out) -> int:
    if args.which == 1:
        tasks = [
            (n, k, cfg.node_budget, cfg.time_budget)
            for k in range(args.k_min, args.k_max + 1)
            for n in range(args.n_min, args.n_max + 1)
        ]
        if cfg.threads > 1:
            with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
                results = list(pool.map(_exact_cell, tasks))
        else:
            results = [_exact_cell(t) for t in tasks]
        exhausted = False
        rows = []
        for n, k, nu, proved, dt in results:
            exhausted |= not proved
            rows.append(
                Row(
                    k=k, n=n, value=nu,
                    provenance="exact" if proved else "upper-bound",
                    runtime_s=dt,
                    flags="" if proved else "budget-exceeded",
                )
            )
        _emit(rows, cfg, out, "table1")
        return EXIT_BUDGET if exhausted else EXIT_OK

    from .sdpbound import certify_bound, fj_reduced, limit_table, load_bound_cache, update_bound_cache

    cache_path = os.path.join(cfg.cache_dir, "bounds.jsonl")

    def certified_ratio(k: int, m: int) -> float:
        cache = load_bound_cache(cache_path)
        rec = cache.get((m, k))
        if rec is not None:
            return (comb(m, 4) - rec["fj"]) / comb(m, 4)
        sol = fj_reduced(m, k, tol=cfg.solver_tol)
        cb = certify_bound(m, k, sol)
        update_bound_cache(cache_path, cb, solver_tol=cfg.solver_tol)
        return cb.ratio

    if args.which == 2:
        rows = []
        for k in range(args.k_min, args.k_max + 1):
            t0 = time.monotonic()
            ratio = certified_ratio(k, args.m)
            rows.append(
                Row(k=k, n=args.m, value=f"{ratio:.4e}", provenance="sdp-certified",
                    runtime_s=time.monotonic() - t0)
            )
            rows.append(
                Row(k=k, n=args.m, value=f"{float(prior_lower_ratio(k)):.4e}" if k >= 3 else "-",
                    provenance="prior-bound")
            )
        _emit(rows, cfg, out, "table2", extra={"m": args.m})
        return EXIT_OK

    if args.which == 3:
        ratios = {}
        if not args.formulas_only:
            for k in range(args.k_min, args.k_max + 1):
                ratios[k] = certified_ratio(k, args.m)
        entries = limit_table(range(args.k_min, args.k_max + 1), args.m, ratios if ratios else None)
        rows = []
        for entry in entries:
            k = entry["k"]
            rows.append(Row(k=k, n=0, value=f"{entry['prior_lower']:.4e}", provenance="prior-bound"))
            if entry["improved_lower"] is not None:
                rows.append(Row(k=k, n=args.m, value=f"{entry['improved_lower']:.4e}", provenance="sdp-certified"))
                rows.append(Row(k=k, n=args.m, value=f"{entry['quotient']:.4f}", provenance="quotient"))
            rows.append(Row(k=k, n=0, value=f"{entry['upper']:.4e}", provenance="formula", flags="dds-limit"))
        _emit(rows, cfg, out, "table3",
              extra={"m": args.m, "gaps": [e["k"] for e in entries if e["gap"]]})
        return EXIT_OK

    raise InputError(f"unknown table {args.which}")


def _add_common_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--format", choices=["pretty", "json", "csv"], default=d("pretty"))
    parser.add_argument("--out", default=d(None), help="output file (default stdout)")
    parser.add_argument("--cache-dir", default=d(None), help="bound cache directory (or $BOOKCROSS_CACHE_DIR)")
    parser.add_argument("--time-budget", type=float, default=d(600.0), help="seconds per exact solve")
    parser.add_argument("--node-budget", type=int, default=d(None), help="search node cap per exact solve")
    parser.add_argument("--solver-tol", type=float, default=d(1e-8))
    parser.add_argument("--threads", type=int, default=d(1), help="parallel (k,n) work items for tables")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bookcross",
        description="k-page book crossing numbers of complete graphs: exact values, certified bounds, drawings.",
    )
    _add_common_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("graph", help="emit chord-overlap graph stats and edge list")
    _add_common_flags(p, suppress=True)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("dds", help="emit the matching-construction drawing and its crossing count")
    _add_common_flags(p, suppress=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("zk", help="table of construction crossing counts")
    _add_common_flags(p, suppress=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)

    p = sub.add_parser("exact", help="exact crossing number by branch and bound")
    _add_common_flags(p, suppress=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--wcnf-out", default=None, help="also export the Max-SAT encoding (DIMACS WCNF)")
    p.add_argument("--wcnf-style", choices=["strict-top", "paper-literal"], default="strict-top")

    p = sub.add_parser("sdp", help="certified relaxation lower bound (reduced for odd n, dense otherwise)")
    _add_common_flags(p, suppress=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--lift-to", type=int, default=None,
                   help="also emit the bound lifted to a larger complete graph")

    p = sub.add_parser("table", help="reproduce summary tables 1 (exact), 2 (ratios at m), 3 (limits)")
    _add_common_flags(p, suppress=True)
    p.add_argument("which", type=int, choices=[1, 2, 3])
    p.add_argument("--m", type=int, default=13, help="odd size for relaxation-based columns")
    p.add_argument("--k-min", type=int, default=3)
    p.add_argument("--k-max", type=int, default=5)
    p.add_argument("--n-min", type=int, default=7)
    p.add_argument("--n-max", type=int, default=11)
    p.add_argument("--formulas-only", action="store_true", help="table 3: skip solver columns")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else 0
    cache_dir = args.cache_dir or os.environ.get("BOOKCROSS_CACHE_DIR") or os.path.expanduser("~/.cache/bookcross")
    out, close = _open_out(args.out)
    try:
        cfg = CliConfig(
            cache_dir=cache_dir,
            output_format=args.format,
            time_budget=args.time_budget,
            node_budget=args.node_budget,
            solver_tol=args.solver_tol,
            threads=args.threads,
        )
        handler = {
            "graph": cmd_graph,
            "dds": cmd_dds,
            "zk": cmd_zk,
            "exact": cmd_exact,
            "sdp": cmd_sdp,
            "table": cmd_table,
        }[args.command]
        return handler(args, cfg, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        if close:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
