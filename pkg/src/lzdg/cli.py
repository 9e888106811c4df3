"""Command line: build, domination, aut and verify.

Exit codes: 0 success, 1 failed checks, 2 bad usage or configuration,
3 a size cap was hit.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict
from pathlib import Path

from .modular import InvalidInput, Unsupported
from .rings import ResourceLimit, Ring

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3
DEFAULT_OUT = "lzdg_out"


def _csv_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _ring_from_args(args) -> Ring:
    if args.ring == "quat":
        if args.n is None:
            raise InvalidInput("--ring quat needs --n")
        return Ring("quat", args.n)
    if args.n is not None:
        return Ring("mat", args.n)
    if args.p is None or args.s is None:
        raise InvalidInput("--ring mat needs --p and --s (or --n)")
    from .modular import factor_pairs
    if args.p < 2 or factor_pairs(args.p) != ((args.p, 1),):
        raise InvalidInput(f"--p must be a prime, got {args.p}")
    if args.s < 1:
        raise InvalidInput("--s must be >= 1")
    return Ring("mat", args.p**args.s)


def _out_dir(args, required: bool) -> Path | None:
    out = args.out or os.environ.get("LZDG_OUT")
    if out is None and required:
        out = DEFAULT_OUT
    return Path(out) if out else None


def _write_json(path: Path, doc) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _emit(doc) -> None:
    print(json.dumps(doc, indent=2, sort_keys=True))


def _file_stem(ring: Ring) -> str:
    return f"{ring.kind}_{ring.n}"


# -- subcommands -------------------------------------------------------------------

def cmd_build(args) -> int:
    from .zdg import (build_graph, class_table_csv, compress, compressed_graph, to_dot,
                      to_json, twin_partition)

    ring = _ring_from_args(args)
    formats = _csv_list(args.export)
    bad = set(formats) - {"dot", "json", "csv"}
    if bad:
        raise InvalidInput(f"unknown export format(s): {', '.join(sorted(bad))}")
    out = _out_dir(args, required=True)
    out.mkdir(parents=True, exist_ok=True)
    stem = _file_stem(ring)
    written = []
    if args.compressed:
        if set(formats) - {"csv"}:
            raise InvalidInput("--compressed only exports the csv class table")
        cg = compressed_graph(ring, args.element_cap, args.threads)
        stats = {"ring": ring.name, "vertices": cg.vertex_count(), "classes": len(cg)}
    else:
        g = build_graph(ring, args.element_cap, args.threads)
        cg = compress(g, twin_partition(g))
        undirected = g.undirected()
        stats = {
            "ring": ring.name,
            "vertices": len(g),
            "arcs": int(g.out_adjacency.sum()),
            "edges": int(undirected.sum()) // 2,
            "reversible": bool((g.out_adjacency == g.in_adjacency).all()),
            "twin_classes": len(cg),
        }
        if "dot" in formats:
            (out / f"{stem}.dot").write_text(to_dot(g))
            written.append(f"{stem}.dot")
        if "json" in formats:
            (out / f"{stem}.json").write_text(to_json(g))
            written.append(f"{stem}.json")
    if "csv" in formats:
        (out / f"{stem}_classes.csv").write_text(class_table_csv(cg))
        written.append(f"{stem}_classes.csv")
    _write_json(out / f"{stem}_stats.json", stats)
    written.append(f"{stem}_stats.json")
    stats["files"] = written
    _emit(stats)
    return EXIT_OK


def cmd_domination(args) -> int:
    from .domination import (DominationInstance, check_dominating_set, composite_dominating_set,
                             exact_domination, paper_dominating_set)
    from .matrix import prime_power
    from .zdg import compressed_graph

    ring = _ring_from_args(args)
    head = {"n": ring.n, "ring": ring.name}
    if args.exact:
        cg = compressed_graph(ring, args.element_cap, args.threads)
        res = exact_domination(DominationInstance.from_compressed(cg), args.class_cap,
                               time_limit=args.time_limit)
        doc = res.to_json(**head)
    else:
        t0 = time.perf_counter()
        if ring.kind == "mat":
            p, s = prime_power(ring.n)
            chosen = paper_dominating_set(p, s)
        else:
            chosen = composite_dominating_set(ring.n)
        ok = check_dominating_set(ring, chosen)
        doc = dict(head)
        doc.update({
            "gamma": len(chosen),
            "witness": [[str(x), 1] for x in chosen],
            "dominating": ok,
            "elapsed_ms": round(1000 * (time.perf_counter() - t0), 3),
            "optimal": False,
        })
    out = _out_dir(args, required=False)
    if out is not None:
        mode = "exact" if args.exact else "construct"
        _write_json(out / f"domination_{_file_stem(ring)}_{mode}.json", doc)
    _emit(doc)
    if not args.exact and not doc["dominating"]:
        return EXIT_FAIL
    return EXIT_OK


def cmd_aut(args) -> int:
    from .automorphism import find_automorphisms, labeled_graph

    if args.s is None or args.s < 1:
        raise InvalidInput("aut needs --s >= 1")
    g = labeled_graph(args.s)
    summary = find_automorphisms(g)
    reg = summary.reg_order
    log10 = summary.reg_order_log10

    def big(k):
        if reg is None:
            return f"~1e{log10 + math.log10(k):.3f}"
        value = reg * k
        return value if value < 10**15 else str(value)
    doc = {
        "s": args.s,
        "compressed_vertices": len(g),
        "aut_order": summary.order,
        "predicted_order": summary.predicted,
        "reg_order": (reg if reg < 10**15 else str(reg)) if reg is not None else f"~1e{log10:.3f}",
        "full_aut_order_product": big(summary.order),
        "weighted_quotient_order": summary.weighted_order,
        "lemma45_pass": summary.stabilization_pass,
        "lemma46_pass": summary.pairing_pass,
        "generators": [list(f) for f in summary.generators],
        "labels": list(g.graph.labels),
    }
    out = _out_dir(args, required=False)
    if out is not None:
        _write_json(out / f"aut_s{args.s}.json", doc)
    _emit(doc)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import RunConfig, load_fixtures, read_config_file, run_verify

    values = read_config_file(args.config) if args.config else {}
    base = RunConfig.from_mapping(values)
    out = args.out or base.out or os.environ.get("LZDG_OUT") or DEFAULT_OUT
    formats = tuple(_csv_list(args.export)) if args.export else None
    cfg = base.updated(max_s=args.max_s, threads=args.threads, seed=args.seed, out=out,
                       formats=formats, odd_n=True if args.odd_n else None,
                       figures=False if args.no_figures else None)
    fixtures = load_fixtures(args.fixtures)
    log = (lambda msg: print(msg, file=sys.stderr)) if args.verbose else None
    report = run_verify(cfg, fixtures, log)

    out_dir = Path(cfg.out)
    files = report.write(out_dir, cfg.formats)
    if cfg.figures:
        files += _figures(report, out_dir / "figures", cfg)
    manifest = {"command": "verify", "config": asdict(cfg), "files": sorted(files),
                "summary": report.counts()}
    _write_json(out_dir / "manifest.json", manifest)

    for e in report.entries:
        print(f"{e.status.upper():7s} {e.id}  [{e.ref}]")
    c = report.counts()
    print(f"{c['pass']} passed, {c['fail']} failed, {c['skipped']} skipped; report in {out_dir}")
    return EXIT_OK if report.ok else EXIT_FAIL


def _figures(report, fig_dir: Path, cfg) -> list[str]:
    from . import plotting
    from .zdg import compressed_graph, open_twin_quotient

    fig_dir.mkdir(parents=True, exist_ok=True)
    made = []
    degrees = report.extras.get("degrees")
    if degrees:
        made.append(plotting.degree_figure(degrees, fig_dir / "degrees.png"))
    if report.extras.get("gammas"):
        made.append(plotting.gamma_figure(report.extras["gammas"], fig_dir / "gamma.png"))
    if report.extras.get("aut_rows"):
        made.append(plotting.aut_figure(report.extras["aut_rows"], fig_dir / "aut_orders.png"))
    s = min(3, cfg.max_s)
    pg = open_twin_quotient(compressed_graph(Ring("quat", 2**s), cfg.element_cap))
    made.append(plotting.adjacency_figure(pg.adjacency, pg.labels, fig_dir / f"adjacency_s{s}.png",
                                          f"Compressed graph of Z_{2**s}[i,j,k]"))
    return [f"figures/{name}" for name in made]


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    from .domination import DEFAULT_CLASS_CAP
    from .zdg import DEFAULT_ELEMENT_CAP

    parser = argparse.ArgumentParser(
        prog="lzdg", description="Zero-divisor graphs of quaternions mod n and 2x2 matrix rings.")
    sub = parser.add_subparsers(dest="command", required=True)

    def ring_args(p):
        p.add_argument("--ring", choices=("quat", "mat"), default="quat")
        p.add_argument("--n", type=int, help="modulus (quat, or mat with n = p^s)")
        p.add_argument("--p", type=int, help="prime for --ring mat")
        p.add_argument("--s", type=int, help="exponent for --ring mat")

    def common(p):
        p.add_argument("--out", help="output directory (default: $LZDG_OUT)")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--element-cap", type=int, default=DEFAULT_ELEMENT_CAP)

    b = sub.add_parser("build", help="build a graph and export it")
    ring_args(b)
    common(b)
    b.add_argument("--export", default="json", help="comma list of dot,json,csv")
    b.add_argument("--compressed", action="store_true",
                   help="build only the twin-compressed graph (large rings)")
    b.set_defaults(func=cmd_build)

    d = sub.add_parser("domination", help="domination number or explicit dominating set")
    ring_args(d)
    common(d)
    mode = d.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--construct", action="store_true")
    d.add_argument("--class-cap", type=int, default=DEFAULT_CLASS_CAP)
    d.add_argument("--time-limit", type=float, default=None,
                   help="seconds; the result is marked non-optimal if the search stops early")
    d.set_defaults(func=cmd_domination)

    a = sub.add_parser("aut", help="automorphisms of the compressed graph of Z_{2^s}[i,j,k]")
    a.add_argument("--s", type=int, required=True)
    a.add_argument("--out", help="output directory (default: $LZDG_OUT)")
    a.set_defaults(func=cmd_aut)

    v = sub.add_parser("verify", help="run every check and write a report")
    v.add_argument("--config", help="key = value file")
    v.add_argument("--out")
    v.add_argument("--max-s", type=int)
    v.add_argument("--threads", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--export", help="report formats, comma list of csv,json")
    v.add_argument("--fixtures", help="alternative expected-values file")
    v.add_argument("--odd-n", action="store_true", help="also measure gamma for n = 15")
    v.add_argument("--no-figures", action="store_true")
    v.add_argument("-v", "--verbose", action="store_true")
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    from .verify import ConfigError

    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", None) is not None and args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.func(args)
    except ResourceLimit as exc:
        print(f"lzdg: resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (ConfigError, InvalidInput, Unsupported, FileNotFoundError) as exc:
        print(f"lzdg: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
