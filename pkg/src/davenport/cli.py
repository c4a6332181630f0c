"""Command-line entry point: ``davenport <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional

from . import __version__
from .bounds import check_bounds, extremal_construction
from .catalog import UnknownGroup, load_catalog, resolve_group
from .groups import FiniteGroup, GroupError, smallest_prime_divisor
from .lemmas import LEMMAS, CatalogEmpty, LemmaInstance, RandomInstanceSpec, Verdict, \
    evaluate, run_lemma_suite
from .report import ResultStore, StoreLocked, emit_report, make_record, now_stamp
from .search import (
    DavenportResult,
    OrderCapExceeded,
    SearchConfig,
    large_davenport,
    small_davenport,
    verify_witness,
)
from .sequences import ParseError, all_subsequence_products, parse_sequence, pi_set

log = logging.getLogger("davenport")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

DEFAULT_NODE_CAP = 5_000_000


def _fmt_set(mask_subset) -> str:
    return "{" + ", ".join(map(str, mask_subset.elements())) + "}"


class _Runner:
    def __init__(self, args):
        self.args = args
        self.store: Optional[ResultStore] = None
        self.records: list[dict] = []
        self.lemma_reports: list[dict] = []
        self.stamp = now_stamp()

    def config(self) -> SearchConfig:
        a = self.args
        return SearchConfig(
            node_cap=getattr(a, "node_cap", None),
            D_order_cap=getattr(a, "D_order_cap", 10),
            parallel_roots=getattr(a, "parallel", False),
            workers=getattr(a, "workers", None),
        )

    def cached(self, G: FiniteGroup, kind: str, cfg: SearchConfig) -> DavenportResult:
        digest = cfg.digest()
        if self.store is not None:
            hit = self.store.get(G.name, kind, digest, G.order)
            if hit is not None:
                log.info("store hit for %s %s", G.name, kind)
                return hit
        res = small_davenport(G, cfg) if kind == "d" else large_davenport(G, cfg)
        if not verify_witness(G, res):
            raise RuntimeError(f"witness for {kind}({G.name}) failed re-validation")
        if self.store is not None:
            self.store.put(G.name, digest, res)
        return res

    def record(self, G: FiniteGroup, d=None, D=None, construction_length=None) -> dict:
        exact = [r for r in (d, D) if r is not None and r.exact]
        bounds = check_bounds(G, d, D) if exact else None
        p = smallest_prime_divisor(G) if G.order > 1 else None
        rec = make_record(G.name, G.order, p, d=d, D=D, bounds=bounds,
                          construction_length=construction_length,
                          seed=getattr(self.args, "seed", None), generated_at=self.stamp)
        self.records.append(rec)
        return rec


def _report_flags(rec: dict) -> bool:
    """Print flag problems; return True if any hard flag failed."""
    failed = False
    for name, v in rec["flags"].items():
        if v == "fail":
            print(f"FAIL {rec['group_id']}: {name}")
            failed = True
        elif v == "VIOLATION-REPORTED":
            print(f"REPORTED-VIOLATION {rec['group_id']}: d = {rec['d']} exceeds "
                  f"conjectured bound {rec['conjecture_bound']}")
    return failed


def cmd_compute_d(r: _Runner) -> int:
    G = resolve_group(r.args.group, r.args.catalog_dir)
    res = r.cached(G, "d", r.config())
    print(f"d({G.name}) = {res.value} ({res.status.value})")
    print(f"witness: {res.witness.literal()}")
    print(f"nodes expanded: {res.nodes_expanded}")
    rec = r.record(G, d=res)
    return EXIT_FAILED if _report_flags(rec) else EXIT_OK


def cmd_compute_D(r: _Runner) -> int:
    G = resolve_group(r.args.group, r.args.catalog_dir)
    res = r.cached(G, "D", r.config())
    print(f"D({G.name}) = {res.value} ({res.status.value})")
    print(f"witness: {res.witness.literal()}")
    print(f"nodes expanded: {res.nodes_expanded}")
    rec = r.record(G, D=res)
    return EXIT_FAILED if _report_flags(rec) else EXIT_OK


def cmd_construct(r: _Runner) -> int:
    G = resolve_group(r.args.group, r.args.catalog_dir)
    S = extremal_construction(G)
    if S is None:
        print(f"{G.name} has no element of order n/p; no construction")
        r.record(G)
        return EXIT_OK
    print(f"construction for {G.name}: {S.literal()} (length {S.length})")
    print("verified product-one free")
    r.record(G, construction_length=S.length)
    return EXIT_OK


def cmd_pi(r: _Runner) -> int:
    G = resolve_group(r.args.group, r.args.catalog_dir)
    S = parse_sequence(G, r.args.sequence)
    if S.length:
        print(f"pi = {_fmt_set(pi_set(G, S))}")
    else:
        print("pi = undefined (empty sequence)")
    print(f"Pi = {_fmt_set(all_subsequence_products(G, S))}")
    return EXIT_OK


def cmd_check_bounds(r: _Runner) -> int:
    a = r.args
    entries, warnings = load_catalog(directory=a.catalog_dir)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    cfg = r.config()
    failed = False
    print(f"{'group':<12} {'n':>3} {'p':>3} {'d':>4} {'D':>4} {'constr':>6} "
          f"{'conj':>5} {'thm':>5}  status")
    for e in entries:
        if e.order > a.max_order or e.order < 2:
            continue
        G = e.build()
        d = r.cached(G, "d", cfg)
        D = r.cached(G, "D", cfg) if G.order <= cfg.D_order_cap else None
        rec = r.record(G, d=d, D=D)
        print(f"{G.name:<12} {G.order:>3} {rec['p']:>3} {d.value:>4} "
              f"{'-' if rec['D'] is None else rec['D']:>4} "
              f"{'-' if rec['construction_length'] is None else rec['construction_length']:>6} "
              f"{'-' if rec['conjecture_bound'] is None else rec['conjecture_bound']:>5} "
              f"{'-' if rec['theorem_bound'] is None else rec['theorem_bound']:>5}  "
              f"{d.status.value}")
        failed |= _report_flags(rec)
    return EXIT_FAILED if failed else EXIT_OK


def cmd_verify_lemmas(r: _Runner) -> int:
    a = r.args
    if a.replay:
        inst = LemmaInstance.from_json(a.replay)
        G = resolve_group(inst.group, a.catalog_dir)
        verdict = evaluate(inst, G)
        print(f"lemma {inst.lemma} on {inst.group}: {verdict.value}")
        return EXIT_FAILED if verdict is Verdict.FAIL else EXIT_OK
    lemmas = LEMMAS if a.lemma == "all" else (a.lemma,)
    spec = RandomInstanceSpec(max_order=a.max_order, seed=a.seed)
    entries, _ = load_catalog(directory=a.catalog_dir)
    failed = False
    for lemma in lemmas:
        rep = run_lemma_suite(spec, lemma, instances=a.instances, workers=a.workers or 1,
                              catalog=entries)
        r.lemma_reports.append(rep.to_dict())
        status = "pass" if rep.passed else f"FAIL ({len(rep.violations)} violations)"
        print(f"lemma {lemma}: {rep.instances_run} applicable, "
              f"{rep.not_applicable} not applicable, {status}")
        for gid, inst in rep.violations[:10]:
            print(f"  violation on {gid}: {inst}")
        failed |= not rep.passed
    return EXIT_FAILED if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="davenport", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--report", default="davenport_report.json",
                    help="structured report file (default: %(default)s)")
    ap.add_argument("--csv", default=None, help="also write a flat CSV export")
    ap.add_argument("--store", default=".davenport_store.json",
                    help="result cache file (default: %(default)s)")
    ap.add_argument("--no-store", action="store_true", help="disable the result cache")
    ap.add_argument("--catalog-dir", default=None,
                    help="directory of Cayley-table files (default: $DAVENPORT_CATALOG_DIR)")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def search_opts(p):
        p.add_argument("--node-cap", type=int, default=DEFAULT_NODE_CAP)
        p.add_argument("--parallel", action="store_true", help="split the search by root element")
        p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("compute-d", help="exact small Davenport constant")
    p.add_argument("group")
    search_opts(p)
    p.set_defaults(func=cmd_compute_d)

    p = sub.add_parser("compute-D", help="exact large Davenport constant")
    p.add_argument("group")
    search_opts(p)
    p.add_argument("--D-order-cap", dest="D_order_cap", type=int, default=10)
    p.set_defaults(func=cmd_compute_D)

    p = sub.add_parser("construct", help="build and verify the extremal sequence")
    p.add_argument("group")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("check-bounds", help="compute d (and small D) across the catalog")
    p.add_argument("--max-order", type=int, default=24)
    p.add_argument("--D-order-cap", dest="D_order_cap", type=int, default=10)
    search_opts(p)
    p.set_defaults(func=cmd_check_bounds)

    p = sub.add_parser("verify-lemmas", help="randomized lemma suites")
    p.add_argument("--lemma", default="all", choices=("all",) + LEMMAS)
    p.add_argument("--instances", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-order", type=int, default=16)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--replay", default=None, help="re-check one serialized instance")
    p.set_defaults(func=cmd_verify_lemmas)

    p = sub.add_parser("pi", help="print pi(S) and Pi(S)")
    p.add_argument("group")
    p.add_argument("sequence", help="element indices, e.g. [1,1,2]")
    p.set_defaults(func=cmd_pi)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    runner = _Runner(args)
    try:
        if not args.no_store and args.command != "pi":
            runner.store = ResultStore(args.store)
            runner.store.open()
        status = args.func(runner)
    except (UnknownGroup, ParseError) as exc:
        ap.print_usage(sys.stderr)
        print(f"davenport: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GroupError, OrderCapExceeded, CatalogEmpty, StoreLocked, OSError,
            json.JSONDecodeError) as exc:
        print(f"davenport: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if runner.store is not None:
            runner.store.close()
    if args.command != "pi":
        emit_report(args.report, runner.records, runner.lemma_reports, args.csv)
    return status


if __name__ == "__main__":
    sys.exit(main())
