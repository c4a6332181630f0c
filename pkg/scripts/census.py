"""Table of d (and D for small orders) over the built-in catalog.

    python3 scripts/census.py --max-order 24 --D-max-order 10 --out census.json
"""
import argparse
import json
import time

from davenport.bounds import check_bounds, extremal_construction
from davenport.catalog import load_catalog
from davenport.groups import smallest_prime_divisor
from davenport.search import SearchConfig, large_davenport, small_davenport


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-order", type=int, default=24)
    ap.add_argument("--D-max-order", type=int, default=10)
    ap.add_argument("--node-cap", type=int, default=None)
    ap.add_argument("--out", default=None)
    a = ap.parse_args()

    cfg = SearchConfig(node_cap=a.node_cap, D_order_cap=max(1, a.D_max_order))
    entries, _ = load_catalog()
    rows = []
    print(f"{'group':<12} {'n':>3} {'p':>2} {'d':>3} {'D':>3} {'constr':>6} {'status':<17} {'sec':>6}")
    for e in entries:
        if not 2 <= e.order <= a.max_order:
            continue
        G = e.build()
        t0 = time.perf_counter()
        d = small_davenport(G, cfg)
        D = large_davenport(G, cfg) if G.order <= a.D_max_order else None
        S = extremal_construction(G)
        flags = check_bounds(G, d, D).flags if d.exact else {}
        dt = time.perf_counter() - t0
        p = smallest_prime_divisor(G)
        rows.append({"group": G.name, "n": G.order, "p": p, "d": d.value,
                     "d_status": d.status.value, "D": D.value if D else None,
                     "witness": d.witness.terms(),
                     "construction": S.terms() if S else None, "flags": flags})
        print(f"{G.name:<12} {G.order:>3} {p:>2} {d.value:>3} "
              f"{D.value if D else '-':>3} {S.length if S else '-':>6} "
              f"{d.status.value:<17} {dt:>6.2f}")
    if a.out:
        with open(a.out, "w") as fh:
            json.dump(rows, fh, indent=1)


if __name__ == "__main__":
    main()
