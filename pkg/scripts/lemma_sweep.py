"""Run every lemma suite over several seeds and summarize applicability.

    python3 scripts/lemma_sweep.py --instances 2000 --seeds 0 1 2
"""
import argparse

from davenport.catalog import load_catalog
from davenport.lemmas import LEMMAS, RandomInstanceSpec, run_lemma_suite


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--instances", type=int, default=2000)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--max-order", type=int, default=16)
    ap.add_argument("--workers", type=int, default=1)
    a = ap.parse_args()

    catalog, _ = load_catalog()
    total_bad = 0
    print(f"{'lemma':<6} {'seed':>5} {'run':>7} {'n/a':>7} {'viol':>5} {'ms':>9}")
    for lemma in LEMMAS:
        for seed in a.seeds:
            spec = RandomInstanceSpec(max_order=a.max_order, seed=seed)
            rep = run_lemma_suite(spec, lemma, a.instances, workers=a.workers, catalog=catalog)
            total_bad += len(rep.violations)
            print(f"{lemma:<6} {seed:>5} {rep.instances_run:>7} {rep.not_applicable:>7} "
                  f"{len(rep.violations):>5} {rep.elapsed * 1000:>9.1f}")
            for gid, inst in rep.violations[:3]:
                print(f"    {gid}: {inst}")
    raise SystemExit(1 if total_bad else 0)


if __name__ == "__main__":
    main()
