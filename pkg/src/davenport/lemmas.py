"""Executable checks of the product-set lemmas on random instances.

Each checker returns a :class:`Verdict`. ``NOT_APPLICABLE`` means the
instance misses a hypothesis; ``FAIL`` on an applicable instance can only be
an implementation bug, since every statement checked here is a theorem.
"""
from __future__ import annotations

import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Optional

from .catalog import GroupCatalogEntry, load_catalog, resolve_group
from .groups import (
    FiniteGroup,
    GroupSubset,
    Subgroup,
    bits,
    smallest_prime_divisor,
    subgroup_generated,
)
from .sequences import (
    DivisorLattice,
    Sequence,
    all_subsequence_products,
    bar_set,
    is_product_one_free,
    product_set,
)

LEMMAS = ("2.1", "2.2", "2.3", "2.4", "2.5", "2.6")
BOUNDARY_RATE = 0.25


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_APPLICABLE = "n/a"


class CatalogEmpty(ValueError):
    pass


def _verdict(ok: bool) -> Verdict:
    return Verdict.PASS if ok else Verdict.FAIL


def check_lemma_ksquared(G: FiniteGroup, S: Sequence) -> Verdict:
    """``9 |Pi(S)| >= |S|^2`` for product-one-free ``S``."""
    if not is_product_one_free(G, S):
        return Verdict.NOT_APPLICABLE
    return _verdict(9 * all_subsequence_products(G, S).cardinality >= S.length ** 2)


def check_kemperman(G: FiniteGroup, A: GroupSubset, B: GroupSubset) -> Verdict:
    """``|AB| >= |A| + |B| - 1`` when ``ab = 1`` forces ``a = b = 1``."""
    if not A.cardinality or not B.cardinality:
        return Verdict.NOT_APPLICABLE
    if 0 not in A or 0 not in B:
        return Verdict.NOT_APPLICABLE
    inv = G.inverse
    # ab = 1 iff b = a^-1; the only allowed solution is a = b = 1
    if any(inv[a] in B for a in bits(A.mask) if a != 0):
        return Verdict.NOT_APPLICABLE
    AB = product_set(G, A, B)
    return _verdict(AB.cardinality >= A.cardinality + B.cardinality - 1)


def check_partition_superadditivity(G: FiniteGroup, parts: list[Sequence]) -> Verdict:
    """``|Pi(S)| >= sum |Pi(S_i)|`` where ``S`` is the product of the parts."""
    if not parts or any(P.length == 0 for P in parts):
        return Verdict.NOT_APPLICABLE
    S = parts[0]
    for P in parts[1:]:
        S = S * P
    if not is_product_one_free(G, S):
        return Verdict.NOT_APPLICABLE
    total = sum(all_subsequence_products(G, P).cardinality for P in parts)
    return _verdict(all_subsequence_products(G, S).cardinality >= total)


def check_length_bound(G: FiniteGroup, S: Sequence) -> Verdict:
    if S.length == 0 or not is_product_one_free(G, S):
        return Verdict.NOT_APPLICABLE
    return _verdict(all_subsequence_products(G, S).cardinality >= S.length)


def _two_sided_products(G: FiniteGroup, A: GroupSubset, B: GroupSubset) -> GroupSubset:
    m = 0
    for b in bits(B.mask):
        m |= G.rmul_mask(A.mask, b) | G.lmul_mask(b, A.mask)
    return GroupSubset(G.order, m)


def check_subproduct(G: FiniteGroup, N: Subgroup, A: GroupSubset, B: GroupSubset) -> Verdict:
    """``|bar(AB u BA)| >= min(p, |bar A| + 1)`` when both meet ``N`` and ``|bar B| >= 2``."""
    if not A.cardinality or not B.cardinality:
        return Verdict.NOT_APPLICABLE
    if not (A.mask & N.members.mask and B.mask & N.members.mask):
        return Verdict.NOT_APPLICABLE
    if len(bar_set(N, B)) < 2:
        return Verdict.NOT_APPLICABLE
    p = smallest_prime_divisor(G)
    lhs = len(bar_set(N, _two_sided_products(G, A, B)))
    return _verdict(lhs >= min(p, len(bar_set(N, A)) + 1))


def check_coset(G: FiniteGroup, N: Subgroup, S: Sequence) -> Verdict:
    """``|{N} u bar(Pi(S))| >= min(p, |S| + 1)`` for ``S`` over ``G \\ N``."""
    if S.length == 0 or any(g in N for g in S.support()):
        return Verdict.NOT_APPLICABLE
    p = smallest_prime_divisor(G)
    cosets = {0} | bar_set(N, all_subsequence_products(G, S))
    return _verdict(len(cosets) >= min(p, S.length + 1))


# -- instances --------------------------------------------------------------


@dataclass(frozen=True)
class RandomInstanceSpec:
    min_order: int = 2
    max_order: int = 16
    min_length: int = 1
    max_length: int = 8
    min_subset: int = 1
    max_subset: int = 6
    seed: int = 0

    def __post_init__(self):
        if self.min_order > self.max_order or self.min_length > self.max_length \
                or self.min_subset > self.max_subset:
            raise ValueError("empty range in instance ranges")
        if self.min_length < 1 or self.min_subset < 1 or self.min_order < 1:
            raise ValueError("ranges must be positive")


@dataclass
class LemmaInstance:
    lemma: str
    group: str
    seq: Optional[list[int]] = None
    parts: Optional[list[list[int]]] = None
    A: Optional[list[int]] = None
    B: Optional[list[int]] = None
    N: Optional[list[int]] = None

    def to_json(self) -> str:
        d = {k: v for k, v in asdict(self).items() if v is not None}
        return json.dumps(d, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "LemmaInstance":
        return cls(**json.loads(text))


def evaluate(inst: LemmaInstance, G: Optional[FiniteGroup] = None) -> Verdict:
    """Run the checker for a serialized instance."""
    if G is None:
        G = resolve_group(inst.group)
    n = G.order
    seq = lambda xs: Sequence.from_terms(n, xs)  # noqa: E731
    sub = lambda xs: GroupSubset.from_elements(n, xs)  # noqa: E731
    N = subgroup_generated(G, inst.N) if inst.N is not None else None
    if inst.lemma == "2.1":
        return check_lemma_ksquared(G, seq(inst.seq))
    if inst.lemma == "2.2":
        return check_kemperman(G, sub(inst.A), sub(inst.B))
    if inst.lemma == "2.3":
        return check_partition_superadditivity(G, [seq(p) for p in inst.parts])
    if inst.lemma == "2.4":
        return check_length_bound(G, seq(inst.seq))
    if inst.lemma == "2.5":
        return check_subproduct(G, N, sub(inst.A), sub(inst.B))
    if inst.lemma == "2.6":
        return check_coset(G, N, seq(inst.seq))
    raise ValueError(f"unknown lemma {inst.lemma!r}")


def grow_free_sequence(G: FiniteGroup, rng: random.Random, length: int) -> list[int]:
    """Random product-one-free growth: keep a random term only if the
    extension stays free (``g != 1`` and ``g^-1`` not a subsequence product)."""
    lat = DivisorLattice(G)
    inv = G.inverse
    n = G.order
    for _ in range(4 * length):
        if len(lat) >= length:
            break
        g = rng.randrange(1, n)
        if lat.union >> inv[g] & 1:
            continue
        lat.push(g)
    return list(lat.terms)


def _random_proper_subgroup(G: FiniteGroup, rng: random.Random) -> Subgroup:
    for _ in range(8):
        k = rng.choice((1, 1, 2))
        N = subgroup_generated(G, [rng.randrange(G.order) for _ in range(k)])
        if N.is_proper():
            return N
    return subgroup_generated(G, [])


def _random_subset(rng, pool, k):
    return rng.sample(pool, min(k, len(pool)))


def make_instance(lemma: str, G: FiniteGroup, gid: str, rng: random.Random,
                  spec: RandomInstanceSpec) -> LemmaInstance:
    n = G.order
    p = smallest_prime_divisor(G)
    boundary = rng.random() < BOUNDARY_RATE
    if boundary:
        length = rng.choice([max(1, p - 2), max(1, p - 1), p])
        length = min(max(length, spec.min_length), spec.max_length)
    else:
        length = rng.randint(spec.min_length, spec.max_length)
    k_a = rng.randint(spec.min_subset, spec.max_subset)
    k_b = rng.randint(spec.min_subset, spec.max_subset)

    if lemma in ("2.1", "2.4"):
        return LemmaInstance(lemma, gid, seq=sorted(grow_free_sequence(G, rng, length)))
    if lemma == "2.3":
        terms = grow_free_sequence(G, rng, max(length, 1))
        rng.shuffle(terms)
        t = rng.randint(1, max(1, min(4, len(terms))))
        cuts = sorted(rng.sample(range(1, len(terms)), t - 1)) if t > 1 else []
        bounds = [0] + cuts + [len(terms)]
        parts = [sorted(terms[a:b]) for a, b in zip(bounds, bounds[1:])]
        return LemmaInstance(lemma, gid, parts=parts)
    if lemma == "2.2":
        A = [0] + _random_subset(rng, list(range(1, n)), k_a - 1)
        banned = {G.inverse[a] for a in A}
        B = [0] + _random_subset(rng, [x for x in range(1, n) if x not in banned], k_b - 1)
        return LemmaInstance(lemma, gid, A=sorted(A), B=sorted(B))
    N = _random_proper_subgroup(G, rng)
    inside = bits(N.members.mask)
    outside = [x for x in range(n) if x not in N]
    if lemma == "2.5":
        if boundary:
            # A spread over about p - 1 cosets, where the bound switches branch
            reps = {}
            for x in rng.sample(range(n), n):
                reps.setdefault(N.coset_of[x], x)
            chosen = [reps[c] for c in sorted(reps)][:max(1, p - 1)]
            A = {rng.choice(inside)} | set(chosen)
        else:
            A = {rng.choice(inside)} | set(_random_subset(rng, list(range(n)), k_a - 1))
        B = {rng.choice(inside), rng.choice(outside)} | \
            set(_random_subset(rng, list(range(n)), max(0, k_b - 2)))
        return LemmaInstance(lemma, gid, A=sorted(A), B=sorted(B), N=inside)
    if lemma == "2.6":
        return LemmaInstance(lemma, gid, seq=sorted(rng.choice(outside) for _ in range(length)),
                             N=inside)
    raise ValueError(f"unknown lemma {lemma!r}")


# -- suites -----------------------------------------------------------------


@dataclass
class LemmaReport:
    lemma: str
    instances_run: int
    not_applicable: int
    violations: list[tuple[str, str]]
    seed: int
    elapsed: float = field(default=0.0, compare=False)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "lemma": self.lemma,
            "instances_run": self.instances_run,
            "not_applicable": self.not_applicable,
            "violations": [{"group_id": g, "instance": i} for g, i in self.violations],
            "seed": self.seed,
        }
        if timing:
            d["elapsed_ms"] = round(self.elapsed * 1000, 3)
        return d


def _suite_groups(spec: RandomInstanceSpec, entries) -> list[tuple[str, FiniteGroup]]:
    chosen = [e for e in entries if spec.min_order <= e.order <= spec.max_order and e.order >= 2]
    if not chosen:
        raise CatalogEmpty(f"no catalog group with order in [{spec.min_order}, {spec.max_order}]")
    return [(e.id, e.build()) for e in sorted(chosen, key=lambda e: e.id)]


def _run_block(args):
    lemma, spec, groups, start, stop = args
    out = []
    for i in range(start, stop):
        rng = random.Random(f"{spec.seed}:{lemma}:{i}")
        gid, G = groups[rng.randrange(len(groups))]
        inst = make_instance(lemma, G, gid, rng, spec)
        out.append((gid, inst.to_json(), evaluate(inst, G)))
    return out


def run_lemma_suite(spec: RandomInstanceSpec, lemma: str, instances: int = 1000,
                    workers: int = 1, catalog: Optional[list[GroupCatalogEntry]] = None,
                    block: int = 500, max_draws: Optional[int] = None) -> LemmaReport:
    """Draw instances from the seeded stream until ``instances`` applicable
    ones have been checked.

    Instance ``i`` depends only on ``(seed, lemma, i)``, so the report does
    not depend on ``workers``.
    """
    if lemma not in LEMMAS:
        raise ValueError(f"unknown lemma {lemma!r}")
    t0 = time.perf_counter()
    if catalog is None:
        catalog, _ = load_catalog()
    groups = _suite_groups(spec, catalog)
    max_draws = max_draws or 20 * instances + 100
    applicable = skipped = 0
    violations: list[tuple[str, str]] = []

    def consume(results):
        nonlocal applicable, skipped
        for gid, inst, verdict in results:
            if applicable >= instances:
                return
            if verdict is Verdict.NOT_APPLICABLE:
                skipped += 1
                continue
            applicable += 1
            if verdict is Verdict.FAIL:
                violations.append((gid, inst))

    start = 0
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while applicable < instances and start < max_draws:
            width = max(1, workers)
            jobs = []
            for _ in range(width):
                stop = min(start + block, max_draws)
                if start >= stop:
                    break
                jobs.append((lemma, spec, groups, start, stop))
                start = stop
            results = pool.map(_run_block, jobs) if pool else map(_run_block, jobs)
            for r in results:
                consume(r)
    finally:
        if pool:
            pool.shutdown()
    return LemmaReport(lemma, applicable, skipped, violations, spec.seed,
                       time.perf_counter() - t0)
