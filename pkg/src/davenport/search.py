"""Exact small and large Davenport constants by exhaustive search.

Both searches walk multisets in canonical order (each new term has index at
least that of the previous one), so every multiset is met at most once, and
record the first longest witness in that order.
"""
from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Optional

from .groups import FiniteGroup, smallest_prime_divisor
from .sequences import (
    DivisorLattice,
    ProductCache,
    Sequence,
    is_minimal_product_one,
    subsequence_products_by_recurrence,
)


class OrderCapExceeded(ValueError):
    pass


class Status(str, Enum):
    EXACT = "exact"
    LOWER_BOUND_ONLY = "lower_bound_only"


@dataclass(frozen=True)
class SearchConfig:
    max_length: Optional[int] = None
    node_cap: Optional[int] = None
    enable_D_search: bool = True
    D_order_cap: int = 10
    parallel_roots: bool = False
    workers: Optional[int] = None
    # reserved flag; symmetry reduction under Aut(G) is not implemented
    automorphism_pruning: bool = False

    def __post_init__(self):
        for name in ("max_length", "node_cap", "workers"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"{name} must be positive")
        if self.D_order_cap <= 0:
            raise ValueError("D_order_cap must be positive")
        if self.automorphism_pruning:
            raise NotImplementedError("automorphism pruning is not available")

    def digest(self) -> str:
        """Stable digest of the fields that can change a result."""
        d = asdict(self)
        del d["parallel_roots"], d["workers"]
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]


@dataclass
class DavenportResult:
    value: int
    witness: Sequence
    status: Status
    nodes_expanded: int
    elapsed: float
    kind: str = "d"

    @property
    def exact(self) -> bool:
        return self.status is Status.EXACT


class _CapHit(Exception):
    pass


def small_davenport_ceiling(G: FiniteGroup) -> int:
    """``n - 1`` for cyclic groups, ``floor(n/2)`` otherwise (Olson-White)."""
    n = G.order
    if n == 1:
        return 0
    return n - 1 if G.is_cyclic else n // 2


def large_davenport_ceiling(G: FiniteGroup) -> int:
    """``n`` for cyclic groups, ``min(n, 2n/p)`` otherwise (Grynkiewicz)."""
    n = G.order
    if n == 1 or G.is_cyclic:
        return n
    return min(n, 2 * n // smallest_prime_divisor(G))


class _Counter:
    __slots__ = ("nodes", "cap")

    def __init__(self, cap):
        self.nodes = 0
        self.cap = cap

    def tick(self):
        self.nodes += 1
        if self.cap is not None and self.nodes > self.cap:
            raise _CapHit


def _free_abelian(G, ceiling, root, counter, best):
    n = G.order
    rmul = G.rmul_fn()
    terms: list[int] = []

    # union: mask of all subsequence sums of `terms`
    def rec(start, stop, union):
        for g in range(start, stop):
            counter.tick()
            new = union | (1 << g) | rmul(union, g)
            if new & 1:
                continue
            terms.append(g)
            if len(terms) > len(best):
                best[:] = terms
                if len(best) >= ceiling:
                    return True
            if len(terms) < ceiling and rec(g, n, new):
                return True
            terms.pop()
        return False

    return rec(root, root + 1, 0)


def _free_general(G, ceiling, root, counter, best):
    n = G.order
    lat = DivisorLattice(G)

    def rec(start, stop):
        for g in range(start, stop):
            counter.tick()
            if not lat.push(g, stop_on_identity=True):
                lat.pop()
                continue
            if len(lat) > len(best):
                best[:] = lat.terms
                if len(best) >= ceiling:
                    return True
            if len(lat) < ceiling and rec(g, n):
                return True
            lat.pop()
        return False

    return rec(root, root + 1)


def _minimal_abelian(G, ceiling, root, counter, best):
    # A minimal zero-sum W equals S*g with g its largest term and S = W - g
    # zero-sum free, so walking zero-sum-free S and closing each with
    # g = -sum(S) reaches every minimal zero-sum sequence exactly once.
    n = G.order
    rmul = G.rmul_fn()
    t, inv = G.table, G.inverse
    terms: list[int] = []

    def rec(start, stop, union, total):
        for g in range(start, stop):
            counter.tick()
            new = union | (1 << g) | rmul(union, g)
            if new & 1:
                continue
            terms.append(g)
            s = t[total][g]
            close = inv[s]
            if close >= g and len(terms) + 1 > len(best):
                best[:] = terms + [close]
                if len(best) >= ceiling:
                    return True
            if len(terms) + 1 < ceiling and rec(g, n, new, s):
                return True
            terms.pop()
        return False

    return rec(root, root + 1, 0, 0)


def _minimal_general(G, ceiling, root, counter, best):
    n = G.order
    lat = DivisorLattice(G)

    def rec(start, stop):
        for g in range(start, stop):
            counter.tick()
            lat.push(g)
            if len(lat) > len(best) and lat.is_minimal_product_one():
                best[:] = lat.terms
                if len(best) >= ceiling:
                    return True
            if len(lat) < ceiling and rec(g, n):
                return True
            lat.pop()
        return False

    return rec(root, root + 1)


def _run_roots(kind, G, ceiling, roots, node_cap, seed):
    """Sequential DFS over root branches. Returns (best, nodes, capped)."""
    if kind == "d":
        branch = _free_abelian if G.is_abelian else _free_general
    else:
        branch = _minimal_abelian if G.is_abelian else _minimal_general
    best = list(seed)
    counter = _Counter(node_cap)
    capped = False
    if len(best) < ceiling:
        try:
            for r in roots:
                if branch(G, ceiling, r, counter, best):
                    break
        except _CapHit:
            capped = True
    return best, counter.nodes, capped


def _branch_job(args):
    kind, G, ceiling, root, node_cap, seed = args
    return _run_roots(kind, G, ceiling, [root], node_cap, seed)


def _search(kind, G, ceiling, cfg, seed):
    # the identity never belongs to a product-one-free sequence, and appears in
    # a minimal product-one sequence only as the one-term sequence
    roots = list(range(1, G.order))
    if not (cfg.parallel_roots and len(roots) > 1 and ceiling > len(seed)):
        return _run_roots(kind, G, ceiling, roots, cfg.node_cap, seed)
    jobs = [(kind, G, ceiling, r, cfg.node_cap, seed) for r in roots]
    with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
        results = list(ex.map(_branch_job, jobs))
    # reduce as the sequential walk would: roots in order, stop at the first
    # branch that reaches the ceiling, keep the first strict improvement
    best, nodes, capped = list(seed), 0, False
    for b, k, c in results:
        nodes += k
        capped |= c
        if len(b) > len(best):
            best = b
        if len(best) >= ceiling:
            break
    return best, nodes, capped


def small_davenport(G: FiniteGroup, cfg: SearchConfig = SearchConfig()) -> DavenportResult:
    """Exact maximum length of a product-one-free sequence over ``G``.

    The walk stops as soon as a witness reaches the proven ceiling. When
    ``node_cap`` runs out, or ``max_length`` truncates the walk at a length
    that was attained, the value is reported as a lower bound.
    """
    t0 = time.perf_counter()
    proven = small_davenport_ceiling(G)
    ceiling = proven if cfg.max_length is None else min(proven, cfg.max_length)
    best, nodes, capped = _search("d", G, ceiling, cfg, [])
    # product-one freeness is inherited by subsequences, so an uncapped walk
    # that stays below the ceiling has seen every free multiset
    exact = len(best) >= proven or (not capped and len(best) < ceiling)
    return DavenportResult(
        value=len(best),
        witness=Sequence.from_terms(G.order, best),
        status=Status.EXACT if exact else Status.LOWER_BOUND_ONLY,
        nodes_expanded=nodes,
        elapsed=time.perf_counter() - t0,
        kind="d",
    )


def large_davenport(G: FiniteGroup, cfg: SearchConfig = SearchConfig()) -> DavenportResult:
    """Exact maximum length of a minimal product-one sequence over ``G``."""
    if G.order > cfg.D_order_cap:
        raise OrderCapExceeded(f"|G| = {G.order} exceeds D_order_cap = {cfg.D_order_cap}")
    t0 = time.perf_counter()
    proven = large_davenport_ceiling(G)
    ceiling = proven if cfg.max_length is None else min(proven, cfg.max_length)
    best, nodes, capped = _search("D", G, ceiling, cfg, [0])
    exact = len(best) >= proven or (not capped and ceiling == proven)
    return DavenportResult(
        value=len(best),
        witness=Sequence.from_terms(G.order, best),
        status=Status.EXACT if exact else Status.LOWER_BOUND_ONLY,
        nodes_expanded=nodes + 1,
        elapsed=time.perf_counter() - t0,
        kind="D",
    )


def verify_witness(G: FiniteGroup, result: DavenportResult) -> bool:
    """Re-check a witness through the memoised recurrence, not the lattice."""
    w = result.witness
    if w.length != result.value:
        return False
    if result.kind == "d":
        if w.length == 0:
            return True
        return not subsequence_products_by_recurrence(G, w) & 1
    return is_minimal_product_one(G, w, ProductCache(G))
