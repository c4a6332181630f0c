"""Sequences over a group and their product sets.

A sequence is an unordered multiset of element indices, stored as a vector of
multiplicities. Ordered products are handled through two routes:

* :func:`pi_set` evaluates the set of products of all orderings through the
  recurrence ``pi(T) = U_{g in supp T} pi(T - g) * g`` with memoisation in a
  :class:`ProductCache`.
* :class:`DivisorLattice` sweeps every sub-multiset of a sequence built up one
  term at a time, which is what the exhaustive searches use. The union of its
  entries is the set of all subsequence products.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional

from .groups import FiniteGroup, GroupSubset, Subgroup, bits

DEFAULT_CACHE_CAP = 1 << 22


class EmptySequence(ValueError):
    pass


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class Sequence:
    """Multiset of group elements; ``counts[g]`` is the multiplicity of ``g``."""

    counts: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.counts):
            raise ValueError("multiplicities must be non-negative")

    @classmethod
    def from_terms(cls, n: int, terms: Iterable[int]) -> "Sequence":
        counts = [0] * n
        for g in terms:
            if not 0 <= g < n:
                raise ValueError(f"term {g} out of range for order {n}")
            counts[g] += 1
        return cls(tuple(counts))

    @classmethod
    def empty(cls, n: int) -> "Sequence":
        return cls((0,) * n)

    @classmethod
    def power(cls, n: int, g: int, k: int) -> "Sequence":
        """``g^[k]``."""
        return cls.from_terms(n, [g] * k)

    @property
    def n(self) -> int:
        return len(self.counts)

    def __len__(self) -> int:
        return sum(self.counts)

    @property
    def length(self) -> int:
        return sum(self.counts)

    def multiplicity(self, g: int) -> int:
        return self.counts[g]

    def max_multiplicity(self) -> int:
        return max(self.counts, default=0)

    def support(self) -> list[int]:
        return [g for g, c in enumerate(self.counts) if c]

    def is_squarefree(self) -> bool:
        return all(c <= 1 for c in self.counts)

    def terms(self) -> list[int]:
        out = []
        for g, c in enumerate(self.counts):
            out.extend([g] * c)
        return out

    def divides(self, other: "Sequence") -> bool:
        return all(a <= b for a, b in zip(self.counts, other.counts))

    def __mul__(self, other: "Sequence") -> "Sequence":
        return Sequence(tuple(a + b for a, b in zip(self.counts, other.counts)))

    def remove(self, other: "Sequence") -> "Sequence":
        """``other^[-1] * self``; ``other`` must divide ``self``."""
        if not other.divides(self):
            raise ValueError("can only remove a subsequence")
        return Sequence(tuple(a - b for a, b in zip(self.counts, other.counts)))

    def repeat(self, k: int) -> "Sequence":
        return Sequence(tuple(a * k for a in self.counts))

    def gcd(self, other: "Sequence") -> "Sequence":
        return Sequence(tuple(min(a, b) for a, b in zip(self.counts, other.counts)))

    def add(self, g: int, k: int = 1) -> "Sequence":
        c = list(self.counts)
        c[g] += k
        if c[g] < 0:
            raise ValueError(f"term {g} not present")
        return Sequence(tuple(c))

    def literal(self) -> str:
        return "[" + ",".join(map(str, self.terms())) + "]"

    def __str__(self) -> str:
        return self.literal()


def parse_sequence(G: FiniteGroup, text: str) -> Sequence:
    """Parse a literal such as ``[1,1,1,4]`` against ``G``."""
    try:
        terms = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad sequence literal {text!r}: {exc}") from None
    if not isinstance(terms, list) or not all(isinstance(t, int) and not isinstance(t, bool)
                                              for t in terms):
        raise ParseError(f"sequence literal must be a list of integers: {text!r}")
    try:
        return Sequence.from_terms(G.order, terms)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


class ProductCache:
    """Memo table for ``pi``, keyed by multiplicity vectors.

    Once ``cap`` entries are stored new results are simply not cached.
    """

    def __init__(self, group: FiniteGroup, cap: int = DEFAULT_CACHE_CAP):
        self.group = group
        self.cap = cap
        self._store: dict[tuple[int, ...], int] = {}
        self.hits = 0
        self.misses = 0

    def __len__(self):
        return len(self._store)

    def get(self, key):
        v = self._store.get(key)
        if v is None:
            self.misses += 1
        else:
            self.hits += 1
        return v

    def put(self, key, mask: int) -> None:
        if len(self._store) < self.cap:
            self._store[key] = mask

    def items(self):
        return self._store.items()


def product_set(G: FiniteGroup, A: GroupSubset, B: GroupSubset) -> GroupSubset:
    out = 0
    for b in bits(B.mask):
        out |= G.rmul_mask(A.mask, b)
    return GroupSubset(G.order, out)


def _pi_mask(G: FiniteGroup, counts: tuple[int, ...], cache: ProductCache) -> int:
    hit = cache.get(counts)
    if hit is not None:
        return hit
    support = [g for g, c in enumerate(counts) if c]
    if sum(counts) == 1:
        mask = 1 << support[0]
    else:
        mask = 0
        c = list(counts)
        for g in support:
            c[g] -= 1
            mask |= G.rmul_mask(_pi_mask(G, tuple(c), cache), g)
            c[g] += 1
    cache.put(counts, mask)
    return mask


def pi_set(G: FiniteGroup, S: Sequence, cache: Optional[ProductCache] = None) -> GroupSubset:
    """Products of the terms of ``S`` over all orderings."""
    if S.length == 0:
        raise EmptySequence("pi of the empty sequence is undefined")
    if cache is None:
        cache = ProductCache(G)
    elif cache.group is not G:
        raise ValueError("cache belongs to a different group")
    if G.is_abelian:
        return GroupSubset(G.order, 1 << G.product(S.terms()))
    return GroupSubset(G.order, _pi_mask(G, S.counts, cache))


class DivisorLattice:
    """Product sets of every sub-multiset of a sequence grown term by term.

    Sub-multisets are coded in mixed radix with the most recently added
    element as the most significant digit, so pushing a term only appends a
    block of codes and popping truncates it. A term equal to the top element
    raises that digit; any other term opens a new digit, so pushing in sorted
    order keeps the lattice free of duplicate entries but any order is valid. ``pi[0]`` holds ``{1}`` as the seed of the
    recurrence; the empty sub-multiset is otherwise ignored.
    """

    def __init__(self, G: FiniteGroup):
        self.G = G
        self._rmul = G.rmul_fn()
        self.pi: list[int] = [1]
        self._preds: list[tuple] = [()]
        self._support: list[list[int]] = []  # [element, multiplicity, stride]
        self._history: list[tuple[int, int]] = []  # (old size, old union)
        self.union = 0  # mask of all subsequence products
        self.terms: list[int] = []

    def __len__(self):
        return len(self.terms)

    @property
    def full_code(self) -> int:
        return len(self.pi) - 1

    def push(self, g: int, stop_on_identity: bool = False) -> bool:
        """Append ``g``; return ``False`` if a new sub-multiset has 1 in its pi.

        With ``stop_on_identity`` the sweep aborts at the first such entry and
        the lattice is left in a state only fit for :meth:`pop`.
        """
        sup = self._support
        pi, preds, rmul = self.pi, self._preds, self._rmul
        base = len(pi)
        self._history.append((base, self.union))
        self.terms.append(g)
        if sup and sup[-1][0] == g:
            sup[-1][1] += 1
            stride = sup[-1][2]
        else:
            sup.append([g, 1, base])
            stride = base
        union = self.union
        free = True
        for low in range(stride):
            code = base + low
            p = tuple((c + base, e) for c, e in preds[low]) + ((code - stride, g),)
            m = 0
            for c, e in p:
                m |= rmul(pi[c], e)
            pi.append(m)
            preds.append(p)
            union |= m
            if m & 1:
                free = False
                if stop_on_identity:
                    break
        self.union = union
        return free

    def pop(self) -> int:
        base, union = self._history.pop()
        g = self.terms.pop()
        del self.pi[base:]
        del self._preds[base:]
        top = self._support[-1]
        top[1] -= 1
        if not top[1]:
            self._support.pop()
        self.union = union
        return g

    def is_product_one(self) -> bool:
        return bool(self.terms) and bool(self.pi[-1] & 1)

    def is_minimal_product_one(self) -> bool:
        if not self.is_product_one():
            return False
        pi = self.pi
        full = len(pi) - 1
        # complement of code c is full - c (digit-wise, no borrows)
        for c in range(1, full // 2 + 1):
            if pi[c] & 1 and pi[full - c] & 1:
                return False
        return True


def lattice_for(G: FiniteGroup, S: Sequence) -> DivisorLattice:
    lat = DivisorLattice(G)
    for g in S.terms():
        lat.push(g)
    return lat


def _abelian_subsequence_products(G: FiniteGroup, S: Sequence) -> int:
    # pi(T) is a single element, so fold one term at a time
    union = 0
    for g in S.terms():
        union |= (1 << g) | G.rmul_mask(union, g)
    return union


def all_subsequence_products(G: FiniteGroup, S: Sequence) -> GroupSubset:
    """Union of ``pi(T)`` over all non-empty ``T | S``; empty for empty ``S``."""
    if G.is_abelian:
        return GroupSubset(G.order, _abelian_subsequence_products(G, S))
    return GroupSubset(G.order, lattice_for(G, S).union)


def is_product_one_free(G: FiniteGroup, S: Sequence) -> bool:
    if S.counts[0]:
        return False
    if G.is_abelian:
        union = 0
        for g in S.terms():
            union |= (1 << g) | G.rmul_mask(union, g)
            if union & 1:
                return False
        return True
    lat = DivisorLattice(G)
    return all(lat.push(g, stop_on_identity=True) for g in S.terms())


def is_product_one(G: FiniteGroup, S: Sequence) -> bool:
    return 0 in pi_set(G, S)


def is_minimal_product_one(G: FiniteGroup, S: Sequence,
                           cache: Optional[ProductCache] = None) -> bool:
    """Product-one and not splittable into two product-one sub-multisets.

    Sub-multisets are enumerated directly and each side is evaluated with the
    memoised ``pi`` recurrence.
    """
    if S.length == 0:
        raise EmptySequence("minimality of the empty sequence is undefined")
    if cache is None:
        cache = ProductCache(G)
    if 0 not in pi_set(G, S, cache):
        return False
    for T in proper_subsequences(S):
        if 0 in pi_set(G, T, cache) and 0 in pi_set(G, S.remove(T), cache):
            return False
    return True


def proper_subsequences(S: Sequence):
    """Every ``T | S`` with ``0 < |T| < |S|``."""
    support = S.support()
    ranges = [range(S.counts[g] + 1) for g in support]
    total = S.length

    def rec(i, acc, size):
        if i == len(support):
            if 0 < size < total:
                c = [0] * S.n
                for g, k in zip(support, acc):
                    c[g] = k
                yield Sequence(tuple(c))
            return
        for k in ranges[i]:
            acc.append(k)
            yield from rec(i + 1, acc, size + k)
            acc.pop()

    yield from rec(0, [], 0)


def bar_set(N: Subgroup, A: GroupSubset) -> set[int]:
    """Left cosets ``aN`` met by ``A``."""
    return {N.coset_of[a] for a in bits(A.mask)}


def subsequence_products_by_recurrence(G: FiniteGroup, S: Sequence,
                                       cache: Optional[ProductCache] = None) -> int:
    """Mask of all subsequence products, one memoised ``pi`` per sub-multiset.

    Independent of :class:`DivisorLattice`; used to re-validate witnesses.
    """
    if cache is None:
        cache = ProductCache(G)
    union = 0
    if S.length == 0:
        return union
    union |= _pi_mask(G, S.counts, cache)
    for T in proper_subsequences(S):
        union |= _pi_mask(G, T.counts, cache)
    return union
