"""Finite groups as dense Cayley tables.

Elements are the integers ``0..n-1`` and the identity is always ``0``.
Subsets of a group are stored as Python ints used as bitmasks (bit ``g`` set
iff ``g`` is a member), which keeps product-set arithmetic to a handful of
table lookups per element for the small orders this package targets.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence as Seq

import numpy as np

DEFAULT_ORDER_CAP = 512
_CHUNK = 8


class GroupError(Exception):
    pass


class NotClosed(GroupError):
    pass


class NotAssociative(GroupError):
    pass


class NoIdentity(GroupError):
    pass


class NoInverse(GroupError):
    pass


class CapExceeded(GroupError):
    def __init__(self, cap: int):
        super().__init__(f"generated group exceeds order cap {cap}")
        self.cap = cap


class TrivialGroupError(GroupError):
    pass


class CyclicGroupError(GroupError):
    pass


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask``, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True)
class GroupSubset:
    """A subset of a group of order ``n``, as a dense membership bitmask."""

    n: int
    mask: int = 0

    @classmethod
    def from_elements(cls, n: int, elements: Iterable[int]) -> "GroupSubset":
        m = 0
        for g in elements:
            if not 0 <= g < n:
                raise ValueError(f"element {g} out of range for order {n}")
            m |= 1 << g
        return cls(n, m)

    @classmethod
    def full(cls, n: int) -> "GroupSubset":
        return cls(n, (1 << n) - 1)

    @property
    def cardinality(self) -> int:
        return self.mask.bit_count()

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, g: int) -> bool:
        return bool(self.mask >> g & 1)

    def __iter__(self):
        return iter(bits(self.mask))

    def __or__(self, other: "GroupSubset") -> "GroupSubset":
        return GroupSubset(self.n, self.mask | other.mask)

    def __and__(self, other: "GroupSubset") -> "GroupSubset":
        return GroupSubset(self.n, self.mask & other.mask)

    def elements(self) -> list[int]:
        return bits(self.mask)


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by its multiplication table.

    ``table[a][b]`` is the index of ``a*b``. Use the ``make_*`` constructors or
    :func:`from_cayley_table`; the raw constructor trusts its arguments.
    """

    table: tuple[tuple[int, ...], ...]
    name: str = field(default="G")

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def identity(self) -> int:
        return 0

    @cached_property
    def inverse(self) -> tuple[int, ...]:
        inv = [0] * self.order
        for a, row in enumerate(self.table):
            inv[a] = row.index(0)
        return tuple(inv)

    @cached_property
    def elem_order(self) -> tuple[int, ...]:
        out = []
        for a in range(self.order):
            k, x = 1, a
            while x != 0:
                x = self.table[x][a]
                k += 1
            out.append(k)
        return tuple(out)

    @cached_property
    def is_abelian(self) -> bool:
        t = self.table
        n = self.order
        return all(t[a][b] == t[b][a] for a in range(n) for b in range(a + 1, n))

    @cached_property
    def is_cyclic(self) -> bool:
        return self.order in self.elem_order

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def product(self, terms: Iterable[int]) -> int:
        x = 0
        for g in terms:
            x = self.table[x][g]
        return x

    def power(self, a: int, k: int) -> int:
        x = 0
        for _ in range(k % self.elem_order[a]):
            x = self.table[x][a]
        return x

    # -- bitmask arithmetic -------------------------------------------------

    @cached_property
    def _right_tables(self):
        # per element g: one 256-entry lookup per byte of the mask, mapping a
        # byte of members to the mask of {x*g}
        return self._chunk_tables(lambda x, g: self.table[x][g])

    @cached_property
    def _left_tables(self):
        return self._chunk_tables(lambda x, g: self.table[g][x])

    def _chunk_tables(self, op):
        n = self.order
        nchunks = (n + _CHUNK - 1) // _CHUNK
        out = []
        for g in range(n):
            per_g = []
            for c in range(nchunks):
                base = c * _CHUNK
                width = min(_CHUNK, n - base)
                single = [1 << op(base + i, g) for i in range(width)]
                lut = [0] * (1 << width)
                for v in range(1, 1 << width):
                    low = (v & -v).bit_length() - 1
                    lut[v] = lut[v & (v - 1)] | single[low]
                per_g.append(lut)
            out.append(per_g)
        return out

    def rmul_mask(self, mask: int, g: int) -> int:
        """Mask of ``{x*g : x in mask}``."""
        out = 0
        shift = 0
        for lut in self._right_tables[g]:
            if mask >> shift:
                out |= lut[(mask >> shift) & 0xFF]
            shift += _CHUNK
        return out

    def lmul_mask(self, g: int, mask: int) -> int:
        """Mask of ``{g*x : x in mask}``."""
        out = 0
        shift = 0
        for lut in self._left_tables[g]:
            if mask >> shift:
                out |= lut[(mask >> shift) & 0xFF]
            shift += _CHUNK
        return out

    def rmul_fn(self):
        """A fast right-multiplication closure ``f(mask, g)`` for hot loops."""
        tables = self._right_tables
        if self.order <= _CHUNK:
            return lambda mask, g: tables[g][0][mask]
        if self.order <= 2 * _CHUNK:
            def f2(mask, g):
                t = tables[g]
                return t[0][mask & 0xFF] | t[1][mask >> 8]
            return f2
        if self.order <= 3 * _CHUNK:
            def f3(mask, g):
                t = tables[g]
                return t[0][mask & 0xFF] | t[1][(mask >> 8) & 0xFF] | t[2][mask >> 16]
            return f3
        if self.order <= 4 * _CHUNK:
            def f4(mask, g):
                t = tables[g]
                return (t[0][mask & 0xFF] | t[1][(mask >> 8) & 0xFF]
                        | t[2][(mask >> 16) & 0xFF] | t[3][mask >> 24])
            return f4
        return self.rmul_mask

    def subset(self, elements: Iterable[int]) -> GroupSubset:
        return GroupSubset.from_elements(self.order, elements)


# -- constructors ---------------------------------------------------------


def _make(table, name: str) -> FiniteGroup:
    return FiniteGroup(tuple(tuple(int(x) for x in row) for row in table), name)


def make_cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise ValueError("cyclic group order must be positive")
    return _make([[(i + j) % n for j in range(n)] for i in range(n)], f"C{n}")


def make_dihedral(m: int) -> FiniteGroup:
    """Dihedral group of order ``2m``.

    Index ``i < m`` is the rotation ``r^i``; index ``m + i`` is ``s r^i``.
    """
    if m < 2:
        raise ValueError("dihedral parameter must be >= 2")

    def mul(a, b):
        fa, ia = divmod(a, m)
        fb, ib = divmod(b, m)
        # (s^fa r^ia)(s^fb r^ib) = s^(fa+fb) r^((-1)^fb * ia + ib)
        i = (ib + (-ia if fb else ia)) % m
        return ((fa + fb) % 2) * m + i

    n = 2 * m
    return _make([[mul(a, b) for b in range(n)] for a in range(n)], f"D{n}")


def make_dicyclic(m: int) -> FiniteGroup:
    """Dicyclic group of order ``4m``: ``<a, b | a^2m = 1, b^2 = a^m, b^-1 a b = a^-1>``.

    Index ``i < 2m`` is ``a^i``; index ``2m + i`` is ``a^i b``.
    """
    if m < 2:
        raise ValueError("dicyclic parameter must be >= 2")
    k = 2 * m

    def mul(x, y):
        fx, ix = divmod(x, k)
        fy, iy = divmod(y, k)
        if not fx and not fy:
            return (ix + iy) % k
        if not fx:
            # a^i * a^j b = a^(i+j) b
            return k + (ix + iy) % k
        if not fy:
            # a^i b * a^j = a^(i-j) b
            return k + (ix - iy) % k
        # a^i b * a^j b = a^(i-j) b^2 = a^(i-j+m)
        return (ix - iy + m) % k

    n = 4 * m
    return _make([[mul(x, y) for y in range(n)] for x in range(n)], f"Q{n}")


def direct_product(G: FiniteGroup, H: FiniteGroup, name: Optional[str] = None) -> FiniteGroup:
    """Componentwise product; ``(g, h)`` sits at index ``g*|H| + h``."""
    m = H.order
    n = G.order * m
    tg, th = G.table, H.table
    table = [
        [tg[a // m][b // m] * m + th[a % m][b % m] for b in range(n)]
        for a in range(n)
    ]
    return _make(table, name or f"{G.name}x{H.name}")


def from_cayley_table(table: Seq[Seq[int]], name: str = "G",
                      check_associativity: bool = True) -> FiniteGroup:
    """Validate an arbitrary multiplication table and re-index its identity to 0."""
    try:
        arr = np.asarray(table, dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise NotClosed(f"table is not a rectangular integer array: {exc}") from None
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise NotClosed(f"table must be a non-empty square array, got shape {arr.shape}")
    n = arr.shape[0]
    if arr.min() < 0 or arr.max() >= n:
        raise NotClosed("table entries must lie in [0, n-1]")

    ident = np.arange(n)
    e = next((i for i in range(n)
              if np.array_equal(arr[i], ident) and np.array_equal(arr[:, i], ident)), None)
    if e is None:
        raise NoIdentity("no two-sided identity element")

    if e != 0:
        # relabel: swap e <-> 0
        perm = np.arange(n)
        perm[0], perm[e] = e, 0
        arr = perm[arr[np.ix_(perm, perm)]]

    for a in range(n):
        right = np.flatnonzero(arr[a] == 0)
        left = np.flatnonzero(arr[:, a] == 0)
        if len(right) != 1 or len(left) != 1 or right[0] != left[0]:
            raise NoInverse(f"element {a} has no unique two-sided inverse")

    if check_associativity:
        for a in range(n):
            # (a*b)*c vs a*(b*c) over all b, c
            if not np.array_equal(arr[arr[a]], arr[a][arr]):
                raise NotAssociative(f"associativity fails with left factor {a}")

    return _make(arr.tolist(), name)


def table_of(G: FiniteGroup) -> list[list[int]]:
    return [list(row) for row in G.table]


def _compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    # (p*q)(x) = p(q(x))
    return tuple(p[x] for x in q)


def from_permutation_generators(gens: Seq[Seq[int]], name: str = "G",
                                cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """Close a set of permutations under composition and tabulate the result.

    Elements are numbered in breadth-first discovery order from the identity.
    """
    gens = [tuple(g) for g in gens]
    if not gens:
        return _make([[0]], name)
    k = len(gens[0])
    for g in gens:
        if len(g) != k or sorted(g) != list(range(k)):
            raise ValueError(f"{g} is not a permutation of 0..{k - 1}")
    identity = tuple(range(k))
    index = {identity: 0}
    elems = [identity]
    queue = deque([identity])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = _compose(x, g)
            if y not in index:
                if len(elems) >= cap:
                    raise CapExceeded(cap)
                index[y] = len(elems)
                elems.append(y)
                queue.append(y)
    table = [[index[_compose(x, y)] for y in elems] for x in elems]
    return _make(table, name)


def make_symmetric(k: int) -> FiniteGroup:
    if k < 1:
        raise ValueError("degree must be positive")
    if k == 1:
        return _make([[0]], "S1")
    gens = [tuple([1, 0] + list(range(2, k))), tuple(list(range(1, k)) + [0])]
    return from_permutation_generators(gens, f"S{k}")


def make_alternating(k: int) -> FiniteGroup:
    if k < 3:
        return _make([[0]], f"A{k}")
    # 3-cycles (0 1 i) generate A_k
    gens = []
    for i in range(2, k):
        p = list(range(k))
        p[0], p[1], p[i] = 1, i, 0
        gens.append(tuple(p))
    return from_permutation_generators(gens, f"A{k}")


# -- structure --------------------------------------------------------------


def smallest_prime_divisor(G: FiniteGroup) -> int:
    n = G.order
    if n == 1:
        raise TrivialGroupError("the trivial group has no prime divisor")
    p = 2
    while p * p <= n:
        if n % p == 0:
            return p
        p += 1
    return n


@dataclass(frozen=True, eq=False)
class Subgroup:
    """A subgroup ``N`` together with its left-coset labelling ``a -> aN``."""

    group: FiniteGroup
    members: GroupSubset
    coset_of: tuple[int, ...]
    coset_count: int

    @property
    def order(self) -> int:
        return self.members.cardinality

    def __contains__(self, g: int) -> bool:
        return g in self.members

    def is_proper(self) -> bool:
        return self.coset_count > 1


def _closure(G: FiniteGroup, gens: Iterable[int]) -> int:
    t = G.table
    mask = 1
    frontier = [0]
    gens = list(dict.fromkeys(gens))
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = t[x][g]
                if not mask >> y & 1:
                    mask |= 1 << y
                    nxt.append(y)
        frontier = nxt
    return mask


def subgroup_from_mask(G: FiniteGroup, mask: int) -> Subgroup:
    """Build the coset map for a mask already known to be a subgroup."""
    n = G.order
    members = bits(mask)
    coset_of = [-1] * n
    count = 0
    t = G.table
    for a in range(n):
        if coset_of[a] >= 0:
            continue
        for h in members:
            coset_of[t[a][h]] = count
        count += 1
    return Subgroup(G, GroupSubset(n, mask), tuple(coset_of), count)


def subgroup_generated(G: FiniteGroup, A: GroupSubset | Iterable[int]) -> Subgroup:
    gens = A.elements() if isinstance(A, GroupSubset) else list(A)
    return subgroup_from_mask(G, _closure(G, gens))


def derived_subgroup(G: FiniteGroup) -> Subgroup:
    t, inv = G.table, G.inverse
    comms = {t[t[inv[a]][inv[b]]][t[a][b]] for a in range(G.order) for b in range(G.order)}
    return subgroup_generated(G, comms)


def cyclic_subgroup_generator_of_order(G: FiniteGroup, m: int) -> Optional[int]:
    if m < 1:
        raise ValueError("order must be positive")
    return next((a for a, k in enumerate(G.elem_order) if k == m), None)


def is_subgroup_mask(G: FiniteGroup, mask: int) -> bool:
    if not mask & 1:
        return False
    members = bits(mask)
    t = G.table
    return all(mask >> t[a][b] & 1 for a, b in itertools.product(members, repeat=2))
