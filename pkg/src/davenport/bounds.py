"""Closed-form bounds on d(G) and D(G), the extremal construction, and the
per-group bound audit."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .groups import (
    CyclicGroupError,
    FiniteGroup,
    TrivialGroupError,
    cyclic_subgroup_generator_of_order,
    smallest_prime_divisor,
    subgroup_generated,
)
from .search import DavenportResult
from .sequences import Sequence, is_product_one_free

PASS = "pass"
FAIL = "fail"
NA = "n/a"
VIOLATION = "VIOLATION-REPORTED"


class NoExactValues(ValueError):
    pass


class ConstructionError(RuntimeError):
    """The built sequence failed verification; the group tables are suspect."""


def _require_noncyclic(G: FiniteGroup) -> int:
    if G.order == 1:
        raise TrivialGroupError("bound requires |G| >= 2")
    if G.is_cyclic:
        raise CyclicGroupError(f"{G.name} is cyclic")
    return smallest_prime_divisor(G)


def theorem_upper_bound(G: FiniteGroup) -> int:
    """``n/p + 9p^2 - 10p`` for non-cyclic ``G``."""
    p = _require_noncyclic(G)
    return G.order // p + 9 * p * p - 10 * p


def conjecture_upper_bound(G: FiniteGroup) -> int:
    """``n/p + p - 2`` for non-cyclic ``G``."""
    p = _require_noncyclic(G)
    return G.order // p + p - 2


def construction_length(G: FiniteGroup) -> int:
    p = smallest_prime_divisor(G)
    return G.order // p + p - 2


def extremal_construction(G: FiniteGroup) -> Optional[Sequence]:
    """``g^[p-1] * h^[n/p-1]`` with ``h`` of order ``n/p`` and ``g`` outside ``<h>``.

    Both ``h`` and ``g`` are the lowest-index admissible elements. Returns
    ``None`` when ``G`` has no element of order ``n/p``. Cyclic groups are
    accepted: there the sequence is free but shorter than ``d = n - 1``.
    """
    if G.order == 1:
        raise TrivialGroupError("construction requires |G| >= 2")
    p = smallest_prime_divisor(G)
    n = G.order
    h = cyclic_subgroup_generator_of_order(G, n // p)
    if h is None:
        return None
    H = subgroup_generated(G, [h])
    g = next(x for x in range(n) if x not in H)
    S = Sequence.from_terms(n, [g] * (p - 1) + [h] * (n // p - 1))
    if S.length != n // p + p - 2 or not is_product_one_free(G, S):
        raise ConstructionError(f"construction over {G.name} is not product-one free")
    return S


@dataclass
class BoundsReport:
    group_id: str
    n: int
    p: Optional[int]
    d_value: Optional[int] = None
    D_value: Optional[int] = None
    construction_length: Optional[int] = None
    theorem_bound: Optional[int] = None
    conjecture_bound: Optional[int] = None
    ow_bound: Optional[int] = None
    gryn_bound: Optional[int] = None
    flags: dict[str, str] = field(default_factory=dict)

    @property
    def failed(self) -> list[str]:
        return [k for k, v in self.flags.items() if v == FAIL]

    @property
    def conjecture_violated(self) -> bool:
        return self.flags.get("conjecture") == VIOLATION


def _flag(applicable: bool, ok: bool) -> str:
    if not applicable:
        return NA
    return PASS if ok else FAIL


def check_bounds(G: FiniteGroup, d: Optional[DavenportResult] = None,
                 D: Optional[DavenportResult] = None) -> BoundsReport:
    """Audit exact values of d(G) and D(G) against every applicable bound."""
    d_val = d.value if d is not None and d.exact else None
    D_val = D.value if D is not None and D.exact else None
    if d_val is None and D_val is None:
        raise NoExactValues("check_bounds needs an exact d or D")
    n = G.order
    noncyclic = n > 1 and not G.is_cyclic
    p = smallest_prime_divisor(G) if n > 1 else None
    rep = BoundsReport(group_id=G.name, n=n, p=p, d_value=d_val, D_value=D_val)
    if p is not None:
        rep.gryn_bound = 2 * n // p
    if noncyclic:
        rep.theorem_bound = theorem_upper_bound(G)
        rep.conjecture_bound = conjecture_upper_bound(G)
        rep.ow_bound = n // 2
    if p is not None:
        S = extremal_construction(G)
        if S is not None:
            rep.construction_length = S.length

    has_d, has_D = d_val is not None, D_val is not None
    f = rep.flags
    f["d_plus_1_le_D"] = _flag(has_d and has_D, has_d and has_D and d_val + 1 <= D_val)
    f["D_le_n"] = _flag(has_D, has_D and D_val <= n)
    f["abelian_d_plus_1_eq_D"] = _flag(G.is_abelian and has_d and has_D,
                                       has_d and has_D and d_val + 1 == D_val)
    f["cyclic_D_eq_n"] = _flag(G.is_cyclic and has_D, D_val == n)
    f["ow_bound"] = _flag(noncyclic and has_d, has_d and rep.ow_bound is not None
                          and d_val <= rep.ow_bound)
    # D <= 2n/p is a statement about non-cyclic groups: D(C_p) = p > 2 for odd p
    f["gryn_bound"] = _flag(noncyclic and has_D, has_D and rep.gryn_bound is not None
                            and D_val <= rep.gryn_bound)
    f["theorem_bound"] = _flag(noncyclic and has_d, has_d and rep.theorem_bound is not None
                               and d_val <= rep.theorem_bound)
    f["construction_le_d"] = _flag(rep.construction_length is not None and has_d,
                                   has_d and rep.construction_length is not None
                                   and rep.construction_length <= d_val)
    if noncyclic and has_d:
        f["conjecture"] = PASS if d_val <= rep.conjecture_bound else VIOLATION
    else:
        f["conjecture"] = NA
    return rep
