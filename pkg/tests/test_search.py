import pytest

from davenport.catalog import build_group_id
from davenport.groups import make_cyclic, make_dicyclic, make_dihedral
from davenport.search import (
    OrderCapExceeded,
    SearchConfig,
    Status,
    large_davenport,
    large_davenport_ceiling,
    small_davenport,
    small_davenport_ceiling,
    verify_witness,
)
from davenport.sequences import is_minimal_product_one, is_product_one_free
from oracles import count_multisets, naive_large_davenport, naive_small_davenport

SMALL_IDS = ["C2", "C3", "C4", "C5", "C6", "C7", "C8", "C2xC2", "C2xC4", "C2xC2xC2",
             "S3", "D8", "Q8"]


def test_trivial_group():
    G = make_cyclic(1)
    d = small_davenport(G)
    assert d.value == 0 and d.exact and d.witness.length == 0
    D = large_davenport(G)
    assert D.value == 1 and D.exact and D.witness.terms() == [0]


@pytest.mark.parametrize("n", range(2, 13))
def test_cyclic_values(n):
    G = make_cyclic(n)
    d = small_davenport(G)
    assert d.value == n - 1 and d.exact
    D = large_davenport(G, SearchConfig(D_order_cap=12))
    assert D.value == n and D.exact
    assert verify_witness(G, d) and verify_witness(G, D)


@pytest.mark.parametrize("m", range(2, 7))
def test_dihedral_small_davenport(m):
    d = small_davenport(make_dihedral(m))
    assert d.value == m and d.exact


@pytest.mark.parametrize("gid,expected", [("S3", 6), ("D8", 6), ("Q8", 6), ("D10", 10),
                                          ("C2xC2", 3), ("C2xC2xC2", 4), ("C3xC3", 5)])
def test_large_davenport_values(gid, expected):
    G = build_group_id(gid)
    D = large_davenport(G)
    assert D.value == expected and D.exact
    assert is_minimal_product_one(G, D.witness)


@pytest.mark.parametrize("gid", SMALL_IDS)
def test_small_davenport_matches_naive(gid):
    G = build_group_id(gid)
    assert small_davenport(G).value == naive_small_davenport(G)


@pytest.mark.parametrize("gid", ["C2", "C3", "C4", "C5", "C2xC2", "S3", "C6"])
def test_large_davenport_matches_naive(gid):
    G = build_group_id(gid)
    assert large_davenport(G).value == naive_large_davenport(G)


def test_naive_oracle_values():
    assert naive_small_davenport(build_group_id("C2xC2")) == 2
    assert naive_small_davenport(build_group_id("C3xC3")) == 4
    assert naive_large_davenport(build_group_id("S3")) == 6


@pytest.mark.parametrize("G", [make_dihedral(4), make_dicyclic(2)], ids=["D8", "Q8"])
def test_large_search_visits_every_multiset(G):
    # D = 6 < ceiling 8, so nothing is pruned early: the walk must meet every
    # non-empty multiset of length <= 8 over the seven non-identity elements,
    # plus the one-term seed [1]
    D = large_davenport(G)
    assert D.nodes_expanded == count_multisets(7, 8) + 1


def test_ceilings():
    assert small_davenport_ceiling(make_cyclic(7)) == 6
    assert small_davenport_ceiling(make_dihedral(5)) == 5
    assert large_davenport_ceiling(make_cyclic(9)) == 9
    assert large_davenport_ceiling(build_group_id("C3xC3")) == 6
    assert large_davenport_ceiling(make_dihedral(4)) == 8


def test_order_cap():
    with pytest.raises(OrderCapExceeded):
        large_davenport(make_cyclic(11))
    assert large_davenport(make_cyclic(11), SearchConfig(D_order_cap=11)).value == 11


def test_config_validation():
    for bad in ({"node_cap": 0}, {"max_length": -1}, {"workers": 0}, {"D_order_cap": 0}):
        with pytest.raises(ValueError):
            SearchConfig(**bad)
    with pytest.raises(NotImplementedError):
        SearchConfig(automorphism_pruning=True)


def test_digest_ignores_scheduling_fields():
    a = SearchConfig(node_cap=100)
    assert a.digest() == SearchConfig(node_cap=100, parallel_roots=True, workers=3).digest()
    assert a.digest() != SearchConfig(node_cap=101).digest()
    assert a.digest() != SearchConfig(node_cap=100, max_length=4).digest()


def test_node_cap_gives_lower_bound():
    G = build_group_id("C2xC2xC2xC2")
    res = small_davenport(G, SearchConfig(node_cap=5))
    assert res.status is Status.LOWER_BOUND_ONLY and not res.exact
    assert res.value <= small_davenport(G).value
    assert is_product_one_free(G, res.witness)
    assert res.nodes_expanded <= 6


def test_cap_hit_at_proven_ceiling_is_still_exact():
    # a cyclic witness of length n-1 is found on the first path
    res = small_davenport(make_cyclic(9), SearchConfig(node_cap=50))
    assert res.value == 8 and res.exact


def test_max_length_truncation():
    G = make_dihedral(5)
    res = small_davenport(G, SearchConfig(max_length=3))
    assert res.value == 3 and res.status is Status.LOWER_BOUND_ONLY
    res = small_davenport(G, SearchConfig(max_length=9))
    assert res.value == 5 and res.exact
    D = large_davenport(make_dihedral(3), SearchConfig(max_length=4))
    assert D.value == 4 and not D.exact


@pytest.mark.parametrize("gid", ["S3", "D8", "C2xC2xC2", "Q12"])
def test_parallel_matches_sequential(gid):
    G = build_group_id(gid)
    seq = small_davenport(G)
    par = small_davenport(G, SearchConfig(parallel_roots=True, workers=2))
    assert (par.value, par.witness, par.status) == (seq.value, seq.witness, seq.status)
    if G.order <= 8:
        a = large_davenport(G)
        b = large_davenport(G, SearchConfig(parallel_roots=True, workers=2))
        assert (a.value, a.witness) == (b.value, b.witness)


def test_repeated_runs_identical():
    G = build_group_id("A4")
    a, b = small_davenport(G), small_davenport(G)
    assert (a.value, a.witness, a.nodes_expanded) == (b.value, b.witness, b.nodes_expanded)


def test_verify_witness_rejects_tampering():
    G = make_dihedral(4)
    d = small_davenport(G)
    assert verify_witness(G, d)
    bad = type(d)(value=d.value, witness=d.witness.add(0, 1).add(d.witness.support()[0], -1),
                  status=d.status, nodes_expanded=0, elapsed=0.0, kind="d")
    assert not verify_witness(G, bad)
    short = type(d)(value=d.value + 1, witness=d.witness, status=d.status,
                    nodes_expanded=0, elapsed=0.0, kind="d")
    assert not verify_witness(G, short)
