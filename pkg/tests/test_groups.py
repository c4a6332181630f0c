import itertools
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from davenport.catalog import build_group_id
from davenport.groups import (
    CapExceeded,
    GroupSubset,
    NoIdentity,
    NoInverse,
    NotAssociative,
    NotClosed,
    TrivialGroupError,
    cyclic_subgroup_generator_of_order,
    derived_subgroup,
    direct_product,
    from_cayley_table,
    from_permutation_generators,
    is_subgroup_mask,
    make_alternating,
    make_cyclic,
    make_dicyclic,
    make_dihedral,
    make_symmetric,
    smallest_prime_divisor,
    subgroup_generated,
    table_of,
)
from oracles import dicyclic_matrices, matrix_group_orders

C = make_cyclic


def all_small_groups():
    gs = [C(n) for n in range(1, 13)]
    gs += [make_dihedral(m) for m in range(2, 9)]
    gs += [make_dicyclic(m) for m in range(2, 6)]
    gs += [direct_product(C(2), C(2)), direct_product(C(3), C(3)),
           direct_product(direct_product(C(2), C(2)), C(2)),
           make_symmetric(3), make_symmetric(4), make_alternating(4),
           build_group_id("F21"), build_group_id("C2xD8")]
    return gs


GROUPS = all_small_groups()


def assert_group_axioms(G):
    n, t, inv = G.order, G.table, G.inverse
    for a in range(n):
        assert t[0][a] == a == t[a][0]
        assert t[a][inv[a]] == 0 == t[inv[a]][a]
        for b in range(n):
            assert 0 <= t[a][b] < n
            for c in range(n):
                assert t[t[a][b]][c] == t[a][t[b][c]]


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_group_axioms(G):
    assert_group_axioms(G)


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_element_orders(G):
    for a in range(G.order):
        k = G.elem_order[a]
        assert G.order % k == 0
        assert G.power(a, k) == 0
        assert all(G.power(a, j) != 0 for j in range(1, k))


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_cayley_round_trip(G):
    H = from_cayley_table(table_of(G))
    assert H.table == G.table


def test_cyclic_examples():
    assert C(1).order == 1 and C(1).table == ((0,),)
    assert C(4).elem_order == (1, 4, 2, 4)
    assert C(6).inverse[1] == 5 and C(6).inverse[2] == 4


def test_dihedral_examples():
    S3 = make_dihedral(3)
    assert S3.order == 6
    assert sorted(S3.elem_order[:3]) == [1, 3, 3]
    assert list(S3.elem_order[3:]) == [2, 2, 2]
    V = make_dihedral(2)
    assert V.elem_order[1:] == (2, 2, 2)
    D8 = make_dihedral(4)
    assert D8.order == 8
    rot = subgroup_generated(D8, [1])
    assert rot.order == 4 and rot.members.elements() == [0, 1, 2, 3]
    for m in range(2, 9):
        G = make_dihedral(m)
        assert G.order == 2 * m and m in G.elem_order


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_dicyclic_orders_match_matrix_model(m):
    G = make_dicyclic(m)
    assert sorted(G.elem_order) == matrix_group_orders(dicyclic_matrices(m))


def test_dicyclic_examples():
    Q8 = make_dicyclic(2)
    assert Counter(Q8.elem_order) == {1: 1, 2: 1, 4: 6}
    assert Q8.elem_order[0] == 1
    Q12 = make_dicyclic(3)
    assert Q12.order == 12 and Q12.elem_order[1] == 6


def test_direct_product_examples():
    V = direct_product(C(2), C(2))
    assert sorted(V.elem_order) == [1, 2, 2, 2]
    assert 6 in direct_product(C(2), C(3)).elem_order
    assert set(direct_product(C(3), C(3)).elem_order[1:]) == {3}


@given(st.integers(1, 6), st.integers(1, 6))
def test_direct_product_order_multiplicative(a, b):
    G = direct_product(C(a), make_dihedral(b + 1))
    assert G.order == a * 2 * (b + 1)
    if G.order <= 16:
        assert_group_axioms(G)


def test_from_cayley_table_c2():
    G = from_cayley_table([[0, 1], [1, 0]])
    assert G.order == 2 and G.elem_order == (1, 2)


def test_from_cayley_table_reindexes_identity():
    # C3 with identity stored at index 2
    t = [[1, 2, 0], [2, 0, 1], [0, 1, 2]]
    G = from_cayley_table(t)
    assert G.table[0] == (0, 1, 2)
    assert sorted(G.elem_order) == [1, 3, 3]


def test_from_cayley_table_rejects_corruption():
    t = [list(r) for r in C(3).table]
    t[1][1] = 1
    with pytest.raises((NotAssociative, NoInverse)):
        from_cayley_table(t)
    with pytest.raises(NotClosed):
        from_cayley_table([[0, 1], [1, 2]])
    with pytest.raises(NoIdentity):
        from_cayley_table([[1, 1], [1, 1]])
    with pytest.raises(NotClosed):
        from_cayley_table([[0, 1, 2], [1, 2, 0]])


def test_from_cayley_table_detects_nonassociative_loop():
    # a Latin square with identity that is not associative (order-5 loop)
    t = [[0, 1, 2, 3, 4],
         [1, 0, 3, 4, 2],
         [2, 4, 0, 1, 3],
         [3, 2, 4, 0, 1],
         [4, 3, 1, 2, 0]]
    with pytest.raises(NotAssociative):
        from_cayley_table(t)
    G = from_cayley_table(t, check_associativity=False)
    assert G.order == 5


def test_s3_table_matches_dihedral_orders():
    S3 = make_symmetric(3)
    G = from_cayley_table(table_of(S3))
    assert Counter(G.elem_order) == Counter(make_dihedral(3).elem_order)
    assert Counter(G.elem_order)[2] == 3


def test_permutation_generators():
    G = from_permutation_generators([(1, 0)])
    assert G.order == 2
    H = from_permutation_generators([(1, 0, 2), (1, 2, 0)])
    assert H.order == 6 and not H.is_abelian
    assert from_permutation_generators([]).order == 1
    with pytest.raises(CapExceeded):
        from_permutation_generators([(1, 0, 2, 3), (1, 2, 3, 0)], cap=10)
    assert make_symmetric(4).order == 24 and make_alternating(4).order == 12


def test_smallest_prime_divisor():
    assert smallest_prime_divisor(direct_product(C(3), C(4))) == 2
    assert smallest_prime_divisor(C(35)) == 5
    assert smallest_prime_divisor(C(9)) == 3
    with pytest.raises(TrivialGroupError):
        smallest_prime_divisor(C(1))


def test_subgroup_generated_examples():
    G = C(6)
    N = subgroup_generated(G, GroupSubset(6, 0))
    assert N.members.elements() == [0] and N.coset_count == 6
    N = subgroup_generated(G, G.subset([2]))
    assert N.members.elements() == [0, 2, 4] and N.coset_count == 2
    S3 = make_dihedral(3)
    N = subgroup_generated(S3, [3])
    assert N.order == 2 and N.coset_count == 3


def _brute_left_coset_ok(G, N):
    n = G.order
    inv = G.inverse
    for a, b in itertools.product(range(n), repeat=2):
        same = G.table[inv[a]][b] in N
        assert (N.coset_of[a] == N.coset_of[b]) == same
    assert N.coset_of[0] == 0
    counts = Counter(N.coset_of)
    assert set(counts.values()) == {N.order}
    assert sorted(counts) == list(range(N.coset_count))


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_subgroups_and_cosets(G):
    for a in range(G.order):
        N = subgroup_generated(G, [a])
        assert is_subgroup_mask(G, N.members.mask)
        assert G.order % N.order == 0
        assert N.order == G.elem_order[a]
        _brute_left_coset_ok(G, N)


@given(st.sampled_from(GROUPS), st.data())
def test_generated_subgroup_is_smallest(G, data):
    gens = data.draw(st.lists(st.integers(0, G.order - 1), max_size=3))
    N = subgroup_generated(G, gens)
    assert all(g in N for g in gens)
    assert is_subgroup_mask(G, N.members.mask)
    assert G.order % N.order == 0
    _brute_left_coset_ok(G, N)
    # closure by brute force: repeated products of generators and identity
    closure = {0} | set(gens)
    while True:
        new = {G.table[a][b] for a in closure for b in closure} | closure
        if new == closure:
            break
        closure = new
    assert set(N.members.elements()) == closure


def _commutator_closure(G):
    t, inv = G.table, G.inverse
    comms = {t[t[inv[a]][inv[b]]][t[a][b]] for a in range(G.order) for b in range(G.order)}
    closure = set(comms) | {0}
    while True:
        new = {t[a][b] for a in closure for b in closure} | closure
        if new == closure:
            return closure
        closure = new


def test_derived_subgroup_examples():
    assert derived_subgroup(C(6)).order == 1
    assert derived_subgroup(direct_product(C(2), C(4))).order == 1
    S3 = make_dihedral(3)
    D = derived_subgroup(S3)
    assert set(D.members.elements()) == _commutator_closure(S3) == {0, 1, 2}
    Q8 = make_dicyclic(2)
    D = derived_subgroup(Q8)
    assert D.order == 2
    # the unique involution of Q8
    assert set(D.members.elements()) == {0, Q8.elem_order.index(2)}
    assert derived_subgroup(make_alternating(4)).order == 4


def test_cyclic_subgroup_generator_of_order():
    D8 = make_dihedral(4)
    assert cyclic_subgroup_generator_of_order(D8, 4) == 1
    E = direct_product(direct_product(C(2), C(2)), C(2))
    assert cyclic_subgroup_generator_of_order(E, 4) is None
    g = cyclic_subgroup_generator_of_order(C(6), 6)
    assert g == 1 and C(6).elem_order[g] == 6


def test_bitmask_multiplication_matches_table():
    for G in GROUPS:
        n = G.order
        rmul = G.rmul_fn()
        for mask in (1, (1 << n) - 1, 0b1011 & ((1 << n) - 1), (1 << (n - 1))):
            for g in range(n):
                want_r = GroupSubset.from_elements(n, [G.table[x][g] for x in
                                                       GroupSubset(n, mask).elements()]).mask
                want_l = GroupSubset.from_elements(n, [G.table[g][x] for x in
                                                       GroupSubset(n, mask).elements()]).mask
                assert G.rmul_mask(mask, g) == want_r == rmul(mask, g)
                assert G.lmul_mask(g, mask) == want_l
