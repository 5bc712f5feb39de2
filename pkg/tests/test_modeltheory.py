import itertools
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from decdiag.ars import Ars, check, disjoint_union
from decdiag.errors import ArsError
from decdiag.modeltheory import (
    UNREACHABLE,
    RootedGraph,
    canonical_encoding,
    degree,
    gen_family,
    gen_family_named,
    iso_class_table,
    locally_isomorphic,
    neighbourhood,
    rooted_isomorphic,
    undirected_distance,
)
from fixtures import E_AB, E_CYC2, E_DIA, E_PEAK


def brute_rooted_iso(e1, r1, e2, r2, n):
    """Try every permutation sending root to root."""
    e1, e2 = set(e1), set(e2)
    if len(e1) != len(e2):
        return False
    for perm in itertools.permutations(range(n)):
        if perm[r1] == r2 and {(perm[s], perm[d]) for s, d in e1} == e2:
            return True
    return False


def brute_ball(n, edges, a, r):
    ball = {a}
    for _ in range(r):
        ball |= {d for s, d in edges if s in ball} | {s for s, d in edges if d in ball}
    order = sorted(ball)
    idx = {v: i for i, v in enumerate(order)}
    return len(order), [(idx[s], idx[d]) for s, d in edges if s in idx and d in idx], idx[a]


def brute_local_iso(a, b, r):
    """Search a bijection matching nodes with isomorphic rooted balls."""
    if a.n_nodes != b.n_nodes:
        return False
    balls_a = [brute_ball(a.n_nodes, a.edges, v, r) for v in range(a.n_nodes)]
    balls_b = [brute_ball(b.n_nodes, b.edges, v, r) for v in range(b.n_nodes)]

    def iso(x, y):
        return x[0] == y[0] and brute_rooted_iso(x[1], x[2], y[1], y[2], x[0])

    for perm in itertools.permutations(range(b.n_nodes)):
        if all(iso(balls_a[v], balls_b[perm[v]]) for v in range(a.n_nodes)):
            return True
    return False


@st.composite
def small_ars(draw, min_nodes=1, max_nodes=5):
    n = draw(st.integers(min_nodes, max_nodes))
    pairs = [(i, j) for i in range(n) for j in range(n)]
    return Ars(n, draw(st.sets(st.sampled_from(pairs), max_size=10)))


@st.composite
def rooted(draw, max_nodes=5):
    a = draw(small_ars(max_nodes=max_nodes))
    return RootedGraph(a, draw(st.integers(0, a.n_nodes - 1)))


def relabel(g, perm):
    return RootedGraph(Ars(g.ars.n_nodes, {(perm[s], perm[d]) for s, d in g.ars.edges}), perm[g.root])


# -- degree and distance -------------------------------------------------

def test_degree_examples():
    assert degree(E_DIA, 0) == 2
    assert degree(E_DIA, 3) == 2
    assert degree(E_CYC2, 0) == 1
    assert degree(Ars(1, [(0, 0)]), 0) == 1
    with pytest.raises(ArsError):
        degree(E_AB, 5)


def test_distance_examples():
    assert undirected_distance(E_DIA, 1, 2) == 2
    assert all(undirected_distance(E_DIA, v, v) == 0 for v in range(4))
    assert undirected_distance(disjoint_union(E_AB, E_AB), 0, 3) is UNREACHABLE


# -- neighbourhoods ------------------------------------------------------

def test_neighbourhood_examples():
    g = neighbourhood(E_DIA, 0, 1)
    assert g.root == 0 and g.ars == Ars(3, [(0, 1), (0, 2)])
    assert g.origin == (0, 1, 2)
    g = neighbourhood(E_DIA, 0, 2)
    assert g.ars.n_nodes == 4 and len(g.ars.edges) == 4
    g = neighbourhood(Ars(2, [(0, 0), (0, 1)]), 0, 0)
    assert g.ars == Ars(1, [(0, 0)])
    with pytest.raises(ArsError):
        neighbourhood(E_DIA, 0, -1)


def test_neighbourhood_orders_by_layer_then_index():
    # from node 3: layer 1 is {1, 2}, layer 2 is {0}
    assert neighbourhood(E_DIA, 3, 2).origin == (3, 1, 2, 0)


@given(small_ars(), st.integers(0, 3), st.integers(0, 3))
def test_neighbourhood_monotone_in_radius(a, r1, r2):
    r1, r2 = sorted((r1, r2))
    for v in range(a.n_nodes):
        assert set(neighbourhood(a, v, r1).origin) <= set(neighbourhood(a, v, r2).origin)


# -- rooted isomorphism --------------------------------------------------

def test_rooted_isomorphic_examples():
    d0 = RootedGraph(E_DIA, 0)
    assert rooted_isomorphic(d0, RootedGraph(Ars(4, E_DIA.edges), 0))
    assert not rooted_isomorphic(d0, RootedGraph(E_DIA, 3))
    assert rooted_isomorphic(neighbourhood(E_PEAK, 0, 1), neighbourhood(E_DIA, 0, 1))


@settings(max_examples=300)
@given(rooted(), rooted())
def test_rooted_isomorphic_matches_permutation_oracle(g1, g2):
    n = g1.ars.n_nodes
    expected = n == g2.ars.n_nodes and brute_rooted_iso(g1.ars.edges, g1.root, g2.ars.edges, g2.root, n)
    assert rooted_isomorphic(g1, g2) == expected
    assert (canonical_encoding(g1) == canonical_encoding(g2)) == expected


@settings(max_examples=300)
@given(rooted(max_nodes=6), st.randoms(use_true_random=False))
def test_canonical_encoding_is_invariant_under_relabelling(g, rnd):
    perm = list(range(g.ars.n_nodes))
    rnd.shuffle(perm)
    h = relabel(g, perm)
    assert canonical_encoding(g) == canonical_encoding(h)
    assert rooted_isomorphic(g, h)


def test_canonical_encoding_separates_regular_graphs():
    # a directed 6-cycle and two directed 3-cycles look alike to colour refinement
    six = Ars(6, [(i, (i + 1) % 6) for i in range(6)])
    two_threes = Ars(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    assert canonical_encoding(RootedGraph(six, 0)) != canonical_encoding(RootedGraph(two_threes, 0))


# -- local isomorphism ---------------------------------------------------

def test_locally_isomorphic_examples():
    assert locally_isomorphic(E_DIA, E_DIA, 2)
    res = locally_isomorphic(E_DIA, disjoint_union(E_DIA, E_DIA), 1)
    assert not res
    assert all(res.table_b[k] == 2 * res.table_a[k] for k in res.table_a)
    ab = disjoint_union(E_AB, E_AB)
    swapped = Ars(4, [(2, 3), (0, 1)])
    assert locally_isomorphic(ab, swapped, 3)


@settings(max_examples=150, deadline=None)
@given(small_ars(max_nodes=4), small_ars(max_nodes=4), st.integers(0, 2))
def test_locally_isomorphic_matches_bijection_search(a, b, r):
    assert locally_isomorphic(a, b, r).holds == brute_local_iso(a, b, r)


@settings(max_examples=100, deadline=None)
@given(small_ars(max_nodes=5), st.integers(0, 2), st.randoms(use_true_random=False))
def test_locally_isomorphic_under_relabelling(a, r, rnd):
    perm = list(range(a.n_nodes))
    rnd.shuffle(perm)
    b = Ars(a.n_nodes, {(perm[s], perm[d]) for s, d in a.edges})
    assert locally_isomorphic(a, b, r)


def test_iso_class_table_counts_are_positive():
    table = iso_class_table(gen_family("cr", 3), 1)
    assert all(v > 0 for v in table.values())
    assert sum(table.values()) == gen_family("cr", 3).n_nodes


# -- families ------------------------------------------------------------

def test_cr_family_first_component():
    a, names = gen_family_named("cr", 1)
    assert names == ("cr1.a", "cr1.b0", "cr1.c0", "cr1.d")
    assert a == Ars(4, [(0, 1), (0, 2), (3, 1), (2, 3)])
    assert check(a, "CR").holds


def test_sn_family_sizes():
    a = gen_family("sn", 3)
    assert a.n_nodes == 9 and check(a, "SN").holds
    assert len(a.edges) == 6


def test_sc_family_first_component_is_strongly_confluent():
    a, names = gen_family_named("sc", 1)
    idx = {x.split(".")[1]: i for i, x in enumerate(names)}
    assert (idx["b0"], idx["x"]) in a.edges and (idx["x"], idx["c1"]) in a.edges
    assert check(a, "SC").holds


def test_family_errors():
    with pytest.raises(ArsError):
        gen_family("cp", 2)
    with pytest.raises(ArsError):
        gen_family("cr", 0)


@pytest.mark.parametrize("kind, props", [
    ("cr", ["CR", "WCR", "NFP", "CP"]),
    ("sn", ["SN", "WN", "IND"]),
    ("inc", ["INC"]),
    ("sc", ["SC"]),
])
@pytest.mark.parametrize("p", [1, 2, 4])
def test_family_properties(kind, props, p):
    a = gen_family(kind, p)
    for prop in props:
        assert check(a, prop).holds, prop
    assert max(degree(a, v) for v in range(a.n_nodes)) <= 3


def _classes_by_rooted_iso(graphs):
    reps: list = []
    counts: list[int] = []
    for g in graphs:
        for i, rep in enumerate(reps):
            if rooted_isomorphic(rep, g):
                counts[i] += 1
                break
        else:
            reps.append(g)
            counts.append(1)
    return sorted(counts)


@pytest.mark.parametrize("p", [3, 4, 5])
def test_cr_component_neighbourhood_classes(p):
    a = gen_family("cr", p)
    last = range(a.n_nodes - (2 * p + 2), a.n_nodes)
    table = iso_class_table(a, 2, last)
    assert sorted(table.values()) == [1, 1, 1, 1, 2 * p - 2]
    assert _classes_by_rooted_iso([neighbourhood(a, v, 2) for v in last]) == sorted(table.values())


def test_counter_type():
    assert isinstance(iso_class_table(E_DIA, 1), Counter)
