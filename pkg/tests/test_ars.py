import pytest
from hypothesis import given, settings, strategies as st

import oracles
from decdiag.ars import (
    Ars,
    CommArs,
    MainRoad,
    PropertyName,
    all_ars,
    check,
    check_commutation,
    convertible_components,
    disjoint_union,
    find_cofinal_sequence,
    normal_forms,
    reachable,
)
from decdiag.errors import ArsError, NotConfluentError
from fixtures import E_AB, E_CYC2, E_DIA, E_ID, E_PEAK, SPLIT


@st.composite
def small_ars(draw, max_nodes=5):
    n = draw(st.integers(1, max_nodes))
    pairs = [(i, j) for i in range(n) for j in range(n)]
    edges = draw(st.sets(st.sampled_from(pairs)))
    return Ars(n, edges)


# -- data model ----------------------------------------------------------

def test_ars_rejects_empty_and_out_of_range():
    with pytest.raises(ArsError):
        Ars(0, [])
    with pytest.raises(ArsError):
        Ars(2, [(0, 2)])
    with pytest.raises(ArsError):
        CommArs(2, [(0, 1)], [(3, 0)])


def test_comm_ars_allows_same_pair_in_both_relations():
    c = CommArs(2, [(0, 1)], [(0, 1)])
    assert c.fwd.edges == c.snd.edges == frozenset({(0, 1)})


def test_property_name_parses_lowercase_tags():
    assert PropertyName.parse("cr") is PropertyName.CR
    assert PropertyName.parse("Diamond") is PropertyName.DIAMOND
    with pytest.raises(ArsError):
        PropertyName.parse("confluent")


def test_all_ars_counts():
    assert sum(1 for _ in all_ars(2)) == 16
    assert len({a.edges for a in all_ars(3)}) == 512


# -- reachable / components / normal forms -------------------------------

def test_reachable_examples():
    assert reachable(E_AB, 0) == {0, 1}
    assert reachable(E_ID, 0) == {0}
    assert reachable(E_DIA, 2) == {2, 3}
    with pytest.raises(ArsError):
        reachable(E_AB, 2)


@given(small_ars())
def test_reachable_matches_warshall(a):
    r = oracles.star(a.n_nodes, a.edges)
    for v in range(a.n_nodes):
        assert reachable(a, v) == {w for w in range(a.n_nodes) if r[v][w]}


def test_components_examples():
    assert convertible_components(E_PEAK) == [frozenset({0, 1, 2})]
    assert convertible_components(E_ID) == [frozenset({0})]
    assert convertible_components(disjoint_union(E_AB, E_AB)) == [frozenset({0, 1}), frozenset({2, 3})]


@given(small_ars())
def test_components_match_union_find(a):
    assert convertible_components(a) == oracles.components(a.n_nodes, a.edges)


def test_normal_forms_examples():
    assert normal_forms(E_PEAK) == {1, 2}
    assert normal_forms(E_CYC2) == set()
    assert normal_forms(E_DIA) == {3}


# -- check ---------------------------------------------------------------

def test_check_examples():
    assert check(E_DIA, "CR").holds
    un = check(E_PEAK, PropertyName.UN)
    assert not un.holds and un.witness == (1, 2)
    ac = check(E_CYC2, "AC")
    assert not ac.holds and ac.witness == (0, 1)
    assert not check(E_CYC2, "SN").holds
    assert not check(E_PEAK, "CP").holds


def test_check_rejects_commute_tag():
    with pytest.raises(ArsError):
        check(E_DIA, "COMMUTE")


def test_report_is_truthy_when_property_holds():
    assert check(E_DIA, "CR")
    assert not check(E_PEAK, "CR")


_ORACLES = {
    "CR": oracles.is_cr,
    "WCR": oracles.is_wcr,
    "SC": oracles.is_sc,
    "DIAMOND": oracles.is_diamond,
    "UN": oracles.is_un,
    "UNR": oracles.is_unr,
    "NFP": oracles.is_nfp,
    "WN": oracles.is_wn,
    "SN": lambda n, e: not oracles.has_infinite_trace(n, e),
    "AC": lambda n, e: not oracles.has_infinite_trace(n, e),
    "INC": oracles.has_increasing_map,
    "IND": oracles.is_ind_lasso,
    "CP": oracles.has_cp,
}


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_every_property_matches_brute_force_oracle_exhaustively(n):
    mismatches = []
    for a in all_ars(n):
        edges = sorted(a.edges)
        for prop, oracle in _ORACLES.items():
            if check(a, prop).holds != oracle(n, edges):
                mismatches.append((prop, edges))
    assert mismatches == []


_CHAIN = ["DIAMOND", "SC", "CR", "NFP", "UN", "UNR"]


@given(small_ars(6))
def test_implication_chain(a):
    values = [check(a, p).holds for p in _CHAIN]
    for stronger, weaker in zip(values, values[1:]):
        assert not stronger or weaker


@given(small_ars(6))
def test_cp_equals_cr_on_finite_systems(a):
    assert check(a, "CP").holds == check(a, "CR").holds


@given(small_ars(6))
def test_sn_ac_inc_coincide_and_ind_always_holds(a):
    assert check(a, "SN").holds == check(a, "AC").holds == check(a, "INC").holds
    assert check(a, "IND").holds


@given(small_ars(6))
def test_witnesses_are_genuine(a):
    n = a.n_nodes
    r = oracles.star(n, a.edges)
    rep = check(a, "CR")
    if not rep.holds:
        x, b, c = rep.witness
        assert r[x][b] and r[x][c] and not oracles.joinable(r, n, b, c)
    for prop in ("WCR", "SC", "DIAMOND"):
        rep = check(a, prop)
        if not rep.holds:
            x, b, c = rep.witness
            assert (x, b) in a.edges and (x, c) in a.edges
    rep = check(a, "UN")
    if not rep.holds:
        x, y = rep.witness
        assert x != y and {x, y} <= normal_forms(a)
        assert any({x, y} <= comp for comp in convertible_components(a))
    rep = check(a, "NFP")
    if not rep.holds:
        x, y = rep.witness
        assert y in normal_forms(a) and not r[x][y]
    rep = check(a, "WN")
    if not rep.holds:
        (x,) = rep.witness
        assert not any(r[x][y] for y in normal_forms(a))
    rep = check(a, "AC")
    if not rep.holds:
        cyc = rep.witness
        assert len(set(cyc)) == len(cyc)
        assert all((cyc[i], cyc[(i + 1) % len(cyc)]) in a.edges for i in range(len(cyc)))
    rep = check(a, "CP")
    if not rep.holds:
        x, b, c = rep.witness
        assert r[x][b] and r[x][c] and not oracles.joinable(r, n, b, c)


# -- commutation ---------------------------------------------------------

def test_check_commutation_examples():
    assert check_commutation(CommArs(4, E_DIA.edges, E_DIA.edges)).holds
    rep = check_commutation(SPLIT)
    assert not rep.holds and rep.witness == (0, 1, 2)


@given(small_ars(5))
def test_commutation_of_a_relation_with_itself_is_confluence(a):
    assert check_commutation(CommArs(a.n_nodes, a.edges, a.edges)).holds == check(a, "CR").holds


@given(small_ars(4), small_ars(4))
def test_commutation_matches_definition(x, y):
    n = min(x.n_nodes, y.n_nodes)
    fwd = [(s, d) for s, d in x.edges if s < n and d < n]
    snd = [(s, d) for s, d in y.edges if s < n and d < n]
    rf, rs = oracles.star(n, fwd), oracles.star(n, snd)
    expected = all(
        any(rs[b][d] and rf[c][d] for d in range(n))
        for a in range(n) for b in range(n) for c in range(n) if rf[a][b] and rs[a][c]
    )
    assert check_commutation(CommArs(n, fwd, snd)).holds == expected


# -- cofinal sequences ---------------------------------------------------

def test_find_cofinal_sequence_examples():
    road = find_cofinal_sequence(E_DIA, {0, 1, 2, 3})
    assert road.nodes == (0, 1, 3)
    assert find_cofinal_sequence(E_ID, {0}).nodes == (0,)
    with pytest.raises(NotConfluentError) as info:
        find_cofinal_sequence(E_PEAK, {0, 1, 2})
    assert info.value.pair == (1, 2)


def test_find_cofinal_sequence_contracts_loops():
    # 0 -> 1 -> 0 and 1 -> 2: joining 2 after 0,1 must not repeat nodes
    a = Ars(3, [(0, 1), (1, 0), (1, 2), (2, 1)])
    road = find_cofinal_sequence(a, {0, 1, 2})
    assert len(set(road.nodes)) == len(road.nodes)


def test_main_road_rejects_repeats():
    with pytest.raises(ArsError):
        MainRoad((0, 1, 0))


@settings(max_examples=300)
@given(small_ars(6))
def test_cofinal_sequence_is_valid_repetition_free_and_cofinal(a):
    r = oracles.star(a.n_nodes, a.edges)
    for comp in convertible_components(a):
        try:
            road = find_cofinal_sequence(a, comp)
        except NotConfluentError as exc:
            b, c = exc.pair
            assert not oracles.joinable(r, a.n_nodes, b, c)
            assert not check(a, "CR").holds
            continue
        assert road.is_valid_in(a)
        assert len(set(road.nodes)) == len(road.nodes)
        assert all(any(r[v][m] for m in road) for v in comp)
