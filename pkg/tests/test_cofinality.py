import pytest
from hypothesis import given, settings, strategies as st

import oracles
from decdiag.ars import Ars, MainRoad, all_ars, check, convertible_components, disjoint_union
from decdiag.cofinality import (
    WellOrder,
    compute_distances,
    dcr2_construct,
    dcr2_construct_with_roads,
    label_two,
    verify_labelars,
)
from decdiag.decreasing import LabelledArs, is_locally_decreasing, verify_simple_01
from decdiag.errors import ArsError, NotConfluentError
from fixtures import E_AB, E_CYC2, E_DIA, E_ID, E_PEAK, EXAMPLE, EXAMPLE_LABELLED, EXAMPLE_ROAD, N, NAMES

ROAD = MainRoad(EXAMPLE_ROAD)
ALL = range(EXAMPLE.n_nodes)


@st.composite
def confluent_ars(draw, max_nodes=6):
    n = draw(st.integers(1, max_nodes))
    pairs = [(i, j) for i in range(n) for j in range(n)]
    edges = draw(st.sets(st.sampled_from(pairs)))
    a = Ars(n, edges)
    if not check(a, "CR").holds:
        # adding a sink reachable from everything makes any system confluent
        a = Ars(n + 1, set(edges) | {(v, n) for v in range(n)})
    return a


# -- distances -----------------------------------------------------------

def test_distances_on_example():
    dist = compute_distances(EXAMPLE, ALL, ROAD)
    assert all(dist[m] == 0 for m in EXAMPLE_ROAD)
    assert dist[N["n3"]] == 1
    assert dist[N["n1"]] == 2
    assert dist[N["n0"]] == 3
    assert len(dist) == 14


def test_distances_require_cofinal_road():
    with pytest.raises(ArsError):
        compute_distances(E_PEAK, {0, 1, 2}, MainRoad((0, 1)))
    with pytest.raises(ArsError):
        compute_distances(disjoint_union(E_AB, E_AB), {0, 1}, MainRoad((2, 3)))


@settings(max_examples=200)
@given(confluent_ars())
def test_distances_match_layered_oracle(a):
    comps = convertible_components(a)
    roads = dcr2_construct_with_roads(a)[1]
    for comp, road in zip(comps, roads):
        dist = compute_distances(a, comp, road)
        # layer d holds the nodes with a d-step reduction into the road
        layer = set(road)
        seen = dict.fromkeys(road, 0)
        d = 0
        while layer:
            d += 1
            layer = {s for s, t in a.edges if t in layer and s not in seen}
            seen.update(dict.fromkeys(layer, d))
        assert dist.as_dict() == dict(sorted(seen.items()))


# -- label_two -----------------------------------------------------------

def test_label_two_reproduces_example_labelling():
    assert label_two(EXAMPLE, ALL, ROAD) == EXAMPLE_LABELLED


def test_example_labelling_properties_hold():
    rep = verify_labelars(EXAMPLE_LABELLED, ROAD, EXAMPLE)
    assert rep.as_tuple() == (True,) * 6
    assert is_locally_decreasing(EXAMPLE_LABELLED).holds


def test_label_two_only_labels_the_component():
    a = disjoint_union(E_DIA, E_AB)
    lab = label_two(a, {0, 1, 2, 3}, MainRoad((0, 1, 3)))
    assert {(s, d) for s, d, _ in lab.edges} == set(E_DIA.edges)


def test_label_two_rejects_invalid_road():
    with pytest.raises(ArsError):
        label_two(E_DIA, range(4), MainRoad((0, 3)))


def test_reversed_order_changes_the_minimising_choice():
    # 0 -> 1, 0 -> 2, both at distance 1 from the road {3}
    a = Ars(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
    road = MainRoad((3,))
    default = label_two(a, range(4), road)
    rev = label_two(a, range(4), road, WellOrder.reversed_index(4))
    assert default.label_of(0, 1) == 0 and default.label_of(0, 2) == 1
    assert rev.label_of(0, 1) == 1 and rev.label_of(0, 2) == 0
    for lab in (default, rev):
        assert verify_labelars(lab, road, a)


def test_well_order_from_sequence():
    order = WellOrder.from_sequence([2, 0, 1])
    assert order.least([0, 1, 2]) == 2
    assert order.least([0, 1]) == 0
    with pytest.raises(ArsError):
        WellOrder.from_sequence([0, 0, 1])


# -- verify_labelars -----------------------------------------------------

def test_verify_labelars_flags_two_zero_steps():
    bad = LabelledArs(4, 2, [(0, 1, 0), (0, 2, 0), (1, 3, 0), (2, 3, 0)])
    rep = verify_labelars(bad, MainRoad((0, 1, 3)), E_DIA)
    assert not rep.at_most_one_zero
    assert not rep


def test_verify_labelars_flags_node_without_zero_step():
    # node 2 is off the road and its only step carries label 1
    a = Ars(4, [(0, 1), (1, 2), (2, 3), (1, 3)])
    road = MainRoad((0, 1, 3))
    lab = LabelledArs(4, 2, [(0, 1, 0), (1, 3, 0), (1, 2, 1), (2, 3, 1)])
    rep = verify_labelars(lab, road, a)
    assert not rep.zero_decreases and not rep.zero_reaches_road


def test_verify_labelars_flags_missing_step():
    lab = LabelledArs(4, 2, [(0, 1, 0), (1, 3, 0), (2, 3, 0)])
    assert not verify_labelars(lab, MainRoad((0, 1, 3)), E_DIA).union


def test_verify_labelars_flags_peak_without_zero_join():
    a = Ars(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
    lab = LabelledArs(4, 2, [(0, 1, 0), (0, 2, 1), (1, 3, 0), (2, 3, 1)])
    rep = verify_labelars(lab, MainRoad((0, 1, 3)), a)
    assert not rep.zero_reaches_road and not rep.peaks_join


# -- dcr2 ----------------------------------------------------------------

def test_dcr2_diamond_labelling():
    lab = dcr2_construct(E_DIA)
    assert lab == LabelledArs(4, 2, [(0, 1, 0), (0, 2, 1), (1, 3, 0), (2, 3, 0)])


def test_dcr2_small_examples():
    assert dcr2_construct(E_ID) == LabelledArs(1, 2, [])
    assert dcr2_construct(E_AB) == LabelledArs(2, 2, [(0, 1, 0)])
    lab = dcr2_construct(E_CYC2)
    assert is_locally_decreasing(lab).holds


def test_dcr2_reports_nonconfluent_component():
    a = disjoint_union(E_AB, E_PEAK)
    with pytest.raises(NotConfluentError) as info:
        dcr2_construct(a)
    assert info.value.component == 2
    assert set(info.value.pair) == {3, 4}


@pytest.mark.parametrize("n", [1, 2, 3])
def test_dcr2_exhaustive_small(n):
    for a in all_ars(n):
        if not oracles.is_cr(n, sorted(a.edges)):
            with pytest.raises(NotConfluentError):
                dcr2_construct(a)
            continue
        lab, roads = dcr2_construct_with_roads(a)
        assert lab.projects_to(a)
        assert is_locally_decreasing(lab).holds
        assert verify_simple_01(lab)
        for road in roads:
            assert verify_labelars(lab, road, a)


@settings(max_examples=300, deadline=None)
@given(confluent_ars(7))
def test_dcr2_properties_sampled(a):
    lab, roads = dcr2_construct_with_roads(a)
    assert lab.projects_to(a)
    assert verify_simple_01(lab)
    for road in roads:
        assert verify_labelars(lab, road, a)


@settings(max_examples=100, deadline=None)
@given(confluent_ars(6), st.randoms(use_true_random=False))
def test_dcr2_any_well_order_works(a, rnd):
    nodes = list(range(a.n_nodes))
    rnd.shuffle(nodes)
    lab = dcr2_construct(a, WellOrder.from_sequence(nodes))
    assert verify_simple_01(lab)


def test_names_fixture_is_consistent():
    assert len(NAMES) == EXAMPLE.n_nodes
