"""Two-label decreasing labellings built from a cofinal main road.

Per convertibility component: build an acyclic cofinal reduction (the main
road), measure each node's rewrite distance to it, and label a step 0 when it
lies on the road or is the minimising step of its source, 1 otherwise.
Every peak of the result joins with 0-steps only.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .ars import Ars, MainRoad, bits, convertible_components, find_cofinal_sequence
from .decreasing import LabelledArs, decreasing_join_exists, iter_peaks
from .errors import ArsError, NotConfluentError

__all__ = [
    "DistanceMap",
    "LabelarsReport",
    "WellOrder",
    "compute_distances",
    "dcr2_construct",
    "dcr2_construct_with_roads",
    "label_two",
    "verify_labelars",
]


@dataclass(frozen=True)
class DistanceMap:
    """Rewrite distance of each component node to the main road."""

    distances: Mapping[int, int]

    def __getitem__(self, node: int) -> int:
        return self.distances[node]

    def __contains__(self, node) -> bool:
        return node in self.distances

    def __len__(self):
        return len(self.distances)

    def as_dict(self) -> dict[int, int]:
        return dict(sorted(self.distances.items()))


@dataclass(frozen=True)
class WellOrder:
    """A total order on nodes given by ranks; ``None`` means index order."""

    ranks: Optional[tuple[int, ...]] = None

    @classmethod
    def index(cls) -> "WellOrder":
        return cls(None)

    @classmethod
    def from_sequence(cls, nodes: Sequence[int]) -> "WellOrder":
        """Order in which ``nodes`` are listed, least first."""
        nodes = list(nodes)
        if sorted(nodes) != list(range(len(nodes))):
            raise ArsError("a well-order must list every node exactly once")
        ranks = [0] * len(nodes)
        for r, v in enumerate(nodes):
            ranks[v] = r
        return cls(tuple(ranks))

    @classmethod
    def reversed_index(cls, n_nodes: int) -> "WellOrder":
        return cls.from_sequence(range(n_nodes - 1, -1, -1))

    def key(self, node: int) -> int:
        return node if self.ranks is None else self.ranks[node]

    def least(self, nodes: Iterable[int]) -> int:
        return min(nodes, key=self.key)


def _component_mask(ars: Ars, component) -> tuple[list[int], int]:
    comp = sorted(set(component))
    if not comp:
        raise ArsError("empty component")
    for v in comp:
        ars._node(v)
    return comp, sum(1 << v for v in comp)


def compute_distances(ars: Ars, component: Iterable[int], road: MainRoad) -> DistanceMap:
    """Shortest ``->`` distance from each component node to a road node.

    Breadth-first search over reversed steps from all road nodes at once.
    """
    comp, mask = _component_mask(ars, component)
    for m in road:
        if not mask >> m & 1:
            raise ArsError(f"road node {m} is outside the component")
    dist = {m: 0 for m in road}
    queue = deque(road)
    while queue:
        u = queue.popleft()
        for v in ars.pred[u]:
            if v not in dist and mask >> v & 1:
                dist[v] = dist[u] + 1
                queue.append(v)
    missing = [v for v in comp if v not in dist]
    if missing:
        raise ArsError(f"road is not cofinal: node {missing[0]} cannot reach it")
    return DistanceMap(dist)


def _zero_steps(ars: Ars, comp, road: MainRoad, dist: DistanceMap, order: WellOrder):
    zero = set()
    for a in comp:
        if a in road:
            nxt = road.successor(a)
            if nxt is not None:
                zero.add((a, nxt))
            continue
        closer = [b for b in ars.succ[a] if dist[a] == dist[b] + 1]
        zero.add((a, order.least(closer)))
    return zero


def label_two(ars: Ars, component: Iterable[int], road: MainRoad,
              order: Optional[WellOrder] = None) -> LabelledArs:
    """Label the steps inside ``component`` with 0 or 1.

    A step gets 0 when it is on the main road or minimising: it lowers the
    distance by one and its target is least in ``order`` among such targets.
    Road nodes have distance 0, so only their road successor gets 0. The
    result contains only the component's steps.
    """
    order = order or WellOrder.index()
    comp, mask = _component_mask(ars, component)
    if not road.is_valid_in(ars):
        raise ArsError(f"road {road.nodes} is not a reduction of the system")
    dist = compute_distances(ars, comp, road)
    zero = _zero_steps(ars, comp, road, dist, order)
    edges = [(s, d, 0 if (s, d) in zero else 1) for s, d in ars.edges if mask >> s & 1]
    return LabelledArs(ars.n_nodes, 2, edges)


@dataclass(frozen=True)
class LabelarsReport:
    """The six properties of a two-label labelling built from a main road.

    * ``union``: every step carries label 0 or 1;
    * ``road_join``: any two road nodes have a common 0-reduct;
    * ``at_most_one_zero``: no node has two 0-steps;
    * ``zero_decreases``: each node off the road has a 0-step that lowers the
      distance;
    * ``zero_reaches_road``: each node reaches the road with 0-steps;
    * ``peaks_join``: every peak joins in decreasing shape, using 0-steps only.
    """

    union: bool
    road_join: bool
    at_most_one_zero: bool
    zero_decreases: bool
    zero_reaches_road: bool
    peaks_join: bool

    def as_tuple(self) -> tuple[bool, ...]:
        return (self.union, self.road_join, self.at_most_one_zero,
                self.zero_decreases, self.zero_reaches_road, self.peaks_join)

    def __bool__(self):
        return all(self.as_tuple())


def verify_labelars(sys: LabelledArs, road: MainRoad,
                    ars: Optional[Ars] = None) -> LabelarsReport:
    """Check the six properties on the component that contains ``road``.

    With ``ars`` given, ``union`` also requires the labelled steps to project
    onto exactly the steps of ``ars`` inside the component.
    """
    plain = sys.unlabelled
    comp = sorted(bits(plain.conv_masks[plain._node(road.nodes[0])]))
    mask = sum(1 << v for v in comp)
    road_mask = sum(1 << m for m in road)
    inside = [e for e in sys.edges if mask >> e[0] & 1]

    union = sys.label_count == 2 and all(lab in (0, 1) for _, _, lab in inside)
    if ars is not None:
        union = union and {(s, d) for s, d, _ in inside} == {e for e in ars.edges if mask >> e[0] & 1}

    zero_succ = {v: [d for d, lab in sys.by_src[v] if lab == 0] for v in comp}
    zero_reach = Ars(sys.n_nodes, [(s, d) for s, d, lab in inside if lab == 0]).reach_masks

    road_join = (road.is_valid_in(plain) and road_mask & ~mask == 0
                 and all(zero_reach[a] & zero_reach[b] for a in road for b in road))
    at_most_one_zero = all(len(zero_succ[v]) <= 1 for v in comp)

    try:
        dist = compute_distances(plain, comp, road)
    except ArsError:
        dist = None
    zero_decreases = dist is not None and all(
        any(dist[b] < dist[a] for b in zero_succ[a]) for a in comp if a not in road
    )
    zero_reaches_road = all(zero_reach[a] & road_mask for a in comp)

    peaks_join = True
    for peak in iter_peaks(sys, ordered=False):
        if not mask >> peak.apex & 1:
            continue
        c, b = peak.left[0], peak.right[0]
        if b == c:
            continue
        if decreasing_join_exists(sys, peak) is None or not zero_reach[b] & zero_reach[c]:
            peaks_join = False
            break
    return LabelarsReport(union, road_join, at_most_one_zero, zero_decreases,
                          zero_reaches_road, peaks_join)


def dcr2_construct(ars: Ars, order: Optional[WellOrder] = None) -> LabelledArs:
    """A two-label decreasing labelling of a confluent ARS.

    Each convertibility component gets its own main road and labelling.
    Raises :class:`NotConfluentError` naming the component (by its least
    node) and a pair without common reduct.
    """
    return dcr2_construct_with_roads(ars, order)[0]


def dcr2_construct_with_roads(ars: Ars, order: Optional[WellOrder] = None):
    """Like :func:`dcr2_construct`, also returning the main road per component."""
    order = order or WellOrder.index()
    edges = []
    roads = []
    for comp in convertible_components(ars):
        try:
            road = find_cofinal_sequence(ars, comp)
        except NotConfluentError as exc:
            raise NotConfluentError(exc.pair, component=min(comp)) from None
        roads.append(road)
        edges.extend(label_two(ars, comp, road, order).edges)
    return LabelledArs(ars.n_nodes, 2, edges), tuple(roads)
