"""Finite abstract rewrite systems: data model, closures and property checks.

Nodes are dense indices ``0 .. n_nodes - 1``. Reachability is held as one
Python ``int`` bitmask per node, which keeps every decision procedure here a
handful of bit operations per node pair.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Optional

from .errors import ArsError, NotConfluentError

__all__ = [
    "Ars",
    "CommArs",
    "MainRoad",
    "PropertyName",
    "PropertyReport",
    "all_ars",
    "bits",
    "check",
    "check_commutation",
    "convertible_components",
    "disjoint_union",
    "find_cofinal_sequence",
    "normal_forms",
    "reachable",
]


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _closure(n: int, step_masks: list[int]) -> tuple[int, ...]:
    # reflexive-transitive closure by repeated relaxation
    reach = [(1 << i) | step_masks[i] for i in range(n)]
    changed = True
    while changed:
        changed = False
        for i in range(n):
            r = reach[i]
            new = r
            for j in bits(r & ~(1 << i)):
                new |= reach[j]
            if new != r:
                reach[i] = new
                changed = True
    return tuple(reach)


def _check_edges(n_nodes: int, edges, arity: int = 2) -> frozenset:
    if not isinstance(n_nodes, int) or n_nodes < 1:
        raise ArsError(f"n_nodes must be a positive integer, got {n_nodes!r}")
    out = set()
    for e in edges:
        e = tuple(int(x) for x in e)
        if len(e) != arity:
            raise ArsError(f"edge {e!r} must have {arity} components")
        src, dst = e[0], e[1]
        if not (0 <= src < n_nodes and 0 <= dst < n_nodes):
            raise ArsError(f"edge {src}->{dst} out of range for {n_nodes} nodes")
        out.add(e)
    return frozenset(out)


class _Relation:
    """Cached adjacency and closure data for one relation over ``n`` nodes."""

    n_nodes: int
    edges: frozenset

    @cached_property
    def succ(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n_nodes)]
        for s, d in self.edges:
            out[s].append(d)
        return tuple(tuple(sorted(x)) for x in out)

    @cached_property
    def pred(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n_nodes)]
        for s, d in self.edges:
            out[d].append(s)
        return tuple(tuple(sorted(x)) for x in out)

    @cached_property
    def succ_masks(self) -> tuple[int, ...]:
        masks = [0] * self.n_nodes
        for s, d in self.edges:
            masks[s] |= 1 << d
        return tuple(masks)

    @cached_property
    def reach_masks(self) -> tuple[int, ...]:
        """``reach_masks[a]`` has bit ``b`` set iff ``a ->* b``."""
        return _closure(self.n_nodes, list(self.succ_masks))

    @cached_property
    def anc_masks(self) -> tuple[int, ...]:
        """``anc_masks[b]`` has bit ``a`` set iff ``a ->* b``."""
        anc = [0] * self.n_nodes
        for a, r in enumerate(self.reach_masks):
            for b in bits(r):
                anc[b] |= 1 << a
        return tuple(anc)

    @cached_property
    def conv_masks(self) -> tuple[int, ...]:
        """Convertibility classes (undirected connectivity) as masks."""
        und = [0] * self.n_nodes
        for s, d in self.edges:
            und[s] |= 1 << d
            und[d] |= 1 << s
        return _closure(self.n_nodes, und)

    def _node(self, a) -> int:
        if not isinstance(a, int) or not 0 <= a < self.n_nodes:
            raise ArsError(f"node {a!r} out of range for {self.n_nodes} nodes")
        return a


@dataclass(frozen=True, eq=True)
class Ars(_Relation):
    """A finite ARS ``(A, ->)`` with ``A = {0, ..., n_nodes - 1}``."""

    n_nodes: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "edges", _check_edges(self.n_nodes, self.edges))

    def __repr__(self):
        return f"Ars({self.n_nodes}, {sorted(self.edges)})"

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def restrict(self, nodes: Iterable[int]) -> tuple["Ars", list[int]]:
        """Induced subsystem on ``nodes``, re-indexed in the given order.

        Returns the new system and the list mapping new index -> old node.
        """
        order = list(dict.fromkeys(nodes))
        index = {v: i for i, v in enumerate(order)}
        sub = {(index[s], index[d]) for s, d in self.edges if s in index and d in index}
        return Ars(len(order), sub), order


@dataclass(frozen=True, eq=True)
class CommArs:
    """Two relations ``->`` (fwd) and ``~>`` (snd) over one node set."""

    n_nodes: int
    fwd_edges: frozenset = field(default_factory=frozenset)
    snd_edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "fwd_edges", _check_edges(self.n_nodes, self.fwd_edges))
        object.__setattr__(self, "snd_edges", _check_edges(self.n_nodes, self.snd_edges))

    def __repr__(self):
        return f"CommArs({self.n_nodes}, fwd={sorted(self.fwd_edges)}, snd={sorted(self.snd_edges)})"

    @cached_property
    def fwd(self) -> Ars:
        return Ars(self.n_nodes, self.fwd_edges)

    @cached_property
    def snd(self) -> Ars:
        return Ars(self.n_nodes, self.snd_edges)


class PropertyName(enum.Enum):
    CR = "CR"
    WCR = "WCR"
    SC = "SC"
    DIAMOND = "DIAMOND"
    UN = "UN"
    UNR = "UNR"
    NFP = "NFP"
    WN = "WN"
    SN = "SN"
    AC = "AC"
    IND = "IND"
    INC = "INC"
    CP = "CP"
    COMMUTE = "COMMUTE"

    @classmethod
    def parse(cls, value) -> "PropertyName":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ArsError(f"unknown property {value!r}") from None


@dataclass(frozen=True)
class PropertyReport:
    """Outcome of a property check.

    A failing report always carries a witness; its shape depends on the
    property (see :func:`check`).
    """

    holds: bool
    witness: Optional[tuple] = None
    prop: Optional[PropertyName] = None

    def __bool__(self):
        return self.holds


@dataclass(frozen=True)
class MainRoad:
    """An acyclic reduction ``m0 -> m1 -> ... -> mt``."""

    nodes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if not self.nodes:
            raise ArsError("a main road needs at least one node")
        if len(set(self.nodes)) != len(self.nodes):
            raise ArsError(f"main road {self.nodes} repeats a node")

    def __contains__(self, node) -> bool:
        return node in self.node_set

    def __iter__(self):
        return iter(self.nodes)

    def __len__(self):
        return len(self.nodes)

    @cached_property
    def node_set(self) -> frozenset[int]:
        return frozenset(self.nodes)

    @cached_property
    def steps(self) -> frozenset[tuple[int, int]]:
        return frozenset(zip(self.nodes, self.nodes[1:]))

    def successor(self, node: int) -> Optional[int]:
        i = self.nodes.index(node)
        return self.nodes[i + 1] if i + 1 < len(self.nodes) else None

    def is_valid_in(self, ars: Ars) -> bool:
        return self.steps <= ars.edges


def all_ars(n: int) -> Iterator[Ars]:
    """Every ARS on ``n`` nodes; edge ``(i, j)`` is bit ``i * n + j`` of a counter."""
    pairs = [(i, j) for i in range(n) for j in range(n)]
    for code in range(1 << (n * n)):
        yield Ars(n, [pairs[k] for k in bits(code)])


def disjoint_union(*systems: Ars) -> Ars:
    """Place systems side by side, shifting node indices in argument order."""
    edges = []
    offset = 0
    for s in systems:
        edges.extend((a + offset, b + offset) for a, b in s.edges)
        offset += s.n_nodes
    return Ars(offset, edges)


def reachable(ars: Ars, start: int) -> frozenset[int]:
    """``{b | start ->* b}``."""
    start = ars._node(start)
    return frozenset(bits(ars.reach_masks[start]))


def convertible_components(ars: Ars) -> list[frozenset[int]]:
    """The ``<->*`` classes, ordered by their least node."""
    seen = 0
    out = []
    for a in range(ars.n_nodes):
        if seen >> a & 1:
            continue
        mask = ars.conv_masks[a]
        seen |= mask
        out.append(frozenset(bits(mask)))
    return out


def normal_forms(ars: Ars) -> frozenset[int]:
    return frozenset(a for a in range(ars.n_nodes) if not ars.succ[a])


def _bfs_path(succ, start: int, goal: int) -> list[int]:
    if start == goal:
        return [start]
    parent = {start: None}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in succ[u]:
            if v not in parent:
                parent[v] = u
                if v == goal:
                    path = [v]
                    while parent[path[-1]] is not None:
                        path.append(parent[path[-1]])
                    return path[::-1]
                queue.append(v)
    raise ArsError(f"no path {start} -> {goal}")


def _find_cycle(ars: Ars) -> Optional[tuple[int, ...]]:
    # least node lying on a cycle, with a shortest cycle through it
    for a in range(ars.n_nodes):
        if a in ars.succ[a]:
            return (a,)
        back = [s for s in ars.succ[a] if ars.reach_masks[s] >> a & 1]
        if back:
            paths = [_bfs_path(ars.succ, s, a) for s in back]
            best = min(paths, key=len)
            return (a,) + tuple(best[:-1])
    return None


def _joinable(ars: Ars, b: int, c: int) -> bool:
    return bool(ars.reach_masks[b] & ars.reach_masks[c])


def _check_cr(ars: Ars):
    reach, anc = ars.reach_masks, ars.anc_masks
    n = ars.n_nodes
    for b in range(n):
        for c in range(b + 1, n):
            common = anc[b] & anc[c]
            if common and not reach[b] & reach[c]:
                return (next(bits(common)), b, c)
    return None


def _check_local(ars: Ars, joins) -> Optional[tuple]:
    for a in range(ars.n_nodes):
        succ = ars.succ[a]
        for b in succ:
            for c in succ:
                if not joins(b, c):
                    return (a, b, c)
    return None


def _check_un(ars: Ars, related) -> Optional[tuple]:
    nfs = sorted(normal_forms(ars))
    for i, a in enumerate(nfs):
        for b in nfs[i + 1:]:
            if related(a, b):
                return (a, b)
    return None


def _check_nfp(ars: Ars):
    nfs = sorted(normal_forms(ars))
    for a in range(ars.n_nodes):
        conv, reach = ars.conv_masks[a], ars.reach_masks[a]
        for b in nfs:
            if conv >> b & 1 and not reach >> b & 1:
                return (a, b)
    return None


def _check_wn(ars: Ars):
    nf_mask = sum(1 << a for a in normal_forms(ars))
    for a in range(ars.n_nodes):
        if not ars.reach_masks[a] & nf_mask:
            return (a,)
    return None


def _check_ind(ars: Ars):
    # On a finite system every infinite reduction visits some node x
    # infinitely often, and every element of the sequence reduces to x.
    # So IND holds for every finite ARS; the lasso oracle in the test suite
    # confirms this on all systems with at most four nodes.
    return None


def _check_cp(ars: Ars):
    for a in range(ars.n_nodes):
        try:
            find_cofinal_sequence(ars, bits(ars.reach_masks[a]), start=a)
        except NotConfluentError as exc:
            return (a,) + exc.pair
    return None


def check(ars: Ars, prop) -> PropertyReport:
    """Decide ``prop`` on a finite ARS.

    Witness shapes for failing reports:

    * CR: ``(a, b, c)`` with ``b <<- a ->> c`` and no common reduct; the pair
      ``(b, c)`` is the first failing one in index order and ``a`` is the
      least common ancestor.
    * WCR, SC, DIAMOND: ``(a, b, c)`` with ``a -> b``, ``a -> c``.
    * UN, UNR: two distinct normal forms ``(a, b)``.
    * NFP: ``(a, b)`` with ``b`` a normal form, ``a <->* b``, not ``a ->> b``.
    * WN: ``(a,)``, a node without a reachable normal form.
    * SN, AC, INC: a cycle ``(m0, ..., mk)`` with ``mk -> m0``.
    * CP: ``(a, b, c)``: in the reduct graph of ``a`` the pair ``b, c`` has no
      common reduct, so no reduction from ``a`` is cofinal there.

    On finite systems SN, AC and INC coincide (a level map along a
    topological order realises the increasing map), and IND always holds.
    """
    prop = PropertyName.parse(prop)
    if prop is PropertyName.COMMUTE:
        raise ArsError("COMMUTE needs a CommArs; use check_commutation")
    reach = ars.reach_masks
    succ_masks = ars.succ_masks
    if prop is PropertyName.CR:
        witness = _check_cr(ars)
    elif prop is PropertyName.WCR:
        witness = _check_local(ars, lambda b, c: reach[b] & reach[c])
    elif prop is PropertyName.SC:
        witness = _check_local(ars, lambda b, c: ((1 << b) | succ_masks[b]) & reach[c])
    elif prop is PropertyName.DIAMOND:
        witness = _check_local(
            ars, lambda b, c: ((1 << b) | succ_masks[b]) & ((1 << c) | succ_masks[c])
        )
    elif prop is PropertyName.UN:
        witness = _check_un(ars, lambda a, b: ars.conv_masks[a] >> b & 1)
    elif prop is PropertyName.UNR:
        witness = _check_un(ars, lambda a, b: ars.anc_masks[a] & ars.anc_masks[b])
    elif prop is PropertyName.NFP:
        witness = _check_nfp(ars)
    elif prop is PropertyName.WN:
        witness = _check_wn(ars)
    elif prop in (PropertyName.SN, PropertyName.AC, PropertyName.INC):
        witness = _find_cycle(ars)
    elif prop is PropertyName.IND:
        witness = _check_ind(ars)
    elif prop is PropertyName.CP:
        witness = _check_cp(ars)
    else:  # pragma: no cover
        raise ArsError(f"unhandled property {prop}")
    return PropertyReport(witness is None, witness, prop)


def check_commutation(c: CommArs) -> PropertyReport:
    """Does ``->`` commute with ``~>``?

    Holds iff for all ``b <<- a ~>> c`` (``->*`` on the left, ``~>*`` on the
    right) some ``d`` has ``b ~>* d`` and ``c ->* d``. The witness is the
    first failing ``(a, b, c)``.
    """
    f_reach, s_reach = c.fwd.reach_masks, c.snd.reach_masks
    for a in range(c.n_nodes):
        for b in bits(f_reach[a]):
            for d in bits(s_reach[a]):
                if not s_reach[b] & f_reach[d]:
                    return PropertyReport(False, (a, b, d), PropertyName.COMMUTE)
    return PropertyReport(True, None, PropertyName.COMMUTE)


def find_cofinal_sequence(ars: Ars, component: Iterable[int], start: Optional[int] = None) -> MainRoad:
    """Build an acyclic reduction whose nodes are cofinal in ``component``.

    ``component`` must be closed under ``->`` (a ``<->*`` class or a reduct
    graph). Nodes are taken in index order (``start`` first when given); the
    current endpoint is extended along a shortest path to the first common
    reduct met in breadth-first order. Repeated nodes are contracted keeping
    their first occurrence.

    Raises :class:`NotConfluentError` with the offending pair when some
    endpoint and node have no common reduct.
    """
    comp = sorted(set(component))
    if not comp:
        raise ArsError("empty component")
    for v in comp:
        ars._node(v)
    comp_mask = sum(1 << v for v in comp)
    for v in comp:
        if ars.succ_masks[v] & ~comp_mask:
            raise ArsError(f"component is not closed under ->: {v} leaves it")
    if start is None:
        start = comp[0]
    elif not comp_mask >> start & 1:
        raise ArsError(f"start {start} not in component")
    order = [start] + [v for v in comp if v != start]

    reach = ars.reach_masks
    path = [start]
    end = start
    for a in order[1:]:
        target = reach[a]
        if target >> end & 1:
            continue
        # breadth-first from the endpoint, stop at the first node a reaches
        parent = {end: None}
        queue = deque([end])
        meet = None
        while queue and meet is None:
            u = queue.popleft()
            for v in ars.succ[u]:
                if v not in parent:
                    parent[v] = u
                    if target >> v & 1:
                        meet = v
                        break
                    queue.append(v)
        if meet is None:
            raise NotConfluentError((end, a), component=comp[0])
        ext = [meet]
        while parent[ext[-1]] is not None:
            ext.append(parent[ext[-1]])
        path.extend(reversed(ext[:-1]))
        end = meet

    road: list[int] = []
    pos: dict[int, int] = {}
    for v in path:
        if v in pos:
            cut = pos[v] + 1
            for u in road[cut:]:
                del pos[u]
            del road[cut:]
        else:
            pos[v] = len(road)
            road.append(v)
    return MainRoad(tuple(road))
