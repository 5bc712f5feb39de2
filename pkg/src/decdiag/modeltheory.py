"""Locality tools: degrees, distances, rooted neighbourhoods and their counts.

Two systems are ``r``-locally isomorphic when every isomorphism class of
rooted ``r``-neighbourhood occurs equally often in both. Neighbourhoods are
compared through a canonical encoding (colour refinement followed by
individualisation); :func:`rooted_isomorphic` is an independent backtracking
check.
"""

from __future__ import annotations

import enum
from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .ars import Ars, disjoint_union
from .errors import ArsError

__all__ = [
    "UNREACHABLE",
    "FAMILY_KINDS",
    "LocalIsoResult",
    "RootedGraph",
    "canonical_encoding",
    "degree",
    "gen_family",
    "gen_family_named",
    "iso_class_table",
    "locally_isomorphic",
    "neighbourhood",
    "rooted_isomorphic",
    "undirected_distance",
]


class Distance(enum.Enum):
    UNREACHABLE = "unreachable"

    def __repr__(self):
        return "UNREACHABLE"


UNREACHABLE = Distance.UNREACHABLE

FAMILY_KINDS = ("cr", "sn", "inc", "sc")


def _neighbours(ars: Ars, a: int) -> set[int]:
    return set(ars.succ[a]) | set(ars.pred[a])


def degree(ars: Ars, a: int) -> int:
    """Size of ``{b | a -> b or b -> a}``; a self-loop counts once."""
    return len(_neighbours(ars, ars._node(a)))


def _undirected_bfs(ars: Ars, a: int, radius: Optional[int] = None) -> dict[int, int]:
    dist = {a: 0}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        if radius is not None and dist[u] >= radius:
            continue
        for v in sorted(_neighbours(ars, u)):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def undirected_distance(ars: Ars, a: int, b: int) -> Union[int, Distance]:
    """Shortest path length ignoring edge direction, or ``UNREACHABLE``."""
    a, b = ars._node(a), ars._node(b)
    return _undirected_bfs(ars, a).get(b, UNREACHABLE)


@dataclass(frozen=True)
class RootedGraph:
    """A system with a distinguished root.

    ``origin`` maps each node back to the node it came from when the graph
    is a neighbourhood of a larger system.
    """

    ars: Ars
    root: int
    origin: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        self.ars._node(self.root)


def neighbourhood(ars: Ars, a: int, r: int) -> RootedGraph:
    """Induced subsystem on nodes within undirected distance ``r`` of ``a``.

    Nodes are renumbered by distance, then original index; the root is 0.
    """
    a = ars._node(a)
    if not isinstance(r, int) or r < 0:
        raise ArsError(f"radius must be a natural number, got {r!r}")
    dist = _undirected_bfs(ars, a, r)
    order = sorted(dist, key=lambda v: (dist[v], v))
    sub, _ = ars.restrict(order)
    return RootedGraph(sub, 0, tuple(order))


# -- canonical form ------------------------------------------------------

def _rank(signatures: list) -> list[int]:
    table = {s: i for i, s in enumerate(sorted(set(signatures)))}
    return [table[s] for s in signatures]


def _refine(colours: list[int], succ, pred) -> list[int]:
    while True:
        sigs = [
            (colours[v], tuple(sorted(colours[w] for w in succ[v])),
             tuple(sorted(colours[w] for w in pred[v])))
            for v in range(len(colours))
        ]
        new = _rank(sigs)
        if len(set(new)) == len(set(colours)):
            return new
        colours = new


def canonical_encoding(g: RootedGraph) -> tuple:
    """An encoding equal for two rooted graphs iff they are isomorphic.

    Colours start from (distance to root, in-degree, out-degree) and are
    refined by neighbour colours. Remaining ties are broken by trying each
    member of the first tied class (one per class of interchangeable twins),
    and the least edge list over all branches is returned.
    """
    ars = g.ars
    n = ars.n_nodes
    succ, pred = ars.succ, ars.pred
    succ_sets = [set(s) for s in succ]
    pred_sets = [set(p) for p in pred]
    dist = _undirected_bfs(ars, g.root)
    far = n + 1
    seed = [(dist.get(v, far), len(pred[v]), len(succ[v])) for v in range(n)]
    best = [None]

    def search(colours):
        colours = _refine(colours, succ, pred)
        if len(set(colours)) == n:
            code = tuple(sorted((colours[s], colours[d]) for s, d in ars.edges))
            if best[0] is None or code < best[0]:
                best[0] = code
            return
        counts = Counter(colours)
        target = min(c for c, k in counts.items() if k > 1)
        cell = [v for v in range(n) if colours[v] == target]
        tried: list[int] = []
        for v in cell:
            # swapping two twins of the same cell is an automorphism
            if any(_are_twins(u, v, succ_sets, pred_sets) for u in tried):
                continue
            tried.append(v)
            split = [2 * c + (1 if c == target and u != v else 0) for u, c in enumerate(colours)]
            search(split)

    search(_rank(seed))
    return (n, best[0])


def _are_twins(u, v, succ_sets, pred_sets) -> bool:
    out_u = succ_sets[u] - {u, v}
    in_u = pred_sets[u] - {u, v}
    out_v = succ_sets[v] - {u, v}
    in_v = pred_sets[v] - {u, v}
    return (out_u == out_v and in_u == in_v
            and (u in succ_sets[u]) == (v in succ_sets[v])
            and (v in succ_sets[u]) == (u in succ_sets[v]))


def rooted_isomorphic(g1: RootedGraph, g2: RootedGraph) -> bool:
    """Is there an edge- and direction-preserving bijection sending root to root?

    Plain backtracking with (in-degree, out-degree, self-loop) pruning.
    """
    a, b = g1.ars, g2.ars
    n = a.n_nodes
    if n != b.n_nodes or len(a.edges) != len(b.edges):
        return False

    def profile(s, v):
        return (len(s.pred[v]), len(s.succ[v]), v in s.succ[v])

    if profile(a, g1.root) != profile(b, g2.root):
        return False
    if sorted(profile(a, v) for v in range(n)) != sorted(profile(b, v) for v in range(n)):
        return False
    order = [g1.root] + [v for v in sorted(range(n), key=lambda v: -len(_neighbours(a, v)))
                         if v != g1.root]
    a_succ = [set(x) for x in a.succ]
    b_succ = [set(x) for x in b.succ]
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def consistent(u, w) -> bool:
        if profile(a, u) != profile(b, w):
            return False
        for x, y in mapping.items():
            if (x in a_succ[u]) != (y in b_succ[w]) or (u in a_succ[x]) != (w in b_succ[y]):
                return False
        return True

    def extend(i) -> bool:
        if i == n:
            return True
        u = order[i]
        candidates = [g2.root] if i == 0 else [w for w in range(n) if w not in used]
        for w in candidates:
            if consistent(u, w):
                mapping[u] = w
                used.add(w)
                if extend(i + 1):
                    return True
                del mapping[u]
                used.discard(w)
        return False

    return extend(0)


def iso_class_table(ars: Ars, r: int, nodes: Optional[Iterable[int]] = None) -> Counter:
    """Occurrences of each canonical ``r``-neighbourhood encoding."""
    nodes = range(ars.n_nodes) if nodes is None else nodes
    return Counter(canonical_encoding(neighbourhood(ars, v, r)) for v in nodes)


@dataclass(frozen=True)
class LocalIsoResult:
    holds: bool
    table_a: Counter
    table_b: Counter

    def __bool__(self):
        return self.holds


def locally_isomorphic(a: Ars, b: Ars, r: int) -> LocalIsoResult:
    """Do ``a`` and ``b`` have the same multiset of rooted ``r``-neighbourhoods?"""
    ta, tb = iso_class_table(a, r), iso_class_table(b, r)
    return LocalIsoResult(ta == tb, ta, tb)


# -- families ------------------------------------------------------------

def _cr_component(j, extra_x=False, chain=None):
    chain = j if chain is None else chain
    names = ["a"] + [f"b{i}" for i in range(chain)] + [f"c{i}" for i in range(chain)] + ["d"]
    if extra_x:
        names.append("x")
    idx = {x: i for i, x in enumerate(names)}
    edges = [(idx["a"], idx["b0"]), (idx["a"], idx["c0"])]
    edges += [(idx[f"b{i + 1}"], idx[f"b{i}"]) for i in range(chain - 1)]
    edges += [(idx[f"c{i}"], idx[f"c{i + 1}"]) for i in range(chain - 1)]
    edges += [(idx["d"], idx[f"b{chain - 1}"]), (idx[f"c{chain - 1}"], idx["d"])]
    if extra_x:
        edges += [(idx["b0"], idx["x"]), (idx["x"], idx["c1"])]
    return names, edges


def _chain(j, reverse=False):
    names = [f"n{i}" for i in range(j + 1)]
    edges = [(i + 1, i) if reverse else (i, i + 1) for i in range(j)]
    return names, edges


def gen_family_named(kind: str, p: int) -> tuple[Ars, tuple[str, ...]]:
    """First ``p`` components of a family, plus a readable name per node.

    * ``cr``: component ``j`` has a peak ``b0 <- a -> c0``; the c-chain of
      length ``j`` runs forward into ``d`` and ``d`` feeds the reversed
      b-chain back to ``b0``;
    * ``sn``: directed chains with ``1 .. p`` steps;
    * ``inc``: the same chains with every step reversed;
    * ``sc``: like ``cr`` with chains of length ``j + 2`` and an extra node
      ``x`` with ``b0 -> x -> c1``.
    """
    if kind not in FAMILY_KINDS:
        raise ArsError(f"unknown family {kind!r}; known: {', '.join(FAMILY_KINDS)}")
    if not isinstance(p, int) or p < 1:
        raise ArsError(f"p must be a positive integer, got {p!r}")
    parts = []
    names: list[str] = []
    for j in range(1, p + 1):
        if kind == "cr":
            local, edges = _cr_component(j)
        elif kind == "sc":
            local, edges = _cr_component(j, extra_x=True, chain=j + 2)
        else:
            local, edges = _chain(j, reverse=(kind == "inc"))
        parts.append(Ars(len(local), edges))
        names.extend(f"{kind}{j}.{x}" for x in local)
    return disjoint_union(*parts), tuple(names)


def gen_family(kind: str, p: int) -> Ars:
    return gen_family_named(kind, p)[0]
