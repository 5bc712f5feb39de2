"""Labelled rewrite systems and local decreasingness.

A peak ``c <-[beta] a ->[alpha] b`` is decreasing when the two sides meet
in the shape

    b ->>[<alpha] . ->=[beta] . ->>[<alpha or <beta] d
    c ->>[<beta]  . ->=[alpha] . ->>[<alpha or <beta] d

Each side is explored with a two-phase automaton over ``(node, phase)``
states. Phase ``A`` follows steps labelled below the side's own peak label;
one step carrying the other peak label (or an empty step) moves to phase
``B``, which follows steps below the larger of the two peak labels.

In the commutation setting the peak is ``c <-[beta] a ~>[alpha] b``; the
``b`` side is joined with ``->`` steps and the ``c`` side with ``~>``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Optional, Sequence, Union

from .ars import Ars, CommArs, PropertyReport, bits
from .errors import ArsError

__all__ = [
    "DEFAULT_BUDGET",
    "JoinCertificate",
    "JoinPath",
    "LabelledArs",
    "LabelledCommArs",
    "Peak",
    "SearchResult",
    "dc_search",
    "dcr_search",
    "decreasing_join_exists",
    "is_locally_decreasing",
    "is_locally_decreasing_comm",
    "iter_peaks",
    "strip_max_label",
    "verify_simple_01",
]

DEFAULT_BUDGET = 10**7

FWD, SND = 0, 1


def _check_labelled(n_nodes, label_count, edges, multi_label, what="edge"):
    if not isinstance(n_nodes, int) or n_nodes < 1:
        raise ArsError(f"n_nodes must be a positive integer, got {n_nodes!r}")
    if not isinstance(label_count, int) or label_count < 0:
        raise ArsError(f"label_count must be a natural number, got {label_count!r}")
    out = set()
    pairs = set()
    for e in edges:
        if len(e) != 3:
            raise ArsError(f"labelled {what} {e!r} needs (src, dst, label)")
        s, d, lab = (int(x) for x in e)
        if not (0 <= s < n_nodes and 0 <= d < n_nodes):
            raise ArsError(f"{what} {s}->{d} out of range for {n_nodes} nodes")
        if not 0 <= lab < label_count:
            raise ArsError(f"label {lab} on {s}->{d} outside [0, {label_count})")
        if (s, d, lab) in out:
            continue
        if (s, d) in pairs and not multi_label:
            raise ArsError(f"{what} {s}->{d} carries several labels (multi-label mode is off)")
        pairs.add((s, d))
        out.add((s, d, lab))
    return frozenset(out)


def _by_src(n, edges):
    out = [[] for _ in range(n)]
    for s, d, lab in edges:
        out[s].append((d, lab))
    return tuple(tuple(sorted(x)) for x in out)


def _lt_closures(n, edges, k):
    """``R[t][x]``: nodes reachable from ``x`` with steps labelled ``< t``."""
    by_label = [[0] * n for _ in range(k)]
    for s, d, lab in edges:
        by_label[lab][s] |= 1 << d
    closures = []
    step = [0] * n
    for t in range(k + 1):
        if t:
            for x in range(n):
                step[x] |= by_label[t - 1][x]
        closures.append(Ars(n, [(s, d) for s in range(n) for d in bits(step[s])]).reach_masks)
    return closures, by_label


class _LabelledRelation:
    n_nodes: int
    label_count: int
    edges: frozenset

    @cached_property
    def by_src(self):
        return _by_src(self.n_nodes, self.edges)

    @cached_property
    def _masks(self):
        return _lt_closures(self.n_nodes, self.edges, self.label_count)


@dataclass(frozen=True)
class LabelledArs(_LabelledRelation):
    """An ARS whose steps carry labels from ``{0, ..., label_count - 1}``.

    With ``multi_label`` off, each unlabelled step carries exactly one label.
    """

    n_nodes: int
    label_count: int
    edges: frozenset = field(default_factory=frozenset)
    multi_label: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "edges",
            _check_labelled(self.n_nodes, self.label_count, self.edges, self.multi_label),
        )

    def __repr__(self):
        return f"LabelledArs({self.n_nodes}, k={self.label_count}, {sorted(self.edges)})"

    @cached_property
    def unlabelled(self) -> Ars:
        return Ars(self.n_nodes, {(s, d) for s, d, _ in self.edges})

    def label_of(self, src: int, dst: int) -> int:
        labs = [lab for d, lab in self.by_src[src] if d == dst]
        if len(labs) != 1:
            raise ArsError(f"{src}->{dst} has labels {labs}")
        return labs[0]

    def projects_to(self, ars: Ars) -> bool:
        return self.n_nodes == ars.n_nodes and self.unlabelled.edges == ars.edges


@dataclass(frozen=True)
class _Rel(_LabelledRelation):
    n_nodes: int
    label_count: int
    edges: frozenset


@dataclass(frozen=True)
class LabelledCommArs:
    """Two labelled relations ``->`` and ``~>`` sharing one label order."""

    n_nodes: int
    label_count: int
    fwd_edges: frozenset = field(default_factory=frozenset)
    snd_edges: frozenset = field(default_factory=frozenset)
    multi_label: bool = field(default=False, compare=False)

    def __post_init__(self):
        for name in ("fwd_edges", "snd_edges"):
            object.__setattr__(
                self, name,
                _check_labelled(self.n_nodes, self.label_count, getattr(self, name),
                                self.multi_label),
            )

    def __repr__(self):
        return (f"LabelledCommArs({self.n_nodes}, k={self.label_count}, "
                f"fwd={sorted(self.fwd_edges)}, snd={sorted(self.snd_edges)})")

    @cached_property
    def unlabelled(self) -> CommArs:
        return CommArs(self.n_nodes,
                       {(s, d) for s, d, _ in self.fwd_edges},
                       {(s, d) for s, d, _ in self.snd_edges})

    @cached_property
    def fwd(self) -> _Rel:
        return _Rel(self.n_nodes, self.label_count, self.fwd_edges)

    @cached_property
    def snd(self) -> _Rel:
        return _Rel(self.n_nodes, self.label_count, self.snd_edges)

    def projects_to(self, c: CommArs) -> bool:
        return self.unlabelled == c


LabelledSystem = Union[LabelledArs, LabelledCommArs]


@dataclass(frozen=True, order=True)
class Peak:
    """``left.dst <-[left.label] apex ->[right.label] right.dst``.

    In the commutation setting ``left`` is the ``->`` step and ``right`` the
    ``~>`` step.
    """

    apex: int
    left: tuple[int, int]
    right: tuple[int, int]
    comm: bool = False


@dataclass(frozen=True)
class JoinPath:
    """A joining reduction split into prefix, optional middle step, suffix.

    Steps are ``(src, dst, label)`` triples.
    """

    start: int
    prefix: tuple = ()
    middle: Optional[tuple] = None
    suffix: tuple = ()

    @property
    def steps(self) -> tuple:
        mid = (self.middle,) if self.middle is not None else ()
        return tuple(self.prefix) + mid + tuple(self.suffix)

    @property
    def end(self) -> int:
        steps = self.steps
        return steps[-1][1] if steps else self.start


@dataclass(frozen=True)
class JoinCertificate:
    """Joining reductions for a peak ``c <-[beta] a ->[alpha] b``.

    ``left_path`` starts at ``b`` (the target of the right step) and has the
    shape ``->>[<alpha] . ->=[beta] . ->>[<alpha or <beta]``; ``right_path``
    starts at ``c`` with ``alpha`` and ``beta`` swapped. In the commutation
    setting ``left_path`` uses ``->`` steps and ``right_path`` ``~>`` steps.
    Both end at ``meet``.
    """

    peak: Peak
    meet: int
    left_path: JoinPath
    right_path: JoinPath


def _system_relations(sys):
    """Relations of the peak's left and right steps, then of the two joins.

    The ``b`` side (reached by the right step) is joined in the first join
    relation, the ``c`` side in the second.
    """
    if isinstance(sys, LabelledCommArs):
        return sys.fwd, sys.snd, sys.fwd, sys.snd
    return sys, sys, sys, sys


def iter_peaks(sys: LabelledSystem, ordered: bool = True) -> Iterator[Peak]:
    """All peaks in ``(apex, left, right)`` order.

    For a plain labelled ARS with ``ordered=False`` only peaks with
    ``left <= right`` are produced; the decreasing condition is symmetric
    there.
    """
    comm = isinstance(sys, LabelledCommArs)
    lrel, rrel, _, _ = _system_relations(sys)
    for a in range(sys.n_nodes):
        for left in lrel.by_src[a]:
            for right in rrel.by_src[a]:
                if not ordered and not comm and right < left:
                    continue
                yield Peak(a, left, right, comm)


# -- phase automaton -----------------------------------------------------

def _side_bfs(adj, start, own, other, counter=None):
    """Breadth-first search over (node, phase) states from ``start``.

    ``adj[u]`` lists ``(v, low, labels)`` where ``labels`` is the set of
    labels the step may carry and ``low`` its minimum. Returns the parent map
    of reached states; a state is ``(node, 0)`` for phase A or ``(node, 1)``
    for phase B.
    """
    top = max(own, other)
    parent = {(start, 0): None}
    queue = deque([(start, 0)])
    while queue:
        state = queue.popleft()
        if counter is not None:
            counter[0] += 1
        u, phase = state
        if phase == 0:
            nxt = (u, 1)
            if nxt not in parent:
                parent[nxt] = (state, None)
                queue.append(nxt)
            for v, low, labels in adj[u]:
                if low < own and (v, 0) not in parent:
                    parent[(v, 0)] = (state, (u, v, low))
                    queue.append((v, 0))
                if other in labels and (v, 1) not in parent:
                    parent[(v, 1)] = (state, (u, v, other))
                    queue.append((v, 1))
        else:
            for v, low, labels in adj[u]:
                if low < top and (v, 1) not in parent:
                    parent[(v, 1)] = (state, (u, v, low))
                    queue.append((v, 1))
    return parent


def _ends(parent) -> set:
    return {u for (u, phase) in parent if phase == 1}


def _rebuild(parent, start, end) -> JoinPath:
    steps = []
    state = (end, 1)
    while parent[state] is not None:
        prev, step = parent[state]
        if step is not None:
            steps.append((step, prev[1], state[1]))
        state = prev
    steps.reverse()
    prefix = tuple(s for s, p, q in steps if p == 0 and q == 0)
    middle = next((s for s, p, q in steps if p == 0 and q == 1), None)
    suffix = tuple(s for s, p, q in steps if p == 1 and q == 1)
    return JoinPath(start, prefix, middle, suffix)


def _adj(rel):
    return [[(v, lab, (lab,)) for v, lab in rel.by_src[u]] for u in range(rel.n_nodes)]


def _valid_path(path: JoinPath, rel, own, other) -> bool:
    top = max(own, other)
    steps = set(rel.edges)
    node = path.start
    for s in path.prefix:
        if s not in steps or s[0] != node or not s[2] < own:
            return False
        node = s[1]
    if path.middle is not None:
        s = path.middle
        if s not in steps or s[0] != node or s[2] != other:
            return False
        node = s[1]
    for s in path.suffix:
        if s not in steps or s[0] != node or not s[2] < top:
            return False
        node = s[1]
    return True


def validate_certificate(sys: LabelledSystem, cert: JoinCertificate) -> bool:
    """Structural check of a certificate against the labelled system."""
    peak = cert.peak
    lrel, rrel, bjoin, cjoin = _system_relations(sys)
    (c, beta), (b, alpha) = peak.left, peak.right
    if (peak.apex, c, beta) not in lrel.edges or (peak.apex, b, alpha) not in rrel.edges:
        return False
    lp, rp = cert.left_path, cert.right_path
    return (
        lp.start == b and rp.start == c
        and lp.end == cert.meet and rp.end == cert.meet
        and _valid_path(lp, bjoin, alpha, beta)
        and _valid_path(rp, cjoin, beta, alpha)
    )


def decreasing_join_exists(sys: LabelledSystem, peak: Peak) -> Optional[JoinCertificate]:
    """Certificate joining ``peak`` in decreasing shape, or ``None``.

    The meet is the least node index reachable from both sides.
    """
    lrel, rrel, bjoin, cjoin = _system_relations(sys)
    (c, beta), (b, alpha) = peak.left, peak.right
    if (peak.apex, c, beta) not in lrel.edges or (peak.apex, b, alpha) not in rrel.edges:
        raise ArsError(f"{peak} is not a peak of the system")
    from_b = _side_bfs(_adj(bjoin), b, alpha, beta)
    from_c = _side_bfs(_adj(cjoin), c, beta, alpha)
    common = _ends(from_b) & _ends(from_c)
    if not common:
        return None
    meet = min(common)
    cert = JoinCertificate(peak, meet, _rebuild(from_b, b, meet), _rebuild(from_c, c, meet))
    if not validate_certificate(sys, cert):  # pragma: no cover
        raise AssertionError(f"invalid certificate {cert}")
    return cert


def _side_mask(rel, start, own, other) -> int:
    closures, by_label = rel._masks
    a_set = closures[own][start]
    mids = a_set
    if other < len(by_label):
        row = by_label[other]
        for u in bits(a_set):
            mids |= row[u]
    top = closures[max(own, other)]
    out = 0
    for u in bits(mids):
        out |= top[u]
    return out


def _peak_ok(sys, peak) -> bool:
    _, _, bjoin, cjoin = _system_relations(sys)
    (c, beta), (b, alpha) = peak.left, peak.right
    if c == b and bjoin is cjoin:
        return True
    return bool(_side_mask(bjoin, b, alpha, beta) & _side_mask(cjoin, c, beta, alpha))


def _first_bad_peak(sys) -> Optional[Peak]:
    for peak in iter_peaks(sys, ordered=False):
        if not _peak_ok(sys, peak):
            return peak
    return None


def is_locally_decreasing(sys: LabelledArs) -> PropertyReport:
    """Every peak joins in decreasing shape; witness is the first failing peak."""
    if not isinstance(sys, LabelledArs):
        raise ArsError("is_locally_decreasing expects a LabelledArs")
    bad = _first_bad_peak(sys)
    return PropertyReport(bad is None, None if bad is None else (bad,))


def is_locally_decreasing_comm(sys: LabelledCommArs) -> PropertyReport:
    """Commutation variant: peaks ``c <- a ~> b``."""
    if not isinstance(sys, LabelledCommArs):
        raise ArsError("is_locally_decreasing_comm expects a LabelledCommArs")
    bad = _first_bad_peak(sys)
    return PropertyReport(bad is None, None if bad is None else (bad,))


def verify_simple_01(sys: LabelledArs) -> bool:
    """Check the three simple two-label diagrams.

    0/0 peaks must be trivial (same target); peaks involving a 1-step must
    join with 0-steps only on both sides.
    """
    if sys.label_count != 2:
        raise ArsError(f"verify_simple_01 needs label_count 2, got {sys.label_count}")
    zero = sys._masks[0][1]
    for peak in iter_peaks(sys, ordered=False):
        (c, beta), (b, alpha) = peak.left, peak.right
        if beta == 0 and alpha == 0:
            if b != c:
                return False
        elif not zero[b] & zero[c]:
            return False
    return True


def strip_max_label(sys: LabelledSystem) -> LabelledSystem:
    """Drop every step carrying the largest label.

    The input must be locally decreasing; so is the output, because a
    decreasing join uses the top label only when the peak does.
    """
    check = is_locally_decreasing_comm if isinstance(sys, LabelledCommArs) else is_locally_decreasing
    if sys.label_count < 1:
        raise ArsError("nothing to strip: label_count is 0")
    if not check(sys).holds:
        raise ArsError("strip_max_label needs a locally decreasing input")
    top = sys.label_count - 1
    if isinstance(sys, LabelledCommArs):
        out = LabelledCommArs(
            sys.n_nodes, top,
            [e for e in sys.fwd_edges if e[2] != top],
            [e for e in sys.snd_edges if e[2] != top],
            multi_label=sys.multi_label,
        )
    else:
        out = LabelledArs(sys.n_nodes, top, [e for e in sys.edges if e[2] != top],
                          multi_label=sys.multi_label)
    if not check(out).holds:  # pragma: no cover
        raise AssertionError("stripped system is not locally decreasing")
    return out


# -- labelling search ----------------------------------------------------

@dataclass(frozen=True)
class SearchResult:
    """Outcome of a labelling search.

    ``labelling`` is ``None`` when no labelling was found; ``exhausted`` then
    tells whether the whole space was refuted (``True``) or the budget ran
    out (``False``).
    """

    labelling: Optional[LabelledSystem]
    exhausted: bool
    expansions: int

    @property
    def found(self) -> bool:
        return self.labelling is not None


class _BudgetExceeded(Exception):
    pass


class _Search:
    """Backtracking over label assignments for a set of edge variables.

    ``variables`` are ``(rel, src, dst)``; ``rel`` is 0 for ``->`` and 1 for
    ``~>`` (plain ARSs only use 0). Unassigned steps act as wildcards that may
    carry any label, so a peak whose two steps are assigned can be refuted
    before its joining steps are fixed.
    """

    def __init__(self, n, variables, k, comm, budget, multi_label):
        self.n = n
        self.k = k
        self.comm = comm
        self.budget = budget
        self.counter = [0]
        self.full = frozenset(range(k))
        if multi_label:
            subsets = []
            for size in range(1, k + 1):
                subsets.extend(frozenset(c) for c in itertools.combinations(range(k), size))
            self.domain = subsets
        else:
            self.domain = [frozenset((x,)) for x in range(k)]

        out_count = [0] * n
        for rel, s, d in variables:
            out_count[s] += 1
        self.variables = sorted(variables, key=lambda v: (-out_count[v[1]], v[1], v[0], v[2]))
        self.index = {v: i for i, v in enumerate(self.variables)}
        self.labels: list = [self.full] * len(self.variables)
        self.assigned = [False] * len(self.variables)

        # adjacency per relation: adj[rel][u] = [(dst, var_id)]
        self.adj = [[[] for _ in range(n)] for _ in range(2)]
        for i, (rel, s, d) in enumerate(self.variables):
            self.adj[rel][s].append((d, i))
        for rel in range(2):
            for row in self.adj[rel]:
                row.sort()
        # peaks: pairs of variable ids sharing an apex
        self.peaks_of = [[] for _ in self.variables]
        self.peaks = []
        for u in range(n):
            if comm:
                lefts, rights = self.adj[FWD][u], self.adj[SND][u]
                pairs = [(x, y) for x in lefts for y in rights]
            else:
                row = self.adj[FWD][u]
                pairs = [(x, y) for i, x in enumerate(row) for y in row[i:]]
            for (c, lv), (b, rv) in pairs:
                pid = len(self.peaks)
                self.peaks.append((u, c, lv, b, rv))
                self.peaks_of[lv].append(pid)
                self.peaks_of[rv].append(pid)

    def _view(self, rel):
        labels = self.labels
        return [[(v, min(labels[i]), labels[i]) for v, i in row] for row in self.adj[rel]]

    def _peak_ok(self, pid, views) -> bool:
        _, c, lv, b, rv = self.peaks[pid]
        bjoin = views[FWD]
        cjoin = views[SND] if self.comm else bjoin
        for beta in self.labels[lv]:
            for alpha in self.labels[rv]:
                if not self.comm and c == b:
                    continue
                from_b = _ends(_side_bfs(bjoin, b, alpha, beta, self.counter))
                from_c = _ends(_side_bfs(cjoin, c, beta, alpha, self.counter))
                if self.counter[0] > self.budget:
                    raise _BudgetExceeded
                if not from_b & from_c:
                    return False
        return True

    def _consistent(self) -> bool:
        views = [self._view(FWD), self._view(SND) if self.comm else None]
        assigned = self.assigned
        for pid, (_, _, lv, _, rv) in enumerate(self.peaks):
            if assigned[lv] and assigned[rv] and not self._peak_ok(pid, views):
                return False
        return True

    def run(self) -> Optional[list]:
        try:
            if not self.variables:
                return []
            found = self._extend(0)
        except _BudgetExceeded:
            raise
        return found

    def _extend(self, pos) -> Optional[list]:
        if pos == len(self.variables):
            return list(self.labels)
        for value in self.domain:
            self.labels[pos] = value
            self.assigned[pos] = True
            if self._consistent():
                result = self._extend(pos + 1)
                if result is not None:
                    return result
        self.labels[pos] = self.full
        self.assigned[pos] = False
        return None


def _run_search(n, variables, k, comm, budget, multi_label):
    if k < 1:
        raise ArsError(f"label count must be at least 1, got {k}")
    search = _Search(n, variables, k, comm, budget, multi_label)
    try:
        labels = search.run()
    except _BudgetExceeded:
        return search, None, False
    if labels is None:
        return search, None, True
    triples = [[], []]
    for (rel, s, d), labs in zip(search.variables, labels):
        triples[rel].extend((s, d, lab) for lab in labs)
    return search, triples, True


def dcr_search(ars: Ars, k: int, budget: Optional[int] = DEFAULT_BUDGET,
               multi_label: bool = False) -> SearchResult:
    """Find a locally decreasing labelling of ``ars`` with ``k`` labels.

    The first labelling in the deterministic variable/value order is
    returned. ``budget`` bounds the number of automaton state expansions;
    ``None`` means unbounded.
    """
    budget = float("inf") if budget is None else budget
    variables = [(FWD, s, d) for s, d in ars.edges]
    search, triples, exhausted = _run_search(ars.n_nodes, variables, k, False, budget, multi_label)
    labelled = None
    if triples is not None:
        labelled = LabelledArs(ars.n_nodes, k, triples[FWD], multi_label=multi_label)
    return SearchResult(labelled, exhausted, search.counter[0])


def dc_search(c: CommArs, k: int, budget: Optional[int] = DEFAULT_BUDGET,
              multi_label: bool = False) -> SearchResult:
    """Find a decreasing labelling of a commutation system with ``k`` labels."""
    budget = float("inf") if budget is None else budget
    variables = [(FWD, s, d) for s, d in c.fwd_edges] + [(SND, s, d) for s, d in c.snd_edges]
    search, triples, exhausted = _run_search(c.n_nodes, variables, k, True, budget, multi_label)
    labelled = None
    if triples is not None:
        labelled = LabelledCommArs(c.n_nodes, k, triples[FWD], triples[SND],
                                   multi_label=multi_label)
    return SearchResult(labelled, exhausted, search.counter[0])
