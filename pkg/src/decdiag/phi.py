"""Generators for the commutation hierarchy systems and their witness labellings.

Level 0 is a seven-node system joined at a single sink ``c``. Each further
level wraps the previous one with fourteen fresh nodes ``a1..a7`` and
``b1..b7``; the previous level's outer nodes become the new ``a`` and ``b``.
Level ``n`` admits a decreasing labelling with ``5n + 1`` labels but none
with ``n`` labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .ars import CommArs
from .decreasing import LabelledCommArs
from .errors import ArsError

__all__ = ["PhiSystem", "PhiProperties", "phi", "phi_witness_labelling", "verify_phi_properties"]

MAX_LEVEL = 20

_BASE_NAMES = ("a1", "a2", "a3", "c", "b2", "b3", "b1")
_BASE_FWD = (("a1", "a2"), ("a2", "c"), ("a3", "c"), ("b1", "b3"), ("b2", "c"), ("b3", "c"))
_BASE_SND = (("a1", "a3"), ("a2", "c"), ("a3", "c"), ("b1", "b2"), ("b2", "c"), ("b3", "c"))

# Extension steps with their offset above the inner label budget. Names
# "a" and "b" refer to the previous level's a1 and b1.
_EXT_FWD = (
    ("a1", "a3", 5), ("a3", "a4", 4), ("a4", "a6", 3), ("a6", "a7", 2), ("a7", "b", 1),
    ("a2", "a5", 4), ("a5", "a", 2),
    ("b1", "b2", 5), ("b2", "b4", 4), ("b4", "b5", 3), ("b5", "b7", 2), ("b7", "a", 1),
    ("b3", "b6", 4), ("b6", "b", 2),
)
_EXT_SND = (
    ("a1", "a2", 5), ("a2", "a4", 4), ("a4", "a5", 3), ("a5", "a7", 2), ("a7", "a", 1),
    ("a3", "a6", 4), ("a6", "b", 2),
    ("b1", "b3", 5), ("b3", "b4", 4), ("b4", "b6", 3), ("b6", "b7", 2), ("b7", "b", 1),
    ("b2", "b5", 4), ("b5", "a", 2),
)
_EXT_NAMES = tuple(f"a{i}" for i in range(1, 8)) + tuple(f"b{i}" for i in range(1, 8))


@dataclass(frozen=True)
class PhiSystem:
    """A level-``n`` system with distinguished nodes ``(a1, a, c, b, b1)``.

    ``names`` maps each node index to a readable name such as ``L2.a4``
    (level 2, node a4) or ``L0.c``.
    """

    comm: CommArs
    distinguished: tuple[int, int, int, int, int]
    level: int
    names: tuple[str, ...]

    @property
    def a1(self) -> int:
        return self.distinguished[0]

    @property
    def a(self) -> int:
        return self.distinguished[1]

    @property
    def c(self) -> int:
        return self.distinguished[2]

    @property
    def b(self) -> int:
        return self.distinguished[3]

    @property
    def b1(self) -> int:
        return self.distinguished[4]


@lru_cache(maxsize=None)
def _build(n: int):
    """Nodes, labelled forward and second steps, distinguished tuple."""
    names = [f"L0.{x}" for x in _BASE_NAMES]
    idx = {x: i for i, x in enumerate(_BASE_NAMES)}
    fwd = [(idx[s], idx[d], 0) for s, d in _BASE_FWD]
    snd = [(idx[s], idx[d], 0) for s, d in _BASE_SND]
    dist = (idx["a1"], idx["c"], idx["c"], idx["c"], idx["b1"])
    for m in range(1, n + 1):
        base = 5 * (m - 1)
        local = {"a": dist[0], "b": dist[4]}
        for x in _EXT_NAMES:
            local[x] = len(names)
            names.append(f"L{m}.{x}")
        fwd += [(local[s], local[d], base + off) for s, d, off in _EXT_FWD]
        snd += [(local[s], local[d], base + off) for s, d, off in _EXT_SND]
        dist = (local["a1"], local["a"], dist[2], local["b"], local["b1"])
    return tuple(names), tuple(fwd), tuple(snd), dist


def _check_level(n):
    if not isinstance(n, int) or n < 0:
        raise ArsError(f"level must be a natural number, got {n!r}")
    if n > MAX_LEVEL:
        raise ArsError(f"level {n} exceeds the supported bound {MAX_LEVEL}")


def phi(n: int) -> PhiSystem:
    """The level-``n`` commutation system."""
    _check_level(n)
    names, fwd, snd, dist = _build(n)
    comm = CommArs(len(names), [(s, d) for s, d, _ in fwd], [(s, d) for s, d, _ in snd])
    return PhiSystem(comm, dist, n, names)


def phi_witness_labelling(n: int) -> LabelledCommArs:
    """Decreasing labelling of ``phi(n)`` with labels ``0 .. 5n``."""
    _check_level(n)
    names, fwd, snd, _ = _build(n)
    return LabelledCommArs(len(names), 5 * n + 1, fwd, snd)


@dataclass(frozen=True)
class PhiProperties:
    deterministic: bool
    all_reach_c: bool
    join_a: bool
    join_b: bool

    def __bool__(self):
        return self.deterministic and self.all_reach_c and self.join_a and self.join_b

    def as_dict(self) -> dict:
        return {
            "deterministic": self.deterministic,
            "all_reach_c": self.all_reach_c,
            "join_a": self.join_a,
            "join_b": self.join_b,
        }


def verify_phi_properties(n: int) -> PhiProperties:
    """Check the four structural properties of ``phi(n)``.

    * both relations are deterministic;
    * every node reaches ``c`` with either relation;
    * ``a1 ~>* x <<- b1`` iff ``a ~>* x`` and ``a ->* x``;
    * ``a1 ->* x <~* b1`` iff ``b ~>* x`` and ``b ->* x``.
    """
    p = phi(n)
    fwd, snd = p.comm.fwd, p.comm.snd
    deterministic = all(len(fwd.succ[x]) <= 1 and len(snd.succ[x]) <= 1
                        for x in range(p.comm.n_nodes))
    c_bit = 1 << p.c
    all_reach_c = all(fwd.reach_masks[x] & c_bit and snd.reach_masks[x] & c_bit
                      for x in range(p.comm.n_nodes))
    join_a = (snd.reach_masks[p.a1] & fwd.reach_masks[p.b1]
              == snd.reach_masks[p.a] & fwd.reach_masks[p.a])
    join_b = (fwd.reach_masks[p.a1] & snd.reach_masks[p.b1]
              == snd.reach_masks[p.b] & fwd.reach_masks[p.b])
    return PhiProperties(deterministic, bool(all_reach_c), join_a, join_b)
