"""First-order sentences over one-step rewriting and equality.

Grammar, loosest binding first::

    phi ::= forall x y. phi | exists x. phi     (body extends as far as possible)
          | phi -> phi                          (right associative)
          | phi '|' phi | phi & phi | ~phi
          | x = y | x != y | x --> y
          | nf(x) | step[n](x, y) | conv[n](x, y) | (phi)

``nf``, ``step`` and ``conv`` are macros expanded while parsing::

    nf(x)            = ~exists y. x --> y
    step[0](x, y)    = x = y
    step[n+1](x, y)  = exists z. x --> z & step[n](z, y)
    conv[0](x, y)    = x = y
    conv[n+1](x, y)  = exists z. (x --> z | z --> x) & conv[n](z, y)

Identifiers that are not bound by a quantifier are constants and must be
given a node in the environment at evaluation time.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Union

from .ars import Ars, PropertyName
from .errors import ArsError, ParseError

__all__ = [
    "And",
    "Eq",
    "Exists",
    "ForAll",
    "Formula",
    "Implies",
    "Not",
    "Or",
    "Step",
    "check_bounded_gfop",
    "compile_formula",
    "eval_formula",
    "format_formula",
    "free_names",
    "gfop_family",
    "paper_formula",
    "parse_formula",
]


@dataclass(frozen=True)
class Eq:
    left: str
    right: str


@dataclass(frozen=True)
class Step:
    src: str
    dst: str


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ForAll:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Eq, Step, Not, And, Or, Implies, ForAll, Exists]

KEYWORDS = frozenset({"forall", "exists", "nf", "step", "conv"})


# -- macros --------------------------------------------------------------

def _fresh(base: str, avoid) -> str:
    if base not in avoid:
        return base
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def nf(x: str) -> Formula:
    y = _fresh("y", {x})
    return Not(Exists(y, Step(x, y)))


def steps(n: int, x: str, y: str) -> Formula:
    """``x`` reaches ``y`` in exactly ``n`` steps."""
    if n == 0:
        return Eq(x, y)
    z = _fresh("z", {x, y})
    return Exists(z, And(Step(x, z), steps(n - 1, z, y)))


def convs(n: int, x: str, y: str) -> Formula:
    """``x`` and ``y`` are connected by exactly ``n`` steps in either direction."""
    if n == 0:
        return Eq(x, y)
    z = _fresh("z", {x, y})
    return Exists(z, And(Or(Step(x, z), Step(z, x)), convs(n - 1, z, y)))


# -- parser --------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(-->|->|!=|[=~&|().,\[\]])|([A-Za-z_][A-Za-z0-9_]*)|(\d+))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", position=pos)
        sym, ident, num = m.groups()
        start = m.start(m.lastindex)
        if sym:
            out.append(("sym", sym, start))
        elif ident:
            out.append(("kw" if ident in KEYWORDS else "id", ident, start))
        else:
            out.append(("num", num, start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None, value=None):
        tok = self.tokens[self.i]
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or {"id": "identifier", "num": "number"}.get(kind, kind)
            got = tok[1] or "end of input"
            raise ParseError(f"expected {want!r}, got {got!r}", position=tok[2])
        self.i += 1
        return tok

    def at(self, value) -> bool:
        tok = self.tokens[self.i]
        return tok[0] in ("sym", "kw") and tok[1] == value

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.at("->"):
            self.take()
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.at("|"):
            self.take()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.at("&"):
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        if self.at("~"):
            self.take()
            return Not(self.unary())
        if self.at("forall") or self.at("exists"):
            quant = ForAll if self.take()[1] == "forall" else Exists
            names = [self.take("id")[1]]
            while self.peek()[0] == "id":
                names.append(self.take()[1])
            self.take("sym", ".")
            body = self.formula()
            for name in reversed(names):
                body = quant(name, body)
            return body
        return self.atom()

    def _args(self, count):
        self.take("sym", "(")
        names = [self.take("id")[1]]
        for _ in range(count - 1):
            self.take("sym", ",")
            names.append(self.take("id")[1])
        self.take("sym", ")")
        return names

    def atom(self) -> Formula:
        tok = self.peek()
        if self.at("("):
            self.take()
            inner = self.formula()
            self.take("sym", ")")
            return inner
        if self.at("nf"):
            self.take()
            return nf(*self._args(1))
        if self.at("step") or self.at("conv"):
            macro = steps if self.take()[1] == "step" else convs
            self.take("sym", "[")
            n = int(self.take("num")[1])
            self.take("sym", "]")
            return macro(n, *self._args(2))
        if tok[0] == "id":
            left = self.take()[1]
            op = self.peek()
            if op[0] == "sym" and op[1] in ("=", "!=", "-->"):
                self.take()
                right = self.take("id")[1]
                if op[1] == "=":
                    return Eq(left, right)
                if op[1] == "!=":
                    return Not(Eq(left, right))
                return Step(left, right)
            raise ParseError(f"expected '=', '!=' or '-->' after {left!r}", position=op[2])
        raise ParseError(f"unexpected {tok[1] or 'end of input'!r}", position=tok[2])


def parse_formula(text: str) -> Formula:
    """Parse ``text``; raises :class:`ParseError` with a character position."""
    p = _Parser(text)
    f = p.formula()
    tok = p.peek()
    if tok[0] != "end":
        raise ParseError(f"unexpected {tok[1]!r} after formula", position=tok[2])
    return f


# -- printer -------------------------------------------------------------

_PREC = {Implies: 1, Or: 2, And: 3, Not: 4, Eq: 5, Step: 5, ForAll: 0, Exists: 0}


def format_formula(f: Formula) -> str:
    """Print ``f`` with minimal parentheses; parsing the result gives ``f`` back."""
    return _fmt(f, 0)


def _fmt(f: Formula, need: int) -> str:
    if isinstance(f, Eq):
        s = f"{f.left} = {f.right}"
    elif isinstance(f, Step):
        s = f"{f.src} --> {f.dst}"
    elif isinstance(f, Not):
        if isinstance(f.body, Eq):
            s = f"{f.body.left} != {f.body.right}"
        else:
            s = "~" + _fmt(f.body, 4)
    elif isinstance(f, And):
        s = f"{_fmt(f.left, 3)} & {_fmt(f.right, 4)}"
    elif isinstance(f, Or):
        s = f"{_fmt(f.left, 2)} | {_fmt(f.right, 3)}"
    elif isinstance(f, Implies):
        s = f"{_fmt(f.left, 2)} -> {_fmt(f.right, 1)}"
    elif isinstance(f, (ForAll, Exists)):
        word = "forall" if isinstance(f, ForAll) else "exists"
        s = f"{word} {f.var}. {_fmt(f.body, 0)}"
    else:
        raise TypeError(f"not a formula: {f!r}")
    return f"({s})" if _PREC[type(f)] < need else s


def free_names(f: Formula) -> frozenset[str]:
    """Identifiers not bound by an enclosing quantifier."""
    if isinstance(f, Eq):
        return frozenset((f.left, f.right))
    if isinstance(f, Step):
        return frozenset((f.src, f.dst))
    if isinstance(f, Not):
        return free_names(f.body)
    if isinstance(f, (And, Or, Implies)):
        return free_names(f.left) | free_names(f.right)
    if isinstance(f, (ForAll, Exists)):
        return free_names(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


# -- evaluation ----------------------------------------------------------

class _Context:
    __slots__ = ("succ", "n", "memos")

    def __init__(self):
        self.succ = ()
        self.n = 0
        self.memos: list[dict] = []


def _compile(f, scope, ctx, counter):
    """Turn ``f`` into a function of the slot array.

    Each quantifier caches its value per assignment of its free names, so
    shared sub-formulas such as nested ``step`` chains are evaluated once per
    argument tuple.
    """
    if isinstance(f, Eq):
        a, b = scope[f.left], scope[f.right]
        return lambda e: e[a] == e[b]
    if isinstance(f, Step):
        a, b = scope[f.src], scope[f.dst]
        return lambda e: (ctx.succ[e[a]] >> e[b]) & 1 == 1
    if isinstance(f, Not):
        g = _compile(f.body, scope, ctx, counter)
        return lambda e: not g(e)
    if isinstance(f, (And, Or, Implies)):
        g = _compile(f.left, scope, ctx, counter)
        h = _compile(f.right, scope, ctx, counter)
        if isinstance(f, And):
            return lambda e: g(e) and h(e)
        if isinstance(f, Or):
            return lambda e: g(e) or h(e)
        return lambda e: (not g(e)) or h(e)
    # quantifier
    slot = counter[0]
    counter[0] += 1
    inner = dict(scope)
    inner[f.var] = slot
    body = _compile(f.body, inner, ctx, counter)
    keys = tuple(sorted(scope[name] for name in free_names(f)))
    memo: dict = {}
    ctx.memos.append(memo)
    want = isinstance(f, Exists)

    def quantify(e):
        key = tuple(e[k] for k in keys)
        hit = memo.get(key)
        if hit is not None:
            return hit
        result = not want
        for v in range(ctx.n):
            e[slot] = v
            if body(e) == want:
                result = want
                break
        memo[key] = result
        return result

    return quantify


class CompiledFormula:
    """A formula prepared for repeated evaluation on different systems."""

    def __init__(self, f: Formula):
        self.formula = f
        self.constants = tuple(sorted(free_names(f)))
        self._ctx = _Context()
        counter = [len(self.constants)]
        scope = {name: i for i, name in enumerate(self.constants)}
        self._fn = _compile(f, scope, self._ctx, counter)
        self._slots = counter[0]
        self._lock = threading.Lock()

    def __call__(self, ars: Ars, env: Optional[Mapping[str, int]] = None) -> bool:
        env = env or {}
        slots = [0] * self._slots
        for i, name in enumerate(self.constants):
            if name not in env:
                raise ArsError(f"unbound constant {name!r}")
            slots[i] = ars._node(env[name])
        with self._lock:
            ctx = self._ctx
            ctx.succ = ars.succ_masks
            ctx.n = ars.n_nodes
            for memo in ctx.memos:
                memo.clear()
            return bool(self._fn(slots))


def compile_formula(f: Union[Formula, str]) -> CompiledFormula:
    if isinstance(f, str):
        f = parse_formula(f)
    return CompiledFormula(f)


def eval_formula(ars: Ars, f: Union[Formula, str], env: Optional[Mapping[str, int]] = None) -> bool:
    """Truth of ``f`` in ``ars``; quantifiers range over all nodes.

    Every free identifier must be bound by ``env`` to a node.
    """
    return compile_formula(f)(ars, env)


# -- formula library -----------------------------------------------------

def _conj(*parts: Formula) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def delta_un(i: int) -> Formula:
    """Two normal forms convertible in exactly ``i`` steps are equal."""
    return ForAll("a", ForAll("b", Implies(
        _conj(nf("a"), nf("b"), convs(i, "a", "b")), Eq("a", "b"))))


def delta_unr(i: int, j: int) -> Formula:
    """Two normal forms reached from one node in ``i`` and ``j`` steps are equal."""
    return ForAll("a", ForAll("b", ForAll("x", Implies(
        _conj(nf("a"), nf("b"), steps(i, "x", "a"), steps(j, "x", "b")), Eq("a", "b")))))


def delta_ac(i: int) -> Formula:
    """No node returns to itself in exactly ``i`` steps (``i >= 1``)."""
    if i < 1:
        raise ArsError("delta_ac needs i >= 1")
    return ForAll("a", ForAll("b", Implies(steps(i, "a", "b"), Not(Eq("a", "b")))))


XI_A = "forall x. forall y. forall z. (a --> x & a --> y & a --> z) -> (x = y | y = z | x = z)"
XI_NOT_A = "forall x. forall y. forall z. (~(x = a) & x --> y & x --> z) -> y = z"


def paper_formula(name: str, *params: int) -> Formula:
    """Named sentence from the formula library.

    ``delta_un(i)``, ``delta_unr(i, j)``, ``delta_ac(i)`` are the members of
    the sentence families defining UN, UN-> and AC; ``xi_a`` and ``xi_not_a``
    bound the branching of the constant ``a`` and of all other nodes.
    """
    arity = {"delta_un": 1, "delta_unr": 2, "delta_ac": 1, "xi_a": 0, "xi_not_a": 0}
    if name not in arity:
        raise ArsError(f"unknown formula {name!r}; known: {', '.join(sorted(arity))}")
    if len(params) != arity[name]:
        raise ArsError(f"{name} takes {arity[name]} parameter(s), got {len(params)}")
    if any(not isinstance(p, int) or p < 0 for p in params):
        raise ArsError(f"parameters must be natural numbers, got {params}")
    if name == "delta_un":
        return delta_un(*params)
    if name == "delta_unr":
        return delta_unr(*params)
    if name == "delta_ac":
        return delta_ac(*params)
    return parse_formula(XI_A if name == "xi_a" else XI_NOT_A)


def gfop_family(family, bound: int) -> Iterator[Formula]:
    """Members of the UN, UNR or AC family with parameters up to ``bound``."""
    prop = PropertyName.parse(family)
    if prop is PropertyName.UN:
        for i in range(bound + 1):
            yield delta_un(i)
    elif prop is PropertyName.UNR:
        for i in range(bound + 1):
            for j in range(bound + 1):
                yield delta_unr(i, j)
    elif prop is PropertyName.AC:
        for i in range(1, bound + 1):
            yield delta_ac(i)
    else:
        raise ArsError(f"no sentence family for {prop.value}; use UN, UNR or AC")


_FAMILY_CACHE: dict[tuple[PropertyName, int], tuple[CompiledFormula, ...]] = {}


def check_bounded_gfop(ars: Ars, family) -> bool:
    """Evaluate the family's sentences with parameters ``0 .. n_nodes``.

    Repetition-free reductions and conversions on ``n`` nodes have fewer than
    ``n`` steps, so this bound decides the property on finite systems.
    """
    prop = PropertyName.parse(family)
    key = (prop, ars.n_nodes)
    compiled = _FAMILY_CACHE.get(key)
    if compiled is None:
        compiled = tuple(CompiledFormula(f) for f in gfop_family(prop, ars.n_nodes))
        _FAMILY_CACHE[key] = compiled
    return all(f(ars) for f in compiled)
