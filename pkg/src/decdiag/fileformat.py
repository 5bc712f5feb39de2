"""Plain-text format for rewrite systems.

::

    ars 4
    # comments start with '#'
    -> 0 1
    -> 0 2 1        # optional trailing label
    ~> 1 3          # second relation, commutation files only

Two structured comments make printing and parsing round-trip for systems
the edge lines alone cannot pin down: ``# labels: k`` records the label count
and ``# kind: comm`` marks a commutation system without ``~>`` steps.
"""

from __future__ import annotations

import re
import sys as _sys
from typing import Iterable, Union

from .ars import Ars, CommArs
from .decreasing import LabelledArs, LabelledCommArs
from .errors import ArsError, ParseError

__all__ = ["System", "format_system", "parse_system", "read_system", "write_system"]

System = Union[Ars, CommArs, LabelledArs, LabelledCommArs]

_META = re.compile(r"#\s*(labels|kind)\s*:\s*(\S+)\s*$")


def _nat(token: str, line: int, what: str) -> int:
    if not token.isdigit() or not token.isascii():
        raise ParseError(f"{what} must be a natural number, got {token!r}", line=line)
    return int(token)


def parse_system(text: str) -> System:
    """Parse the text format into the matching system type."""
    n_nodes = None
    label_count = None
    comm_kind = False
    edges = {"->": [], "~>": []}
    labelled = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        meta = _META.match(raw.strip())
        if meta:
            key, value = meta.groups()
            if key == "labels":
                label_count = _nat(value, lineno, "label count")
            elif value == "comm":
                comm_kind = True
            elif value != "plain":
                raise ParseError(f"unknown kind {value!r}", line=lineno)
            continue
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        tokens = body.split()
        if n_nodes is None:
            if tokens[0] != "ars" or len(tokens) != 2:
                raise ParseError("expected header 'ars <n_nodes>'", line=lineno)
            n_nodes = _nat(tokens[1], lineno, "node count")
            if n_nodes < 1:
                raise ParseError("an ARS needs at least one node", line=lineno)
            continue
        rel = tokens[0]
        if rel not in edges:
            raise ParseError(f"expected an edge line starting with '->' or '~>', got {rel!r}",
                             line=lineno)
        if len(tokens) not in (3, 4):
            raise ParseError("edge line needs '<src> <dst>' and an optional label", line=lineno)
        src = _nat(tokens[1], lineno, "source")
        dst = _nat(tokens[2], lineno, "target")
        for v in (src, dst):
            if v >= n_nodes:
                raise ParseError(f"node {v} out of range for {n_nodes} nodes", line=lineno)
        has_label = len(tokens) == 4
        if labelled is None:
            labelled = has_label
        elif labelled != has_label:
            raise ParseError("labels must be given on all edges or on none", line=lineno)
        edge = (src, dst, _nat(tokens[3], lineno, "label")) if has_label else (src, dst)
        if edge in edges[rel]:
            raise ParseError(f"duplicate edge {rel} {src} {dst}", line=lineno)
        edges[rel].append(edge)
    if n_nodes is None:
        raise ParseError("missing header 'ars <n_nodes>'", line=None)
    if labelled is None:
        labelled = label_count is not None

    is_comm = comm_kind or bool(edges["~>"])
    try:
        if not labelled:
            if is_comm:
                return CommArs(n_nodes, edges["->"], edges["~>"])
            return Ars(n_nodes, edges["->"])
        all_edges = edges["->"] + edges["~>"]
        top = max((lab for _, _, lab in all_edges), default=-1)
        k = label_count if label_count is not None else top + 1
        if top >= k:
            raise ParseError(f"label {top} not below declared label count {k}")
        multi = any(
            len({(s, d) for s, d, _ in rel_edges}) < len(rel_edges) for rel_edges in edges.values()
        )
        if is_comm:
            return LabelledCommArs(n_nodes, k, edges["->"], edges["~>"], multi_label=multi)
        return LabelledArs(n_nodes, k, edges["->"], multi_label=multi)
    except ParseError:
        raise
    except ArsError as exc:
        raise ParseError(str(exc)) from None


def format_system(system: System, comments: Iterable[str] = ()) -> str:
    """Print ``system`` in the text format; ``comments`` go after the header."""
    lines = [f"ars {system.n_nodes}"]
    lines.extend(f"# {c}" if c else "#" for c in comments)
    if isinstance(system, (LabelledArs, LabelledCommArs)):
        lines.append(f"# labels: {system.label_count}")
    if isinstance(system, Ars):
        lines.extend(f"-> {s} {d}" for s, d in sorted(system.edges))
    elif isinstance(system, LabelledArs):
        lines.extend(f"-> {s} {d} {lab}" for s, d, lab in sorted(system.edges))
    elif isinstance(system, CommArs):
        if not system.snd_edges:
            lines.append("# kind: comm")
        lines.extend(f"-> {s} {d}" for s, d in sorted(system.fwd_edges))
        lines.extend(f"~> {s} {d}" for s, d in sorted(system.snd_edges))
    elif isinstance(system, LabelledCommArs):
        if not system.snd_edges:
            lines.append("# kind: comm")
        lines.extend(f"-> {s} {d} {lab}" for s, d, lab in sorted(system.fwd_edges))
        lines.extend(f"~> {s} {d} {lab}" for s, d, lab in sorted(system.snd_edges))
    else:
        raise ArsError(f"cannot print {type(system).__name__}")
    return "\n".join(lines) + "\n"


def read_system(path: str) -> System:
    """Read a system from ``path``; ``-`` reads standard input."""
    if path == "-":
        return parse_system(_sys.stdin.read())
    with open(path, encoding="utf-8") as fh:
        return parse_system(fh.read())


def write_system(system: System, path: str, comments: Iterable[str] = ()) -> None:
    """Write ``system`` to ``path``; ``-`` writes standard output."""
    text = format_system(system, comments)
    if path == "-":
        _sys.stdout.write(text)
        _sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
