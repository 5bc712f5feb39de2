"""Graphviz DOT export."""

from __future__ import annotations

from typing import Optional, Sequence

from .ars import Ars, CommArs
from .decreasing import LabelledArs, LabelledCommArs

__all__ = ["export_dot"]


def _edge(s, d, style, label):
    attrs = []
    if style:
        attrs.append(f"style={style}")
    if label is not None:
        attrs.append(f'label="{label}"')
    suffix = f" [{', '.join(attrs)}]" if attrs else ""
    return f"  n{s} -> n{d}{suffix};"


def export_dot(system, names: Optional[Sequence[str]] = None) -> str:
    """DOT digraph: solid edges for ``->``, dashed for ``~>``.

    Labelled systems put the label on each edge. ``names`` optionally gives a
    display label per node; nodes are always emitted in index order.
    """
    lines = ["digraph ars {"]
    for v in range(system.n_nodes):
        text = names[v] if names is not None else str(v)
        lines.append(f'  n{v} [label="{text}"];')
    if isinstance(system, Ars):
        lines.extend(_edge(s, d, None, None) for s, d in sorted(system.edges))
    elif isinstance(system, LabelledArs):
        lines.extend(_edge(s, d, None, lab) for s, d, lab in sorted(system.edges))
    elif isinstance(system, CommArs):
        lines.extend(_edge(s, d, None, None) for s, d in sorted(system.fwd_edges))
        lines.extend(_edge(s, d, "dashed", None) for s, d in sorted(system.snd_edges))
    elif isinstance(system, LabelledCommArs):
        lines.extend(_edge(s, d, None, lab) for s, d, lab in sorted(system.fwd_edges))
        lines.extend(_edge(s, d, "dashed", lab) for s, d, lab in sorted(system.snd_edges))
    else:
        raise TypeError(f"cannot export {type(system).__name__}")
    lines.append("}")
    return "\n".join(lines) + "\n"
