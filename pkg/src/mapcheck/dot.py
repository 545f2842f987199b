"""Graphviz rendering of execution witnesses."""

from __future__ import annotations

from typing import Optional

from .executions import Execution

EDGE_STYLE = {
    "sb": 'color="black"',
    "po": 'color="black"',
    "rf": 'color="red"',
    "rfe": 'color="red"',
    "sw": 'color="darkgreen", style="bold"',
    "hb": 'color="gray40", style="dashed"',
    "mo": 'color="blue"',
    "co": 'color="blue"',
    "fr": 'color="orange"',
    "sc_hb": 'color="purple", penwidth=2',
    "sc_mo": 'color="navy", penwidth=2',
    "sc_fr": 'color="darkred", penwidth=2',
    "ppo": 'color="brown"',
    "lwfence": 'color="cyan4"',
    "ffence": 'color="magenta"',
    "prop": 'color="goldenrod", style="dashed"',
}
_DEFAULT_STYLE = 'color="gray"'


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_dot(ex: Execution, relations: Optional[dict] = None, title: Optional[str] = None) -> str:
    """DOT digraph of ``ex`` with one styled edge class per named relation.

    Nodes are labelled ``id: kind loc=val [order]``; read values come from
    the execution's reads-from.  Program events are clustered per thread.
    """
    relations = relations or {}
    ev = ex.events
    values = ex.read_values
    lines = [f"digraph {_quote(title or ex.test.name)} {{", "  node [shape=box, fontname=\"monospace\"];"]

    inits = [e for e in ev if e.is_init]
    if inits:
        lines.append('  subgraph cluster_init {')
        lines.append('    label="init";')
        for e in inits:
            lines.append(f"    {_node(e, values)}")
        lines.append("  }")
    for ti, th in enumerate(ex.test.threads):
        lines.append(f"  subgraph {_quote('cluster_' + th.tid)} {{")
        lines.append(f"    label={_quote(th.tid)};")
        for e in ev:
            if e.thread == ti and not e.is_init:
                lines.append(f"    {_node(e, values)}")
        lines.append("  }")

    for name in relations:
        style = EDGE_STYLE.get(name, _DEFAULT_STYLE)
        for a, b in relations[name]:
            lines.append(
                f"  {_quote(ev[a].label)} -> {_quote(ev[b].label)} [label={_quote(name)}, {style}];"
            )
    lines.append("}")
    return "\n".join(lines) + "\n"


def _node(e, values) -> str:
    text = f"{e.label}: {e.describe(values.get(e.id))}"
    return f"{_quote(e.label)} [label={_quote(text)}];"
