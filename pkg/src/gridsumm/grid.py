"""The grid: a directed acyclic graph of messages connected by relations.

Nodes are messages, edges are relation instances. The grid is stored as a
flat edge list; the source-by-time lattice view is recovered in the DOT
export through rank groups per reference time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from .domain import Message, SpecError
from .sdr import DIACHRONIC, SYNCHRONIC, RelationInstance


class GridError(Exception):
    """Grid invariant breach: dangling endpoint, cycle, or bad edge."""


@dataclass(frozen=True)
class Grid:
    nodes: dict[str, Message]
    edges: tuple[RelationInstance, ...]


def _edge_label(edge: RelationInstance) -> str:
    return f"{edge.spec}:{edge.from_id}->{edge.to_id}"


def _dangling_violations(
    nodes: Mapping[str, Message], edges: Iterable[RelationInstance]
) -> list[str]:
    return [
        f"edge {_edge_label(edge)}: dangling endpoint"
        for edge in edges
        if edge.from_id not in nodes or edge.to_id not in nodes
    ]


def _admissibility_violations(
    nodes: Mapping[str, Message], edges: Iterable[RelationInstance]
) -> list[str]:
    violations: list[str] = []
    for edge in edges:
        if edge.from_id not in nodes or edge.to_id not in nodes:
            continue
        label = _edge_label(edge)
        a, b = nodes[edge.from_id], nodes[edge.to_id]
        if edge.rel_type == SYNCHRONIC:
            if a.ref_time != b.ref_time:
                violations.append(f"edge {label}: synchronic endpoints differ in ref_time")
            if a.source == b.source:
                violations.append(f"edge {label}: synchronic endpoints share a source")
            elif a.source > b.source:
                violations.append(
                    f"edge {label}: synchronic edge against lexicographic source order"
                )
        elif edge.rel_type == DIACHRONIC:
            if a.source != b.source:
                violations.append(f"edge {label}: diachronic endpoints differ in source")
            if a.ref_time >= b.ref_time:
                violations.append(
                    f"edge {label}: diachronic edge must increase ref_time"
                )
        else:
            violations.append(f"edge {label}: unknown relation type {edge.rel_type!r}")
    return violations


def _find_cycle(
    nodes: Mapping[str, Message], edges: Iterable[RelationInstance]
) -> list[str] | None:
    """Kahn's algorithm; returns one cycle if the graph is not a DAG."""
    successors: dict[str, list[str]] = {node: [] for node in nodes}
    indegree: dict[str, int] = {node: 0 for node in nodes}
    for edge in edges:
        if edge.from_id not in nodes or edge.to_id not in nodes:
            continue  # dangling edges are reported separately
        successors[edge.from_id].append(edge.to_id)
        indegree[edge.to_id] += 1
    queue = sorted(node for node, degree in indegree.items() if degree == 0)
    seen = 0
    while queue:
        node = queue.pop()
        seen += 1
        for nxt in successors[node]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                queue.append(nxt)
    if seen == len(nodes):
        return None
    # walk the residual graph until a node repeats, then cut out the loop
    remaining = {node for node, degree in indegree.items() if degree > 0}
    node = min(remaining)
    path: list[str] = []
    while node not in path:
        path.append(node)
        node = min(n for n in successors[node] if n in remaining)
    return path[path.index(node):] + [node]


def build_grid(
    messages: Iterable[Message], relations: Iterable[RelationInstance]
) -> Grid:
    """Assemble and validate a grid; raises GridError on any violation.

    Checked in order: duplicate node ids, dangling endpoints, cycles, then
    per-edge admissibility.
    """
    nodes: dict[str, Message] = {}
    for message in messages:
        if message.id in nodes:
            raise GridError(f"duplicate message id: {message.id!r}")
        nodes[message.id] = message
    edges = tuple(relations)
    for check in (_dangling_violations, _cycle_violations, _admissibility_violations):
        violations = check(nodes, edges)
        if violations:
            raise GridError(violations[0])
    return Grid(nodes, edges)


def _cycle_violations(
    nodes: Mapping[str, Message], edges: Iterable[RelationInstance]
) -> list[str]:
    cycle = _find_cycle(nodes, edges)
    return [] if cycle is None else ["cycle: " + " -> ".join(cycle)]


def check_grid(grid: Grid) -> list[str]:
    """All invariant violations of an already-built grid; empty iff valid."""
    violations = _dangling_violations(grid.nodes, grid.edges)
    if not violations:
        violations.extend(_cycle_violations(grid.nodes, grid.edges))
    violations.extend(_admissibility_violations(grid.nodes, grid.edges))
    return violations


def _message_document(message: Message) -> dict:
    return {
        "id": message.id,
        "type": message.type,
        "args": list(message.args),
        "source": message.source,
        "pub_time": message.pub_time,
        "ref_time": message.ref_time,
        "doc_id": message.doc_id,
        "token_length": message.token_length,
    }


def grid_document(grid: Grid) -> dict:
    return {
        "nodes": [_message_document(grid.nodes[i]) for i in sorted(grid.nodes)],
        "edges": [
            {"spec": e.spec, "type": e.rel_type, "from": e.from_id, "to": e.to_id}
            for e in sorted(grid.edges, key=lambda e: (e.spec, e.from_id, e.to_id))
        ],
    }


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dot(grid: Grid) -> str:
    lines = ["digraph grid {"]
    if grid.nodes:
        lines.append("  rankdir=LR;")
        for node_id in sorted(grid.nodes):
            message = grid.nodes[node_id]
            label = (
                f"{message.type}({','.join(message.args)})"
                f"@{message.source}/t={message.ref_time}"
            )
            lines.append(f"  {_dot_quote(node_id)} [label={_dot_quote(label)}];")
        by_time: dict[int, list[str]] = {}
        for node_id, message in grid.nodes.items():
            by_time.setdefault(message.ref_time, []).append(node_id)
        for ref_time in sorted(by_time):
            ids = " ".join(f"{_dot_quote(i)};" for i in sorted(by_time[ref_time]))
            lines.append(f"  {{ rank=same; {ids} }}")
        for edge in sorted(grid.edges, key=lambda e: (e.spec, e.from_id, e.to_id)):
            style = ", style=dashed" if edge.rel_type == SYNCHRONIC else ""
            lines.append(
                f"  {_dot_quote(edge.from_id)} -> {_dot_quote(edge.to_id)} "
                f"[label={_dot_quote(edge.spec)}{style}];"
            )
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_grid(grid: Grid, format: str = "json") -> str:
    """Serialize to Graphviz DOT or JSON; byte-stable for identical grids."""
    if format == "dot":
        return _dot(grid)
    if format == "json":
        return json.dumps(grid_document(grid), sort_keys=True, indent=2) + "\n"
    raise ValueError(f"unknown export format: {format!r}")


def load_grid(document: str | dict) -> Grid:
    """Load a JSON grid dump, re-validating all grid invariants."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise SpecError(
                f"grid parse error at line {e.lineno} column {e.colno}: {e.msg}"
            ) from None
    if not isinstance(document, dict):
        raise SpecError("grid document must be a JSON object")
    messages = []
    for node in document.get("nodes", []):
        try:
            messages.append(
                Message(
                    id=node["id"],
                    type=node["type"],
                    args=tuple(node["args"]),
                    source=node["source"],
                    pub_time=node["pub_time"],
                    ref_time=node["ref_time"],
                    doc_id=node["doc_id"],
                    token_length=node["token_length"],
                )
            )
        except (KeyError, TypeError):
            raise SpecError(f"malformed grid node: {node!r}") from None
    edges = []
    for edge in document.get("edges", []):
        try:
            edges.append(
                RelationInstance(edge["spec"], edge["type"], edge["from"], edge["to"])
            )
        except (KeyError, TypeError):
            raise SpecError(f"malformed grid edge: {edge!r}") from None
    return build_grid(messages, edges)
