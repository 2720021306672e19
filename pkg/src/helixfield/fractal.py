"""Three-line vertex taxonomy and the recursive self-generation tree.

A tree starts from one vertex with three open edges.  In TH mode each
generation terminates every open W-edge with a new WWW vertex, which in
turn exposes two new open W-edges.  After ``d`` generations a TH tree has
``3 * 2**d`` open edges and ``3 * 2**d - 2`` vertices.  DH-mode trees do
not grow: the Abelian field carries no self-coupling vertex.

JSON schema (``export_tree(tree, "json")``)::

    {
      "mode": "TH" | "DH",
      "generations": int,
      "growth_blocked": bool,
      "nodes": [{"id": int, "kind": "CC_A"|"CC_W"|"WWW", "depth": int, "label": str}],
      "edges": [{"source": int, "target": int | null, "type": "c"|"W"|"A"}]
    }

``target: null`` marks an open edge.  Nodes are listed in id order, edges
in creation order.
"""
from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

OPEN = None


class VertexKind(str, enum.Enum):
    CC_A = "CC_A"  # two innovation lines + one Abelian communication line
    CC_W = "CC_W"  # two innovation lines + one W line
    WWW = "WWW"  # three W lines (self-interaction)


class Mode(str, enum.Enum):
    DH = "DH"
    TH = "TH"


class Node(NamedTuple):
    id: int
    kind: VertexKind
    depth: int
    label: str = ""


class Edge(NamedTuple):
    source: int
    target: Optional[int]
    type: str


EDGE_TYPES = ("c", "W", "A")


@dataclass(frozen=True)
class VertexTree:
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    mode: Mode
    generations: int = 0
    growth_blocked: bool = False

    def __post_init__(self):
        validate(self)

    def open_edges(self) -> list[Edge]:
        return [e for e in self.edges if e.target is OPEN]


class TreeStats(NamedTuple):
    nodes: int
    open_edges: int
    nodes_per_depth: list[int]
    branching_factor: Optional[float]


def validate(tree: VertexTree) -> None:
    ids = [n.id for n in tree.nodes]
    if ids != list(range(len(ids))):
        raise ValueError("node ids must be 0..n-1 in order")
    slots = Counter()
    for e in tree.edges:
        if e.type not in EDGE_TYPES:
            raise ValueError(f"unknown edge type {e.type!r}")
        if e.source not in range(len(ids)) or (e.target is not OPEN and e.target not in range(len(ids))):
            raise ValueError(f"edge {e} references a missing node")
        slots[e.source] += 1
        if e.target is not OPEN:
            slots[e.target] += 1
    for n in tree.nodes:
        if slots[n.id] != 3:
            raise ValueError(f"node {n.id} has {slots[n.id]} incident edges, expected 3")
        if n.kind == VertexKind.WWW and tree.mode != Mode.TH:
            raise ValueError("WWW vertices only occur in TH trees")
        if n.kind == VertexKind.CC_A and tree.mode != Mode.DH:
            raise ValueError("CC_A vertices only occur in DH trees")


def seed_tree(mode) -> VertexTree:
    mode = Mode(mode)
    if mode == Mode.TH:
        node = Node(0, VertexKind.WWW, 0, "seed")
        edges = tuple(Edge(0, OPEN, "W") for _ in range(3))
    else:
        node = Node(0, VertexKind.CC_A, 0, "seed")
        edges = (Edge(0, OPEN, "c"), Edge(0, OPEN, "c"), Edge(0, OPEN, "A"))
    return VertexTree((node,), edges, mode)


def grow(tree: VertexTree, generations: int) -> VertexTree:
    """Substitute a WWW vertex at the end of every open W-edge, ``generations`` times.

    New ids are handed out breadth-first in the order open edges were
    created.  Grown vertices are labelled ``virtual-technology``.
    """
    if generations < 0:
        raise ValueError("generations must be >= 0")
    if tree.mode == Mode.DH:
        return replace(tree, growth_blocked=True) if generations else tree
    nodes = list(tree.nodes)
    edges = list(tree.edges)
    for _ in range(generations):
        new_edges = []
        for i, e in enumerate(edges):
            if e.target is OPEN and e.type == "W":
                child = Node(len(nodes), VertexKind.WWW, nodes[e.source].depth + 1, "virtual-technology")
                nodes.append(child)
                edges[i] = e._replace(target=child.id)
                new_edges += [Edge(child.id, OPEN, "W"), Edge(child.id, OPEN, "W")]
        edges += new_edges
    return VertexTree(tuple(nodes), tuple(edges), tree.mode, tree.generations + generations, tree.growth_blocked)


def tree_stats(tree: VertexTree) -> TreeStats:
    depth_counts = Counter(n.depth for n in tree.nodes)
    per_depth = [depth_counts[d] for d in range(max(depth_counts) + 1)]
    branching = per_depth[-1] / per_depth[-2] if len(per_depth) > 1 else None
    return TreeStats(len(tree.nodes), len(tree.open_edges()), per_depth, branching)


def canonical_form(tree: VertexTree, root: int = 0, parent: Optional[int] = None) -> str:
    """AHU-style string for the typed tree hanging from ``root``.

    Open edges appear as ``o<type>`` leaves.  Two rooted typed trees are
    isomorphic iff their canonical forms match.
    """
    kinds = {n.id: n.kind.value for n in tree.nodes}
    children = {n.id: [] for n in tree.nodes}
    for e in tree.edges:
        if e.target is OPEN:
            children[e.source].append((None, e.type))
        else:
            children[e.source].append((e.target, e.type))
            children[e.target].append((e.source, e.type))

    def enc(v, par):
        parts = []
        for c, t in children[v]:
            if c is None:
                parts.append(f"o{t}")
            elif c != par:
                parts.append(f"{t}:{enc(c, v)}")
        return f"{kinds[v]}(" + ",".join(sorted(parts)) + ")"

    return enc(root, parent)


def subtree_form(tree: VertexTree, node_id: int) -> str:
    """Canonical form of the branch below ``node_id``, its parent edge cut off."""
    parent = next(
        (e.source for e in tree.edges if e.target == node_id),
        None,
    )
    return canonical_form(tree, node_id, parent)


def export_tree(tree: VertexTree, fmt: str) -> str:
    fmt = fmt.lower()
    if fmt == "json":
        return _to_json(tree)
    if fmt == "dot":
        return _to_dot(tree)
    raise ValueError(f"unknown export format {fmt!r} (expected 'dot' or 'json')")


def _to_json(tree: VertexTree) -> str:
    doc = {
        "mode": tree.mode.value,
        "generations": tree.generations,
        "growth_blocked": tree.growth_blocked,
        "nodes": [{"id": n.id, "kind": n.kind.value, "depth": n.depth, "label": n.label} for n in tree.nodes],
        "edges": [{"source": e.source, "target": e.target, "type": e.type} for e in tree.edges],
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def import_tree(text: str) -> VertexTree:
    doc = json.loads(text)
    nodes = tuple(Node(int(n["id"]), VertexKind(n["kind"]), int(n["depth"]), n.get("label", "")) for n in doc["nodes"])
    edges = tuple(Edge(int(e["source"]), None if e["target"] is None else int(e["target"]), e["type"]) for e in doc["edges"])
    return VertexTree(nodes, edges, Mode(doc["mode"]), int(doc["generations"]), bool(doc["growth_blocked"]))


def _to_dot(tree: VertexTree) -> str:
    lines = [f"graph {tree.mode.value}_tree {{"]
    lines.append(f'  graph [mode="{tree.mode.value}", generations={tree.generations}];')
    for n in tree.nodes:
        lines.append(f'  n{n.id} [label="{n.kind.value}", kind="{n.kind.value}", depth={n.depth}, note="{n.label}"];')
    open_count = 0
    for e in tree.edges:
        if e.target is OPEN:
            lines.append(f'  open{open_count} [shape=point, label=""];')
            lines.append(f'  n{e.source} -- open{open_count} [type="{e.type}", style=dashed];')
            open_count += 1
        else:
            lines.append(f'  n{e.source} -- n{e.target} [type="{e.type}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
