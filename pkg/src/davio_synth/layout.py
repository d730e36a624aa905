"""Physical connectivity graphs: triangular, square grid and heavy-hex patches."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import networkx as nx

from .errors import DavioError


class UnknownNodeError(DavioError, KeyError):
    pass


class LayoutKind(str, Enum):
    TRIANGULAR = "triangular"
    SQUARE = "square"
    HEAVY_HEX = "heavy-hex"


@dataclass(frozen=True)
class LayoutGraph:
    """Undirected coupling graph.  Node ``i`` sits at ``coords[i]``."""

    kind: LayoutKind
    coords: tuple[tuple[int, int], ...]
    edges: frozenset[tuple[int, int]]
    _adj: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", LayoutKind(self.kind))
        n = len(self.coords)
        normalized = set()
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"self-loop on node {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a}, {b}) outside {n} nodes")
            normalized.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(normalized))
        adj: dict[int, set[int]] = {i: set() for i in range(n)}
        for a, b in normalized:
            adj[a].add(b)
            adj[b].add(a)
        object.__setattr__(self, "_adj", adj)
        if n and not nx.is_connected(self.to_networkx()):
            raise ValueError("layout graph is not connected")

    @property
    def n_nodes(self) -> int:
        return len(self.coords)

    @property
    def nodes(self) -> range:
        return range(len(self.coords))

    def _check(self, node: int) -> None:
        if not (isinstance(node, int) and 0 <= node < len(self.coords)):
            raise UnknownNodeError(node)

    def neighbors(self, node: int) -> frozenset[int]:
        self._check(node)
        return frozenset(self._adj[node])

    def degree(self, node: int) -> int:
        self._check(node)
        return len(self._adj[node])

    @cached_property
    def _by_coord(self) -> dict[tuple[int, int], int]:
        return {xy: i for i, xy in enumerate(self.coords)}

    def node_at(self, x: int, y: int) -> int:
        try:
            return self._by_coord[(x, y)]
        except KeyError:
            raise UnknownNodeError((x, y)) from None

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        for i, (x, y) in enumerate(self.coords):
            g.add_node(i, x=x, y=y)
        g.add_edges_from(self.edges)
        return g

    def triangles(self) -> list[tuple[int, int, int]]:
        out = []
        for a, b in sorted(self.edges):
            for c in sorted(self._adj[a] & self._adj[b]):
                if c > b:
                    out.append((a, b, c))
        return out

    def interior_nodes(self) -> list[int]:
        """Nodes strictly inside the bounding box of the patch."""
        xs = [x for x, _ in self.coords]
        ys = [y for _, y in self.coords]
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
        return [i for i, (x, y) in enumerate(self.coords) if x0 < x < x1 and y0 < y < y1]


def are_adjacent(g: LayoutGraph, a: int, b: int) -> bool:
    g._check(a)
    g._check(b)
    return b in g._adj[a]


def _grid_ids(rows: int, width: int) -> tuple[tuple[int, int], ...]:
    return tuple((x, y) for y in range(rows) for x in range(width))


def triangular_layout(rows: int, row_width: int) -> LayoutGraph:
    """Triangular lattice with odd rows shifted half a step to the right.

    Node ``(x, y)`` has id ``y * row_width + x``.  An even row meets the rows
    above and below at columns ``x - 1`` and ``x``, an odd row at ``x`` and
    ``x + 1``.
    """
    if rows < 1 or row_width < 1:
        raise ValueError("rows and row_width must be at least 1")
    coords = _grid_ids(rows, row_width)
    edges = set()
    for y in range(rows):
        for x in range(row_width):
            i = y * row_width + x
            if x + 1 < row_width:
                edges.add((i, i + 1))
            if y + 1 < rows:
                for dx in ((-1, 0) if y % 2 == 0 else (0, 1)):
                    if 0 <= x + dx < row_width:
                        edges.add((i, (y + 1) * row_width + x + dx))
    return LayoutGraph(LayoutKind.TRIANGULAR, coords, frozenset(edges))


def square_layout(width: int, height: int) -> LayoutGraph:
    if width < 2 or height < 2:
        raise ValueError("width and height must be at least 2")
    coords = _grid_ids(height, width)
    edges = set()
    for y in range(height):
        for x in range(width):
            i = y * width + x
            if x + 1 < width:
                edges.add((i, i + 1))
            if y + 1 < height:
                edges.add((i, i + width))
    return LayoutGraph(LayoutKind.SQUARE, coords, frozenset(edges))


def heavy_hex_layout(cells_x: int, cells_y: int) -> LayoutGraph:
    """Brick-wall hexagons with one extra qubit on every hexagon side.

    Hexagon ``(i, j)`` spans brick rows ``j`` and ``j + 1`` and brick columns
    ``2i + j % 2`` to ``2i + j % 2 + 2``.  Brick vertex ``(r, c)`` is drawn at
    ``(2c, 2r)`` and each side qubit at the midpoint of its side.
    """
    if cells_x < 1 or cells_y < 1:
        raise ValueError("cells_x and cells_y must be at least 1")
    brick_edges = set()
    for j in range(cells_y):
        for i in range(cells_x):
            c0 = 2 * i + (j % 2)
            for r in (j, j + 1):
                brick_edges.add(((r, c0), (r, c0 + 1)))
                brick_edges.add(((r, c0 + 1), (r, c0 + 2)))
            brick_edges.add(((j, c0), (j + 1, c0)))
            brick_edges.add(((j, c0 + 2), (j + 1, c0 + 2)))
    points = set()
    edges_xy = []
    for (r1, c1), (r2, c2) in brick_edges:
        p, q = (2 * c1, 2 * r1), (2 * c2, 2 * r2)
        m = ((p[0] + q[0]) // 2, (p[1] + q[1]) // 2)
        points.update((p, q, m))
        edges_xy.append((p, m))
        edges_xy.append((m, q))
    coords = tuple(sorted(points, key=lambda xy: (xy[1], xy[0])))
    ids = {xy: i for i, xy in enumerate(coords)}
    edges = frozenset((ids[a], ids[b]) for a, b in edges_xy)
    return LayoutGraph(LayoutKind.HEAVY_HEX, coords, edges)


# serialization

def layout_to_dict(g: LayoutGraph) -> dict:
    return {
        "kind": g.kind.value,
        "nodes": [{"id": i, "x": x, "y": y} for i, (x, y) in enumerate(g.coords)],
        "edges": [list(e) for e in sorted(g.edges)],
    }


def layout_from_dict(data: dict) -> LayoutGraph:
    nodes = sorted(data["nodes"], key=lambda d: d["id"])
    if [d["id"] for d in nodes] != list(range(len(nodes))):
        raise ValueError("node ids must be 0..N-1")
    coords = tuple((int(d["x"]), int(d["y"])) for d in nodes)
    return LayoutGraph(LayoutKind(data["kind"]), coords, frozenset(tuple(e) for e in data["edges"]))


def layout_to_json(g: LayoutGraph) -> str:
    return json.dumps(layout_to_dict(g), indent=2)


def layout_from_json(text: str) -> LayoutGraph:
    return layout_from_dict(json.loads(text))


def layout_to_dot(g: LayoutGraph, labels: dict[int, str] | None = None) -> str:
    lines = [f'graph "{g.kind.value}" {{', "  node [shape=circle];"]
    for i, (x, y) in enumerate(g.coords):
        label = labels.get(i, str(i)) if labels else str(i)
        # y grows downward in our coordinates, upward in DOT
        lines.append(f'  {i} [label="{label}", pos="{x},{-y}!"];')
    for a, b in sorted(g.edges):
        lines.append(f"  {a} -- {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
