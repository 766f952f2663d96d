"""Static simple graphs, multigraphs, and the shared edge-list text format.

The text format is one header line ``n m`` followed by m lines ``u v`` with
0-based endpoints and u < v, UTF-8 with LF line endings.  Every module uses
it for graph I/O.
"""

from __future__ import annotations

import io

from .errors import BadParams


def canon(u: int, v: int) -> tuple[int, int]:
    """Canonical (min, max) form of an undirected edge."""
    return (u, v) if u < v else (v, u)


class StaticGraph:
    """Immutable simple graph on vertex set [0, n).

    Adjacency is stored as sorted lists plus per-vertex sets for O(1)
    membership tests.  Instances are safe to share between threads and
    processes once built.
    """

    __slots__ = ("n", "edge_count", "_adj", "_sets")

    def __init__(self, n: int, edges=()):
        if n < 0:
            raise BadParams("vertex count must be non-negative")
        adj = [[] for _ in range(n)]
        seen = set()
        for u, v in edges:
            if u == v:
                raise BadParams(f"loop at vertex {u} not allowed in a simple graph")
            if not (0 <= u < n and 0 <= v < n):
                raise BadParams(f"edge ({u},{v}) out of range for n={n}")
            e = canon(u, v)
            if e in seen:
                raise BadParams(f"duplicate edge {e}")
            seen.add(e)
            adj[u].append(v)
            adj[v].append(u)
        for lst in adj:
            lst.sort()
        self.n = n
        self.edge_count = len(seen)
        self._adj = adj
        self._sets = [set(lst) for lst in adj]

    def neighbors(self, v: int) -> list[int]:
        return self._adj[v]

    def neighbor_set(self, v: int) -> set[int]:
        return self._sets[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._sets[u]

    def min_degree(self) -> int:
        if self.n == 0:
            return 0
        return min(len(lst) for lst in self._adj)

    def max_degree(self) -> int:
        if self.n == 0:
            return 0
        return max(len(lst) for lst in self._adj)

    def edges(self):
        """Yield edges as (u, v) with u < v, in lexicographic order."""
        for u in range(self.n):
            for v in self._adj[u]:
                if u < v:
                    yield (u, v)

    def union(self, other: "StaticGraph") -> "StaticGraph":
        if self.n != other.n:
            raise BadParams("union requires identical vertex sets")
        es = set(self.edges())
        es.update(other.edges())
        return StaticGraph(self.n, sorted(es))

    def __eq__(self, other):
        return (
            isinstance(other, StaticGraph)
            and self.n == other.n
            and self._adj == other._adj
        )

    def __hash__(self):
        return hash((self.n, self.edge_count))

    def __repr__(self):
        return f"StaticGraph(n={self.n}, m={self.edge_count})"


class Multigraph:
    """Graph with loops and parallel edges; loops add 2 to the degree."""

    __slots__ = ("n", "edges", "_deg")

    def __init__(self, n: int, edges=()):
        self.n = n
        self.edges = [canon(u, v) for u, v in edges]
        deg = [0] * n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1  # a loop hits this twice via u == v
        self._deg = deg

    def degree(self, v: int) -> int:
        return self._deg[v]

    def is_simple(self) -> bool:
        seen = set()
        for u, v in self.edges:
            if u == v or (u, v) in seen:
                return False
            seen.add((u, v))
        return True

    def to_simple(self) -> StaticGraph:
        if not self.is_simple():
            raise BadParams("multigraph has loops or parallel edges")
        return StaticGraph(self.n, self.edges)

    def __repr__(self):
        return f"Multigraph(n={self.n}, m={len(self.edges)})"


def format_edge_list(g: StaticGraph) -> str:
    lines = [f"{g.n} {g.edge_count}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> StaticGraph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise BadParams("empty edge-list input")
    head = lines[0].split()
    if len(head) != 2:
        raise BadParams(f"bad header line: {lines[0]!r}")
    n, m = int(head[0]), int(head[1])
    if len(lines) - 1 != m:
        raise BadParams(f"header promises {m} edges, found {len(lines) - 1}")
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise BadParams(f"bad edge line: {ln!r}")
        u, v = int(parts[0]), int(parts[1])
        if not u < v:
            raise BadParams(f"edge line must satisfy u < v: {ln!r}")
        edges.append((u, v))
    return StaticGraph(n, edges)


def write_edge_list(g: StaticGraph, path) -> None:
    with io.open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_edge_list(g))


def read_edge_list(path) -> StaticGraph:
    with io.open(path, "r", encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def complete_graph(n: int) -> StaticGraph:
    return StaticGraph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def complete_bipartite(a: int, b: int) -> StaticGraph:
    """K_{a,b} with part A = [0, a) and part B = [a, a+b)."""
    return StaticGraph(a + b, [(u, v) for u in range(a) for v in range(a, a + b)])
