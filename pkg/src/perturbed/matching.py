"""Maximum-cardinality matching in general graphs.

Blossom-style augmenting search seeded by a greedy matching.  When a search
from a free vertex fails, the whole alternating tree it grew is frustrated:
no future augmenting path can enter it, so all of its vertices are retired.
That keeps the total work near O(V * E) even on graphs with many free
vertices, which matters because the downstream partition is only correct for
a genuinely maximum matching.
"""

from __future__ import annotations

from .graphs import StaticGraph, canon


class Matching:
    """Pairwise-disjoint edge set with O(1) partner lookup."""

    __slots__ = ("n", "partner",)

    def __init__(self, n: int, partner: list[int]):
        self.n = n
        self.partner = partner  # partner[v] = w or -1

    @classmethod
    def from_edges(cls, n: int, edges) -> "Matching":
        partner = [-1] * n
        for u, v in edges:
            if partner[u] != -1 or partner[v] != -1 or u == v:
                raise ValueError(f"edges are not a matching at ({u},{v})")
            partner[u] = v
            partner[v] = u
        return cls(n, partner)

    def __len__(self) -> int:
        return sum(1 for v in self.partner if v != -1) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(v, w) for v, w in enumerate(self.partner) if v < w]

    def covers(self, v: int) -> bool:
        return self.partner[v] != -1

    def coverage(self) -> int:
        return sum(1 for v in self.partner if v != -1)

    def __call__(self, v: int) -> int:
        """M(v): the partner of a covered vertex."""
        w = self.partner[v]
        if w == -1:
            raise KeyError(f"vertex {v} is not covered")
        return w

    def validate_in(self, g: StaticGraph) -> None:
        for v, w in self.edges():
            assert g.has_edge(v, w), f"matching edge ({v},{w}) not in graph"


def maximum_matching(g: StaticGraph) -> Matching:
    n = g.n
    mate = [-1] * n

    for v in range(n):  # greedy warm start
        if mate[v] == -1:
            for w in g.neighbors(v):
                if mate[w] == -1:
                    mate[v] = w
                    mate[w] = v
                    break

    dead = [False] * n
    base = list(range(n))
    parent = [-1] * n
    outer = [False] * n

    def lca(a: int, b: int) -> int:
        on_path = [False] * n
        x = base[a]
        while True:
            on_path[x] = True
            if mate[x] == -1:
                break
            x = base[parent[mate[x]]]
        y = base[b]
        while not on_path[y]:
            y = base[parent[mate[y]]]
        return y

    def mark_path(v: int, b: int, child: int, in_blossom: list[bool]) -> None:
        while base[v] != b:
            in_blossom[base[v]] = True
            in_blossom[base[mate[v]]] = True
            parent[v] = child
            child = mate[v]
            v = parent[mate[v]]

    def find_and_augment(root: int) -> bool:
        for i in range(n):
            base[i] = i
            parent[i] = -1
            outer[i] = False
        outer[root] = True
        queue = [root]
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            for to in g.neighbors(v):
                if dead[to]:
                    continue
                if base[v] == base[to] or mate[v] == to:
                    continue
                if to == root or (mate[to] != -1 and parent[mate[to]] != -1):
                    # odd cycle: contract the blossom to its base
                    cur = lca(v, to)
                    in_blossom = [False] * n
                    mark_path(v, cur, to, in_blossom)
                    mark_path(to, cur, v, in_blossom)
                    for i in range(n):
                        if in_blossom[base[i]]:
                            base[i] = cur
                            if not outer[i]:
                                outer[i] = True
                                queue.append(i)
                elif parent[to] == -1:
                    parent[to] = v
                    if mate[to] == -1:
                        # augment: flip matched edges back to the root
                        while to != -1:
                            pv = parent[to]
                            nxt = mate[pv]
                            mate[to] = pv
                            mate[pv] = to
                            to = nxt
                        return True
                    outer[mate[to]] = True
                    queue.append(mate[to])
        # frustrated: retire the whole tree
        for i in range(n):
            if outer[i] or parent[i] != -1:
                dead[i] = True
        return False

    for v in range(n):
        if mate[v] == -1 and not dead[v] and g.degree(v) > 0:
            find_and_augment(v)
    return Matching(n, mate)


def brute_force_matching_size(g: StaticGraph) -> int:
    """Exhaustive maximum matching size (oracle; tiny graphs only)."""
    edges = list(g.edges())

    def rec(i: int, used: set) -> int:
        best = 0
        for j in range(i, len(edges)):
            u, v = edges[j]
            if u not in used and v not in used:
                used.add(u)
                used.add(v)
                best = max(best, 1 + rec(j + 1, used))
                used.discard(u)
                used.discard(v)
        return best

    return rec(0, set())


def matching_edge_set(m: Matching) -> set[tuple[int, int]]:
    return {canon(u, v) for u, v in m.edges()}
