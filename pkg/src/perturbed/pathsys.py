"""Dynamic unions of vertex-disjoint paths and cycles (max degree 2).

This is the mutable graph that both cycle-building pipelines edit step by
step.  Components are tracked incrementally: merging relabels the smaller
side, splitting walks both sides in lockstep and relabels the side that
terminates first, so long runs of edits stay near O(n log n) instead of the
quadratic cost of rebuilding the index after each edit.

Vertices can be deactivated ("deleted", the callers' S set) only once
isolated; degenerate length-0 paths are first-class components and a vertex
leaves the system only through :meth:`PathCycleSystem.deactivate`.
"""

from __future__ import annotations

import math

from .errors import (
    DegreeViolation,
    InactiveVertex,
    MissingEdge,
    NonIsolated,
    ShortCycle,
    SpliceError,
)
from .graphs import canon

PATH = "path"
CYCLE = "cycle"
ISOLATED = "isolated"


class _Comp:
    __slots__ = ("kind", "size", "ends", "rep")

    def __init__(self, kind, size, ends, rep):
        self.kind = kind  # PATH or CYCLE; degenerate paths have size 1
        self.size = size
        self.ends = ends  # (a, b) for paths, None for cycles
        self.rep = rep  # any member vertex


class PathCycleSystem:
    """Single-owner mutable system; never share one instance across threads."""

    def __init__(self, n: int):
        self.n = n
        self._nbr = [[] for _ in range(n)]
        self._active = [True] * n
        self._comp_id = list(range(n))
        self._comps = {v: _Comp(PATH, 1, (v, v), v) for v in range(n)}
        self._next_id = n
        self.n_paths = n  # degenerate paths included
        self.n_cycles = 0

    # -- queries ---------------------------------------------------------

    def is_active(self, v: int) -> bool:
        return self._active[v]

    def degree(self, v: int) -> int:
        return len(self._nbr[v])

    def neighbors(self, v: int) -> list[int]:
        return self._nbr[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._nbr[u]

    def active_count(self) -> int:
        return sum(self._active)

    def component_id(self, v: int) -> int:
        if not self._active[v]:
            raise InactiveVertex(f"vertex {v} is deactivated")
        return self._comp_id[v]

    def component_kind(self, v: int) -> str:
        c = self._comps[self.component_id(v)]
        if c.kind == CYCLE:
            return CYCLE
        return ISOLATED if c.size == 1 else PATH

    def component_size(self, v: int) -> int:
        return self._comps[self.component_id(v)].size

    def component_ends(self, v: int):
        """Endpoints of v's path component ((x, x) when degenerate)."""
        c = self._comps[self.component_id(v)]
        if c.kind == CYCLE:
            return None
        return c.ends

    def components(self):
        """Yield (component id, kind, size, ends)."""
        for cid, c in self._comps.items():
            yield cid, c.kind, c.size, c.ends

    def component_count(self) -> int:
        return len(self._comps)

    def path_ids(self) -> list[int]:
        return [cid for cid, c in self._comps.items() if c.kind == PATH]

    def cycle_ids(self) -> list[int]:
        return [cid for cid, c in self._comps.items() if c.kind == CYCLE]

    def component_vertices(self, cid: int) -> list[int]:
        """Members of a component, in traversal order along it."""
        c = self._comps[cid]
        if c.kind == PATH:
            start = c.ends[0]
        else:
            start = c.rep
        out = [start]
        prev = -1
        cur = start
        while True:
            nxt = None
            for w in self._nbr[cur]:
                if w != prev:
                    nxt = w
                    break
            # both neighbors equal prev only on a 2-vertex path start
            if nxt is None or nxt == start:
                break
            out.append(nxt)
            if len(out) == c.size:
                break
            prev, cur = cur, nxt
        return out

    def edges(self):
        for u in range(self.n):
            for v in self._nbr[u]:
                if u < v:
                    yield (u, v)

    def dist_along(self, u: int, v: int):
        """Edge distance inside a component; math.inf across components."""
        if not (self._active[u] and self._active[v]):
            return math.inf
        if self._comp_id[u] != self._comp_id[v]:
            return math.inf
        if u == v:
            return 0
        c = self._comps[self._comp_id[u]]
        # walk from u in both available directions simultaneously
        best = None
        for first in self._nbr[u]:
            d = 1
            prev, cur = u, first
            while cur != v:
                nxt = None
                for w in self._nbr[cur]:
                    if w != prev:
                        nxt = w
                        break
                if nxt is None:
                    d = None
                    break
                prev, cur = cur, nxt
                d += 1
                if d > c.size:
                    d = None
                    break
            if d is not None:
                best = d if best is None else min(best, d)
        assert best is not None
        return best

    # -- mutation --------------------------------------------------------

    def _fresh_id(self) -> int:
        cid = self._next_id
        self._next_id += 1
        return cid

    def insert_edge(self, u: int, v: int) -> None:
        if u == v:
            raise DegreeViolation("loops not allowed")
        if not (self._active[u] and self._active[v]):
            raise InactiveVertex(f"edge ({u},{v}) touches a deactivated vertex")
        if len(self._nbr[u]) >= 2:
            raise DegreeViolation(f"vertex {u} already has degree 2")
        if len(self._nbr[v]) >= 2:
            raise DegreeViolation(f"vertex {v} already has degree 2")
        cu, cv = self._comp_id[u], self._comp_id[v]
        if cu == cv:
            comp = self._comps[cu]
            if comp.size < 3:
                raise ShortCycle(f"closing ({u},{v}) would make a {comp.size}-cycle")
            comp.kind = CYCLE
            comp.ends = None
            comp.rep = u
            self.n_paths -= 1
            self.n_cycles += 1
        else:
            a, b = self._comps[cu], self._comps[cv]
            # endpoints of the merged path: the far ends of u and v
            fu = self._other_end(a, u)
            fv = self._other_end(b, v)
            if a.size >= b.size:
                keep, drop, drop_id = a, b, cv
            else:
                keep, drop, drop_id = b, a, cu
            for w in self.component_vertices(drop_id):
                self._comp_id[w] = self._comp_id[u] if keep is a else self._comp_id[v]
            keep.size = a.size + b.size
            keep.ends = (fu, fv)
            keep.rep = fu
            del self._comps[drop_id]
            self.n_paths -= 1
        self._nbr[u].append(v)
        self._nbr[v].append(u)

    @staticmethod
    def _other_end(comp: _Comp, x: int) -> int:
        if comp.size == 1:
            return x
        a, b = comp.ends
        return b if x == a else a

    def delete_edge(self, u: int, v: int) -> None:
        if v not in self._nbr[u]:
            raise MissingEdge(f"edge ({u},{v}) not present")
        self._nbr[u].remove(v)
        self._nbr[v].remove(u)
        cid = self._comp_id[u]
        comp = self._comps[cid]
        if comp.kind == CYCLE:
            comp.kind = PATH
            comp.ends = (u, v)
            comp.rep = u
            self.n_cycles -= 1
            self.n_paths += 1
            return
        # path split: walk away from the cut on both sides in lockstep and
        # relabel whichever side terminates first
        side_u = self._walk_from(u)
        side_v = self._walk_from(v)
        small = None
        while small is None:
            su = next(side_u, None)
            if su is None:
                small = "u"
                break
            sv = next(side_v, None)
            if sv is None:
                small = "v"
        if small == "u":
            head, other_head = u, v
        else:
            head, other_head = v, u
        piece = list(self._walk_iter(head))
        new_id = self._fresh_id()
        for w in piece:
            self._comp_id[w] = new_id
        far = piece[-1]
        self._comps[new_id] = _Comp(PATH, len(piece), (head, far), head)
        old_a, old_b = comp.ends
        kept_far = old_b if far == old_a or head == old_a else old_a
        if comp.size == 2:
            kept_far = other_head
        comp.size -= len(piece)
        comp.ends = (other_head, kept_far) if comp.size > 1 else (other_head, other_head)
        comp.rep = other_head
        self.n_paths += 1

    def _walk_from(self, start: int):
        return self._walk_iter(start)

    def _walk_iter(self, start: int):
        yield start
        prev, cur = -1, start
        while True:
            nxt = None
            for w in self._nbr[cur]:
                if w != prev:
                    nxt = w
                    break
            if nxt is None:
                return
            yield nxt
            prev, cur = cur, nxt

    def deactivate(self, v: int) -> None:
        """Remove an isolated vertex from the system (callers record it in S)."""
        if not self._active[v]:
            raise InactiveVertex(f"vertex {v} already deactivated")
        if self._nbr[v]:
            raise NonIsolated(f"vertex {v} has degree {len(self._nbr[v])}")
        del self._comps[self._comp_id[v]]
        self._comp_id[v] = -1
        self._active[v] = False
        self.n_paths -= 1

    def splice(self, remove, add):
        """Apply removals then insertions atomically.

        Returns (path_delta, cycle_delta).  On any violated precondition the
        system is rolled back to its prior edge set and a SpliceError is
        raised; component labels after rollback may be fresh but the
        structure is unchanged.
        """
        remove = [canon(u, v) for u, v in remove]
        add = [canon(u, v) for u, v in add]
        p0, c0 = self.n_paths, self.n_cycles
        for u, v in remove:
            if v not in self._nbr[u]:
                raise SpliceError(f"cannot remove missing edge ({u},{v})")
        done_rm = []
        done_add = []
        try:
            for u, v in remove:
                self.delete_edge(u, v)
                done_rm.append((u, v))
            for u, v in add:
                self.insert_edge(u, v)
                done_add.append((u, v))
        except (DegreeViolation, InactiveVertex, ShortCycle, MissingEdge) as exc:
            for u, v in reversed(done_add):
                self.delete_edge(u, v)
            for u, v in reversed(done_rm):
                self.insert_edge(u, v)
            raise SpliceError(f"splice rolled back: {exc}") from exc
        return self.n_paths - p0, self.n_cycles - c0

    # -- integrity -------------------------------------------------------

    def check(self) -> None:
        """Full consistency audit against a from-scratch rebuild (test hook)."""
        for v in range(self.n):
            assert len(self._nbr[v]) <= 2, f"degree violation at {v}"
            if not self._active[v]:
                assert not self._nbr[v], f"inactive vertex {v} has edges"
                continue
            for w in self._nbr[v]:
                assert v in self._nbr[w], f"asymmetric edge ({v},{w})"
        rebuilt = rebuild_index(self)
        mine = index_snapshot(self)
        assert rebuilt == mine, f"component index drift:\n{rebuilt}\nvs\n{mine}"


def rebuild_index(sys: PathCycleSystem):
    """Recompute the component index from raw adjacency (oracle)."""
    seen = [False] * sys.n
    comps = []
    for v in range(sys.n):
        if seen[v] or not sys.is_active(v):
            continue
        stack = [v]
        seen[v] = True
        members = []
        while stack:
            x = stack.pop()
            members.append(x)
            for w in sys.neighbors(x):
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        degs = sorted(len(sys.neighbors(x)) for x in members)
        if members and degs[0] == 2:
            comps.append((CYCLE, frozenset(members), None))
        else:
            ends = frozenset(x for x in members if len(sys.neighbors(x)) <= 1)
            comps.append((PATH, frozenset(members), ends))
    return sorted(comps, key=lambda t: (t[0], sorted(t[1])))


def index_snapshot(sys: PathCycleSystem):
    """The incremental index, normalized the same way as rebuild_index."""
    comps = []
    for cid, kind, size, ends in sys.components():
        members = frozenset(sys.component_vertices(cid))
        assert len(members) == size, f"size drift in component {cid}"
        if kind == CYCLE:
            comps.append((CYCLE, members, None))
        else:
            e = frozenset(ends) if size > 1 else frozenset([ends[0]])
            comps.append((PATH, members, e))
    return sorted(comps, key=lambda t: (t[0], sorted(t[1])))


def from_edges(n: int, edges) -> PathCycleSystem:
    sys = PathCycleSystem(n)
    for u, v in edges:
        sys.insert_edge(u, v)
    return sys
