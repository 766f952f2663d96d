"""Cycles of every length in a deficient host plus a random perfect matching.

The start graph is the random matching G union the cross matching M from the
partition (B1-B2 and C1-C2 pairs), a disjoint union of alternating paths and
cycles.  Six editing passes turn it into one long cycle while retiring some
vertices into S:

1. drop edges lying in both matchings;
2. build a protected path P whose reserved vertices (from R) each form a
   triangle with a dedicated G-edge of P;
3. cut all edges at the exceptional set and the reserve;
4. make sure P's component is not a cycle;
5. open every remaining cycle without ever closing a new one;
6. join all paths into a single spanning path, then close it.

Throughout, D is the set of G-edges that are spent or protected, and K is
the set of B1 vertices whose matching edge is gone; both are updated by the
mutation helpers so the bookkeeping cannot be forgotten.  Extraction then
reuses the window machinery of the 2-factor pipeline for short and middle
lengths and splices retired vertices into fresh triangles for long lengths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import (
    ExtractionFailed,
    PipelineError,
    PreconditionFailed,
    StepFailed,
)
from .graphs import StaticGraph, canon
from .instances import PerturbedInstance
from .matching import Matching, maximum_matching
from .partition import MatchingPartition, build_partition, check_partition, partition_ok
from .pathsys import CYCLE, PATH, PathCycleSystem
from .results import WitnessResult
from .rng import pick, shuffled
from .twofactor import (
    AbsorberSet,
    AbsorbingPath,
    CycleHost,
    _closest_pair,
    _disjoint_by_position,
    _expand,
    _window,
    pancyclic_witness as twofactor_witness,
)
from .verify import validate_cycle

NON_HAMILTONIAN_CERTIFIED = "NON_HAMILTONIAN_CERTIFIED"
INCONCLUSIVE = "INCONCLUSIVE"


def reserve_size(alpha: float, eta: float) -> int:
    """Number of reserved absorber vertices, ceil(3 / (eta * alpha^2))."""
    return max(2, int(math.ceil(3.0 / (eta * alpha * alpha))))


@dataclass
class SixStepResult:
    order: list  # the almost-spanning cycle, in cyclic order
    S: set
    D: set
    K: set
    path: AbsorbingPath
    absorbers: AbsorberSet
    trace: dict
    flags: list = field(default_factory=list)


class _Run:
    """Mutable state for one six-step run; single-owner."""

    def __init__(self, inst: PerturbedInstance, part: MatchingPartition,
                 eps: float, eta: float, rng, strict: bool):
        if inst.d != 1:
            raise PreconditionFailed("this pipeline needs a 1-regular G")
        self.inst = inst
        self.part = part
        self.H = inst.H
        self.n = inst.n
        self.eps = eps
        self.eta = eta
        self.rng = rng
        self.strict = strict
        self.side = part.side
        self.mpart = part.cross.partner  # cross-matching partner or -1
        self.S: set = set()
        self.D: set = set()
        self.K: set = set()
        self.sys = PathCycleSystem(self.n)
        self.flags: list = []
        self.trace = {"steps": {}, "cases": {}, "warnings": list(part.warnings)}
        self.t = reserve_size(inst.alpha, eta)
        self.log2n = math.log(self.n) ** 2 if self.n > 1 else 1.0
        self.u_list: list = []
        self.units: list = []
        self.connectors: list = []
        self.p_seq: list = []
        self.p_edges: list = []
        self.snapshot = None  # adjacency lists frozen at the start of step 2

    # -- mutation helpers with D/K triggers -------------------------------

    def ban(self, u, v):
        e = canon(u, v)
        self.D.add(e)
        if self.mpart[u] == v:
            if self.side[u] == "B1":
                self.K.add(u)
            if self.side[v] == "B1":
                self.K.add(v)

    def delete(self, u, v):
        self.sys.delete_edge(u, v)
        self.ban(u, v)

    def add(self, u, v):
        self.sys.insert_edge(u, v)

    def retire(self, v):
        assert self.sys.degree(v) == 0, f"retiring non-isolated vertex {v}"
        self.sys.deactivate(v)
        self.S.add(v)

    def tally(self, case):
        self.trace["cases"][case] = self.trace["cases"].get(case, 0) + 1

    def ledger(self, step, cap_mult):
        sizes = {"S": len(self.S), "D": len(self.D), "K": len(self.K)}
        self.trace["steps"][step] = sizes
        cap = cap_mult * self.log2n
        over = {k: v for k, v in sizes.items() if v > cap}
        if over:
            msg = f"step {step}: ledger over {cap_mult}*ln^2(n)={cap:.0f}: {over}"
            if self.strict:
                raise StepFailed(step, "ledger", msg)
            self.flags.append(msg)

    # -- availability helpers ---------------------------------------------

    def g_pool(self, x, y, restrict=None, extra_banned=frozenset(), exclude=frozenset()):
        """Live G-edges (z, z') with z in N_H(x), z' in N_H(y), not banned."""
        H = self.H
        ny = H.neighbor_set(y)
        out = []
        gp = self.inst.g_partner
        for z in H.neighbors(x):
            if z in exclude or (restrict is not None and z not in restrict):
                continue
            zp = gp(z)
            if zp < 0 or zp in exclude or zp == z:
                continue
            if zp not in ny or (restrict is not None and zp not in restrict):
                continue
            e = canon(z, zp)
            if e in self.D or e in extra_banned:
                continue
            if not self.sys.has_edge(z, zp):
                continue
            out.append((z, zp))
        return out

    def pool_both_sides(self, x, restrict=None):
        """Live G-edges with both endpoints among N_H(x) (and `restrict`)."""
        es = self.g_pool(x, x, restrict=restrict)
        return sorted({canon(z, zp) for z, zp in es})

    def other_neighbor(self, v, not_this, step, case):
        for w in self.sys.neighbors(v):
            if w != not_this:
                return w
        raise StepFailed(step, case, f"vertex {v} has no second neighbor")

    def fresh_b1(self, anchor, avoid, step, case):
        """A B1 vertex adjacent (in H) to `anchor`, with live matching edge,
        clear of the protected sets and of `avoid`."""
        cands = []
        blocked = self.K
        for w in self.H.neighbors(anchor):
            if self.side[w] == "B1" and w not in blocked and w not in avoid:
                if self.sys.is_active(w) and self.sys.has_edge(w, self.mpart[w]):
                    cands.append(w)
        if not cands:
            raise StepFailed(step, case, f"no fresh B1 neighbor for {anchor}")
        return pick(self.rng, cands)

    def guard_neighbors(self):
        """Current neighbors of the exceptional set and the reserve."""
        out = set()
        for v in self.part.A:
            if self.sys.is_active(v):
                out.update(self.sys.neighbors(v))
        for v in self.u_list:
            if self.sys.is_active(v):
                out.update(self.sys.neighbors(v))
        return out

    # -- step 0: the start graph ------------------------------------------

    def build_start(self):
        g_edges = set(self.inst.g_edge_set())
        for u, v in self.part.cross.edges():
            g_edges.add(canon(u, v))
        for u, v in sorted(g_edges):
            self.sys.insert_edge(u, v)
        comp_cap = self.log2n + (len(self.part.R) + len(self.part.A)) / 2.0 + 64
        if self.sys.component_count() > comp_cap:
            self.flags.append(
                f"start graph has {self.sys.component_count()} components"
                f" (cap {comp_cap:.0f})"
            )

    # -- step 1: drop doubled edges ---------------------------------------

    def step1(self):
        for u, v in self.part.cross.edges():
            if canon(u, v) in self.inst.g_edge_set() and self.sys.has_edge(u, v):
                self.delete(u, v)
                self.retire(u)
                self.retire(v)
                self.tally("1.double-edge")
        self.ledger("1", 2)
        self.assert_alternation("1")
        for pid in self.sys.path_ids():
            a, b = self.sys.component_ends(pid)
            for e in (a, b):
                if self.side[e] not in ("A", "R"):
                    raise StepFailed("1", "endpoints", f"path end {e} in {self.side[e]}")

    def assert_alternation(self, step):
        g_edges = self.inst.g_edge_set()
        for cid, kind, size, _ends in list(self.sys.components()):
            if size < 2:
                continue
            vs = self.sys.component_vertices(cid)
            m = len(vs) if kind == CYCLE else len(vs) - 1
            prev = None
            for i in range(m):
                e = canon(vs[i], vs[(i + 1) % len(vs)])
                cur = e in g_edges
                if prev is not None and cur == prev:
                    raise StepFailed(step, "alternation",
                                     f"consecutive same-type edges at {e}")
                prev = cur

    # -- step 2: the protected path ---------------------------------------

    def step2(self):
        rng = self.rng
        self.snapshot = [tuple(self.sys.neighbors(v)) for v in range(self.n)]
        r_free = sorted(self.part.R - self.S)
        if len(r_free) < self.t:
            raise StepFailed("2", "reserve", f"need {self.t} reserve vertices, "
                                             f"only {len(r_free)} leftover available")
        idx = rng.choice(len(r_free), size=self.t, replace=False)
        self.u_list = [r_free[int(i)] for i in idx]
        u_set = set(self.u_list)

        b1 = self.part.B1
        for i, u in enumerate(self.u_list):
            cands = self.pool_both_sides(u, restrict=b1)
            if not cands:
                raise StepFailed("2", "unit-edge", f"no unit edge for reserve {u}")
            x, y = pick(rng, cands)
            self.units.append((x, y))
            self.ban(x, y)  # protect; the edge stays in the graph

        x1 = self.units[0][0]
        yt = self.units[-1][1]
        u_e = [v for e in self.units for v in e]
        for v in u_e:
            if v in (x1, yt):
                continue
            w = self.mpart[v]
            if w != -1 and self.sys.has_edge(v, w):
                self.delete(v, w)
        self.K.add(x1)
        self.K.add(yt)

        w_set = set(u_e) | {self.mpart[x1], self.mpart[yt]}
        for i in range(self.t - 1):
            y_i = self.units[i][1]
            x_next = self.units[i + 1][0]
            w, z = self.pick_connector(y_i, x_next, w_set, u_set, i)
            self.connectors.append((w, z))
            self.ban(w, z)
            self.fixups(w, z, i)
            self.add(y_i, w)
            self.add(z, x_next)
            w_set.add(w)
            w_set.add(z)

        seq = [self.mpart[x1]]
        for i in range(self.t):
            seq.extend(self.units[i])
            if i < self.t - 1:
                seq.extend(self.connectors[i])
        seq.append(self.mpart[yt])
        assert len(seq) == len(set(seq)) == 4 * self.t + 2
        self.p_seq = seq
        self.p_edges = [canon(seq[i], seq[i + 1]) for i in range(len(seq) - 1)]
        for u, v in self.p_edges:
            if not self.sys.has_edge(u, v):
                raise StepFailed("2", "path-integrity", f"path edge ({u},{v}) missing")
        for e in (self.mpart[x1], self.mpart[yt]):
            if self.side[e] != "B2":
                raise StepFailed("2", "path-ends", f"path end {e} in {self.side[e]}")
            gp = self.inst.g_partner(e)
            if gp >= 0:
                self.ban(e, gp)  # protect the path ends' G-edges too
        self.ledger("2", 3)

    def pick_connector(self, y_i, x_next, w_set, u_set, i):
        H = self.H
        target = H.neighbor_set(x_next)
        gp = self.inst.g_partner
        cands = []
        for w in H.neighbors(y_i):
            if w in u_set:
                continue
            z = gp(w)
            if z < 0 or z in u_set or z not in target:
                continue
            e = canon(w, z)
            if e in self.D or not self.sys.has_edge(w, z):
                continue
            if self.ball({w, z}, self.sys_adj, 4) & w_set:
                continue  # too close to the path built so far, live graph
            snap_ball = self.ball({w, z}, self.snapshot, 4)
            if (self.ball({w, z}, self.snapshot, 1) & w_set) or (snap_ball & self.K):
                continue  # too close in the frozen start graph
            cands.append((w, z))
        if not cands:
            raise StepFailed("2", "connector", f"no connector for unit {i}")
        return pick(self.rng, cands)

    def sys_adj(self, v):
        return self.sys.neighbors(v)

    def ball(self, starts, adj, radius):
        """Vertices within `radius` edges of `starts`; adj is a callable or list."""
        get = adj if callable(adj) else adj.__getitem__
        seen = set(starts)
        frontier = list(starts)
        for _ in range(radius):
            nxt = []
            for v in frontier:
                for w in get(v):
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        return seen

    def fixups(self, w_i, z_i, i):
        """Make room so the connector's endpoints can join the path."""
        cid = self.sys.component_id(w_i)
        comp_kind = self.sys.component_kind(w_i)
        size = self.sys.component_size(w_i)
        if comp_kind == CYCLE and size <= 8:
            vs = self.sys.component_vertices(cid)
            keep = canon(w_i, z_i)
            for a, b in _cycle_edges(vs):
                if canon(a, b) != keep:
                    self.delete(a, b)
            for v in vs:
                if v not in (w_i, z_i):
                    self.retire(v)
            self.tally("2.short-cycle")
            return
        for x in (w_i, z_i):
            s = self.side[x]
            if s in ("A", "R"):
                self.tally("2.fix-A-R")
                continue
            if s == "B1":
                y = self.mpart[x]
                if not self.sys.has_edge(x, y):
                    raise StepFailed("2", "fix-B1", f"matching edge at {x} missing")
                self.delete(x, y)
                self.tally("2.fix-B1")
                continue
            if s == "C1":
                y = self.mpart[x]
                if not self.sys.has_edge(x, y):
                    raise StepFailed("2", "fix-C1", f"matching edge at {x} missing")
                zstar = self.other_neighbor(y, x, "2", "fix-C1")
                avoid = self.guard_neighbors() | {w_i, z_i, zstar}
                z = self.fresh_b1(y, avoid, "2", "fix-C1")
                self.delete(x, y)
                self.delete(z, self.mpart[z])
                self.add(y, z)
                self.tally("2.fix-C1")
                continue
            # s in B2 | C2
            y = self.mpart[x]
            if not self.sys.has_edge(x, y):
                raise StepFailed("2", "fix-B2C2", f"matching edge at {x} missing")
            z = self.other_neighbor(y, x, "2", "fix-B2C2")
            zs = self.side[z]
            if zs in ("A", "R"):
                self.delete(x, y)
                self.delete(y, z)
                self.retire(y)
                self.tally("2.fix-into-A-R")
            elif zs == "B2":
                zp = self.other_neighbor(z, y, "2", "fix-into-B2")
                if self.mpart[z] != zp:
                    raise StepFailed("2", "fix-into-B2",
                                     f"expected matching edge ({z},{zp})")
                self.delete(x, y)
                self.delete(y, z)
                self.retire(y)
                self.K.add(zp)  # protect; the matching edge itself stays
                self.tally("2.fix-into-B2")
            elif zs == "B1":
                zp = self.mpart[z]
                if not self.sys.has_edge(z, zp):
                    raise StepFailed("2", "fix-into-B1", f"matching edge at {z} missing")
                self.delete(x, y)
                self.delete(y, z)
                self.delete(z, zp)
                self.retire(y)
                self.retire(z)
                self.tally("2.fix-into-B1")
            elif zs == "C2":
                zstar = self.other_neighbor(z, y, "2", "fix-into-C2")
                avoid = self.guard_neighbors() | {w_i, z_i, zstar}
                zp = self.fresh_b1(z, avoid, "2", "fix-into-C2")
                self.delete(x, y)
                self.delete(y, z)
                self.delete(zp, self.mpart[zp])
                self.add(z, zp)
                self.retire(y)
                self.tally("2.fix-into-C2")
            else:  # zs == "C1"
                zp = self.mpart[z]
                if not self.sys.has_edge(z, zp):
                    raise StepFailed("2", "fix-into-C1", f"matching edge at {z} missing")
                zstar = self.other_neighbor(zp, z, "2", "fix-into-C1")
                avoid = self.guard_neighbors() | {w_i, z_i, zstar}
                z2 = self.fresh_b1(zp, avoid, "2", "fix-into-C1")
                self.delete(x, y)
                self.delete(y, z)
                self.delete(z, zp)
                self.delete(z2, self.mpart[z2])
                self.add(zp, z2)
                self.retire(y)
                self.retire(z)
                self.tally("2.fix-into-C1")

    # -- step 3: clear the exceptional set and the reserve -----------------

    def step3(self):
        p_set = set(self.p_seq)
        x1 = self.units[0][0]
        yt = self.units[-1][1]
        p_ends = {self.mpart[x1], self.mpart[yt]}
        targets = sorted((self.part.A | set(self.u_list)) - p_set)
        for x in targets:
            if not self.sys.is_active(x):
                continue
            for y in list(self.sys.neighbors(x)):
                if not self.sys.has_edge(x, y):
                    continue
                ys = self.side[y]
                if y in p_set and y not in p_ends:
                    raise StepFailed("3", "path-contact",
                                     f"edge ({x},{y}) touches the protected path")
                if ys in ("A", "B2") or y in self.u_list:
                    self.delete(x, y)
                elif ys == "R":
                    self.delete(x, y)
                    self.retire(y)
                elif ys == "B1":
                    self.delete(x, y)
                    if self.sys.has_edge(y, self.mpart[y]):
                        self.delete(y, self.mpart[y])
                    self.retire(y)
                elif ys == "C2":
                    zstar = self.other_neighbor(y, x, "3", "C2")
                    z = self.fresh_b1(y, {zstar}, "3", "C2")
                    self.delete(x, y)
                    self.delete(z, self.mpart[z])
                    self.add(y, z)
                else:  # ys == "C1"
                    z = self.other_neighbor(y, x, "3", "C1")
                    if self.mpart[y] != z:
                        raise StepFailed("3", "C1", f"({y},{z}) is not a matching edge")
                    zstar = self.other_neighbor(z, y, "3", "C1")
                    zp = self.fresh_b1(z, {zstar}, "3", "C1")
                    self.delete(x, y)
                    self.delete(y, z)
                    self.delete(zp, self.mpart[zp])
                    self.add(z, zp)
                    self.retire(y)
        for x in targets:
            if self.sys.is_active(x):
                if self.sys.degree(x) != 0:
                    raise StepFailed("3", "cleanup", f"vertex {x} still has edges")
                self.retire(x)
        self.ledger("3", 4)
        self.assert_endpoints("3", ("B2", "R"))
        for u in self.u_list:
            assert not self.sys.is_active(u)
        self.assert_pattern("3")

    def assert_endpoints(self, step, allowed):
        for pid in self.sys.path_ids():
            a, b = self.sys.component_ends(pid)
            for e in (a, b):
                if self.side[e] not in allowed:
                    raise StepFailed(step, "endpoints",
                                     f"path end {e} lies in {self.side[e]}")

    def assert_pattern(self, step):
        """No 3 consecutive same-class vertices outside the protected path."""
        group1 = {"A", "R", "B2", "C2"}
        p_edges = set(self.p_edges)
        for cid, kind, size, _ends in list(self.sys.components()):
            if size < 3:
                continue
            vs = self.sys.component_vertices(cid)
            m = len(vs) if kind == CYCLE else len(vs) - 1
            run = 1
            prev_class = None
            for i in range(m):
                e = canon(vs[i], vs[(i + 1) % len(vs)])
                cls = self.side[vs[(i + 1) % len(vs)]] in group1
                if e in p_edges:
                    run, prev_class = 1, None
                    continue
                if prev_class is None:
                    run = 2 if (self.side[vs[i]] in group1) == cls else 1
                else:
                    run = run + 1 if cls == prev_class else 1
                prev_class = cls
                if run > 2 + 1:
                    raise StepFailed(step, "pattern",
                                     f"{run} consecutive same-class vertices near {vs[i]}")

    # -- step 4: P must not lie in a cycle ---------------------------------

    def step4(self):
        x1 = self.units[0][0]
        cid = self.sys.component_id(x1)
        if self.sys.component_kind(cid and x1 or x1) != CYCLE:
            kind = self.sys.component_kind(x1)
            if kind != CYCLE:
                self.finish_step4()
                return
        vs = self.sys.component_vertices(cid)
        if len(vs) <= len(self.p_edges) + 14:
            keep = set(self.p_edges)
            for a, b in _cycle_edges(vs):
                if canon(a, b) not in keep:
                    self.delete(a, b)
            p_set = set(self.p_seq)
            for v in vs:
                if v not in p_set:
                    self.retire(v)
            self.tally("4.small-cycle")
            self.finish_step4()
            return
        pos = {v: i for i, v in enumerate(vs)}
        L = len(vs)
        yt = self.units[-1][1]
        for xend, inward in ((self.mpart[x1], x1), (self.mpart[yt], yt)):
            i = pos[xend]
            step = 1 if vs[(i + 1) % L] != inward else -1
            arc = [xend]
            for d in range(1, 4):
                nxt = vs[(i + step * d) % L]
                arc.append(nxt)
                if self.side[nxt] in ("B2", "C2"):
                    break
            else:
                raise StepFailed("4", "trim", f"no nearby cut vertex from {xend}")
            y = arc[-1]
            for a, b in zip(arc, arc[1:]):
                self.delete(a, b)
            for v in arc[1:-1]:
                self.retire(v)
            if self.side[y] == "C2":
                z = self.fresh_b1(y, set(self.sys.neighbors(y)), "4", "trim")
                self.add(y, z)
                self.delete(z, self.mpart[z])
            self.tally("4.trim")
        self.finish_step4()

    def finish_step4(self):
        x1 = self.units[0][0]
        if self.sys.component_kind(x1) != PATH:
            raise StepFailed("4", "verify", "protected path still lies on a cycle")
        for u, v in self.p_edges:
            assert self.sys.has_edge(u, v)
        self.ledger("4", 5)
        self.assert_endpoints("4", ("B2", "R"))
        self.assert_pattern("4")
        self.balance_flags()

    def balance_flags(self):
        cap = 5 * self.log2n
        for cid in self.sys.cycle_ids():
            vs = self.sys.component_vertices(cid)
            b1 = sum(1 for v in vs if self.side[v] == "B1")
            b2 = sum(1 for v in vs if self.side[v] == "B2")
            if abs(b1 - b2) > cap:
                self.flags.append(
                    f"cycle with |B1|={b1}, |B2|={b2} drift beyond {cap:.0f}")

    # -- step 5: open every cycle ------------------------------------------

    def step5(self):
        rng = self.rng
        guard = 4 * int(self.log2n) + len(self.sys.cycle_ids()) + 64
        rounds = 0
        while True:
            cycles = self.sys.cycle_ids()
            if not cycles:
                break
            rounds += 1
            if rounds > guard:
                raise StepFailed("5", "loop", "cycle count failed to drop")
            n_before = self.sys.n_cycles
            cid = pick(rng, cycles)
            vs = self.sys.component_vertices(cid)
            L = len(vs)
            if L <= 25:
                for a, b in _cycle_edges(vs):
                    self.delete(a, b)
                for v in vs:
                    self.retire(v)
                self.tally("5.small-cycle")
            else:
                b2pos = [i for i, v in enumerate(vs) if self.side[v] == "B2"]
                pair = _close_pair_cyclic(b2pos, L, 11)
                if pair is not None:
                    self.cut_arc(vs, pair[0], pair[1])
                    self.tally("5.cut-between-B2")
                else:
                    self.reroute_cycle(vs, cid)
                    self.tally("5.reroute")
            assert self.sys.n_cycles < n_before, "a step-5 edit failed to remove a cycle"
        self.ledger("5", 105)
        self.assert_endpoints("5", ("B2", "R"))
        for u, v in self.p_edges:
            assert self.sys.has_edge(u, v)

    def cut_arc(self, vs, i, j):
        """Delete the short (i -> j) arc of the cycle `vs`, retiring its interior."""
        L = len(vs)
        fwd = (j - i) % L
        arc = [vs[(i + d) % L] for d in range(fwd + 1)]
        for a, b in zip(arc, arc[1:]):
            self.delete(a, b)
        for v in arc[1:-1]:
            self.retire(v)

    def reroute_cycle(self, vs, cid):
        """Open a cycle with no close-by B2 pair via two fresh B1 triangles."""
        L = len(vs)
        c2pos = [i for i, v in enumerate(vs) if self.side[v] == "C2"]
        triple = _close_triple_cyclic(c2pos, L, 3)
        if triple is None:
            raise StepFailed("5", "reroute", "no three nearby C2 vertices on cycle")
        cand_pairs = [(0, 1), (1, 2), (0, 2)]
        for a, b in shuffled(self.rng, cand_pairs):
            i, j = triple[a], triple[b]
            v1, v2 = vs[i], vs[j]
            got = self.claim_pair(vs, cid, i, j)
            if got is None:
                continue
            w1, w2 = got
            fwd = (j - i) % len(vs)
            arc = [vs[(i + d) % len(vs)] for d in range(fwd + 1)]
            for x, y in zip(arc, arc[1:]):
                self.delete(x, y)
            self.delete(w1, self.mpart[w1])
            self.delete(w2, self.mpart[w2])
            self.add(v1, w1)
            self.add(v2, w2)
            for v in arc[1:-1]:
                self.retire(v)
            return
        raise StepFailed("5", "reroute", "no usable fresh-triangle pair")

    def claim_pair(self, vs, cid, i, j):
        """Two fresh B1 vertices for cycle positions i, j whose matching edges
        sit in different components, both away from the cycle."""
        v1, v2 = vs[i], vs[j]
        out = []
        for v in (v1, v2):
            nbrs = set(self.sys.neighbors(v))
            cands = [
                w for w in self.H.neighbors(v)
                if self.side[w] == "B1" and w not in self.K and w not in nbrs
                and self.sys.is_active(w) and self.sys.has_edge(w, self.mpart[w])
            ]
            out.append(cands)
        off1 = [w for w in out[0] if self.sys.component_id(w) != cid]
        off2 = [w for w in out[1] if self.sys.component_id(w) != cid]
        if not off1 or not off2:
            return None
        by_comp = {}
        for w in off2:
            by_comp.setdefault(self.sys.component_id(w), w)
        for w1 in shuffled(self.rng, off1)[:40]:
            c1 = self.sys.component_id(w1)
            for c2, w2 in by_comp.items():
                if c2 != c1 and w2 != w1:
                    return w1, w2
        # same-component fallback: the two matching edges must separate them
        for w1 in off1[:20]:
            c1 = self.sys.component_id(w1)
            for w2 in off2[:20]:
                if w2 == w1 or self.sys.component_id(w2) != c1:
                    continue
                if self.sys.component_kind(w1) != PATH:
                    continue
                order = self.sys.component_vertices(c1)
                posf = {v: idx for idx, v in enumerate(order)}
                a, b = posf[w1], posf[w2]
                if a > b:
                    a, b, w1m, w2m = b, a, w2, w1
                else:
                    w1m, w2m = w1, w2
                cut1 = posf[self.mpart[w1m]] == a + 1
                cut2 = posf[self.mpart[w2m]] == b - 1
                if cut1 or cut2:
                    return w1, w2
        return None

    # -- step 6: one path, then one cycle ----------------------------------

    def step6(self):
        rng = self.rng
        b1 = self.part.B1
        guard = self.sys.n_paths + 8
        rounds = 0
        while self.sys.n_paths >= 2:
            rounds += 1
            if rounds > guard:
                raise StepFailed("6", "loop", "path count failed to drop")
            pids = self.sys.path_ids()
            i = int(rng.integers(len(pids)))
            j = int(rng.integers(len(pids) - 1))
            if j >= i:
                j += 1
            p1, p2 = pids[i], pids[j]
            e1 = self.sys.component_ends(p1)
            e2 = self.sys.component_ends(p2)
            x = pick(rng, e1)
            y = pick(rng, e2)
            pool = self.join_pool(x, y, b1)
            if not pool:
                raise StepFailed("6", "join", "no free joining edge for path ends")
            z, zp = pick(rng, pool)
            self.join(x, y, p1, p2, z, zp)
            self.tally("6.join")
        self.ledger("6", 105)
        pid = self.sys.path_ids()[0]
        assert self.sys.component_size(pid) == self.sys.active_count()
        self.assert_endpoints("6", ("B2", "R"))
        for u, v in self.p_edges:
            assert self.sys.has_edge(u, v)

    def join_pool(self, x, y, b1):
        nx = self.H.neighbor_set(x)
        ny = self.H.neighbor_set(y)
        gp = self.inst.g_partner
        out = []
        for z in self.H.neighbors(x):
            if self.side[z] != "B1" or z not in ny:
                continue
            zp = gp(z)
            if zp < 0 or self.side[zp] != "B1" or zp not in nx or zp not in ny:
                continue
            e = canon(z, zp)
            if e in self.D or e[0] != z and e[0] != zp:
                pass
            if e in self.D:
                continue
            if not self.sys.has_edge(z, zp):
                continue
            out.append(e)
        return sorted(set(out))

    def join(self, x, y, p1, p2, z, zp):
        ecomp = self.sys.component_id(z)
        if ecomp not in (p1, p2):
            self.delete(z, zp)
            self.add(x, z)
            self.add(y, zp)
            return
        anchor, other = (x, y) if ecomp == p1 else (y, x)
        order = self.sys.component_vertices(ecomp)
        if order[0] != anchor:
            order.reverse()
        posn = {v: idx for idx, v in enumerate(order)}
        if posn[z] > posn[zp]:
            z, zp = zp, z
        self.delete(z, zp)
        self.add(anchor, zp)
        self.add(other, z)

    def close_cycle(self):
        pid = self.sys.path_ids()[0]
        x, y = self.sys.component_ends(pid)
        pool = self.join_pool(x, y, self.part.B1)
        if not pool:
            raise StepFailed("6", "close", "no free closing edge")
        z, zp = pick(self.rng, pool)
        order = self.sys.component_vertices(pid)
        if order[0] != x:
            order.reverse()
        posn = {v: idx for idx, v in enumerate(order)}
        if posn[z] > posn[zp]:
            z, zp = zp, z
        self.delete(z, zp)
        self.add(x, zp)
        self.add(y, z)
        assert self.sys.n_cycles == 1 and self.sys.component_count() == 1
        for u, v in self.p_edges:
            assert self.sys.has_edge(u, v)

    # -- driver -------------------------------------------------------------

    def run(self) -> SixStepResult:
        self.build_start()
        self.step1()
        self.step2()
        self.step3()
        self.step4()
        self.step5()
        self.step6()
        self.close_cycle()
        cid = self.sys.cycle_ids()[0]
        order = self.sys.component_vertices(cid)
        assert len(order) == self.n - len(self.S)
        path = AbsorbingPath(tuple(self.p_seq), tuple(self.units),
                             tuple(self.connectors))
        return SixStepResult(
            order=order, S=set(self.S), D=set(self.D), K=set(self.K),
            path=path, absorbers=AbsorberSet(tuple(self.u_list)),
            trace=self.trace, flags=self.flags,
        )


def _cycle_edges(vs):
    L = len(vs)
    return [(vs[i], vs[(i + 1) % L]) for i in range(L)]


def _close_pair_cyclic(positions, L, cap):
    """A pair of listed positions at cyclic distance <= cap, else None."""
    k = len(positions)
    if k < 2:
        return None
    for idx in range(k):
        a = positions[idx]
        b = positions[(idx + 1) % k]
        if (b - a) % L <= cap:
            return a, b
    return None


def _close_triple_cyclic(positions, L, cap):
    """Three listed positions with consecutive cyclic gaps <= cap, else None."""
    k = len(positions)
    if k < 3:
        return None
    for idx in range(k):
        a = positions[idx]
        b = positions[(idx + 1) % k]
        c = positions[(idx + 2) % k]
        if (b - a) % L <= cap and (c - b) % L <= cap:
            return a, b, c
    return None


def run_six_steps(inst: PerturbedInstance, part: MatchingPartition,
                  eps: float = 0.1, eta: float = 0.01, rng=None,
                  strict: bool = False) -> SixStepResult:
    """Run the six editing passes; returns the almost-spanning cycle and the
    retired-set bookkeeping.  Raises StepFailed when a pass runs dry."""
    run = _Run(inst, part, eps, eta, rng, strict)
    return run.run()


# -- extraction -------------------------------------------------------------


def extract_cycle_k(inst: PerturbedInstance, result: SixStepResult, k: int, rng) -> list:
    n = inst.n
    m = len(result.S)
    L = len(result.order)
    assert L == n - m
    if not 3 <= k <= n:
        raise ExtractionFailed(k, "range", f"k must lie in [3, {n}]")
    host = _host_for(inst, result)
    if k >= L:
        return _extract_long_matching(inst, result, host, k, rng)
    p_len = host.p_hi - host.p_lo
    alpha = inst.alpha
    if k - 3 < p_len or k <= alpha * alpha * n / 10.0:
        return _extract_short_matching(inst, result, host, k, rng)
    from .twofactor import _extract_middle

    return _extract_middle(host, k, rng)


def _host_for(inst, result) -> CycleHost:
    if not hasattr(result, "_host"):
        sys_view = _OrderView(result.order)
        host = CycleHost.__new__(CycleHost)
        host.order = list(result.order)
        host.L = len(result.order)
        host.pos = {v: i for i, v in enumerate(result.order)}
        host.path = result.path
        host.absorbers = result.absorbers
        host.inst = inst
        host.banned = result.D
        host.X = frozenset()
        ppos = sorted(host.pos[v] for v in result.path.sequence)
        from .twofactor import _arc_bounds

        host.p_lo, host.p_hi = _arc_bounds(ppos, host.L)
        result._host = host
    return result._host


class _OrderView:
    def __init__(self, order):
        self.order = order


def _extract_short_matching(inst, result, host, k, rng) -> list:
    """Window plus one raw G-edge triangle; retired vertices are fair game."""
    H = inst.H
    gp = inst.g_partner
    L = host.L
    tries = min(L, 48)
    for s in [int(rng.integers(L)) for _ in range(tries)]:
        win = _window(host, s, k - 2)
        x, y = win[0], win[-1]
        wset = set(win)
        ny = H.neighbor_set(y)
        found = None
        for z in H.neighbors(x):
            if z in wset:
                continue
            zp = gp(z)
            if zp >= 0 and zp not in wset and zp in ny and zp != z:
                found = (z, zp)
                break
        if found:
            z, zp = found
            return win + [zp, z]
    raise ExtractionFailed(k, "short", "no off-window edge for any tried window")


def _extract_long_matching(inst, result, host, k, rng) -> list:
    """Splice retired vertices back in, each through its own triangle."""
    need = k - host.L
    if need == 0:
        return list(host.order)
    H = inst.H
    gp = inst.g_partner
    u_index = {u: j for j, u in enumerate(result.absorbers.vertices)}
    used = set()
    repl = {}
    quota = need
    for w in shuffled(rng, sorted(result.S)):
        if quota == 0:
            break
        if w in u_index:
            z, zp = result.path.units[u_index[w]]
            repl[canon(z, zp)] = w
            quota -= 1
            continue
        nw = H.neighbor_set(w)
        got = None
        for z in H.neighbors(w):
            if z not in host.pos:
                continue
            zp = gp(z)
            if zp < 0 or zp == z or zp not in nw or zp not in host.pos:
                continue
            e = canon(z, zp)
            if e in result.D or e in used or e in repl:
                continue
            got = e
            break
        if got is not None:
            repl[got] = w
            used.add(got)
            quota -= 1
    if quota:
        raise ExtractionFailed(k, "long", f"{quota} retired vertices lack triangles")
    out = []
    order = host.order
    for i, v in enumerate(order):
        out.append(v)
        e = canon(v, order[(i + 1) % host.L])
        if e in repl:
            out.append(repl.pop(e))
    assert len(out) == k
    return out


def pancyclic_witness_matching(inst: PerturbedInstance, rng, eps: float = 0.1,
                               eta: float = 0.01, strict: bool = False,
                               part: MatchingPartition | None = None) -> WitnessResult:
    n = inst.n
    res = WitnessResult(n=n, meta={"d": 1, "mode": "six-step"})
    try:
        if part is None:
            beta = min(eta, inst.alpha / 2 * 0.9)
            part = build_partition(inst.H, inst.alpha, beta)
        checks = check_partition(inst.H, part)
        if not partition_ok(checks):
            bad = [c for c in checks if not c[1]]
            raise PreconditionFailed(f"partition checks failed: {bad}")
        result = run_six_steps(inst, part, eps=eps, eta=eta, rng=rng, strict=strict)
        res.flags.extend(result.flags)
        res.meta["retired"] = len(result.S)
        res.meta["cases"] = result.trace["cases"]
    except PipelineError as exc:
        res.failures.extend(
            {"k": k, "stage": exc.stage, "reason": str(exc)} for k in range(3, n + 1)
        )
        return res
    union = inst.union
    for k in range(3, n + 1):
        try:
            vs = extract_cycle_k(inst, result, k, rng)
        except ExtractionFailed as exc:
            res.failures.append({"k": k, "stage": "extract", "reason": str(exc)})
            continue
        ok, why = validate_cycle(union, vs)
        if ok:
            res.cycles[k] = tuple(vs)
        else:
            res.failures.append({"k": k, "stage": "validate", "reason": why})
    return res


def bipartite_obstruction(G: StaticGraph, b_side, alpha: float) -> str:
    """Certify non-Hamiltonicity of complete-bipartite-host unions.

    When the host is complete bipartite with small side of size floor(alpha*n),
    any Hamilton cycle of host + G needs at least (1 - 2*alpha)*n edges of G
    inside the big side; seeing fewer certifies there is none.
    """
    b = set(b_side)
    n = G.n
    threshold = math.ceil((1 - 2 * alpha) * n - 1e-9)
    inside = sum(1 for u, v in G.edges() if u in b and v in b)
    if inside < threshold:
        return NON_HAMILTONIAN_CERTIFIED
    return INCONCLUSIVE


def find_all_cycles(inst: PerturbedInstance, rng, eps: float = 0.1,
                    eta: float = 0.01, strict: bool = False,
                    part: MatchingPartition | None = None,
                    matching: Matching | None = None) -> WitnessResult:
    """Dispatch: 2-regular goes straight to the 2-factor pipeline; 1-regular
    goes there too when the host has a near-perfect matching, else through
    the partition pipeline."""
    if inst.d == 2:
        return twofactor_witness(inst, rng)
    m0 = matching
    if m0 is None and part is not None:
        m0 = part.full
    if m0 is None:
        m0 = maximum_matching(inst.H)
    n = inst.n
    if m0.coverage() > n - math.sqrt(n):
        res = twofactor_witness(inst, rng, matching=m0)
        res.meta["mode"] = "near-perfect-matching"
        return res
    if part is None:
        try:
            beta = min(eta, inst.alpha / 2 * 0.9)
            part = build_partition(inst.H, inst.alpha, beta)
        except PipelineError as exc:
            res = WitnessResult(n=n, meta={"d": 1, "mode": "six-step"})
            res.failures.extend(
                {"k": k, "stage": exc.stage, "reason": str(exc)}
                for k in range(3, n + 1)
            )
            return res
    return pancyclic_witness_matching(inst, rng, eps=eps, eta=eta,
                                      strict=strict, part=part)
