"""Cycles of every length in a dense host plus a random 2-factor.

The same machinery covers the near-perfect-matching variant: supply a
matching of the host covering all but O(alpha^2 n / 100) vertices and a
1-regular G, and the matching's edges join the base graph.

Shape of the construction: reserve m vertices, build a path P in which each
reserved vertex forms a triangle with a dedicated P-edge, merge everything
else with P into one long cycle avoiding the reserve, then hit any target
length by shortcutting the cycle (short/middle lengths) or splicing reserved
vertices into their triangles (long lengths).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import (
    AbsorberExhausted,
    AvailabilityExhausted,
    BudgetExceeded,
    ExtractionFailed,
    PipelineError,
    PreconditionFailed,
)
from .graphs import canon
from .instances import PerturbedInstance, available_edges
from .matching import Matching
from .pathsys import PathCycleSystem
from .results import WitnessResult
from .rng import pick, shuffled
from .verify import validate_cycle


@dataclass(frozen=True)
class AbsorberSet:
    vertices: tuple  # u_1 ... u_m

    def __len__(self):
        return len(self.vertices)


@dataclass(frozen=True)
class AbsorbingPath:
    sequence: tuple  # z1 z1' w1 w1' z2 ... w_{m-1}' zm zm'
    units: tuple  # ((z_j, z_j'), ...) — the triangle edge of u_j
    connectors: tuple  # ((w_j, w_j'), ...)

    @property
    def edges(self) -> list:
        seq = self.sequence
        return [canon(seq[i], seq[i + 1]) for i in range(len(seq) - 1)]

    @property
    def vertex_set(self) -> frozenset:
        return frozenset(self.sequence)


@dataclass
class MergeTrace:
    budget: int
    steps: list = field(default_factory=list)  # (case, comps_before, comps_after)
    flags: list = field(default_factory=list)

    @property
    def t(self) -> int:
        return len(self.steps)


def absorber_size(alpha: float, n: int) -> int:
    return max(2, int(math.floor(alpha * alpha * n / 1000.0)))


def _log2n(n: int) -> float:
    return math.log(n) ** 2 if n > 1 else 1.0


def build_absorber(inst: PerturbedInstance, rng, matching: Matching | None = None):
    """Reserve vertices, build the triangle-carrying path, assemble the start
    system.

    Returns (AbsorberSet, AbsorbingPath, system, banned, flags).  With a
    matching supplied (1-regular G), the base graph is matching + G; the
    matching must cover all but floor(alpha^2 n / 100) vertices.
    """
    H, G, n = inst.H, inst.G, inst.n
    alpha = inst.alpha
    if alpha <= 0:
        raise PreconditionFailed("host graph has an isolated vertex")
    m = absorber_size(alpha, n)
    if n < 4 * m + 3:
        raise PreconditionFailed(f"n={n} too small for {m} reserved vertices")
    base_edges = list(G.edges())
    if matching is not None:
        if inst.d != 1:
            raise PreconditionFailed("matching mode needs a 1-regular G")
        matching.validate_in(H)
        deficit = n - matching.coverage()
        allowed = int(math.floor(alpha * alpha * n / 100.0))
        if deficit > allowed:
            raise PreconditionFailed(
                f"matching leaves {deficit} vertices uncovered (> {allowed})"
            )
        seen = set(base_edges)
        base_edges.extend(e for e in matching.edges() if canon(*e) not in seen)
    elif inst.d != 2:
        raise PreconditionFailed("2-factor mode needs a 2-regular G")

    u_list = [int(v) for v in rng.choice(n, size=m, replace=False)]
    u_set = set(u_list)

    units = []
    w_set = set()
    for j, u in enumerate(u_list):
        nh = H.neighbor_set(u)
        cands = []
        for z in H.neighbors(u):
            if z in u_set or z in w_set:
                continue
            for zp in G.neighbors(z):
                if z < zp and zp in nh and zp not in u_set and zp not in w_set:
                    cands.append((z, zp))
        if not cands:
            raise AbsorberExhausted(j, "(triangle edge)")
        e = pick(rng, cands)
        units.append(e)
        w_set.update(e)

    blocked = u_set | w_set
    connectors = []
    f_set = set()
    for j in range(m - 1):
        zj_p = units[j][1]
        z_next = units[j + 1][0]
        target = H.neighbor_set(z_next)
        cands = []
        for w in H.neighbors(zj_p):
            if w in blocked or w in f_set:
                continue
            for wp in G.neighbors(w):
                if wp in target and wp not in blocked and wp not in f_set and wp != w:
                    cands.append((w, wp))
        if not cands:
            raise AbsorberExhausted(j, "(connector edge)")
        f = pick(rng, cands)
        connectors.append(f)
        f_set.update(f)

    seq = []
    for j in range(m):
        seq.extend(units[j])
        if j < m - 1:
            seq.extend(connectors[j])
    assert len(seq) == len(set(seq)) == 4 * m - 2
    path = AbsorbingPath(tuple(seq), tuple(units), tuple(connectors))

    interior = path.vertex_set - {seq[0], seq[-1]}
    removed = interior | u_set
    sys = PathCycleSystem(n)
    for u, v in base_edges:
        if u not in removed and v not in removed:
            sys.insert_edge(u, v)
    for i in range(len(seq) - 1):
        if not sys.has_edge(seq[i], seq[i + 1]):
            sys.insert_edge(seq[i], seq[i + 1])
    for u in u_list:
        sys.deactivate(u)

    flags = []
    comp_budget = _log2n(n) + math.ceil(alpha * alpha * n / 200.0) + 64
    if sys.component_count() > comp_budget:
        flags.append(
            f"start system has {sys.component_count()} components (budget {comp_budget:.0f})"
        )
    return AbsorberSet(tuple(u_list)), path, sys, set(), flags


def merge_to_cycle(sys: PathCycleSystem, path: AbsorbingPath, absorbers: AbsorberSet,
                   inst: PerturbedInstance, rng, banned: set) -> MergeTrace:
    """Mutate `sys` into a single spanning cycle containing the special path.

    Every edit keeps max degree 2, keeps the special path intact, and removes
    at most 3 edges, so each availability set loses at most 3 edges per step.
    """
    n = inst.n
    alpha = inst.alpha
    X = path.vertex_set  # availability queries exclude the protected path
    p_edges = set(path.edges)
    budget = int(math.ceil(alpha * alpha * n / 40.0)) + 64
    trace = MergeTrace(budget=budget)
    prev_case23 = None  # comps before the previous case-2/3 step

    while True:
        comps = sys.component_count()
        if comps == 1 and sys.n_cycles == 1:
            break
        if trace.t >= budget:
            raise BudgetExceeded(f"merge exceeded {budget} steps")
        paths = sys.path_ids()
        before = (sys.n_paths, sys.n_cycles, comps)
        if len(paths) >= 2:
            case = _case1(sys, inst, rng, X, banned, paths)
        elif len(paths) == 1:
            case = _case2(sys, inst, rng, X, banned, paths[0], p_edges)
        else:
            case = _case3(sys, inst, rng, X, banned, p_edges)
        after = (sys.n_paths, sys.n_cycles, sys.component_count())
        _check_step(case, before, after)
        for u, v in path.edges:
            assert sys.has_edge(u, v), f"protected path lost edge ({u},{v})"
        if case.startswith(("2", "3")):
            if prev_case23 is not None:
                assert after[2] <= prev_case23 - 1, (
                    f"two consecutive case-2/3 steps failed to drop a component "
                    f"({prev_case23} -> {after[2]})"
                )
            prev_case23 = before[2]
        else:
            prev_case23 = None
        trace.steps.append((case, before[2], after[2]))
    assert sys.active_count() == n - len(absorbers)
    return trace


def _check_step(case, before, after):
    dp = after[0] - before[0]
    dc = after[2] - before[2]
    if case == "1":
        assert dp == -1, f"case 1 should remove one path, got {dp}"
        assert dc <= 1, f"case 1 raised component count by {dc}"
    elif case == "2.1":
        assert dc == -1
    elif case in ("2.2", "2.3.1"):
        assert dp == -1 and dc == 0
    elif case == "2.3.2":
        assert dp == -1 and dc == 0
    elif case == "3.1":
        assert dc == -1
    elif case == "3.2":
        assert dc == -1 and dp == 1


def _splice(sys, banned, remove, add):
    sys.splice(remove, add)
    banned.update(canon(u, v) for u, v in remove)


def _case1(sys, inst, rng, X, banned, paths):
    pid = pick(rng, paths)
    x, y = sys.component_ends(pid)
    ball = {x, y}
    ball.update(sys.neighbors(x))
    ball.update(sys.neighbors(y))
    cands = [
        (z, zp)
        for z, zp in available_edges(inst, sys, x, y, exclude=X, banned=banned)
        if z not in ball and zp not in ball
    ]
    if not cands:
        raise AvailabilityExhausted("1")
    z, zp = pick(rng, cands)
    _splice(sys, banned, [(z, zp)], [(x, z), (y, zp)])
    return "1"


def _case2(sys, inst, rng, X, banned, pid, p_edges):
    H = inst.H
    x, y = sys.component_ends(pid)
    off_path = []
    for anchor in (x, y) if x != y else (x,):
        for z in H.neighbors(anchor):
            if z in X or not sys.is_active(z):
                continue
            if sys.component_id(z) != pid:
                off_path.append((anchor, z))
    if off_path:
        anchor, z = pick(rng, off_path)
        zp = pick(rng, sys.neighbors(z))
        _splice(sys, banned, [(z, zp)], [(anchor, z)])
        return "2.1"

    order = sys.component_vertices(pid)
    if order[0] != x:
        order.reverse()
    pos = {v: i for i, v in enumerate(order)}
    zs = available_edges(inst, sys, x, y, exclude=X, banned=banned)
    for z, zp in zs:
        assert abs(pos[z] - pos[zp]) == 1, "in-path availability is not a path edge"
    wrong = [(z, zp) for z, zp in zs if pos[zp] < pos[z]]
    if wrong:
        z, zp = pick(rng, wrong)
        _splice(sys, banned, [(z, zp)], [(x, z), (y, zp)])
        return "2.2"

    disjoint = _disjoint_by_position(zs, pos)
    if len(disjoint) < 2:
        raise AvailabilityExhausted("2.3")
    (z, zp), (w, wp) = _closest_pair(disjoint, pos)
    if pos[w] - pos[zp] == 1:
        _splice(sys, banned, [(zp, w)], [(x, w), (y, zp)])
        return "2.3.1"
    z2 = order[pos[zp] + 1]
    w2 = order[pos[w] - 1]
    mid = set(order[pos[zp] + 1 : pos[w]])
    inner = [
        (z3, w3)
        for z3, w3 in available_edges(inst, sys, z2, w2, exclude=X, banned=banned)
        if z3 not in mid and w3 not in mid
    ]
    if not inner:
        raise AvailabilityExhausted("2.3.2")
    z3, w3 = pick(rng, inner)
    _splice(
        sys,
        banned,
        [(zp, z2), (w, w2), (z3, w3)],
        [(x, w), (y, zp), (z2, z3), (w2, w3)],
    )
    return "2.3.2"


def _disjoint_by_position(zs, pos):
    """Greedy vertex-disjoint subfamily of in-path edges, by position."""
    seen = set()
    out = []
    for z, zp in sorted(zs, key=lambda e: pos[e[0]]):
        if z not in seen and zp not in seen:
            out.append((z, zp))
            seen.add(z)
            seen.add(zp)
    return out

def _closest_pair(disjoint, pos):
    """Adjacent pair of disjoint edges minimizing the along-path gap.

    Ties break on the lexicographically smallest (gap, position) so reruns
    are reproducible without consulting the generator.
    """
    disjoint.sort(key=lambda e: pos[e[0]])
    best = None
    for first, second in zip(disjoint, disjoint[1:]):
        gap = pos[second[0]] - pos[first[0]]
        key = (gap, pos[first[0]])
        if best is None or key < best[0]:
            best = (key, first, second)
    return best[1], best[2]


def _case3(sys, inst, rng, X, banned, p_edges):
    edges = [e for e in sys.edges() if canon(*e) not in p_edges]
    for a, b in shuffled(rng, edges):
        cid = sys.component_id(a)
        cands = [
            (z, zp)
            for z, zp in available_edges(inst, sys, a, b, exclude=X, banned=banned)
            if sys.component_id(z) != cid
        ]
        if cands:
            z, zp = pick(rng, cands)
            _splice(sys, banned, [(a, b), (z, zp)], [(a, z), (b, zp)])
            return "3.1"

    cycle_ids = sys.cycle_ids()
    assert len(cycle_ids) >= 2
    pools = []
    for cid in cycle_ids:
        free = [v for v in sys.component_vertices(cid) if v not in X]
        if free:
            pools.append((cid, free))
    if len(pools) < 2:
        raise AvailabilityExhausted("3.2", "(no two cycles with free vertices)")
    i = int(rng.integers(len(pools)))
    j = int(rng.integers(len(pools) - 1))
    if j >= i:
        j += 1
    (cid_x, free_x), (cid_y, free_y) = pools[i], pools[j]
    x, y = pick(rng, free_x), pick(rng, free_y)
    zs = available_edges(inst, sys, x, y, exclude=X, banned=banned)
    if not zs:
        raise AvailabilityExhausted("3.2")
    z, zp = pick(rng, zs)
    e_cid = sys.component_id(z)
    if e_cid != cid_x:
        anchor, attach = x, z
    else:
        assert e_cid != cid_y, "edge cannot sit in both chosen cycles"
        anchor, attach = y, zp
    w = pick(rng, sys.neighbors(anchor))
    _splice(sys, banned, [(anchor, w), (z, zp)], [(anchor, attach)])
    return "3.2"


# -- extraction -----------------------------------------------------------


class CycleHost:
    """Frozen view of the merged cycle used for all per-length extractions."""

    def __init__(self, sys: PathCycleSystem, path: AbsorbingPath,
                 absorbers: AbsorberSet, inst: PerturbedInstance, banned: set):
        cid = sys.cycle_ids()[0]
        self.order = sys.component_vertices(cid)
        self.L = len(self.order)
        self.pos = {v: i for i, v in enumerate(self.order)}
        self.path = path
        self.absorbers = absorbers
        self.inst = inst
        self.banned = banned
        self.X = path.vertex_set
        ppos = sorted(self.pos[v] for v in path.sequence)
        # the protected path sits on a contiguous arc; normalize to its start
        self.p_lo, self.p_hi = _arc_bounds(ppos, self.L)

    def cyc_neighbors(self, v: int):
        i = self.pos[v]
        return (self.order[i - 1], self.order[(i + 1) % self.L])

    def avail(self, x: int, y: int):
        """Oriented availability on the current cycle for endpoints (x, y)."""
        H = self.inst.H
        ny = H.neighbor_set(y)
        g_edges = self.inst.g_edge_set()
        out = []
        for z in H.neighbors(x):
            if z in self.X or z not in self.pos:
                continue
            for zp in self.cyc_neighbors(z):
                if (
                    zp in ny
                    and zp not in self.X
                    and canon(z, zp) in g_edges
                    and canon(z, zp) not in self.banned
                ):
                    out.append((z, zp))
        return out


def _arc_bounds(ppos: list, L: int):
    """Start and end of the contiguous (mod L) arc covered by sorted ppos.

    The end may exceed L-1 when the arc wraps past position 0.
    """
    if ppos[-1] - ppos[0] + 1 == len(ppos):
        return ppos[0], ppos[-1]
    for idx in range(1, len(ppos)):
        if ppos[idx] - ppos[idx - 1] > 1:
            return ppos[idx], ppos[idx - 1] + L
    raise AssertionError("path positions are not a contiguous arc")


def extract_cycle(host: CycleHost, k: int, rng) -> list:
    """A k-vertex cycle of the perturbed graph, built from the merged cycle."""
    n = host.inst.n
    m = len(host.absorbers.vertices)
    L = host.L
    assert L == n - m
    alpha = host.inst.alpha
    if not 3 <= k <= n:
        raise ExtractionFailed(k, "range", f"k must lie in [3, {n}]")

    if k >= L:
        return _extract_long(host, k, rng)
    p_len = host.p_hi - host.p_lo  # edges of the protected path's arc
    if k - 3 < p_len or k <= alpha * alpha * n / 20.0:
        return _extract_short(host, k, rng)
    return _extract_middle(host, k, rng)


def _expand(vertices: list, js, host: CycleHost) -> list:
    """Insert reserved vertex u_j into its triangle edge for each j in js."""
    repl = {}
    for j in js:
        z, zp = host.path.units[j]
        repl[canon(z, zp)] = host.absorbers.vertices[j]
    out = []
    npts = len(vertices)
    for i, v in enumerate(vertices):
        out.append(v)
        e = canon(v, vertices[(i + 1) % npts])
        if e in repl:
            out.append(repl.pop(e))
    assert not repl, "some triangle edges were absent from the cycle"
    return out


def _extract_long(host: CycleHost, k: int, rng) -> list:
    m = len(host.absorbers.vertices)
    need = k - host.L
    js = [int(j) for j in rng.choice(m, size=need, replace=False)] if need else []
    return _expand(list(host.order), js, host)


def _window(host: CycleHost, start: int, width: int) -> list:
    if start + width <= host.L:
        return host.order[start : start + width]
    return host.order[start:] + host.order[: start + width - host.L]


def _extract_short(host: CycleHost, k: int, rng) -> list:
    L = host.L
    tries = min(L, 48)
    offsets = [int(rng.integers(L)) for _ in range(tries)]
    for s in offsets:
        win = _window(host, s, k - 2)
        x, y = win[0], win[-1]
        wset = set(win)
        found = None
        for z, zp in host.avail(x, y):
            if z not in wset and zp not in wset:
                found = (z, zp)
                break
        if found:
            z, zp = found
            return win + [zp, z]
    raise ExtractionFailed(k, "short", "no off-window edge for any tried window")


def _extract_middle(host: CycleHost, k: int, rng) -> list:
    L = host.L
    width = k - 2
    p_lo, p_hi = host.p_lo, host.p_hi
    # window [s, s+width-1] (mod L) must contain the protected arc
    slack = width - 1 - (p_hi - p_lo)
    starts = [(p_hi - width + 1 + off) % L for off in range(slack + 1)]
    tries = min(len(starts), 24)
    chosen = [starts[int(rng.integers(len(starts)))] for _ in range(tries)]
    last_reason = "no usable window"
    for s in chosen:
        try:
            return _middle_at(host, k, s, rng)
        except ExtractionFailed as exc:
            last_reason = exc.reason
    raise ExtractionFailed(k, "middle", last_reason)


def _middle_at(host: CycleHost, k: int, s: int, rng) -> list:
    m = len(host.absorbers.vertices)
    L = host.L
    win = _window(host, s, k - 2)
    x, y = win[0], win[-1]
    rpos = {v: i for i, v in enumerate(win)}
    zs = host.avail(x, y)
    outside = [(z, zp) for z, zp in zs if z not in rpos and zp not in rpos]
    if outside:
        z, zp = pick(rng, outside)
        return win + [zp, z]

    inside = [(z, zp) for z, zp in zs if z in rpos and zp in rpos]
    wrong = [(z, zp) for z, zp in inside if rpos[zp] < rpos[z]]
    if wrong:
        z, zp = pick(rng, wrong)
        i, j = rpos[zp], rpos[z]
        assert j == i + 1
        core = win[: i + 1] + win[j:][::-1]
        return _expand(core, [0, 1], host)

    for z, zp in inside:
        assert rpos[zp] == rpos[z] + 1, "in-window availability is not a window edge"
    disjoint = _disjoint_by_position(inside, rpos)
    if len(disjoint) < 2:
        raise ExtractionFailed(k, "middle", "fewer than 2 disjoint in-window edges")
    (z, zp), (w, wp) = _closest_pair(disjoint, rpos)
    ell = rpos[w] - rpos[z]
    if ell > m:
        raise ExtractionFailed(k, "middle", f"gap {ell} exceeds {m} reserved vertices")
    lo = rpos[zp]  # == rpos[z] + 1
    hi = rpos[w]
    # the protected arc avoids availability endpoints and is longer than the
    # cut interior, so it lies entirely outside [lo, hi]
    arc_start = (host.p_lo - s) % L
    arc_end = arc_start + (host.p_hi - host.p_lo)
    assert arc_end < lo or arc_start > hi, "cut would break the protected path"
    core = win[: lo + 1] + win[hi:][::-1]
    assert len(core) == k - ell
    return _expand(core, list(range(ell)), host)


def pancyclic_witness(inst: PerturbedInstance, rng,
                      matching: Matching | None = None) -> WitnessResult:
    """Hunt for a cycle of every length from 3 to n; validate each find."""
    n = inst.n
    res = WitnessResult(n=n, meta={"d": inst.d, "mode": "matching" if matching else "2factor"})
    try:
        absorbers, path, sys, banned, flags = build_absorber(inst, rng, matching)
        res.flags.extend(flags)
        trace = merge_to_cycle(sys, path, absorbers, inst, rng, banned)
        res.flags.extend(trace.flags)
        res.meta["merge_steps"] = trace.t
        host = CycleHost(sys, path, absorbers, inst, banned)
    except PipelineError as exc:
        res.failures.extend(
            {"k": k, "stage": exc.stage, "reason": str(exc)} for k in range(3, n + 1)
        )
        return res
    union = inst.union
    for k in range(3, n + 1):
        try:
            vs = extract_cycle(host, k, rng)
        except ExtractionFailed as exc:
            res.failures.append({"k": k, "stage": "extract", "reason": str(exc)})
            continue
        ok, why = validate_cycle(union, vs)
        if ok:
            res.cycles[k] = tuple(vs)
        else:
            res.failures.append({"k": k, "stage": "validate", "reason": why})
    return res
