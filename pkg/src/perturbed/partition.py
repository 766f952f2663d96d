"""Structural partition of a matching-deficient host graph.

Given H with linear minimum degree whose maximum matching leaves many
vertices uncovered, split V(H) into A | B1 | B2 | C1 | C2 | R so that a
small exceptional set A absorbs the irregularities, B1/B2 and C1/C2 are
matched across by the maximum matching, every vertex of B2 and R sees
almost its full degree inside B1, and C2 vertices send almost nothing back
toward B2 and R.  The construction grows B1 levels from the uncovered set,
each level being the vertices with two or more edges into the previous
B2 level; maximality of the matching forces the levels to be independent
in the ways asserted below, and a violation proves the supplied matching
was not maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ClaimViolated, PreconditionFailed
from .graphs import StaticGraph
from .matching import Matching, maximum_matching


@dataclass
class MatchingPartition:
    n: int
    alpha: float
    beta: float
    A: frozenset
    B1: frozenset
    B2: frozenset
    C1: frozenset
    C2: frozenset
    R: frozenset
    side: list  # vertex -> one of "A","B1","B2","C1","C2","R"
    cross: Matching  # the maximum matching restricted to B1|B2 and C1|C2
    full: Matching  # the maximum matching the construction started from
    levels_b1: list = field(default_factory=list)  # levels_b1[i], i >= 1
    levels_b2: list = field(default_factory=list)  # levels_b2[0] = uncovered
    i_star: int = 0
    warnings: list = field(default_factory=list)

    @property
    def gamma1(self) -> float:
        return len(self.C1) / self.n

    @property
    def gamma2(self) -> float:
        return len(self.B1) / self.n


def build_partition(H: StaticGraph, alpha: float, beta: float,
                    matching: Matching | None = None) -> MatchingPartition:
    n = H.n
    if not 0 < alpha < 0.5:
        raise PreconditionFailed(f"alpha={alpha} must lie in (0, 1/2)")
    if not 0 < beta < alpha / 2:
        raise PreconditionFailed(f"beta={beta} must lie in (0, alpha/2)")
    warnings = []
    if beta * math.sqrt(n) < 8:
        # the exceptional-set bound 12/beta^2 is vacuous at this size
        warnings.append(f"beta={beta} is small for n={n}: |A| bound exceeds n")
    m0 = matching if matching is not None else maximum_matching(H)
    m0.validate_in(H)
    uncovered = [v for v in range(n) if not m0.covers(v)]
    if len(uncovered) < math.sqrt(n):
        raise PreconditionFailed(
            f"matching covers all but {len(uncovered)} vertices (< sqrt(n)); "
            "use the near-perfect-matching pipeline instead"
        )
    for v in uncovered:
        for w in H.neighbors(v):
            if not m0.covers(w):
                raise ClaimViolated(0, f"uncovered vertices {v},{w} adjacent")

    threshold = beta * n / 2.0
    levels_b1 = [set()]  # index 0 unused
    levels_b2 = [set(uncovered)]
    used = set(uncovered)
    i_star = None
    i = 0
    while i_star is None:
        i += 1
        counts = {}
        for b in levels_b2[i - 1]:
            for w in H.neighbors(b):
                if m0.covers(w) and w not in used:
                    counts[w] = counts.get(w, 0) + 1
        b1_i = {w for w, c in counts.items() if c >= 2}
        for w in b1_i:
            if m0(w) in b1_i:
                raise ClaimViolated(i, f"level spans matching edge ({w},{m0(w)})")
        b2_i = {m0(w) for w in b1_i}
        for u in b2_i:
            if any(w in b2_i for w in H.neighbors(u)):
                raise ClaimViolated(i, f"partner level not independent at {u}")
        levels_b1.append(b1_i)
        levels_b2.append(b2_i)
        if len(b1_i) < threshold:
            i_star = i - 1
        else:
            used.update(b1_i)
            used.update(b2_i)
    if i_star < 1:
        raise PreconditionFailed(
            f"first level has {len(levels_b1[1])} vertices (< beta*n/2 = {threshold:.1f})"
        )

    b1_all = set()
    b2_all = set()
    for j in range(1, i_star + 1):
        b1_all |= levels_b1[j]
        b2_all |= levels_b2[j]

    deg_into_b1 = [0] * n
    for u in b1_all:
        for w in H.neighbors(u):
            deg_into_b1[w] += 1
    deg_into_b1_first = [0] * n
    for u in levels_b1[1]:
        for w in H.neighbors(u):
            deg_into_b1_first[w] += 1

    cut = (alpha - beta) * n
    w_bad = {v for v in b2_all if deg_into_b1[v] < cut}
    w_bad_r = {v for v in levels_b2[0] if deg_into_b1_first[v] < cut}
    a_set = set(w_bad_r) | w_bad | {m0(v) for v in w_bad}

    b1 = b1_all - a_set
    b2 = b2_all - a_set
    r = set(uncovered) - a_set
    c_all = {v for v in range(n) if m0.covers(v)} - a_set - b1 - b2
    for v in c_all:
        assert m0(v) in c_all, "leftover block is not closed under the matching"

    overflow = levels_b1[i_star + 1]
    c1, c2 = set(), set()
    for v in sorted(c_all):
        if v in c1 or v in c2:
            continue
        w = m0(v)
        if w in overflow and v not in overflow:
            c1.add(w)
            c2.add(v)
        else:
            c1.add(v)
            c2.add(w)

    side = ["?"] * n
    for v in a_set:
        side[v] = "A"
    for v in b1:
        side[v] = "B1"
    for v in b2:
        side[v] = "B2"
    for v in c1:
        side[v] = "C1"
    for v in c2:
        side[v] = "C2"
    for v in r:
        side[v] = "R"
    assert "?" not in side

    cross_partner = [-1] * n
    for v in range(n):
        if side[v] in ("B1", "C1"):
            w = m0(v)
            cross_partner[v] = w
            cross_partner[w] = v
    cross = Matching(n, cross_partner)

    return MatchingPartition(
        n=n, alpha=alpha, beta=beta,
        A=frozenset(a_set), B1=frozenset(b1), B2=frozenset(b2),
        C1=frozenset(c1), C2=frozenset(c2), R=frozenset(r),
        side=side, cross=cross, full=m0,
        levels_b1=levels_b1, levels_b2=levels_b2, i_star=i_star,
        warnings=warnings,
    )


def check_partition(H: StaticGraph, part: MatchingPartition) -> list:
    """Evaluate the four guarantees plus the level-count bound.

    Returns [(name, ok, detail), ...]; all four must pass on any host the
    construction accepts.
    """
    n = part.n
    alpha, beta = part.alpha, part.beta
    m0 = part.full
    checks = []

    bound_a = 12.0 / (beta * beta)
    checks.append(("H1-small-exceptional-set",
                   len(part.A) <= bound_a,
                   f"|A|={len(part.A)} vs 12/beta^2={bound_a:.1f}"))

    deficiency = n - m0.coverage()
    ok2 = deficiency - len(part.A) <= len(part.R) <= deficiency
    checks.append(("H2-leftover-size", ok2,
                   f"{deficiency - len(part.A)} <= |R|={len(part.R)} <= {deficiency}"))

    ok3 = len(part.B1) == len(part.B2)
    detail3 = f"|B1|={len(part.B1)} |B2|={len(part.B2)}"
    if ok3:
        for v in part.B1:
            w = part.cross.partner[v]
            if w == -1 or part.side[w] != "B2" or not H.has_edge(v, w):
                ok3 = False
                detail3 += f"; bad cross edge at {v}"
                break
    if ok3:
        need = (alpha - 2 * beta) * n
        b1set = part.B1
        for v in list(part.B2) + list(part.R):
            have = sum(1 for w in H.neighbors(v) if w in b1set)
            if have < need:
                ok3 = False
                detail3 += f"; vertex {v} has only {have} < {need:.1f} edges into B1"
                break
    checks.append(("H3-matched-core-degrees", ok3, detail3))

    ok4 = len(part.C1) == len(part.C2)
    detail4 = f"|C1|={len(part.C1)} |C2|={len(part.C2)}"
    if ok4:
        for v in part.C1:
            w = part.cross.partner[v]
            if w == -1 or part.side[w] != "C2" or not H.has_edge(v, w):
                ok4 = False
                detail4 += f"; bad cross edge at {v}"
                break
    if ok4:
        cap = 1.0 / beta + 1
        target = part.B2 | part.R
        for v in part.C2:
            have = sum(1 for w in H.neighbors(v) if w in target)
            if have > cap:
                ok4 = False
                detail4 += f"; vertex {v} sends {have} > {cap:.1f} edges back"
                break
    checks.append(("H4-quiet-leftover-block", ok4, detail4))

    checks.append(("level-count", part.i_star <= 1.0 / beta,
                   f"i*={part.i_star} vs 1/beta={1.0 / beta:.1f}"))
    return checks


def partition_ok(checks) -> bool:
    return all(ok for _, ok, _ in checks)
