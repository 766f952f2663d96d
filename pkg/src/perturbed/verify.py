"""Ground-truth validation and closed-form estimates.

`validate_cycle` is the single acceptance gate for everything the cycle
pipelines emit: no pipeline certifies its own output.  The brute-force
pancyclicity search and the bitmask cycle counter are two independent
small-n oracles used to cross-check each other and the pipelines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BadParams, TooLarge
from .graphs import StaticGraph


@dataclass(frozen=True)
class CycleCertificate:
    vertices: tuple
    k: int

    @classmethod
    def from_vertices(cls, vertices) -> "CycleCertificate":
        vs = tuple(int(v) for v in vertices)
        return cls(vs, len(vs))


def validate_cycle(host: StaticGraph, cert) -> tuple[bool, str | None]:
    """Check a claimed cycle against its host graph.

    Returns (True, None) or (False, reason-of-first-violation).
    """
    if not isinstance(cert, CycleCertificate):
        cert = CycleCertificate.from_vertices(cert)
    vs = cert.vertices
    k = cert.k
    if len(vs) != k:
        return False, f"claimed length {k} but {len(vs)} vertices listed"
    if k < 3:
        return False, f"cycle length {k} < 3"
    for v in vs:
        if not 0 <= v < host.n:
            return False, f"vertex {v} out of range"
    if len(set(vs)) != k:
        seen = set()
        for v in vs:
            if v in seen:
                return False, f"duplicate vertex {v}"
            seen.add(v)
    for i in range(k):
        u, v = vs[i], vs[(i + 1) % k]
        if not host.has_edge(u, v):
            return False, f"missing host edge ({u},{v})"
    return True, None


def is_pancyclic_bruteforce(g: StaticGraph) -> dict[int, bool]:
    """Exact per-length cycle existence by backtracking (n <= 16)."""
    n = g.n
    if n > 16:
        raise TooLarge(f"brute-force cycle search is limited to n <= 16, got {n}")
    result = {}
    for k in range(3, n + 1):
        result[k] = _has_cycle_of_length(g, k)
    return result


def _has_cycle_of_length(g: StaticGraph, k: int) -> bool:
    n = g.n
    adj = [g.neighbor_set(v) for v in range(n)]
    # only search cycles whose minimum vertex is the start
    for s in range(n - k + 1):
        visited = {s}

        def dfs(v, depth):
            if depth == k - 1:
                return s in adj[v]
            for w in g.neighbors(v):
                if w > s and w not in visited:
                    visited.add(w)
                    if dfs(w, depth + 1):
                        return True
                    visited.discard(w)
            return False

        if dfs(s, 0):
            return True
    return False


def cycle_length_counts(g: StaticGraph) -> dict[int, int]:
    """Exact number of cycles of each length via bitmask path DP (n <= 14).

    paths[mask][v] counts simple paths that start at the lowest set bit of
    mask, cover exactly mask, and end at v; closing an edge back to the start
    counts each cycle twice (once per direction).
    """
    n = g.n
    if n > 14:
        raise TooLarge(f"cycle counting is limited to n <= 14, got {n}")
    adj_bits = [0] * n
    for u in range(n):
        for v in g.neighbors(u):
            adj_bits[u] |= 1 << v
    counts = {k: 0 for k in range(3, n + 1)}
    paths = [dict() for _ in range(1 << n)]
    for s in range(n):
        paths[1 << s][s] = 1
    for mask in range(1, 1 << n):
        base = (mask & -mask).bit_length() - 1
        entry = paths[mask]
        if not entry:
            continue
        size = bin(mask).count("1")
        for v, cnt in entry.items():
            if size >= 3 and adj_bits[v] >> base & 1:
                counts[size] += cnt
            nbrs = adj_bits[v] & ~mask
            while nbrs:
                wbit = nbrs & -nbrs
                nbrs ^= wbit
                w = wbit.bit_length() - 1
                if w > base:
                    nmask = mask | wbit
                    paths[nmask][w] = paths[nmask].get(w, 0) + cnt
    return {k: c // 2 for k, c in counts.items()}


def has_hamilton_cycle(g: StaticGraph) -> bool:
    if g.n < 3:
        return False
    return _has_cycle_of_length(g, g.n)


def expected_components_2factor(n: int) -> float:
    """Mean component count of the degree-2 configuration process on n vertices."""
    if n < 1:
        raise BadParams("n must be >= 1")
    return math.fsum(1.0 / (2 * i - 1) for i in range(1, n + 1))


def expected_components_2factor_exact(n: int) -> Fraction:
    total = Fraction(0)
    for i in range(1, n + 1):
        total += Fraction(1, 2 * i - 1)
    return total


def edge_distribution_count(g: StaticGraph, a_set, b_set) -> int:
    """|{z in A : N_G(z) meets B}|."""
    bs = set(b_set)
    return sum(1 for z in a_set if any(w in bs for w in g.neighbors(z)))


def kr_expected_components(n: float, r: int, alpha: float):
    """Expected clique-component counts of a random r-clique factor restricted
    to a (1-alpha) fraction of the vertices.

    Returns ({s: E[X_s] for s in 1..r}, total) with
    E[X_s] = (n/r) * C(r, s) * (1-alpha)^s * alpha^(r-s) and
    total = (n/r) * (1 - alpha^r).
    """
    if r < 1:
        raise BadParams("r must be >= 1")
    if not 0 < alpha < 1:
        raise BadParams("alpha must lie in (0, 1)")
    per_size = {
        s: (n / r) * math.comb(r, s) * (1 - alpha) ** s * alpha ** (r - s)
        for s in range(1, r + 1)
    }
    total = (n / r) * (1 - alpha**r)
    return per_size, total


def kr_threshold_root(r: int, tol: float = 1e-14) -> float:
    """Unique positive root of x^r + r*x - 1, by bisection on [0, 1]."""
    if r < 1:
        raise BadParams("r must be >= 1")

    def f(x: float) -> float:
        return x**r + r * x - 1.0

    lo, hi = 0.0, 1.0
    assert f(lo) < 0 < f(hi)
    for _ in range(128):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            break
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
