"""Configuration-model sampling of random 1- and 2-regular graphs.

Each vertex i owns d points (i, 0), ..., (i, d-1); a configuration is a
uniform perfect matching on the n*d points and projects to a d-regular
multigraph by collapsing points onto their owners.  Conditioning on the
projection being simple yields a uniformly random simple d-regular graph,
which rejection sampling exploits.

Points are packed as integers p = owner * d + slot throughout.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    AttemptsExhausted,
    BadParams,
    ConflictingPairs,
    NotInConfiguration,
    ParityError,
    SharedPoint,
)
from .graphs import Multigraph, StaticGraph


def point_id(owner: int, slot: int, d: int) -> int:
    return owner * d + slot

def point_owner(p: int, d: int) -> int:
    return p // d

def point_slot(p: int, d: int) -> int:
    return p % d


class Configuration:
    """A perfect matching on the extended point set of [0, n) with degree d."""

    __slots__ = ("n", "d", "partner")

    def __init__(self, n: int, d: int, partner: np.ndarray):
        self.n = n
        self.d = d
        self.partner = partner

    def pairs(self):
        """Yield matched point pairs (p, q) with p < q."""
        for p in range(self.n * self.d):
            q = int(self.partner[p])
            if p < q:
                yield (p, q)

    def has_pair(self, p: int, q: int) -> bool:
        return int(self.partner[p]) == q

    def validate(self) -> None:
        m = self.n * self.d
        assert len(self.partner) == m
        for p in range(m):
            q = int(self.partner[p])
            assert q != p and int(self.partner[q]) == p, f"bad partner at {p}"

    def copy(self) -> "Configuration":
        return Configuration(self.n, self.d, self.partner.copy())

    def __eq__(self, other):
        return (
            isinstance(other, Configuration)
            and self.n == other.n
            and self.d == other.d
            and np.array_equal(self.partner, other.partner)
        )

    def __repr__(self):
        return f"Configuration(n={self.n}, d={self.d})"


def lowest_uncovered_pivot(state) -> int:
    return state.first_uncovered()


class _StepState:
    """Internal state handed to pivot rules during stepwise sampling."""

    __slots__ = ("n", "d", "covered", "pool", "pos", "last_y")

    def __init__(self, n, d, covered, pool, pos):
        self.n = n
        self.d = d
        self.covered = covered
        self.pool = pool  # uncovered points, unordered
        self.pos = pos  # point -> index in pool, or -1
        self.last_y = None

    def first_uncovered(self) -> int:
        return min(self.pool)

    def is_covered(self, p: int) -> bool:
        return self.covered[p]

    def extended_set(self, owner: int):
        return range(owner * self.d, (owner + 1) * self.d)


def finish_component_pivot(state: _StepState) -> int:
    """Reveal all of one projected component before starting the next.

    If the owner of the previous random partner still has exactly one
    uncovered point, continue from that point; otherwise start anywhere.
    """
    if state.last_y is not None:
        owner = state.last_y // state.d
        open_pts = [p for p in state.extended_set(owner) if not state.covered[p]]
        if len(open_pts) == 1 and any(
            state.covered[p] for p in state.extended_set(owner)
        ):
            return open_pts[0]
    return state.first_uncovered()


def sample_configuration(n: int, d: int, rng, pivot=None) -> Configuration:
    """Uniform configuration via the one-pair-per-step reveal process.

    The pivot rule chooses which uncovered point gets matched next; the
    partner is always uniform over the remaining points, so every pivot rule
    yields the same (uniform) distribution.  With the default pivot the loop
    collapses to pairing a random permutation, which is much faster.
    """
    if d not in (1, 2):
        raise BadParams("only d in {1, 2} is supported")
    if (n * d) % 2 != 0:
        raise ParityError(f"n*d = {n * d} must be even")
    m = n * d
    if pivot is None:
        perm = rng.permutation(m)
        partner = np.empty(m, dtype=np.int64)
        partner[perm[0::2]] = perm[1::2]
        partner[perm[1::2]] = perm[0::2]
        return Configuration(n, d, partner)
    return _stepwise(n, d, rng, pivot, forced=())


def sample_conditioned(n: int, d: int, forced_pairs, rng, pivot=None) -> Configuration:
    """Uniform over configurations containing every forced pair."""
    if d not in (1, 2):
        raise BadParams("only d in {1, 2} is supported")
    if (n * d) % 2 != 0:
        raise ParityError(f"n*d = {n * d} must be even")
    seen = set()
    for p, q in forced_pairs:
        if p == q:
            raise ConflictingPairs(f"point {p} paired with itself")
        if p in seen or q in seen:
            raise ConflictingPairs("forced pairs are not disjoint")
        seen.add(p)
        seen.add(q)
    if pivot is None:
        m = n * d
        partner = np.full(m, -1, dtype=np.int64)
        for p, q in forced_pairs:
            partner[p] = q
            partner[q] = p
        free = np.flatnonzero(partner < 0)
        perm = free[rng.permutation(len(free))]
        partner[perm[0::2]] = perm[1::2]
        partner[perm[1::2]] = perm[0::2]
        return Configuration(n, d, partner)
    return _stepwise(n, d, rng, pivot, forced=tuple(forced_pairs))


def _stepwise(n, d, rng, pivot, forced):
    m = n * d
    partner = np.full(m, -1, dtype=np.int64)
    covered = np.zeros(m, dtype=bool)
    for p, q in forced:
        partner[p] = q
        partner[q] = p
        covered[p] = covered[q] = True
    pool = [p for p in range(m) if not covered[p]]
    pos = [-1] * m
    for i, p in enumerate(pool):
        pos[p] = i
    state = _StepState(n, d, covered, pool, pos)

    def remove(p):
        i = pos[p]
        last = pool[-1]
        pool[i] = last
        pos[last] = i
        pool.pop()
        pos[p] = -1

    while pool:
        x = pivot(state)
        assert not covered[x], "pivot returned a covered point"
        remove(x)
        y = pool[int(rng.integers(len(pool)))]
        remove(y)
        partner[x] = y
        partner[y] = x
        covered[x] = covered[y] = True
        state.last_y = y
    return Configuration(n, d, partner)


def project(cfg: Configuration) -> Multigraph:
    """Collapse each matched point pair onto its owners (loops allowed)."""
    d = cfg.d
    edges = [(p // d, int(cfg.partner[p]) // d) for p in range(cfg.n * d)
             if p < int(cfg.partner[p])]
    return Multigraph(cfg.n, edges)


def is_simple_projection(cfg: Configuration) -> bool:
    d = cfg.d
    ps = np.arange(cfg.n * d)
    qs = cfg.partner
    mask = ps < qs
    u = ps[mask] // d
    v = qs[mask] // d
    if np.any(u == v):
        return False
    lo = np.minimum(u, v)
    hi = np.maximum(u, v)
    keys = np.sort(lo * cfg.n + hi)
    return not np.any(keys[1:] == keys[:-1])


def sample_simple_regular(n: int, d: int, rng, max_attempts: int = 64) -> StaticGraph:
    """Uniform simple d-regular graph by rejection on the projection.

    The acceptance probability is bounded below by roughly e^(-d*d/4), so the
    default attempt budget makes failure astronomically unlikely.
    """
    for _ in range(max_attempts):
        cfg = sample_configuration(n, d, rng)
        if is_simple_projection(cfg):
            return project(cfg).to_simple()
    raise AttemptsExhausted(max_attempts)


def switch(cfg: Configuration, pair1, pair2, crossing: bool = False) -> Configuration:
    """Replace two matched pairs by a rewiring of the same four points.

    With pair1 = (a, b) and pair2 = (c, d): crossing=False produces (a, c)
    and (b, d); crossing=True produces (a, d) and (b, c).  Applying the
    matching rewiring to the result restores the original configuration.
    """
    a, b = pair1
    c, d = pair2
    if not cfg.has_pair(a, b):
        raise NotInConfiguration(f"pair {pair1} not in configuration")
    if not cfg.has_pair(c, d):
        raise NotInConfiguration(f"pair {pair2} not in configuration")
    if len({a, b, c, d}) != 4:
        raise SharedPoint("the two pairs must be disjoint")
    out = cfg.partner.copy()
    if crossing:
        out[a], out[d] = d, a
        out[b], out[c] = c, b
    else:
        out[a], out[c] = c, a
        out[b], out[d] = d, b
    return Configuration(cfg.n, cfg.d, out)


def configuration_key(cfg: Configuration) -> tuple:
    """Canonical hashable form (sorted pair list); identifies the matching."""
    return tuple(sorted(cfg.pairs()))


def enumerate_configurations(n: int, d: int):
    """All perfect matchings on the n*d points (tiny inputs only)."""
    m = n * d
    if m % 2 != 0:
        raise ParityError(f"n*d = {m} must be even")
    if m > 12:
        raise BadParams("enumeration is limited to n*d <= 12")
    out = []

    def rec(unmatched, acc):
        if not unmatched:
            out.append(tuple(acc))
            return
        p = unmatched[0]
        for i in range(1, len(unmatched)):
            q = unmatched[i]
            rest = unmatched[1:i] + unmatched[i + 1:]
            acc.append((p, q))
            rec(rest, acc)
            acc.pop()

    rec(list(range(m)), [])
    return out
