"""Perturbed instances: a deterministic host graph plus a sampled regular graph.

Also home to the "available edge" queries both pipelines lean on: edges of
the random graph whose endpoints are host-neighbors of two query vertices.
These are evaluated lazily against the live path/cycle system, an exclusion
vertex set, and the global banned-edge set, so there is no stored index to
drift out of sync as the system mutates.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .configmodel import sample_simple_regular
from .errors import BadParams
from .graphs import StaticGraph, canon, complete_bipartite, read_edge_list, write_edge_list

FAMILIES = ("unbalanced-bipartite", "logn-bipartite", "min-degree-random")


@dataclass(frozen=True)
class ExtremalSpec:
    family: str
    n: int
    alpha: float | None = None


class PerturbedInstance:
    """H plus a 1- or 2-regular G on the same vertex set (both immutable)."""

    __slots__ = ("H", "G", "d", "alpha", "meta", "_union", "_g_edges", "_g_partner")

    def __init__(self, H: StaticGraph, G: StaticGraph, d: int, meta=None):
        if H.n != G.n:
            raise BadParams("H and G must share a vertex set")
        self.H = H
        self.G = G
        self.d = d
        self.alpha = H.min_degree() / H.n if H.n else 0.0
        self.meta = dict(meta or {})
        self._union = None
        self._g_edges = {canon(u, v) for u, v in G.edges()}
        if d == 1:
            partner = [-1] * G.n
            for u, v in G.edges():
                partner[u] = v
                partner[v] = u
            self._g_partner = partner
        else:
            self._g_partner = None

    @property
    def n(self) -> int:
        return self.H.n

    @property
    def union(self) -> StaticGraph:
        if self._union is None:
            self._union = self.H.union(self.G)
        return self._union

    def g_has_edge(self, u: int, v: int) -> bool:
        return canon(u, v) in self._g_edges

    def g_edge_set(self) -> set:
        return self._g_edges

    def g_partner(self, v: int) -> int:
        """Partner of v in a 1-regular G."""
        return self._g_partner[v]


def build_instance(H: StaticGraph, d: int, rng, meta=None) -> PerturbedInstance:
    G = sample_simple_regular(H.n, d, rng)
    return PerturbedInstance(H, G, d, meta=meta)


def available_edges(inst: PerturbedInstance, sys, x: int, y: int,
                    exclude=frozenset(), banned=frozenset(), restrict=None):
    """Edges zz' of G, live in `sys`, with z a host-neighbor of x and z' of y.

    Returned tuples are oriented (z, z'): z in N_H(x), z' in N_H(y).  A single
    undirected edge may appear in both orientations when both hold.  `exclude`
    removes vertices from both neighborhood sets, `banned` removes canonical
    edges, and `restrict` (if given) intersects both neighborhoods.
    """
    H = inst.H
    ny = H.neighbor_set(y)
    g_edges = inst._g_edges
    out = []
    for z in H.neighbors(x):
        if z in exclude or not sys.is_active(z):
            continue
        if restrict is not None and z not in restrict:
            continue
        for zp in sys.neighbors(z):
            if zp in ny and zp not in exclude and canon(z, zp) in g_edges:
                if restrict is not None and zp not in restrict:
                    continue
                if canon(z, zp) in banned:
                    continue
                out.append((z, zp))
    return out


def available_edge_count(inst, sys, x, y, exclude=frozenset(), banned=frozenset(),
                         restrict=None) -> int:
    """Number of distinct undirected available edges for (x, y)."""
    es = available_edges(inst, sys, x, y, exclude, banned, restrict)
    return len({canon(z, zp) for z, zp in es})


def make_extremal(spec: ExtremalSpec, rng=None) -> StaticGraph:
    """Deterministic host-graph families used across the experiments.

    unbalanced-bipartite(alpha): complete bipartite with |A| = floor(alpha*n),
    so every vertex of the large side has degree exactly floor(alpha*n).

    logn-bipartite: complete bipartite with |A| = floor(ln(n)/5).

    min-degree-random(alpha): a density-(alpha+0.05) random graph repaired
    greedily until the minimum degree reaches ceil(alpha*n); needs `rng`.
    """
    n = spec.n
    if spec.family == "unbalanced-bipartite":
        alpha = spec.alpha
        if alpha is None or not 0 < alpha < 0.5:
            raise BadParams("unbalanced-bipartite needs 0 < alpha < 1/2")
        a = int(math.floor(alpha * n))
        if a < 1 or n - a < 1:
            raise BadParams(f"degenerate part sizes for alpha={alpha}, n={n}")
        return complete_bipartite(a, n - a)
    if spec.family == "logn-bipartite":
        a = int(math.floor(math.log(n) / 5)) if n > 1 else 0
        if a < 1:
            raise BadParams(f"n={n} too small: floor(ln(n)/5) < 1")
        return complete_bipartite(a, n - a)
    if spec.family == "min-degree-random":
        alpha = spec.alpha
        if alpha is None or not 0 < alpha < 1:
            raise BadParams("min-degree-random needs 0 < alpha < 1")
        if rng is None:
            rng = np.random.default_rng(0)
        return min_degree_random(alpha, n, rng)
    raise BadParams(f"unknown family {spec.family!r}")


def min_degree_random(alpha: float, n: int, rng) -> StaticGraph:
    target = int(math.ceil(alpha * n))
    if target > n - 1:
        raise BadParams(f"alpha={alpha} impossible at n={n}")
    p = min(alpha + 0.05, 0.95)
    iu, ju = np.triu_indices(n, k=1)
    mask = rng.random(len(iu)) < p
    deg = np.zeros(n, dtype=np.int64)
    np.add.at(deg, iu[mask], 1)
    np.add.at(deg, ju[mask], 1)
    edge_set = set(zip(iu[mask].tolist(), ju[mask].tolist()))
    # greedy repair: wire deficient vertices to each other first
    deficient = [v for v in range(n) if deg[v] < target]
    while deficient:
        v = deficient.pop()
        if deg[v] >= target:
            continue
        order = [w for w in deficient if w != v] + [
            w for w in range(n) if deg[w] < target + 2 and w != v
        ]
        for w in order:
            if deg[v] >= target:
                break
            e = canon(v, w)
            if w != v and e not in edge_set:
                edge_set.add(e)
                deg[v] += 1
                deg[w] += 1
        while deg[v] < target:
            w = int(rng.integers(n))
            e = canon(v, w)
            if w != v and e not in edge_set:
                edge_set.add(e)
                deg[v] += 1
                deg[w] += 1
        deficient = [u for u in deficient if deg[u] < target]
    g = StaticGraph(n, sorted(edge_set))
    assert g.min_degree() >= target
    return g


def save_instance(inst: PerturbedInstance, out_dir: str, stem: str) -> dict:
    """Write H and G edge lists plus a JSON sidecar; returns the file map."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "H": os.path.join(out_dir, f"{stem}.H.edges"),
        "G": os.path.join(out_dir, f"{stem}.G.edges"),
        "meta": os.path.join(out_dir, f"{stem}.json"),
    }
    write_edge_list(inst.H, paths["H"])
    write_edge_list(inst.G, paths["G"])
    sidecar = {
        "n": inst.n,
        "d": inst.d,
        "alpha": inst.alpha,
        "seed": inst.meta.get("seed"),
        "family": inst.meta.get("family"),
    }
    with open(paths["meta"], "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths


def load_instance(out_dir: str, stem: str) -> PerturbedInstance:
    with open(os.path.join(out_dir, f"{stem}.json"), encoding="utf-8") as fh:
        sidecar = json.load(fh)
    H = read_edge_list(os.path.join(out_dir, f"{stem}.H.edges"))
    G = read_edge_list(os.path.join(out_dir, f"{stem}.G.edges"))
    return PerturbedInstance(H, G, sidecar["d"], meta=sidecar)
