"""Standard families of pure weighted complexes."""

from __future__ import annotations

import itertools
import warnings
from typing import Sequence

import numpy as np

from .complex_core import ComplexError, WeightedComplex, build_complex


def complete_skeleton(num_vertices: int, n: int) -> WeightedComplex:
    """The n-skeleton of the full simplex on ``num_vertices`` vertices."""
    if n < 0 or num_vertices < n + 1:
        raise ComplexError(f"need at least n+1 = {n + 1} vertices, got {num_vertices}")
    return build_complex(list(itertools.combinations(range(num_vertices), n + 1)))


def complete_multipartite(sizes: Sequence[int]) -> WeightedComplex:
    """All transversals of sides of the given sizes; dimension len(sizes) - 1."""
    if len(sizes) < 1 or any(int(s) < 1 for s in sizes):
        raise ComplexError("every side needs at least one vertex")
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    sides = [range(offsets[j], offsets[j + 1]) for j in range(len(sizes))]
    partition = [j for j, s in enumerate(sizes) for _ in range(int(s))]
    facets = list(itertools.product(*sides))
    return build_complex(facets, partition=partition)


def flag_random(num_vertices: int, p: float, n: int, seed: int = 0) -> WeightedComplex:
    """Pure part of the n-skeleton of the clique complex of G(N, p).

    Simplices of dimension below n that lie in no n-clique are dropped.
    """
    if not 0.0 <= p <= 1.0:
        raise ComplexError("edge probability must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    adj = np.zeros((num_vertices, num_vertices), dtype=bool)
    for u, v in itertools.combinations(range(num_vertices), 2):
        if rng.random() < p:
            adj[u, v] = adj[v, u] = True
    facets = [
        c for c in itertools.combinations(range(num_vertices), n + 1)
        if all(adj[u, v] for u, v in itertools.combinations(c, 2))
    ]
    if not facets:
        raise ComplexError("the random graph has no clique of the requested size")
    covered = {frozenset(e) for f in facets for e in itertools.combinations(f, 2)}
    covered_vertices = {v for f in facets for v in f}
    stray_edges = int(np.triu(adj, 1).sum()) - len(covered)
    stray_vertices = num_vertices - len(covered_vertices)
    if stray_edges > 0 or (n > 0 and stray_vertices > 0):
        warnings.warn(
            f"flag_random pruned {stray_vertices} vertices and {stray_edges} edges outside every {n}-clique",
            stacklevel=2,
        )
    return build_complex(facets)


def random_weights(X: WeightedComplex, seed: int = 0, low: float = 0.5, high: float = 2.0) -> WeightedComplex:
    """Same facets with independent uniform facet weights."""
    rng = np.random.default_rng(seed)
    labels = X.labels
    facets = [tuple(labels[v] for v in f) for f in X.facets]
    weights = rng.uniform(low, high, size=len(facets))
    partition = None
    if X.partition is not None:
        part = {labels[v]: X.partition[v] for v in X.vertices}
        partition = [part.get(i, 0) for i in range(max(labels) + 1)]
    return build_complex(facets, weights, partition)


gen_complete_skeleton = complete_skeleton
gen_complete_multipartite = complete_multipartite
gen_flag_random = flag_random
