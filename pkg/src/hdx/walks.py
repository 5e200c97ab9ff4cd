"""Graphs on k-simplices, their weight-induced random walks, and coarse path sums.

An edge of the k-graph joins two k-simplices whose union is a (k+1)-simplex.
For ``k = -1`` the graph has the single vertex ``()`` and one loop per vertex of
the complex; loop ``v`` is keyed as ``((), (v,))``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .certificates import Certificate, relative_gap
from .complex_core import EMPTY, ComplexError, Simplex, WeightedComplex

EdgeKey = tuple[Simplex, Simplex]
SubsetFamily = Sequence[Iterable[int]]


@dataclass
class KGraph:
    """The k-graph with conductance, stationary measure and transitions."""

    k: int
    vertices: list[Simplex]
    edges: list[EdgeKey]
    conductance: dict[EdgeKey, float]
    stationary: dict[Simplex, float]
    incident: dict[Simplex, list[EdgeKey]] = field(repr=False)
    complex: WeightedComplex = field(repr=False)

    @property
    def is_loop_graph(self) -> bool:
        return self.k == -1

    def other_end(self, v: Simplex, e: EdgeKey) -> Simplex:
        if self.is_loop_graph:
            return EMPTY
        a, b = e
        if v == a:
            return b
        if v == b:
            return a
        raise ComplexError(f"edge {e} is not incident to {v}")

    def transition(self, v: Simplex, e: EdgeKey) -> float:
        """Probability of leaving ``v`` through ``e``."""
        X = self.complex
        if self.is_loop_graph:
            return X.weight(e[1]) / X.weight(EMPTY)
        return self.conductance[e] / ((self.k + 1) * X.weight(v))

    def edge_set(self, keys: Iterable[EdgeKey]) -> frozenset[EdgeKey]:
        keys = frozenset(keys)
        unknown = keys - set(self.conductance)
        if unknown:
            raise ComplexError(f"edges not in the {self.k}-graph: {sorted(unknown)[:3]}")
        return keys


def _edge_key(a: Simplex, b: Simplex) -> EdgeKey:
    return (a, b) if a <= b else (b, a)


def build_kgraph(X: WeightedComplex, k: int) -> KGraph:
    """The k-graph of X for -1 <= k <= n-1."""
    if k < -1 or k > X.n - 1:
        raise ComplexError(f"k-graph needs -1 <= k <= n-1, got {k}")
    if k == -1:
        edges = [(EMPTY, (v,)) for v in X.vertices]
        cond = {e: X.weight(e[1]) for e in edges}
        return KGraph(-1, [EMPTY], edges, cond, {EMPTY: X.weight(EMPTY)}, {EMPTY: list(edges)}, X)
    vertices = X.simplices(k)
    cond: dict[EdgeKey, float] = {}
    incident: dict[Simplex, list[EdgeKey]] = {v: [] for v in vertices}
    for sigma in X.simplices(k + 1):
        w = X.weight(sigma)
        faces = list(itertools.combinations(sigma, k + 1))
        for a, b in itertools.combinations(faces, 2):
            e = _edge_key(a, b)
            cond[e] = w
            incident[a].append(e)
            incident[b].append(e)
    stationary = {v: (k + 1) * X.weight(v) for v in vertices}
    return KGraph(k, vertices, list(cond), cond, stationary, incident, X)


def walk_checks(G: KGraph, tol: float = 1e-12) -> list[Certificate]:
    """Row sums of the transition kernel and detailed balance."""
    worst_row = 0.0
    for v in G.vertices:
        total = sum(G.transition(v, e) for e in G.incident[v])
        worst_row = max(worst_row, abs(total - 1.0))
    worst_rev = 0.0
    if not G.is_loop_graph:
        for e in G.edges:
            a, b = e
            lhs = G.stationary[a] * G.transition(a, e)
            rhs = G.stationary[b] * G.transition(b, e)
            worst_rev = max(worst_rev, relative_gap(lhs, rhs))
    return [
        Certificate.check(f"walk_stochastic[k={G.k}]", "sum over edges of mu_k(tau, e) = 1", worst_row, "<=", 0.0, tol, {}),
        Certificate.check(
            f"walk_reversible[k={G.k}]", "nu_k(a) mu_k(a,b) = nu_k(b) mu_k(b,a)", worst_rev, "<=", 0.0, tol, {}
        ),
    ]


# ----- families of vertex sets


def _class_map(X: WeightedComplex, family: SubsetFamily) -> tuple[dict[int, int], list[frozenset[int]]]:
    sets = [frozenset(int(v) for v in U) for U in family]
    owner: dict[int, int] = {}
    for i, U in enumerate(sets):
        for v in U:
            if v in owner:
                raise ComplexError(f"vertex {v} lies in two sets of the family")
            if not 0 <= v < X.num_vertices:
                raise ComplexError(f"vertex {v} is not a vertex of the complex")
            owner[v] = i
    return owner, sets


def spans_transversally(s: Simplex, owner: dict[int, int]) -> bool:
    """True when every vertex of s lies in a set of the family and no two share a set."""
    seen = set()
    for v in s:
        c = owner.get(v)
        if c is None or c in seen:
            return False
        seen.add(c)
    return True


def spanned_simplices(X: WeightedComplex, k: int, family: SubsetFamily) -> list[Simplex]:
    """k-simplices of the subcomplex spanned by the family."""
    owner, sets = _class_map(X, family)
    if k == -1:
        return [EMPTY] if any(sets) else []
    if k + 1 > len(family):
        return []
    return [s for s in X.simplices(k) if spans_transversally(s, owner)]


def spanned_subgraph(X: WeightedComplex, k: int, family: SubsetFamily) -> tuple[list[Simplex], frozenset[EdgeKey]]:
    """Vertices and edges of the k-graph of the complex spanned by the family."""
    owner, sets = _class_map(X, family)
    if k == -1:
        loops = frozenset((EMPTY, (v,)) for U in sets for v in U)
        return ([EMPTY] if loops else []), loops
    verts = spanned_simplices(X, k, family)
    edges = set()
    for sigma in spanned_simplices(X, k + 1, family):
        faces = list(itertools.combinations(sigma, k + 1))
        for a, b in itertools.combinations(faces, 2):
            edges.add(_edge_key(a, b))
    return verts, frozenset(edges)


def m_tuple(X: WeightedComplex, family: SubsetFamily) -> float:
    """Total weight of the k-simplices with exactly one vertex in each set (k = len - 1)."""
    k = len(family) - 1
    if k < 0:
        raise ComplexError("family must contain at least one set")
    owner, sets = _class_map(X, family)
    if any(not U for U in sets) or k > X.n:
        return 0.0
    return float(sum(X.weight(s) for s in X.simplices(k) if spans_transversally(s, owner)))


# ----- coarse paths


def path_mu(G: KGraph, start: Iterable[Simplex], edge_sets: Sequence[Iterable[EdgeKey]]) -> float:
    """Sum over admissible paths of the product of transition probabilities."""
    steps = [G.edge_set(E) for E in edge_sets]
    return sum(_path_from(G, steps)(v, 0) for v in sorted(set(start)))


def path_c(G: KGraph, start: Iterable[Simplex], edge_sets: Sequence[Iterable[EdgeKey]]) -> float:
    """Stationary-weighted coarse path probability."""
    steps = [G.edge_set(E) for E in edge_sets]
    walk = _path_from(G, steps)
    return float(sum(G.stationary[v] * walk(v, 0) for v in sorted(set(start))))


def _path_from(G: KGraph, steps: list[frozenset[EdgeKey]]):
    @lru_cache(maxsize=None)
    def walk(v: Simplex, i: int) -> float:
        if i == len(steps):
            return 1.0
        total = 0.0
        for e in G.incident.get(v, ()):
            if e in steps[i]:
                total += G.transition(v, e) * walk(G.other_end(v, e), i + 1)
        return total

    return walk


def h_inner(X: WeightedComplex, k: int, family: SubsetFamily, graph: KGraph | None = None) -> float:
    """Inner connectivity of the family, computed from its definition as a path ratio."""
    if len(family) != k + 1:
        raise ComplexError(f"expected {k + 1} sets, got {len(family)}")
    if k < 0 or k > X.n - 1:
        raise ComplexError(f"inner connectivity needs 0 <= k <= n-1, got {k}")
    _, sets = _class_map(X, family)
    if any(not U for U in sets):
        return 0.0
    G = graph if graph is not None else build_kgraph(X, k - 1)
    verts, edges = spanned_subgraph(X, k - 1, family)
    if not edges:
        return 0.0
    one = path_c(G, verts, [edges])
    two = path_c(G, verts, [edges, edges])
    return two / one if one > 0 else 0.0


def h_inner_closed_form(X: WeightedComplex, k: int, family: SubsetFamily, graph: KGraph | None = None) -> float:
    """m(U)/m(empty) for k = 0; two-step path sum over k(k+1) m(U_0..U_k) otherwise."""
    _, sets = _class_map(X, family)
    if any(not U for U in sets):
        return 0.0
    if k == 0:
        return X.mass(sets[0]) / X.weight(EMPTY)
    mass = m_tuple(X, family)
    if mass == 0:
        return 0.0
    G = graph if graph is not None else build_kgraph(X, k - 1)
    verts, edges = spanned_subgraph(X, k - 1, family)
    return path_c(G, verts, [edges, edges]) / (k * (k + 1) * mass)


def walk_identity_suite(
    X: WeightedComplex, families: Sequence[SubsetFamily] | None = None, tol: float = 1e-12
) -> list[Certificate]:
    """Stochasticity, reversibility and the closed forms of the coarse path sums."""
    certs: list[Certificate] = []
    graphs = {k: build_kgraph(X, k) for k in range(-1, X.n)}
    for k in range(-1, X.n):
        certs.extend(walk_checks(graphs[k], tol))
    if families is None:
        families = default_families(X)
    G_minus = graphs[-1]
    worst_minus = 0.0
    worst_one = {k: 0.0 for k in range(0, X.n)}
    worst_two = {k: 0.0 for k in range(1, X.n)}
    worst_inner = 0.0
    for fam in families:
        sets = [frozenset(U) for U in fam]
        l = len(sets) - 1
        # level -1: product formula for the loop walk
        loops = [spanned_subgraph(X, -1, [U])[1] for U in sets]
        lhs = path_c(G_minus, [EMPTY], loops)
        rhs = 1.0
        for U in sets:
            rhs *= X.mass(U)
        rhs /= X.weight(EMPTY) ** l
        worst_minus = max(worst_minus, relative_gap(lhs, rhs))
        # one step at level k = l - 1
        k = l - 1
        if 0 <= k <= X.n - 1:
            G = graphs[k]
            verts, _ = spanned_subgraph(X, k, sets[: k + 1])
            _, edges = spanned_subgraph(X, k, sets)
            lhs = path_c(G, verts, [edges])
            worst_one[k] = max(worst_one[k], relative_gap(lhs, (k + 1) * m_tuple(X, sets)))
        # two steps at level k - 1 with k = l
        k = l
        if 1 <= k <= X.n - 1:
            G = graphs[k - 1]
            verts, edges = spanned_subgraph(X, k - 1, sets)
            lhs = path_c(G, verts, [edges])
            worst_two[k] = max(worst_two[k], relative_gap(lhs, k * (k + 1) * m_tuple(X, sets)))
        if 0 <= l <= X.n - 1:
            worst_inner = max(worst_inner, abs(
                h_inner(X, l, sets, graphs[l - 1]) - h_inner_closed_form(X, l, sets, graphs[l - 1])
            ))
    certs.append(
        Certificate.check(
            "loop_walk_product", "pathc_{-1}(empty, E(U_0)..E(U_l)) = m(U_0)...m(U_l)/m(empty)^l",
            worst_minus, "<=", 0.0, tol, {"families": len(families)},
        )
    )
    for k, w in worst_one.items():
        certs.append(
            Certificate.check(
                f"one_step_path_conductance[k={k}]", "pathc_k(V_k(U_0..U_k), E_k(U_0..U_k+1)) = (k+1) m(U_0..U_k+1)",
                w, "<=", 0.0, tol, {"k": k},
            )
        )
    for k, w in worst_two.items():
        certs.append(
            Certificate.check(
                f"spanned_path_conductance[k={k}]", "pathc_{k-1}(V_{k-1}(U), E_{k-1}(U)) = k(k+1) m(U_0..U_k)",
                w, "<=", 0.0, tol, {"k": k},
            )
        )
    certs.append(
        Certificate.check(
            "inner_connectivity_closed_form", "h_inner by definition equals the closed form",
            worst_inner, "<=", 0.0, tol, {},
        )
    )
    return certs


def default_families(X: WeightedComplex, max_families: int = 400, seed: int = 0) -> list[list[frozenset[int]]]:
    """All families of disjoint nonempty sets up to length n+1 when small, else a random sample."""
    import numpy as np

    N = X.num_vertices
    out: list[list[frozenset[int]]] = []
    total = sum((l + 2) ** N for l in range(0, X.n + 1))
    if total <= max_families * 4:
        for l in range(0, X.n + 1):
            for labels in itertools.product(range(l + 2), repeat=N):
                sets = [frozenset(v for v in range(N) if labels[v] == i) for i in range(l + 1)]
                if all(sets):
                    out.append(sets)
        return out
    rng = np.random.default_rng(seed)
    while len(out) < max_families:
        l = int(rng.integers(0, X.n + 1))
        labels = rng.integers(0, l + 2, size=N)
        sets = [frozenset(int(v) for v in np.flatnonzero(labels == i)) for i in range(l + 1)]
        if all(sets):
            out.append(sets)
    return out
