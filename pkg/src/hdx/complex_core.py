"""Weighted pure simplicial complexes, links and connectivity."""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .certificates import Certificate

Simplex = tuple[int, ...]
EMPTY: Simplex = ()


class ComplexError(ValueError):
    """Raised for malformed complexes or invalid simplex queries."""


def permutation_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq`` (entries assumed distinct)."""
    sign = 1
    items = list(seq)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                sign = -sign
    return sign


def canonical(ordered: Sequence[int]) -> tuple[Simplex, int]:
    """Return the sorted simplex and the sign of the sorting permutation."""
    if len(set(ordered)) != len(ordered):
        raise ComplexError(f"repeated vertex in {tuple(ordered)}")
    return tuple(sorted(ordered)), permutation_sign(ordered)


class WeightedComplex:
    """A pure ``n``-dimensional complex with a weight on every simplex.

    Vertices are the dense integers ``0..N-1``. ``labels[v]`` records the
    vertex id in the parent complex (for links) or in the input file.
    Simplices of each dimension ``-1..n`` are stored in lexicographic order;
    the empty simplex ``()`` is the unique simplex of dimension ``-1``.
    """

    def __init__(
        self,
        n: int,
        facets: Sequence[Simplex],
        facet_weights: Sequence[float],
        labels: Sequence[int] | None = None,
        partition: Sequence[int] | None = None,
        num_sides: int | None = None,
        exact_facet_weights: Sequence[int | Fraction] | None = None,
    ):
        self.n = n
        num_vertices = 1 + max((v for f in facets for v in f), default=-1)
        self.labels: tuple[int, ...] = (
            tuple(labels) if labels is not None else tuple(range(num_vertices))
        )
        self.partition: tuple[int, ...] | None = (
            tuple(int(s) for s in partition) if partition is not None else None
        )
        self.num_sides = num_sides if num_sides is not None else n + 1

        weights: dict[Simplex, float] = {}
        exact: dict[Simplex, int | Fraction] | None = {} if exact_facet_weights is not None else None
        for i, (f, w) in enumerate(zip(facets, facet_weights)):
            weights[f] = float(w)
            if exact is not None:
                exact[f] = exact_facet_weights[i]
        by_dim: dict[int, list[Simplex]] = {n: sorted(weights)}
        # push weights down one dimension at a time: m(tau) = sum over cofacets
        for k in range(n - 1, -2, -1):
            level: dict[Simplex, float] = {}
            level_exact: dict[Simplex, int | Fraction] = {}
            for s in by_dim[k + 1]:
                w = weights[s]
                for i in range(len(s)):
                    face = s[:i] + s[i + 1 :]
                    level[face] = level.get(face, 0.0) + w
                    if exact is not None:
                        level_exact[face] = level_exact.get(face, 0) + exact[s]
            by_dim[k] = sorted(level)
            weights.update(level)
            if exact is not None:
                exact.update(level_exact)
        self._simplices = by_dim
        self._index = {k: {s: i for i, s in enumerate(v)} for k, v in by_dim.items()}
        self._weights = weights
        self._exact = exact
        self._weight_arrays = {
            k: np.array([weights[s] for s in by_dim[k]], dtype=float) for k in by_dim
        }
        self._links: dict[Simplex, WeightedComplex] = {}
        self._cofaces: dict[Simplex, tuple[int, ...]] | None = None

    # ----- basic queries
    @property
    def num_vertices(self) -> int:
        return len(self._simplices[0]) if self.n >= 0 else 0

    @property
    def vertices(self) -> list[int]:
        return [s[0] for s in self._simplices[0]]

    @property
    def facets(self) -> list[Simplex]:
        return list(self._simplices[self.n])

    def simplices(self, k: int) -> list[Simplex]:
        if k < -1 or k > self.n:
            raise ComplexError(f"dimension {k} outside -1..{self.n}")
        return self._simplices[k]

    def count(self, k: int) -> int:
        return len(self.simplices(k))

    def index(self, s: Simplex) -> int:
        try:
            return self._index[len(s) - 1][s]
        except KeyError:
            raise ComplexError(f"{s} is not a simplex of the complex") from None

    def contains(self, s: Iterable[int]) -> bool:
        t = tuple(sorted(s))
        return len(t) - 1 <= self.n and t in self._index[len(t) - 1]

    def weight(self, s: Iterable[int]) -> float:
        t = tuple(sorted(s))
        try:
            return self._weights[t]
        except KeyError:
            raise ComplexError(f"{t} is not a simplex of the complex") from None

    def weights(self, k: int) -> np.ndarray:
        """Weights of the ``k``-simplices in canonical order (read-only view)."""
        arr = self._weight_arrays[k]
        arr.setflags(write=False)
        return arr

    def exact_weight(self, s: Iterable[int]) -> int | Fraction | None:
        if self._exact is None:
            return None
        return self._exact[tuple(sorted(s))]

    @property
    def has_exact_weights(self) -> bool:
        return self._exact is not None

    @property
    def is_partite(self) -> bool:
        return self.partition is not None

    def side(self, j: int) -> list[int]:
        if self.partition is None:
            raise ComplexError("complex carries no partition")
        return [v for v in self.vertices if self.partition[v] == j]

    def cofaces(self, s: Simplex) -> tuple[int, ...]:
        """Vertices ``v`` with ``s + {v}`` a simplex, in increasing order."""
        if self._cofaces is None:
            table: dict[Simplex, set[int]] = {}
            for k in range(0, self.n + 1):
                for t in self._simplices[k]:
                    for i in range(len(t)):
                        table.setdefault(t[:i] + t[i + 1 :], set()).add(t[i])
            self._cofaces = {key: tuple(sorted(v)) for key, v in table.items()}
        return self._cofaces.get(tuple(s), ())

    def mass(self, vertex_set: Iterable[int]) -> float:
        """m(U): total weight of a set of vertices."""
        return float(sum(self._weights[(v,)] for v in vertex_set))

    # ----- links
    def link(self, tau: Iterable[int]) -> "WeightedComplex":
        t = tuple(sorted(tau))
        if t == EMPTY:
            return self
        if not self.contains(t):
            raise ComplexError(f"{t} is not a simplex of the complex")
        if len(t) - 1 >= self.n:
            raise ComplexError("the link of a top-dimensional simplex is not a complex here")
        cached = self._links.get(t)
        if cached is not None:
            return cached
        tset = set(t)
        rest: list[tuple[Simplex, float, int | Fraction | None]] = []
        for f in self._simplices[self.n]:
            if tset.issubset(f):
                r = tuple(v for v in f if v not in tset)
                rest.append((r, self._weights[f], None if self._exact is None else self._exact[f]))
        used = sorted({v for r, _, _ in rest for v in r})
        local = {v: i for i, v in enumerate(used)}
        facets = [tuple(local[v] for v in r) for r, _, _ in rest]
        part = [self.partition[v] for v in used] if self.partition is not None else None
        exact = [e for _, _, e in rest] if self._exact is not None else None
        lk = WeightedComplex(
            self.n - len(t),
            facets,
            [w for _, w, _ in rest],
            labels=used,
            partition=part,
            num_sides=self.num_sides,
            exact_facet_weights=exact,
        )
        self._links[t] = lk
        return lk

    def to_parent(self, s: Iterable[int]) -> Simplex:
        """Map a simplex in local vertex ids to the ids stored in ``labels``."""
        return tuple(self.labels[v] for v in s)

    def __repr__(self) -> str:
        return (
            f"WeightedComplex(n={self.n}, vertices={self.num_vertices}, "
            f"facets={len(self._simplices[self.n])}, partite={self.is_partite})"
        )


def build_complex(
    facets: Sequence[Iterable[int]],
    facet_weights: Sequence[float] | None = None,
    partition: Sequence[int] | None = None,
) -> WeightedComplex:
    """Build a complex from its top simplices; lower weights are derived.

    Vertex ids may be arbitrary non-negative integers; they are compressed to
    ``0..N-1`` preserving order, with the originals kept in ``labels``.
    ``partition`` (if given) is indexed by the original vertex ids.
    """
    if len(facets) == 0:
        raise ComplexError("a complex needs at least one facet")
    raw = [tuple(int(v) for v in f) for f in facets]
    sizes = {len(f) for f in raw}
    if len(sizes) != 1:
        raise ComplexError(f"facets of mixed dimensions: sizes {sorted(sizes)}")
    n = sizes.pop() - 1
    if n < 0:
        raise ComplexError("facets must be nonempty")
    for f in raw:
        if len(set(f)) != len(f):
            raise ComplexError(f"repeated vertex in facet {f}")
        if min(f) < 0:
            raise ComplexError(f"negative vertex id in facet {f}")
    canon = [tuple(sorted(f)) for f in raw]
    if len(set(canon)) != len(canon):
        raise ComplexError("duplicate facet")
    if facet_weights is None:
        weights: list[float] = [1.0] * len(canon)
        exact: list[int | Fraction] | None = [1] * len(canon)
    else:
        if len(facet_weights) != len(canon):
            raise ComplexError("facet_weights length does not match facets")
        weights = [float(w) for w in facet_weights]
        if any(not (w > 0 and math.isfinite(w)) for w in weights):
            raise ComplexError("facet weights must be positive and finite")
        exact = [int(w) for w in weights] if all(float(w).is_integer() for w in weights) else None
    used = sorted({v for f in canon for v in f})
    local = {v: i for i, v in enumerate(used)}
    dense = [tuple(local[v] for v in f) for f in canon]
    part = None
    if partition is not None:
        try:
            part = [int(partition[v]) for v in used]
        except IndexError:
            raise ComplexError("partition does not label every vertex") from None
        if any(s < 0 or s > n for s in part):
            raise ComplexError(f"side labels must lie in 0..{n}")
        for f in dense:
            if sorted(part[v] for v in f) != list(range(n + 1)):
                raise ComplexError(f"facet {f} does not meet every side exactly once")
    return WeightedComplex(n, dense, weights, labels=used, partition=part, exact_facet_weights=exact)


def enumerate_ordered(X: WeightedComplex, k: int) -> list[tuple[int, ...]]:
    """All orderings of all ``k``-simplices, grouped by canonical simplex."""
    out: list[tuple[int, ...]] = []
    for s in X.simplices(k):
        out.extend(itertools.permutations(s))
    return out


def weight_formula_check(X: WeightedComplex, l: int, tol: float = 1e-12) -> Certificate:
    """Check sum_{sigma in X(l), tau in sigma} m(sigma) = m(tau)/(l-k)! for all tau."""
    if l < -1 or l > X.n:
        raise ComplexError(f"dimension {l} outside -1..{X.n}")
    totals: dict[Simplex, float] = {}
    for s in X.simplices(l):
        w = X.weight(s)
        for r in range(len(s)):
            for face in itertools.combinations(s, r):
                totals[face] = totals.get(face, 0.0) + w
    worst = 0.0
    witness: dict = {}
    for k in range(-1, l):
        for tau in X.simplices(k):
            expected = X.weight(tau) / math.factorial(l - k)
            got = totals.get(tau, 0.0)
            err = abs(got - expected) / abs(expected)
            if err > worst:
                worst, witness = err, {"simplex": list(tau), "sum": got, "expected": expected}
    return Certificate.check(
        f"weight_sum_over_l_simplices[l={l}]",
        "sum of m over l-simplices containing tau equals m(tau)/(l-k)!",
        worst,
        "<=",
        0.0,
        tol,
        witness,
    )


def weight_recursion_check(X: WeightedComplex, tol: float = 1e-12) -> Certificate:
    """Check m(tau) = sum of m over cofacets for every non-top simplex."""
    worst = 0.0
    witness: dict = {}
    for k in range(-1, X.n):
        for tau in X.simplices(k):
            total = sum(X.weight(tuple(sorted(tau + (v,)))) for v in X.cofaces(tau))
            err = abs(total - X.weight(tau)) / X.weight(tau)
            if err > worst:
                worst, witness = err, {"simplex": list(tau)}
    return Certificate.check(
        "weight_recursion", "m(tau) = sum of m(sigma) over cofacets sigma", worst, "<=", 0.0, tol, witness
    )


def homogeneous_weight_check(X: WeightedComplex) -> Certificate:
    """Exact integer check m(tau) = (n-k)! #{facets containing tau} (unit facet weights)."""
    if not X.has_exact_weights or any(X.exact_weight(f) != 1 for f in X.facets):
        return Certificate.not_applicable(
            "homogeneous_weight_formula",
            "m(tau) = (n-k)! #{n-simplices containing tau}",
            "facet weights are not all 1",
        )
    counts: dict[Simplex, int] = {}
    for f in X.facets:
        for r in range(len(f) + 1):
            for face in itertools.combinations(f, r):
                counts[face] = counts.get(face, 0) + 1
    mismatches = 0
    witness: dict = {}
    for k in range(-1, X.n + 1):
        for tau in X.simplices(k):
            if X.exact_weight(tau) != math.factorial(X.n - k) * counts[tau]:
                mismatches += 1
                witness = {"simplex": list(tau)}
    return Certificate.check(
        "homogeneous_weight_formula",
        "m(tau) = (n-k)! #{n-simplices containing tau}",
        mismatches,
        "==",
        0,
        0.0,
        witness,
    )


@dataclass
class ConnectivityReport:
    connected: bool
    links_connected: bool
    gallery_connected: bool
    disconnected_links: list[Simplex] = field(default_factory=list)

    @property
    def hypotheses_hold(self) -> bool:
        return self.connected and self.links_connected


def _graph_connected(X: WeightedComplex) -> bool:
    verts = X.vertices
    if len(verts) <= 1:
        return True
    if X.n == 0:
        return False
    adj: dict[int, list[int]] = {v: [] for v in verts}
    for a, b in X.simplices(1):
        adj[a].append(b)
        adj[b].append(a)
    seen = {verts[0]}
    queue = deque([verts[0]])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(verts)


def gallery_connected(X: WeightedComplex) -> bool:
    """Breadth-first search over facets adjacent through codimension-one faces."""
    facets = X.facets
    if len(facets) <= 1:
        return True
    by_ridge: dict[Simplex, list[int]] = {}
    for i, f in enumerate(facets):
        for j in range(len(f)):
            by_ridge.setdefault(f[:j] + f[j + 1 :], []).append(i)
    seen = {0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        f = facets[i]
        for j in range(len(f)):
            for other in by_ridge[f[:j] + f[j + 1 :]]:
                if other not in seen:
                    seen.add(other)
                    queue.append(other)
    return len(seen) == len(facets)


def connectivity_report(X: WeightedComplex) -> ConnectivityReport:
    """Connectivity of X, of every link of positive dimension, and of galleries."""
    bad: list[Simplex] = []
    for k in range(0, X.n - 1):
        for tau in X.simplices(k):
            if not _graph_connected(X.link(tau)):
                bad.append(tau)
    return ConnectivityReport(
        connected=_graph_connected(X),
        links_connected=not bad,
        gallery_connected=gallery_connected(X),
        disconnected_links=bad,
    )
