"""Affine images of complexes, weighted overlap and the partition tools behind it.

All hulls are closed: a point on the boundary of an image simplex counts as
covered.  Geometric comparisons share the tolerance ``GEOM_TOL``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .certificates import Certificate
from .complex_core import ComplexError, WeightedComplex

GEOM_TOL = 1e-9
ALPHA_TOL = 1e-10
ALPHA_MARGIN = 1e-6

__all__ = [
    "GEOM_TOL",
    "Embedding",
    "OverlapResult",
    "ThresholdResult",
    "PartitionResult",
    "point_in_closed_simplex",
    "coverage",
    "overlap_bruteforce",
    "overlap_threshold",
    "partite_overlap_threshold",
    "heavy_vertex_check",
    "balanced_partition",
    "alpha_constant",
    "default_eps2",
    "appendix_constants",
    "centerpoint_bruteforce",
    "separated_family_check",
    "hyperplane_meets",
    "maximize_t_sets",
]


# ----- embeddings


@dataclass
class Embedding:
    """Coordinates in R^d keyed by the vertex ids of the input (complex labels)."""

    coordinates: dict[int, np.ndarray]

    def __post_init__(self) -> None:
        coords = {int(v): np.asarray(p, dtype=float).reshape(-1) for v, p in self.coordinates.items()}
        dims = {p.shape[0] for p in coords.values()}
        if len(dims) > 1:
            raise ValueError(f"points of different dimensions: {sorted(dims)}")
        for v, p in coords.items():
            if not np.all(np.isfinite(p)):
                raise ValueError(f"vertex {v} has a non-finite coordinate")
        self.coordinates = coords

    @property
    def dimension(self) -> int:
        return next(iter(self.coordinates.values())).shape[0] if self.coordinates else 0

    def points_for(self, X: WeightedComplex) -> np.ndarray:
        """Rows in the dense vertex order of X."""
        missing = [X.labels[v] for v in X.vertices if X.labels[v] not in self.coordinates]
        if missing:
            raise ComplexError(f"no coordinates for vertices {missing[:5]}")
        return np.array([self.coordinates[X.labels[v]] for v in X.vertices], dtype=float)

    def general_position(self, tol: float = GEOM_TOL) -> bool:
        """No d+1 image points are affinely dependent."""
        pts = np.array(list(self.coordinates.values()))
        d = self.dimension
        for combo in itertools.combinations(range(len(pts)), min(d + 1, len(pts))):
            diffs = pts[list(combo[1:])] - pts[combo[0]]
            if diffs.size and np.linalg.matrix_rank(diffs, tol=tol) < len(combo) - 1:
                return False
        return True

    def transformed(self, A: np.ndarray, b: np.ndarray) -> "Embedding":
        return Embedding({v: A @ p + b for v, p in self.coordinates.items()})

    @classmethod
    def from_array(cls, X: WeightedComplex, points: np.ndarray) -> "Embedding":
        return cls({X.labels[v]: np.asarray(points[v], dtype=float) for v in X.vertices})


# ----- point location


def _affine_coordinates(p: np.ndarray, verts: np.ndarray, tol: float) -> np.ndarray | None:
    """Barycentric coordinates when p lies in the affine span of independent verts."""
    base = verts[0]
    D = (verts[1:] - base).T
    if D.size == 0:
        return np.array([1.0]) if np.linalg.norm(p - base) <= tol else None
    coef, *_ = np.linalg.lstsq(D, p - base, rcond=None)
    if np.linalg.norm(D @ coef - (p - base)) > tol:
        return None
    return np.concatenate([[1.0 - coef.sum()], coef])


def point_in_closed_simplex(p: Sequence[float], verts: Sequence[Sequence[float]], tol: float = GEOM_TOL) -> bool:
    """Whether p lies in the closed convex hull of the given points.

    Affinely independent vertex sets use barycentric coordinates (all >= -tol).
    Degenerate sets are handled through their affinely independent subsets,
    which cover the hull by Caratheodory's theorem.
    """
    p = np.asarray(p, dtype=float).reshape(-1)
    V = np.asarray(verts, dtype=float)
    if V.ndim != 2 or V.shape[1] != p.shape[0]:
        raise ValueError(f"dimension mismatch: point in R^{p.shape[0]}, vertices {V.shape}")
    rank = np.linalg.matrix_rank(V[1:] - V[0], tol=tol) if len(V) > 1 else 0
    if rank == len(V) - 1:
        bary = _affine_coordinates(p, V, tol)
        return bary is not None and bool(np.all(bary >= -tol))
    for size in range(rank + 1, 0, -1):
        for combo in itertools.combinations(range(len(V)), size):
            sub = V[list(combo)]
            if size > 1 and np.linalg.matrix_rank(sub[1:] - sub[0], tol=tol) != size - 1:
                continue
            bary = _affine_coordinates(p, sub, tol)
            if bary is not None and np.all(bary >= -tol):
                return True
    return False


def _covers_batch(O: np.ndarray, simplices: np.ndarray, tol: float = GEOM_TOL) -> np.ndarray:
    """Closed containment of O in many simplices (shape (T, d+1, d)); fast path for d <= 2."""
    T, size, d = simplices.shape
    out = np.zeros(T, dtype=bool)
    if T == 0:
        return out
    if d == 1 and size == 2:
        lo = simplices[:, :, 0].min(axis=1)
        hi = simplices[:, :, 0].max(axis=1)
        return (O[0] >= lo - tol) & (O[0] <= hi + tol)
    if d == 2 and size == 3:
        a, b, c = simplices[:, 0], simplices[:, 1], simplices[:, 2]

        def cross(u, v):
            return u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]

        area = cross(b - a, c - a)
        scale = np.maximum(1.0, np.abs(simplices).reshape(T, -1).max(axis=1)) ** 2
        good = np.abs(area) > tol * scale
        o = O[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            la = cross(b - o, c - o) / area
            lb = cross(c - o, a - o) / area
            lc = cross(a - o, b - o) / area
        inside = (la >= -tol) & (lb >= -tol) & (lc >= -tol)
        out[good] = inside[good]
        for t in np.flatnonzero(~good):
            out[t] = point_in_closed_simplex(O, simplices[t], tol)
        return out
    for t in range(T):
        out[t] = point_in_closed_simplex(O, simplices[t], tol)
    return out


# ----- overlap


@dataclass
class OverlapResult:
    best_point: np.ndarray
    covered_weight: float
    total_weight: float
    ratio: float
    mode: str
    candidates: int
    covering_facets: list[tuple[int, ...]] = field(default_factory=list)
    threshold: float | None = None

    def to_dict(self) -> dict:
        return {
            "best_point": [float(x) for x in self.best_point],
            "covered_weight": self.covered_weight,
            "total_weight": self.total_weight,
            "ratio": self.ratio,
            "mode": self.mode,
            "candidates": self.candidates,
            "covering_facets": [list(f) for f in self.covering_facets],
            "threshold": self.threshold,
        }


def coverage(X: WeightedComplex, points: np.ndarray, O: Sequence[float], tol: float = GEOM_TOL) -> tuple[float, np.ndarray]:
    """Weight of the facets whose image contains O, and the boolean mask over facets."""
    facets = np.array(X.facets, dtype=np.int64)
    mask = _covers_batch(np.asarray(O, dtype=float), points[facets], tol)
    return float(X.weights(X.n)[mask].sum()), mask


def _segment_intersections(segments: np.ndarray, tol: float) -> list[np.ndarray]:
    """Pairwise crossing points of planar segments (collinear overlaps contribute their endpoints)."""
    out = []
    P, Q = segments[:, 0], segments[:, 1]
    R = Q - P
    for i in range(len(segments)):
        r = R[i]
        s = R[i + 1 :]
        denom = r[0] * s[:, 1] - r[1] * s[:, 0]
        qp = P[i + 1 :] - P[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (qp[:, 0] * s[:, 1] - qp[:, 1] * s[:, 0]) / denom
            u = (qp[:, 0] * r[1] - qp[:, 1] * r[0]) / denom
        ok = (np.abs(denom) > tol) & (t >= -tol) & (t <= 1 + tol) & (u >= -tol) & (u <= 1 + tol)
        for j in np.flatnonzero(ok):
            out.append(P[i] + t[j] * r)
    return out


def _candidate_points(X: WeightedComplex, points: np.ndarray, tol: float) -> np.ndarray:
    cands = [points[v] for v in X.vertices]
    if X.n == 2:
        edges = sorted({e for f in X.facets for e in itertools.combinations(f, 2)})
        segs = np.array([[points[a], points[b]] for a, b in edges])
        cands.extend(_segment_intersections(segs, tol))
    arr = np.array(cands)
    # deduplicate on rounded keys but keep exact coordinates (vertices stay vertices)
    _, first = np.unique(np.round(arr, 12), axis=0, return_index=True)
    return arr[np.sort(first)]


def overlap_bruteforce(
    X: WeightedComplex,
    embedding: Embedding | np.ndarray,
    grid: int | None = None,
    tol: float = GEOM_TOL,
) -> OverlapResult:
    """Best covering point and its covered weight.

    Without ``grid`` the search is exact for n <= 2: coverage by closed image
    simplices is maximized at an image vertex or at a crossing of two image
    edges.  With ``grid = R`` the candidates are the image vertices plus an
    R-point-per-axis lattice over the bounding box (a lower bound for any n).
    """
    points = embedding.points_for(X) if isinstance(embedding, Embedding) else np.asarray(embedding, dtype=float)
    if points.shape != (X.num_vertices, X.n):
        raise ComplexError(f"expected {X.num_vertices} points in R^{X.n}, got shape {points.shape}")
    if grid is None:
        if X.n > 2:
            raise ComplexError("exact overlap search is only available for n <= 2; pass a grid resolution")
        cands = _candidate_points(X, points, tol)
        mode = "exact"
    else:
        if grid < 1:
            raise ValueError("grid resolution must be positive")
        lo, hi = points.min(axis=0), points.max(axis=0)
        axes = [np.linspace(lo[i], hi[i], grid) for i in range(X.n)]
        lattice = np.array(list(itertools.product(*axes))).reshape(-1, X.n)
        cands = np.vstack([points, lattice])
        mode = f"grid:{grid}"
    total = float(X.weights(X.n).sum())
    best = (-1.0, cands[0], None)
    for O in cands:
        w, mask = coverage(X, points, O, tol)
        if w > best[0] + 1e-12 * max(1.0, total):
            best = (w, O, mask)
    w, O, mask = best
    covering = [X.facets[i] for i in np.flatnonzero(mask)]
    return OverlapResult(np.array(O), w, total, w / total if total > 0 else 0.0, mode, len(cands), covering)


def heavy_vertex_check(
    X: WeightedComplex, embedding: Embedding | np.ndarray, omega: float, tol: float = GEOM_TOL
) -> list[Certificate]:
    """Every vertex with m(u) >= omega m(X^0)/(2(n+1)) covers >= omega/(2(n+1)^2) m(X^n) at its image.

    Also checks the intermediate facts: the image of u covers at least the star
    of u, whose weight is m(u)/n!, and m(X^0) = (n+1)! m(X^n).
    """
    points = embedding.points_for(X) if isinstance(embedding, Embedding) else np.asarray(embedding, dtype=float)
    n = X.n
    total_top = float(X.weights(n).sum())
    total_vertex = float(X.weights(0).sum())
    certs = [
        Certificate.check(
            "vertex_mass_total", "m(X^0) = (n+1)! m(X^n)",
            total_vertex, "==", math.factorial(n + 1) * total_top, 1e-9 * max(1.0, total_vertex), {},
        )
    ]
    cut = omega * total_vertex / (2 * (n + 1))
    heavy = [v for v in X.vertices if X.weight((v,)) >= cut]
    anchor = "m(u) >= omega m(X^0)/(2(n+1)) implies phi(u) covers >= omega/(2(n+1)^2) m(X^n)"
    if not heavy:
        certs.append(Certificate.not_applicable("heavy_vertex_coverage", anchor, "no vertex reaches the heavy cut", {"cut": cut}))
        return certs
    worst = None
    for v in heavy:
        covered, _ = coverage(X, points, points[v], tol)
        star = sum(X.weight(f) for f in X.facets if v in f)
        certs.append(
            Certificate.check(
                f"star_weight[v={X.labels[v]}]", "weight of facets containing u equals m(u)/n!",
                star, "==", X.weight((v,)) / math.factorial(n), 1e-9 * max(1.0, star), {},
            )
        )
        slack = covered - omega / (2 * (n + 1) ** 2) * total_top
        if worst is None or slack < worst[0]:
            worst = (slack, v, covered)
    certs.append(
        Certificate.check(
            "heavy_vertex_coverage", anchor, worst[2], ">=", omega / (2 * (n + 1) ** 2) * total_top, tol,
            {"vertex": X.labels[worst[1]], "heavy_vertices": len(heavy), "cut": cut},
        )
    )
    return certs


# ----- thresholds


@dataclass
class ThresholdResult:
    value: float
    applicable: bool
    reason: str
    terms: tuple[float, float]
    stated_condition: bool | None = None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "applicable": self.applicable,
            "reason": self.reason,
            "terms": list(self.terms),
            "stated_condition": self.stated_condition,
        }


def overlap_threshold(n: int, A: float, E: float, omega: float, c: float) -> ThresholdResult:
    """min{omega/(2(n+1)^2), A n! c/2 ((c/(2(n+1)))^n - E/A)}, applicable when E/A < (c/(2(n+1)))^n."""
    if not A > 0:
        return ThresholdResult(float("nan"), False, "leading constant must be positive", (float("nan"), float("nan")))
    first = omega / (2 * (n + 1) ** 2)
    base = (c / (2 * (n + 1))) ** n
    second = A * math.factorial(n) * c / 2 * (base - E / A)
    ok = E / A < base
    value = min(first, second)
    return ThresholdResult(value, ok and value > 0, "" if ok else "E/A is not below (c/(2(n+1)))^n", (first, second))


def partite_overlap_threshold(n: int, E: float, omega: float, c: float) -> ThresholdResult:
    """min{omega/(n+1)^2, c(c^n - (n+1)! E)}.

    The threshold is positive exactly when E < c^n/(n+1)!; that condition gates
    applicability, and the weaker E < c^n/n! is reported alongside.
    """
    first = omega / (n + 1) ** 2
    second = c * (c**n - math.factorial(n + 1) * E)
    ok = E < c**n / math.factorial(n + 1)
    value = min(first, second)
    return ThresholdResult(
        value, ok and value > 0, "" if ok else "E is not below c^n/(n+1)!", (first, second),
        stated_condition=E < c**n / math.factorial(n),
    )


# ----- balanced partition


@dataclass
class PartitionResult:
    sides: list[list[int]]
    masses: list[float]
    total: float
    cut: float
    heavy_vertex: int | None

    @property
    def balanced(self) -> bool:
        return all(m > self.cut for m in self.masses)

    def to_dict(self) -> dict:
        return {
            "sides": self.sides,
            "masses": self.masses,
            "total": self.total,
            "cut": self.cut,
            "heavy_vertex": self.heavy_vertex,
            "balanced": self.balanced,
        }


def balanced_partition(weights: Mapping[int, float] | Sequence[float], n: int) -> PartitionResult:
    """Greedy split into n+1 sides: heaviest remaining item goes to the currently lightest side.

    When some item weighs at least m(V)/(2(n+1)) the precondition fails; the
    greedy sides are still returned together with that heavy item.
    """
    items = dict(weights) if isinstance(weights, Mapping) else dict(enumerate(weights))
    if any(not w > 0 for w in items.values()):
        raise ValueError("weights must be positive")
    total = float(sum(items.values()))
    cut = total / (2 * (n + 1))
    order = sorted(items, key=lambda u: (-items[u], u))
    sides: list[list[int]] = [[] for _ in range(n + 1)]
    masses = [0.0] * (n + 1)
    for u in order:
        i = min(range(n + 1), key=lambda j: (masses[j], j))
        sides[i].append(u)
        masses[i] += items[u]
    heavy = next((u for u in order if items[u] >= cut), None)
    return PartitionResult(sides, masses, total, cut, heavy)


# ----- appendix constants


def default_eps2(n: int, eps1: float) -> float:
    """eps1 + (1 - eps1) eps1^{n+1}, a second parameter that always satisfies the T-set condition."""
    if not 0 < eps1 < 1:
        raise ValueError("eps1 must lie in (0, 1)")
    return eps1 + (1 - eps1) * eps1 ** (n + 1)


def _g(x: float, n: int, eps1: float, eps2: float) -> float:
    return sum((1 - eps1) ** (1 - x) * eps2 ** (i * (1 - x)) for i in range(n + 1))


def alpha_constant(n: int, eps1: float, eps2: float, margin: float = ALPHA_MARGIN) -> float:
    """Largest alpha in [0, 1) (to 1e-10) with g(alpha) <= 1 - margin.

    g(x) = sum_{i=0}^n (1-eps1)^{1-x} eps2^{i(1-x)} is increasing on [0, 1).
    """
    if not 0 < eps1 <= eps2 < 1:
        raise ValueError("need 0 < eps1 <= eps2 < 1")
    if not (1 - eps1) / (1 - eps2) * (1 - eps2 ** (n + 1)) < 1:
        raise ValueError("(1-eps1)/(1-eps2) (1 - eps2^{n+1}) must be below 1")
    target = 1 - margin
    if _g(0.0, n, eps1, eps2) > target:
        raise ValueError(f"g(0) is within the margin {margin} of 1")
    lo, hi = 0.0, 1.0
    while hi - lo > ALPHA_TOL:
        mid = 0.5 * (lo + hi)
        if _g(mid, n, eps1, eps2) <= target:
            lo = mid
        else:
            hi = mid
    return lo


def appendix_constants(n: int) -> dict[str, float]:
    """The explicit (tiny) omega(n), c(n) of the constructive partition argument.

    eps1 = 2^{-(1+n 2^n)}, eps2 = default_eps2, alpha = alpha_constant (with
    margin half the gap 1 - g(0)), then
    omega = min{1/(n 2^{2+n 2^n}), eps2 - eps1} ((n+1)!)^{-1/alpha} and
    c = eps1 ((n+1)!)^{-1/alpha}.  Values may underflow to 0.
    """
    eps1 = 2.0 ** (-(1 + n * 2**n))
    eps2 = default_eps2(n, eps1)
    alpha = alpha_constant(n, eps1, eps2, margin=(1 - _g(0.0, n, eps1, eps2)) / 2)
    shrink = math.exp(-math.log(math.factorial(n + 1)) / alpha) if alpha > 0 else 0.0
    omega = min(1.0 / (n * 2.0 ** (2 + n * 2**n)), eps2 - eps1) * shrink
    return {"eps1": eps1, "eps2": eps2, "alpha": alpha, "omega": omega, "c": eps1 * shrink}


def maximize_t_sets(
    sides: Sequence[Sequence[int]],
    weights: Mapping[int, float],
    A: set[tuple[int, ...]],
    alpha: float,
    max_vertices: int = 12,
) -> tuple[list[list[int]], float]:
    """Brute-force maximizer of e(A cap T_0 x..x T_n)/(m(T_0)...m(T_n))^{1-alpha} over nonempty T_i.

    e(B) is the sum over tuples in B of the product of the vertex weights.
    Only for small inputs (at most ``max_vertices`` in total).
    """
    if sum(len(S) for S in sides) > max_vertices:
        raise ValueError(f"brute force limited to {max_vertices} vertices")
    subsets = [
        [list(c) for r in range(1, len(S) + 1) for c in itertools.combinations(S, r)] for S in sides
    ]
    best: tuple[float, list[list[int]]] = (-1.0, [])
    for choice in itertools.product(*subsets):
        e = sum(math.prod(weights[u] for u in t) for t in itertools.product(*choice) if t in A)
        denom = math.prod(sum(weights[u] for u in T) for T in choice) ** (1 - alpha)
        value = e / denom
        if value > best[0] + 1e-15:
            best = (value, [list(T) for T in choice])
    return best[1], best[0]


# ----- random simplices


def _arrangement_candidates(supports: list[np.ndarray], tol: float) -> np.ndarray:
    d = supports[0].shape[1]
    pts = np.vstack(supports)
    if d == 1:
        return np.unique(np.round(pts, 12), axis=0)
    segs = []
    for i, j in itertools.combinations(range(len(supports)), 2):
        for a in supports[i]:
            for b in supports[j]:
                segs.append([a, b])
    cands = [p for p in pts]
    if segs:
        cands.extend(_segment_intersections(np.array(segs), tol))
    return np.unique(np.round(np.array(cands), 12), axis=0)


def centerpoint_bruteforce(
    measures: Sequence[tuple[Sequence[Sequence[float]], Sequence[float]]], tol: float = GEOM_TOL
) -> tuple[np.ndarray, float, bool]:
    """Point maximizing the probability that a random simplex (x_i drawn from measure i) contains it.

    ``measures`` holds n+1 pairs (support points in R^n, probabilities).  The
    search covers support points and crossings of segments between supports of
    different measures, which is exhaustive for n <= 2.  Returns the point, its
    probability and whether that probability reaches 1/(n+1)! - 1e-9.
    """
    supports = [np.asarray(pts, dtype=float) for pts, _ in measures]
    probs = [np.asarray(p, dtype=float) for _, p in measures]
    n = len(measures) - 1
    if n < 1 or n > 2:
        raise ValueError("centerpoint search supports n = 1 or n = 2")
    for S, p in zip(supports, probs):
        if S.ndim != 2 or S.shape[1] != n or len(S) != len(p):
            raise ValueError("each measure needs points in R^n with matching probabilities")
        if np.any(p < 0) or abs(p.sum() - 1) > 1e-9:
            raise ValueError("probabilities must be non-negative and sum to 1")
    tuples = list(itertools.product(*[range(len(S)) for S in supports]))
    simplices = np.array([[supports[i][t[i]] for i in range(n + 1)] for t in tuples])
    weights = np.array([math.prod(probs[i][t[i]] for i in range(n + 1)) for t in tuples])
    best = (-1.0, supports[0][0])
    for O in _arrangement_candidates(supports, tol):
        prob = float(weights[_covers_batch(O, simplices, tol)].sum())
        if prob > best[0] + 1e-15:
            best = (prob, O)
    prob, O = best
    return np.array(O), prob, prob >= 1 / math.factorial(n + 1) - 1e-9


# ----- separated families


def hyperplane_meets(normal: np.ndarray, offset: float, points: np.ndarray, tol: float = GEOM_TOL) -> bool:
    """Whether {x : normal.x = offset} meets the closed hull of the points."""
    vals = points @ normal - offset
    return bool(vals.min() <= tol and vals.max() >= -tol)


def _candidate_hyperplanes(points: np.ndarray, d: int, tol: float) -> list[tuple[np.ndarray, float]]:
    out = []
    if d == 1:
        for p in points:
            out.append((np.array([1.0]), float(p[0])))
        return out
    dirs = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    for a, b in itertools.combinations(range(len(points)), 2):
        v = points[b] - points[a]
        norm = np.linalg.norm(v)
        if norm > tol:
            dirs.append(v / norm)
    for v in dirs:
        normal = np.array([-v[1], v[0]])
        for p in points:
            out.append((normal, float(normal @ p)))
    return out


def separated_family_check(hulls: Sequence[Sequence[Sequence[float]]], O: Sequence[float], tol: float = GEOM_TOL) -> bool:
    """True when no hyperplane meets n+1 of the n+2 bodies conv(C_0), ..., conv(C_n), {O}.

    Candidate hyperplanes pass through a hull vertex and are parallel to a
    segment between two hull vertices (through a vertex when n = 1); any
    hyperplane meeting n+1 closed polytopes in the plane can be moved to such a
    position while still meeting them.
    """
    O = np.asarray(O, dtype=float).reshape(-1)
    d = O.shape[0]
    if d < 1 or d > 2:
        raise ValueError("separated-family check supports n = 1 or n = 2")
    bodies = [np.asarray(C, dtype=float).reshape(-1, d) for C in hulls] + [O[None, :]]
    if len(bodies) != d + 2:
        raise ValueError(f"need n+1 = {d + 1} bodies in R^{d}")
    allpts = np.vstack(bodies)
    for normal, offset in _candidate_hyperplanes(allpts, d, tol):
        hits = sum(hyperplane_meets(normal, offset, B, tol) for B in bodies)
        if hits >= d + 1:
            return False
    return True
