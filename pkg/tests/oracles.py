"""Independent reference implementations used only by the tests.

Everything here is written from the definitions with plain Python containers
(and Fractions where exactness helps), without calling into the package's
operator or weight code.  The eigensolver is a cyclic Jacobi method.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np


# ----- eigenvalues


def jacobi_eigenvalues(A: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    """Cyclic Jacobi rotations on a symmetric matrix; ascending eigenvalues."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if n == 0:
        return np.zeros(0)
    if not np.allclose(A, A.T, atol=1e-12 * max(1.0, np.abs(A).max())):
        raise ValueError("matrix is not symmetric")
    scale = max(1.0, np.linalg.norm(A))
    for _ in range(max_sweeps):
        off = math.sqrt(max(0.0, np.sum(A * A) - np.sum(np.diag(A) ** 2)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(A[p, q]) < 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2 * A[p, q])
                if abs(theta) > 1e150:
                    t = 1 / (2 * theta)
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :], A[q, :] = c * rp - s * rq, s * rp + c * rq
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p], A[:, q] = c * cp - s * cq, s * cp + c * cq
    return np.sort(np.diag(A))


# ----- weights from the definition


def all_faces(facets: Iterable[Sequence[int]]) -> dict[int, set[tuple[int, ...]]]:
    by_dim: dict[int, set[tuple[int, ...]]] = {}
    for f in facets:
        f = tuple(sorted(f))
        for r in range(0, len(f) + 1):
            for c in itertools.combinations(f, r):
                by_dim.setdefault(r - 1, set()).add(c)
    return by_dim


def exact_weights(facets: Sequence[Sequence[int]], facet_weights: Sequence | None = None) -> dict[tuple[int, ...], Fraction]:
    """m(tau) = sum over cofacets, pushed down one dimension at a time in exact arithmetic."""
    facets = [tuple(sorted(f)) for f in facets]
    n = len(facets[0]) - 1
    ws = [Fraction(1)] * len(facets) if facet_weights is None else [Fraction(w) for w in facet_weights]
    m: dict[tuple[int, ...], Fraction] = dict(zip(facets, ws))
    faces = all_faces(facets)
    for k in range(n - 1, -2, -1):
        for t in faces[k]:
            m[t] = sum((m[s] for s in faces[k + 1] if set(t) <= set(s)), Fraction(0))
    return m


def star_count_weight(facets: Sequence[Sequence[int]], tau: Sequence[int]) -> int:
    """(n-k)! times the number of facets containing tau (unit facet weights)."""
    n = len(facets[0]) - 1
    k = len(tau) - 1
    return math.factorial(n - k) * sum(1 for f in facets if set(tau) <= set(f))


# ----- cochain operators by pointwise formulas


class DenseModel:
    """Simplices, weights and operators assembled from pointwise formulas.

    d phi(v_0..v_{k+1}) = sum_i (-1)^i phi(v_0..^v_i..v_{k+1});
    delta phi(tau) = sum_{v : v tau in X} m(v tau)/m(tau) phi(v tau).
    Both act on sorted representatives with explicit permutation signs.
    """

    def __init__(self, facets: Sequence[Sequence[int]], facet_weights: Sequence | None = None):
        self.m = {k: float(v) for k, v in exact_weights(facets, facet_weights).items()}
        self.faces = {k: sorted(v) for k, v in all_faces(facets).items()}
        self.n = len(facets[0]) - 1
        self.pos = {k: {s: i for i, s in enumerate(v)} for k, v in self.faces.items()}

    @staticmethod
    def sign_sort(seq: Sequence[int]) -> tuple[tuple[int, ...], int]:
        seq = list(seq)
        sign = 1
        for i in range(len(seq)):
            for j in range(len(seq) - 1 - i):
                if seq[j] > seq[j + 1]:
                    seq[j], seq[j + 1] = seq[j + 1], seq[j]
                    sign = -sign
        return tuple(seq), sign

    def d(self, k: int) -> np.ndarray:
        rows, cols = self.faces[k + 1], self.faces[k]
        M = np.zeros((len(rows), len(cols)))
        for r, s in enumerate(rows):
            for i in range(len(s)):
                face = s[:i] + s[i + 1 :]
                M[r, self.pos[k][face]] += (-1) ** i
        return M

    def delta(self, k: int) -> np.ndarray:
        """delta on C^k to C^{k-1}."""
        rows, cols = self.faces[k - 1], self.faces[k]
        M = np.zeros((len(rows), len(cols)))
        for r, t in enumerate(rows):
            for s in cols:
                if not set(t) <= set(s):
                    continue
                (v,) = set(s) - set(t)
                _, sign = self.sign_sort((v,) + t)
                M[r, self.pos[k][s]] += sign * self.m[s] / self.m[t]
        return M

    def weights(self, k: int) -> np.ndarray:
        return np.array([self.m[s] for s in self.faces[k]])

    def up(self, k: int) -> np.ndarray:
        return self.delta(k + 1) @ self.d(k)

    def down(self, k: int) -> np.ndarray:
        return self.d(k - 1) @ self.delta(k)

    def symmetric(self, A: np.ndarray, k: int) -> np.ndarray:
        w = np.sqrt(self.weights(k))
        return (w[:, None] * A) / w[None, :]


# ----- graphs


def graph_from_edges(num_vertices: int, edges: Iterable[tuple[int, int]], weights: dict | None = None) -> np.ndarray:
    A = np.zeros((num_vertices, num_vertices))
    for u, v in edges:
        w = 1.0 if weights is None else weights[(u, v)]
        A[u, v] = A[v, u] = w
    return A


def normalized_laplacian_eigenvalues(A: np.ndarray) -> np.ndarray:
    """Spectrum of I - D^{-1/2} A D^{-1/2} through Jacobi."""
    deg = A.sum(axis=1)
    s = 1 / np.sqrt(deg)
    return jacobi_eigenvalues(np.eye(len(A)) - s[:, None] * A * s[None, :])


def graph_cheeger(A: np.ndarray) -> tuple[float, float]:
    """(h, h0): h = min cut/vol(S) over vol(S) <= vol/2; h0 = min over nonempty S of the
    per-set bound [cut/vol(S)] / (1 - vol(S)/vol(V)), with S = V giving +inf."""
    N = len(A)
    deg = A.sum(axis=1)
    vol = deg.sum()
    h = h0 = math.inf
    for mask in range(1, 1 << N):
        S = [v for v in range(N) if mask >> v & 1]
        T = [v for v in range(N) if not mask >> v & 1]
        vs = deg[S].sum()
        cut = A[np.ix_(S, T)].sum() if T else 0.0
        if vs <= vol / 2 + 1e-12:
            h = min(h, cut / vs)
        if T:
            h0 = min(h0, (cut / vs) / (1 - vs / vol))
    return h, h0


# ----- set families


def m_tuple_brute(m: dict[tuple[int, ...], float], sets: Sequence[Iterable[int]]) -> float:
    """Sum of m over the simplices with exactly one vertex in each set."""
    total = 0.0
    for choice in itertools.product(*[sorted(U) for U in sets]):
        s = tuple(sorted(choice))
        if len(set(s)) == len(s) and s in m:
            total += m[s]
    return total


def h_out_brute(m: dict, vertices: Sequence[int], sets: Sequence[Iterable[int]]) -> float:
    used = set().union(*map(set, sets))
    rest = [v for v in vertices if v not in used]
    denom = m_tuple_brute(m, sets)
    if denom == 0 or not rest:
        return 0.0
    return m_tuple_brute(m, list(sets) + [rest]) / denom


def disjoint_families(vertices: Sequence[int], size: int) -> Iterable[list[list[int]]]:
    """All ordered families of ``size`` nonempty disjoint subsets."""
    for labels in itertools.product(range(size + 1), repeat=len(vertices)):
        fam = [[v for v, lab in zip(vertices, labels) if lab == i] for i in range(size)]
        if all(fam):
            yield fam


# ----- geometry


def orient(a, b, c) -> Fraction:
    return (Fraction(b[0]) - Fraction(a[0])) * (Fraction(c[1]) - Fraction(a[1])) - (
        Fraction(b[1]) - Fraction(a[1])
    ) * (Fraction(c[0]) - Fraction(a[0]))


def in_closed_triangle_exact(p, a, b, c) -> bool:
    """Exact closed-triangle membership for rational coordinates (non-degenerate triangles)."""
    o1, o2, o3 = orient(a, b, p), orient(b, c, p), orient(c, a, p)
    return (o1 >= 0 and o2 >= 0 and o3 >= 0) or (o1 <= 0 and o2 <= 0 and o3 <= 0)


def in_closed_interval_exact(p, a, b) -> bool:
    lo, hi = sorted((Fraction(a), Fraction(b)))
    return lo <= Fraction(p) <= hi


def transversal(s: Sequence[int], sets: Sequence[Iterable[int]]) -> bool:
    """One vertex in each set, nothing else."""
    if len(s) != len(sets):
        return False
    owner = {v: i for i, U in enumerate(sets) for v in U}
    return sorted(owner.get(v, -1) for v in s) == list(range(len(sets)))


def two_step_path_sum(m: dict, sets: Sequence[Iterable[int]]) -> float:
    """pathc_{k-1} over two steps inside the k-simplices spanned by U_0..U_k (k = len - 1)."""
    k = len(sets) - 1
    faces = [s for s in m if len(s) == k]
    spanned = {s for s in m if len(s) == k + 1 and transversal(s, sets)}

    def mu(a, b):
        u = tuple(sorted(set(a) | set(b)))
        return m[u] / (k * m[a]) if u in spanned else 0.0

    total = 0.0
    for a in faces:
        for b in faces:
            if len(set(a) | set(b)) != k + 1:
                continue
            p = mu(a, b)
            if p == 0:
                continue
            for c in faces:
                if len(set(b) | set(c)) == k + 1:
                    total += k * m[a] * p * mu(b, c)
    return total


def h_inner_brute(m: dict, sets: Sequence[Iterable[int]]) -> float:
    k = len(sets) - 1
    if k == 0:
        return sum(m[(v,)] for v in sets[0]) / m[()]
    mass = m_tuple_brute(m, sets)
    return two_step_path_sum(m, sets) / (k * (k + 1) * mass) if mass else 0.0


def h_k_brute(m: dict, vertices: Sequence[int], k: int) -> float:
    """min over disjoint nonempty U_0..U_k of [k/(k+1) h_in + h_out/(k+1)] / (1 - h_in)."""
    best = math.inf
    for fam in disjoint_families(vertices, k + 1):
        if m_tuple_brute(m, fam) == 0:
            continue
        h_in = h_inner_brute(m, fam)
        if h_in >= 1 - 1e-15:
            continue
        h_out = h_out_brute(m, vertices, fam)
        best = min(best, (k / (k + 1) * h_in + h_out / (k + 1)) / (1 - h_in))
    return best
