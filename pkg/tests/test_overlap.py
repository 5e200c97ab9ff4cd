from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, example, given
from hypothesis import strategies as st

from hdx.complex_core import build_complex
from hdx.generators import complete_multipartite, complete_skeleton, random_weights
from hdx.overlap import (
    Embedding,
    _g,
    alpha_constant,
    appendix_constants,
    balanced_partition,
    centerpoint_bruteforce,
    coverage,
    default_eps2,
    heavy_vertex_check,
    maximize_t_sets,
    overlap_bruteforce,
    overlap_threshold,
    partite_overlap_threshold,
    point_in_closed_simplex,
    separated_family_check,
)
from oracles import in_closed_interval_exact, in_closed_triangle_exact

SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


class TestPointInSimplex:
    def test_examples(self):
        tri = [[0, 0], [1, 0], [0, 1]]
        assert point_in_closed_simplex([1 / 3, 1 / 3], tri)
        assert point_in_closed_simplex([1, 0], tri)
        assert not point_in_closed_simplex([2, 2], tri)
        assert point_in_closed_simplex([0.5, 0.5], tri)

    def test_degenerate(self):
        assert point_in_closed_simplex([0.5, 0.5], [[0, 0], [1, 1], [2, 2]])
        assert not point_in_closed_simplex([0.5, 0.6], [[0, 0], [1, 1], [2, 2]])

    @given(st.lists(st.integers(-6, 6), min_size=8, max_size=8))
    def test_matches_exact_oracle(self, coords):
        a, b, c = (coords[0], coords[1]), (coords[2], coords[3]), (coords[4], coords[5])
        p = (Fraction(coords[6], 2), Fraction(coords[7], 3))
        area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        assume(area != 0)
        assert point_in_closed_simplex([float(p[0]), float(p[1])], [a, b, c]) == in_closed_triangle_exact(p, a, b, c)


class TestOverlap:
    def test_single_facet(self):
        X = build_complex([(0, 1, 2)])
        res = overlap_bruteforce(X, np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
        assert res.ratio == 1.0

    def test_k4_convex_position(self):
        X = complete_skeleton(4, 2)
        res = overlap_bruteforce(X, SQUARE)
        assert res.ratio >= 0.5
        w, _ = coverage(X, SQUARE, [0.5, 0.5])
        assert w / X.weights(2).sum() == 1.0  # all four closed triangles contain the crossing
        assert np.allclose(res.best_point, [0.5, 0.5])

    def test_one_dimensional_sweep(self):
        X = build_complex([(0, 1), (2, 3), (4, 5)])
        pts = np.array([[0.0], [2.0], [1.0], [3.0], [1.5], [4.0]])
        res = overlap_bruteforce(X, pts)
        # [0,2], [1,3], [1.5,4] all contain 1.5..2
        assert res.ratio == 1.0
        Y = build_complex([(0, 1), (2, 3), (4, 5)], [1, 2, 3])
        pts2 = np.array([[0.0], [1.0], [2.0], [3.0], [0.5], [2.5]])
        res2 = overlap_bruteforce(Y, pts2)
        assert math.isclose(res2.ratio, 5 / 6)

    def test_exact_oracle_on_rational_embedding(self):
        rng = np.random.default_rng(3)
        X = complete_skeleton(5, 2)
        pts = rng.integers(0, 7, size=(5, 2)).astype(float)
        res = overlap_bruteforce(X, pts)
        best = 0
        # candidates: vertices and all pairwise edge crossings, computed exactly
        P = [(Fraction(int(x)), Fraction(int(y))) for x, y in pts]
        edges = list(itertools.combinations(range(5), 2))
        cands = list(P)
        for (a, b), (c, d) in itertools.combinations(edges, 2):
            r = (P[b][0] - P[a][0], P[b][1] - P[a][1])
            s = (P[d][0] - P[c][0], P[d][1] - P[c][1])
            den = r[0] * s[1] - r[1] * s[0]
            if den == 0:
                continue
            qp = (P[c][0] - P[a][0], P[c][1] - P[a][1])
            t = (qp[0] * s[1] - qp[1] * s[0]) / den
            u = (qp[0] * r[1] - qp[1] * r[0]) / den
            if 0 <= t <= 1 and 0 <= u <= 1:
                cands.append((P[a][0] + t * r[0], P[a][1] + t * r[1]))
        for O in cands:
            cnt = 0
            for f in X.facets:
                tri = [P[v] for v in f]
                area = (tri[1][0] - tri[0][0]) * (tri[2][1] - tri[0][1]) - (tri[1][1] - tri[0][1]) * (tri[2][0] - tri[0][0])
                if area != 0 and in_closed_triangle_exact(O, *tri):
                    cnt += 1
            best = max(best, cnt)
        degenerate = any(
            (pts[f[1]] - pts[f[0]])[0] * (pts[f[2]] - pts[f[0]])[1] == (pts[f[1]] - pts[f[0]])[1] * (pts[f[2]] - pts[f[0]])[0]
            for f in X.facets
        )
        if not degenerate:
            assert res.covered_weight == best

    @given(st.integers(0, 10**6))
    @example(seed=120904)  # near-flat image triangle; candidates must not be rounded
    def test_affine_invariance(self, seed):
        rng = np.random.default_rng(seed)
        X = random_weights(complete_skeleton(5, 2), seed=seed % 11)
        pts = rng.normal(size=(5, 2))
        A = rng.normal(size=(2, 2))
        assume(abs(np.linalg.det(A)) > 0.2)
        b = rng.normal(size=2)
        r1 = overlap_bruteforce(X, pts).ratio
        r2 = overlap_bruteforce(X, pts @ A.T + b).ratio
        assert math.isclose(r1, r2, rel_tol=1e-9)

    def test_embedding_by_label(self):
        X = build_complex([(10, 11, 12)])
        emb = Embedding({10: [0, 0], 11: [1, 0], 12: [0, 1]})
        assert overlap_bruteforce(X, emb).ratio == 1.0

    def test_grid_mode(self):
        X = complete_skeleton(5, 3)
        pts = np.random.default_rng(0).normal(size=(5, 3))
        res = overlap_bruteforce(X, pts, grid=5)
        assert res.mode == "grid:5" and 0 < res.ratio <= 1
        with pytest.raises(Exception):
            overlap_bruteforce(X, pts)


class TestHeavyVertex:
    def test_constructed_instance(self):
        # vertex 0 is in every facet; omega small enough that it is heavy
        X = build_complex([(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 1)])
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        certs = heavy_vertex_check(X, pts, omega=0.5)
        assert all(c.passed for c in certs)
        cover = [c for c in certs if c.name == "heavy_vertex_coverage"][0]
        n = 2
        assert cover.lhs >= 0.5 / (2 * (n + 1) ** 2) * X.weights(2).sum()

    @pytest.mark.parametrize("seed", range(5))
    def test_random_embeddings(self, seed):
        rng = np.random.default_rng(seed)
        X = random_weights(complete_skeleton(6, 2), seed=seed)
        certs = heavy_vertex_check(X, rng.normal(size=(6, 2)), omega=1.0)
        assert not any(c.failed for c in certs)


class TestThresholds:
    def test_example(self):
        t = overlap_threshold(2, 1.0, 0.0, 1.0, 1.0)
        assert math.isclose(t.value, 1 / 36) and t.applicable

    def test_zero_error(self):
        n, A, om, c = 3, 2.0, 0.7, 0.4
        t = overlap_threshold(n, A, 0.0, om, c)
        assert math.isclose(t.value, min(om / (2 * (n + 1) ** 2), A * math.factorial(n) * c / 2 * (c / (2 * (n + 1))) ** n))

    def test_boundary(self):
        n, A, c = 2, 1.5, 0.6
        E = A * (c / (2 * (n + 1))) ** n
        t = overlap_threshold(n, A, E, 1.0, c)
        assert abs(t.terms[1]) < 1e-15 and not t.applicable

    def test_partite(self):
        t = partite_overlap_threshold(2, 0.0, 1.0, 0.5)
        assert math.isclose(t.value, min(1 / 9, 0.5 * 0.25))
        bad = partite_overlap_threshold(2, 0.2, 1.0, 0.5)
        assert not bad.applicable


class TestBalancedPartition:
    def test_equal_weights(self):
        res = balanced_partition([1.0] * 9, 2)
        assert res.masses == [3.0, 3.0, 3.0] and res.balanced

    def test_greedy_trace(self):
        res = balanced_partition([5, 4, 3, 2, 1], 1)
        assert sorted(map(sorted, res.sides)) == [[0, 3, 4], [1, 2]]
        assert all(m > 15 / 4 for m in res.masses)
        assert res.heavy_vertex == 0

    def test_heavy_vertex_branch(self):
        res = balanced_partition([10, 1, 1, 1], 1)
        assert res.heavy_vertex == 0

    @given(st.integers(1, 4), st.integers(0, 10**6))
    def test_postcondition_under_precondition(self, n, seed):
        rng = np.random.default_rng(seed)
        w = rng.uniform(0.1, 1.0, size=int(rng.integers(4 * (n + 1), 40)))
        assume(w.max() < w.sum() / (2 * (n + 1)))
        res = balanced_partition(w, n)
        assert res.heavy_vertex is None and res.balanced
        assert sorted(v for S in res.sides for v in S) == list(range(len(w)))


class TestAppendix:
    def test_examples(self):
        assert math.isclose(_g(0.0, 1, 0.5, 0.5), 0.75)
        assert alpha_constant(1, 0.5, 0.5) > 0
        assert default_eps2(1, 0.5) == 0.625

    def test_g_increasing(self):
        for n, e1 in [(1, 0.5), (2, 0.3), (3, 0.2)]:
            e2 = default_eps2(n, e1)
            xs = np.linspace(0, 0.99, 100)
            vals = [_g(x, n, e1, e2) for x in xs]
            assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_alpha_is_maximal(self):
        a = alpha_constant(1, 0.5, 0.5)
        assert _g(a, 1, 0.5, 0.5) <= 1 - 1e-6
        assert _g(a + 2e-10, 1, 0.5, 0.5) > 1 - 1e-6

    def test_alpha_monotone_in_eps1(self):
        vals = [alpha_constant(1, e, e) for e in (0.3, 0.4, 0.5, 0.6)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_precondition(self):
        with pytest.raises(ValueError):
            alpha_constant(1, 0.6, 0.5)

    def test_appendix_constants_tiny(self):
        c1 = appendix_constants(1)
        assert 0 < c1["omega"] < 1e-50 and c1["alpha"] > 0
        assert appendix_constants(2)["omega"] == 0.0


class TestTSets:
    def test_value_dominates_full_sides(self):
        rng = np.random.default_rng(0)
        sides = [[0, 1, 2], [3, 4], [5, 6]]
        weights = {v: float(rng.uniform(0.5, 2)) for v in range(7)}
        A = {t for t in itertools.product(*sides) if rng.random() < 0.6}
        alpha = 0.3
        best_sets, best = maximize_t_sets(sides, weights, A, alpha)
        full = sum(math.prod(weights[u] for u in t) for t in A) / math.prod(
            sum(weights[u] for u in S) for S in sides
        ) ** (1 - alpha)
        assert best >= full - 1e-12
        assert all(T and set(T) <= set(S) for T, S in zip(best_sets, sides))

    def test_size_guard(self):
        with pytest.raises(ValueError):
            maximize_t_sets([list(range(7)), list(range(7, 14))], {v: 1.0 for v in range(14)}, set(), 0.5)


class TestCenterpoint:
    def test_n1_uniform_pair(self):
        O, prob, ok = centerpoint_bruteforce([([[0.0], [1.0]], [0.5, 0.5])] * 2)
        assert ok and prob >= 0.5

    def test_point_mass(self):
        O, prob, ok = centerpoint_bruteforce([([[2.0, 3.0]], [1.0])] * 3)
        assert prob == 1.0 and np.allclose(O, [2, 3])

    @pytest.mark.parametrize("seed", range(5))
    def test_n2_uniform_four_points(self, seed):
        rng = np.random.default_rng(seed)
        measures = [(rng.normal(size=(4, 2)), [0.25] * 4) for _ in range(3)]
        _, prob, ok = centerpoint_bruteforce(measures)
        assert ok and prob >= 1 / 6 - 1e-9

    def test_n1_exact(self):
        rng = np.random.default_rng(9)
        pts = [rng.integers(0, 10, size=3) for _ in range(2)]
        measures = [([[float(x)] for x in p], [1 / 3] * 3) for p in pts]
        _, prob, _ = centerpoint_bruteforce(measures)
        best = 0
        for O in set(pts[0]) | set(pts[1]):
            best = max(best, sum(1 for a in pts[0] for b in pts[1] if in_closed_interval_exact(O, a, b)))
        assert math.isclose(prob, best / 9)


class TestSeparated:
    def test_far_segments(self):
        hulls = [[[0.0], [1.0]], [[5.0], [6.0]]]
        assert separated_family_check(hulls, [3.0])

    def test_overlapping(self):
        hulls = [[[0.0], [2.0]], [[1.0], [3.0]]]
        assert not separated_family_check(hulls, [1.5])

    @pytest.mark.parametrize("seed", range(30))
    def test_corollary_all_or_none(self, seed):
        rng = np.random.default_rng(seed)
        centers = rng.normal(size=(3, 2)) * 10
        hulls = [c + rng.normal(size=(3, 2)) * 0.3 for c in centers]
        O = rng.normal(size=2) * 5
        if not separated_family_check(hulls, O):
            return
        covered = [point_in_closed_simplex(O, [hulls[0][a], hulls[1][b], hulls[2][c]]) for a, b, c in itertools.product(range(3), repeat=3)]
        assert all(covered) or not any(covered)

    def test_corollary_one_dimensional(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            c = np.sort(rng.uniform(-10, 10, size=2))
            hulls = [[[c[0] - 0.2], [c[0] + 0.2]], [[c[1] - 0.2], [c[1] + 0.2]]]
            O = [float(rng.uniform(-10, 10))]
            if separated_family_check(hulls, O):
                covered = [
                    point_in_closed_simplex(O, [hulls[0][a], hulls[1][b]]) for a, b in itertools.product(range(2), repeat=2)
                ]
                assert all(covered) or not any(covered)

    def test_partite_complex_overlap_in_range(self):
        X = complete_multipartite([2, 2, 2])
        pts = np.random.default_rng(4).normal(size=(6, 2))
        assert 0 < overlap_bruteforce(X, pts).ratio <= 1
