from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hdx.cheeger import (
    BudgetExceeded,
    cheeger_constant,
    enumeration_budget,
    h_inner_via_norms,
    h_k_exhaustive,
    h_k_sampled,
    h_out,
    h_out_via_norms,
    indicator_form,
    indicator_suite,
    one_dimensional_checks,
    second_eigenvalue,
    verify_cheeger,
)
from hdx.cochains import d
from hdx.complex_core import build_complex
from hdx.generators import complete_skeleton, random_weights
from hdx.walks import default_families, h_inner
from oracles import graph_cheeger, graph_from_edges, h_k_brute, h_out_brute, normalized_laplacian_eigenvalues


def weights_of(X):
    return {s: X.weight(s) for k in range(-1, X.n + 1) for s in X.simplices(k)}


class TestIndicatorForms:
    def test_empty_set_gives_zero_form(self):
        X = complete_skeleton(4, 2)
        assert np.all(indicator_form(X, [{0}, set()]).values == 0)

    def test_k4_pair(self):
        X = complete_skeleton(4, 2)
        chi = indicator_form(X, [{0}, {1}])
        assert chi.norm2() == 2
        assert d(chi).norm2() == 2

    @pytest.mark.parametrize("seed", range(3))
    def test_suite(self, seed):
        X = random_weights(complete_skeleton(6, 3), seed=seed)
        certs = indicator_suite(X, default_families(X, max_families=80, seed=seed))
        assert not any(c.failed for c in certs)


class TestOuter:
    def test_k3_examples(self):
        X = complete_skeleton(3, 1)
        assert h_out(X, [{0}]) == 1
        assert h_out(X, [{0, 1}]) == 0.5
        assert h_out(X, [{0, 1, 2}]) == 0

    @given(st.integers(0, 10**6))
    def test_two_ways_and_brute(self, seed):
        rng = np.random.default_rng(seed)
        X = random_weights(complete_skeleton(6, 2), seed=seed % 13)
        k = int(rng.integers(0, 2))
        labels = rng.integers(0, k + 2, size=6)
        fam = [set(np.flatnonzero(labels == i).tolist()) for i in range(k + 1)]
        if not all(fam):
            return
        a = h_out(X, fam)
        assert math.isclose(a, h_out_via_norms(X, fam), rel_tol=1e-12, abs_tol=1e-14)
        assert math.isclose(a, h_out_brute(weights_of(X), X.vertices, fam), rel_tol=1e-12, abs_tol=1e-14)
        if k >= 1:
            assert math.isclose(h_inner(X, k, fam), h_inner_via_norms(X, fam), rel_tol=1e-10, abs_tol=1e-14)


class TestExhaustive:
    def test_k3_h0(self):
        X = complete_skeleton(3, 1)
        rep = h_k_exhaustive(X, 0)
        assert math.isclose(rep.h_k, 1.5)
        assert math.isclose(second_eigenvalue(X), 1.5)
        # singletons and pairs both attain 3/2; the witness must attain the minimum
        U = set(rep.witness[0])
        h_in = X.mass(U) / X.weight(())
        assert math.isclose(h_out(X, [U]) / (1 - h_in), 1.5)

    def test_k3_h(self):
        h, witness = cheeger_constant(complete_skeleton(3, 1))
        assert h == 1.0 and len(witness) == 1

    def test_single_triangle_h0_bounds_gap(self):
        X = build_complex([(0, 1, 2)])
        gap = second_eigenvalue(build_complex([(0, 1), (0, 2), (1, 2)]))
        rep = h_k_exhaustive(X, 0)
        assert rep.h_k >= gap - 1e-12

    @pytest.mark.parametrize("N,k", [(4, 0), (4, 1), (5, 1), (5, 0)])
    def test_matches_brute(self, N, k):
        X = random_weights(complete_skeleton(N, 2), seed=N + k)
        ours = h_k_exhaustive(X, k).h_k
        assert math.isclose(ours, h_k_brute(weights_of(X), X.vertices, k), rel_tol=1e-10)

    def test_unspanned_tuples_flagged(self):
        X = build_complex([(0, 1, 2), (2, 3, 4)])
        rep = h_k_exhaustive(X, 1)
        assert rep.skipped_unspanned > 0

    def test_budget(self, monkeypatch):
        X = complete_skeleton(8, 2)
        with pytest.raises(BudgetExceeded):
            h_k_exhaustive(X, 1, budget=100)
        monkeypatch.setenv("HDX_BUDGET", "123")
        assert enumeration_budget() == 123

    def test_sampled_is_upper_estimate(self):
        X = random_weights(complete_skeleton(6, 2), seed=2)
        exact = h_k_exhaustive(X, 1).h_k
        sampled = h_k_sampled(X, 1, 2000, seed=1)
        assert sampled.mode == "sampled"
        assert sampled.h_k >= exact - 1e-12


class TestOneDimensional:
    def test_k3(self):
        assert all(c.passed for c in one_dimensional_checks(complete_skeleton(3, 1)))

    def test_path_graph_against_oracle(self):
        edges = [(0, 1), (1, 2), (2, 3), (3, 4)]
        X = build_complex(edges)
        A = graph_from_edges(5, edges)
        h, h0 = graph_cheeger(A)
        assert math.isclose(cheeger_constant(X)[0], h)
        assert math.isclose(h_k_exhaustive(X, 0).h_k, h0)
        assert math.isclose(second_eigenvalue(X), normalized_laplacian_eigenvalues(A)[1], abs_tol=1e-10)

    def test_disconnected_graph_degenerate(self):
        X = build_complex([(0, 1), (2, 3)])
        assert math.isclose(second_eigenvalue(X), 0.0, abs_tol=1e-12)
        assert cheeger_constant(X)[0] == 0
        assert all(not c.failed for c in one_dimensional_checks(X))


class TestVerify:
    @pytest.mark.parametrize("N", [4, 5, 6])
    def test_complete_two_skeleta(self, N):
        certs, reports = verify_cheeger(complete_skeleton(N, 2))
        assert certs and not any(c.failed for c in certs)
        assert all(r.passed for r in reports)

    def test_weighted(self):
        certs, _ = verify_cheeger(random_weights(complete_skeleton(6, 2), seed=5))
        assert not any(c.failed for c in certs)
