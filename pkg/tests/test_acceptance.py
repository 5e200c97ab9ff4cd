"""Acceptance gate: criteria 1 to 11, one printed PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` or ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import subprocess
import sys
import time
import warnings

import networkx as nx
import numpy as np
import pytest

from hdx.certificates import Certificate
from hdx.cheeger import h_k_exhaustive, one_dimensional_checks, second_eigenvalue, verify_cheeger
from hdx.cochains import identity_suite, operator_algebra_suite
from hdx.complex_core import ComplexError, build_complex, weight_formula_check, weight_recursion_check
from hdx.generators import complete_multipartite, complete_skeleton, flag_random, random_weights
from hdx.mixing import operator_product_identities, random_families, verify_mixing
from hdx.overlap import balanced_partition, centerpoint_bruteforce, coverage, heavy_vertex_check, overlap_bruteforce
from hdx.spectra import descent_map, descent_profile, hodge_suite, iterate, local_expansion, verify_global_gaps
from hdx.walks import default_families, walk_identity_suite


def emit(capsys, number: int, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\n[acceptance] criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def failures(certs: list[Certificate]) -> list[str]:
    return [c.name for c in certs if c.failed]


def generator_corpus() -> list[tuple[str, object]]:
    """Every generator family at desk scale, homogeneous and reweighted."""
    base = [
        ("K4^1", complete_skeleton(4, 1)),
        ("K4^2", complete_skeleton(4, 2)),
        ("K5^2", complete_skeleton(5, 2)),
        ("K6^2", complete_skeleton(6, 2)),
        ("K5^3", complete_skeleton(5, 3)),
        ("K6^3", complete_skeleton(6, 3)),
        ("K22", complete_multipartite([2, 2])),
        ("K222", complete_multipartite([2, 2, 2])),
        ("K232", complete_multipartite([2, 3, 2])),
        ("K2222", complete_multipartite([2, 2, 2, 2])),
    ]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        base += [(f"flag:8:0.7:2:{s}", flag_random(8, 0.7, 2, seed=s)) for s in range(3)]
    out = list(base)
    out += [(name + "w", random_weights(X, seed=i)) for i, (name, X) in enumerate(base)]
    return out


def random_flag_complexes(count: int, seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        while len(out) < count:
            N = int(rng.integers(4, 16))
            n = int(rng.integers(1, 4))
            p = float(rng.uniform(0.4, 0.9))
            try:
                X = flag_random(N, p, n, seed=int(rng.integers(0, 2**31)))
            except ComplexError:
                continue
            out.append(X if len(out) % 2 == 0 else random_weights(X, seed=len(out)))
    return out


# ----- 1


def test_criterion_01_weight_identities(capsys):
    start = time.perf_counter()
    complexes = random_flag_complexes(50) + [X for _, X in generator_corpus()]
    bad = []
    for i, X in enumerate(complexes):
        certs = [weight_recursion_check(X, tol=1e-12)] + [weight_formula_check(X, l, tol=1e-12) for l in range(-1, X.n + 1)]
        bad += [(i, name) for name in failures(certs)]
        assert all(c.passed for c in certs)
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 10
    emit(capsys, 1, ok, f"{len(complexes)} complexes, rel 1e-12, {elapsed:.2f}s (< 10s)")
    assert not bad
    assert elapsed < 10


# ----- 2


def test_criterion_02_operator_algebra(capsys):
    bad, checked = [], 0
    for name, X in generator_corpus():
        certs = operator_algebra_suite(X, trials=64, seed=2)
        checked += len(certs)
        for c in certs:
            if c.name.startswith("dd_zero"):
                assert c.tol == 1e-14
            if c.name.startswith("adjoint"):
                assert c.tol == 1e-10
        bad += [(name, n) for n in failures(certs)]
    emit(capsys, 2, not bad, f"{checked} certificates, 64 cochain pairs per degree, d d abs 1e-14, adjoint rel 1e-10")
    assert not bad


# ----- 3


def test_criterion_03_localization_suite(capsys):
    bad, names = [], set()
    for name, X in generator_corpus():
        certs = identity_suite(X, trials=16, seed=3, tol=1e-9)
        names |= {c.name.split("[")[0] for c in certs}
        bad += [(name, n) for n in failures(certs)]
    required = {
        "localized_inner_product",
        "localized_codifferential",
        "localized_coboundary",
        "restricted_inner_product",
        "restricted_coboundary",
        "lower_laplacian_degree0_quadratic_form",
        "localized_side_lower_laplacian",
    }
    ok = not bad and required <= names
    emit(capsys, 3, ok, f"{len(names)} identity families on {len(generator_corpus())} complexes, rel 1e-9")
    assert required <= names
    assert not bad


# ----- 4


def test_criterion_04_descent_exactness(capsys):
    worst = 0.0
    for n in (1, 2, 3):
        for N in range(n + 2, 9):
            rows = {r.k: r for r in descent_profile(complete_skeleton(N, n))}
            top = rows[n - 2]
            for k, r in rows.items():
                if r.lam is None:
                    continue
                j = n - 2 - k
                worst = max(worst, abs(r.lam - iterate(top.lam, j)), abs(r.kappa - iterate(top.kappa, j)))
    k4 = {r.k: r for r in descent_profile(complete_skeleton(4, 2))}
    k4_ok = abs(k4[0].lam - 1.5) <= 1e-9 and abs(k4[-1].lam - 4 / 3) <= 1e-9 and abs(descent_map(1.5) - 4 / 3) <= 1e-15
    ok = worst <= 1e-9 and k4_ok
    emit(capsys, 4, ok, f"K_N^n for n<=3, N<=8: max |observed - f-iterate| = {worst:.2e}; K4: 3/2 -> {k4[-1].lam:.15f}")
    assert k4_ok
    assert worst <= 1e-9


# ----- 5


def test_criterion_05_global_gaps(capsys):
    bad, applicable = [], 0
    for name, X in generator_corpus():
        lam, _ = local_expansion(X)
        certs = verify_global_gaps(X) + hodge_suite(X)
        bad += [(name, n) for n in failures(certs)]
        if X.n >= 1 and lam is not None and lam > (X.n - 1) / X.n and not any(c.status == "not-applicable" for c in certs):
            applicable += 1
            names = {c.name.split("[")[0] for c in certs if c.passed}
            assert {"reduced_cohomology_vanishes", "hodge_split_dimension", "hodge_split_orthogonal", "upper_gap"} <= names
    ok = not bad and applicable > 0
    emit(capsys, 5, ok, f"{applicable} complexes meet the link hypothesis; cohomology, Hodge split and inclusions at 1e-8")
    assert applicable > 0
    assert not bad


# ----- 6


def one_dim_corpus() -> list:
    graphs = []
    for G in nx.graph_atlas_g()[1:]:
        if G.number_of_edges() == 0 or any(d == 0 for _, d in G.degree()):
            continue
        graphs.append(build_complex(list(G.edges())))
    # the atlas stops at 7 vertices; add random connected-enough graphs on 8
    rng = np.random.default_rng(6)
    target = len(graphs) + 60
    while len(graphs) < target:
        G = nx.gnp_random_graph(8, float(rng.uniform(0.2, 0.8)), seed=int(rng.integers(0, 2**31)))
        if any(d == 0 for _, d in G.degree()):
            continue
        graphs.append(build_complex(list(G.edges())))
    return graphs


def two_dim_corpus() -> list:
    out = [complete_skeleton(N, 2) for N in range(3, 8)]
    out += [complete_multipartite([2, 2, 2]), complete_multipartite([2, 2, 3])]
    out += [random_weights(complete_skeleton(N, 2), seed=N) for N in range(4, 8)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for s in range(12):
            try:
                out.append(flag_random(7, 0.75, 2, seed=s))
            except ComplexError:
                pass
    return out


def test_criterion_06_cheeger(capsys):
    start = time.perf_counter()
    K3 = complete_skeleton(3, 1)
    h0 = h_k_exhaustive(K3, 0).h_k
    lam = second_eigenvalue(K3)
    k3_ok = h0 == 1.5 and abs(lam - 1.5) <= 1e-12
    bad1 = []
    graphs = one_dim_corpus()
    for i, X in enumerate(graphs):
        bad1 += [(i, n) for n in failures(one_dimensional_checks(X))]
    bad2, certified = [], 0
    for i, X in enumerate(two_dim_corpus()):
        certs, _ = verify_cheeger(X)
        bad2 += [(i, n) for n in failures(certs)]
        certified += sum(1 for c in certs if c.passed and c.name.startswith("cheeger"))
    elapsed = time.perf_counter() - start
    ok = k3_ok and not bad1 and not bad2 and elapsed < 60
    emit(
        capsys, 6, ok,
        f"h0(K3)={h0}, lambda(K3)={lam:.15f}; {len(graphs)} graphs; {certified} exhaustive h^k bounds; {elapsed:.1f}s (< 60s)",
    )
    assert k3_ok
    assert not bad1
    assert not bad2
    assert elapsed < 60


# ----- 7


def test_criterion_07_walk_identities(capsys):
    corpus = [complete_skeleton(4, 2), random_weights(complete_skeleton(5, 2), seed=7), complete_multipartite([2, 2, 2]),
              random_weights(complete_skeleton(5, 3), seed=8)]
    bad, families = [], 0
    for X in corpus:
        fams = default_families(X, max_families=10**6)
        families += len(fams)
        certs = walk_identity_suite(X, fams, tol=1e-12)
        names = {c.name.split("[")[0] for c in certs}
        assert {"one_step_path_conductance", "spanned_path_conductance"} <= names
        bad += failures(certs)
    emit(capsys, 7, not bad, f"{families} exhaustive disjoint families on {len(corpus)} complexes, rel 1e-12")
    assert not bad


# ----- 8


def test_criterion_08_mixing_operator_identities(capsys):
    corpus = [complete_skeleton(5, 2), complete_skeleton(5, 3), complete_skeleton(6, 2), complete_skeleton(6, 3),
              complete_multipartite([2, 2, 2]), complete_multipartite([2, 2, 2, 2]), random_weights(complete_skeleton(6, 2), seed=1)]
    bad, checked = [], 0
    for X in corpus:
        for l in range(1, X.n + 1):
            for fam in random_families(X, l, 4, seed=100 + l):
                for k in range(0, min(l, X.n)):
                    certs = operator_product_identities(X, k, l, fam, tol=1e-9)
                    checked += len(certs)
                    bad += failures(certs)
    ok = not bad and checked > 0
    emit(capsys, 8, ok, f"{checked} operator identities on K5/K6 skeleta and complete multipartite, rel 1e-9")
    assert checked > 0
    assert not bad


# ----- 9


def test_criterion_09_mixing_inequalities(capsys):
    bad, checked = [], 0
    for N in range(4, 8):
        X = complete_skeleton(N, 2)
        for l in (1, 2):
            certs = verify_mixing(X, l, exhaustive=True)
            checked += len(certs)
            bad += [(N, l, n) for n in failures(certs)]
            assert all(c.tol <= 1e-10 for c in certs if c.status != "not-applicable")
            assert any(c.passed for c in certs)
    P = complete_multipartite([2, 2, 2])
    for l in (1, 2):
        certs = verify_mixing(P, l, exhaustive=True, partite=True)
        checked += len(certs)
        bad += [("K222", l, n) for n in failures(certs)]
        assert any(c.passed for c in certs)
    emit(capsys, 9, not bad, f"{checked} exhaustive mixing certificates (K_N^2, N<=7; partite (2,2,2)), slack 1e-10")
    assert not bad


# ----- 10


def test_criterion_10_overlap(capsys):
    start = time.perf_counter()
    X = complete_skeleton(4, 2)
    square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    res = overlap_bruteforce(X, square)
    w_cross, _ = coverage(X, square, [0.5, 0.5])
    cross_ratio = w_cross / X.weights(2).sum()
    part_a = res.ratio >= 0.5 and cross_ratio >= 0.5

    # heavy-vertex instances: a vertex carrying at least omega of the vertex mass
    part_b = True
    rng = np.random.default_rng(10)
    for trial in range(20):
        spokes = int(rng.integers(4, 9))
        facets = [(0, i, i % spokes + 1) for i in range(1, spokes + 1)]
        Y = random_weights(build_complex(facets), seed=trial)
        ang = np.sort(rng.uniform(0, 2 * np.pi, size=spokes))
        pts = np.vstack([[0.0, 0.0], np.c_[np.cos(ang), np.sin(ang)] * rng.uniform(0.5, 2, size=(spokes, 1))])
        certs = heavy_vertex_check(Y, pts, omega=0.3)
        part_b &= bool(certs) and not failures(certs)
        cover = [c for c in certs if c.name == "heavy_vertex_coverage"]
        part_b &= bool(cover) and cover[0].lhs >= 0.3 / (2 * 9) * Y.weights(2).sum() - 1e-12

    part_c = True
    for trial in range(100):
        n = int(rng.integers(1, 4))
        size = int(rng.integers(4 * (n + 1), 40))
        w = rng.uniform(0.1, 1.0, size=size)
        cap = w.sum() / (2 * (n + 1))
        w = np.minimum(w, 0.99 * cap)  # enforce the no-heavy-vertex precondition
        while w.max() >= w.sum() / (2 * (n + 1)):
            w = np.minimum(w, 0.99 * w.sum() / (2 * (n + 1)))
        P = balanced_partition(w, n)
        part_c &= P.heavy_vertex is None and all(m > w.sum() / (2 * (n + 1)) for m in P.masses)

    part_d, worst = True, math.inf
    for trial in range(50):
        n = 1 + trial % 2
        measures = []
        for _ in range(n + 1):
            k = int(rng.integers(1, 5))
            probs = rng.uniform(0.1, 1, size=k)
            measures.append((rng.normal(size=(k, n)), list(probs / probs.sum())))
        _, prob, _ = centerpoint_bruteforce(measures)
        worst = min(worst, prob - 1 / math.factorial(n + 1))
        part_d &= prob >= 1 / math.factorial(n + 1) - 1e-9
    elapsed = time.perf_counter() - start
    ok = part_a and part_b and part_c and part_d and elapsed < 60
    emit(
        capsys, 10, ok,
        f"K4 square ratio {res.ratio:.3f} (crossing {cross_ratio:.3f}); heavy vertex {part_b}; partition {part_c}; "
        f"centerpoint min slack {worst:.3f}; {elapsed:.1f}s (< 60s)",
    )
    assert part_a and part_b and part_c and part_d
    assert elapsed < 60


# ----- 11


def test_criterion_11_determinism(capsys):
    cmd = [sys.executable, "-m", "hdx.cli", "verify", "--seed", "7"]
    a = subprocess.run(cmd, capture_output=True, text=True, timeout=300)
    b = subprocess.run(cmd, capture_output=True, text=True, timeout=300)
    ok = a.returncode == b.returncode == 0 and a.stdout == b.stdout and len(a.stdout) > 0
    emit(capsys, 11, ok, f"two runs of `hdx verify --seed 7`: exit {a.returncode}/{b.returncode}, {len(a.stdout)} bytes, identical={a.stdout == b.stdout}")
    assert a.returncode == 0, a.stderr
    assert a.stdout == b.stdout


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
