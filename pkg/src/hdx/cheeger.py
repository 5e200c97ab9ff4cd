"""Indicator forms, outer and inner connectivity, and the Cheeger-type constants h^k.

The constant h^k(X) is the largest eps >= 0 with

    (k/(k+1) + eps) h_inner + h_out/(k+1) >= eps

for every family of k+1 disjoint nonempty vertex sets. Solving for eps per
family gives ``(k/(k+1) h_inner + h_out/(k+1)) / (1 - h_inner)`` when
``h_inner < 1`` and no constraint otherwise, so h^k is the minimum of that
quantity over all families (clipped at 0).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .certificates import Certificate, relative_gap
from .cochains import Cochain, coboundary_matrix, codifferential, laplacian
from .complex_core import EMPTY, ComplexError, WeightedComplex, connectivity_report
from .spectra import iterate, link_profile, symmetric_spectrum
from .walks import SubsetFamily, _class_map, h_inner, m_tuple

DEFAULT_BUDGET = 10**7
CHEEGER_SLACK = 1e-10
_INNER_ONE = 1e-12
_CHUNK = 1 << 14


class BudgetExceeded(RuntimeError):
    """Raised when exhaustive enumeration would exceed the configured budget."""


def enumeration_budget() -> int:
    raw = os.environ.get("HDX_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(float(raw))
    except ValueError:
        raise ValueError(f"HDX_BUDGET must be a number, got {raw!r}") from None


# ----- single families


def indicator_form(X: WeightedComplex, family: SubsetFamily) -> Cochain:
    """The k-form equal to sgn(pi) on (u_0..u_k) when u_pi(i) lies in U_i, else 0."""
    k = len(family) - 1
    owner, sets = _class_map(X, family)
    values = np.zeros(X.count(k)) if 0 <= k <= X.n else None
    if values is None:
        raise ComplexError(f"family of {k + 1} sets has no k-simplices in dimension {X.n}")
    if any(not U for U in sets):
        return Cochain(X, k, values)
    for idx, s in enumerate(X.simplices(k)):
        classes = [owner.get(v) for v in s]
        if None in classes or len(set(classes)) != k + 1:
            continue
        values[idx] = _perm_sign(classes)
    return Cochain(X, k, values)


def _perm_sign(seq: Sequence[int]) -> float:
    inversions = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1.0 if inversions % 2 else 1.0


def _complement(X: WeightedComplex, sets: Sequence[frozenset[int]]) -> frozenset[int]:
    used = set().union(*sets) if sets else set()
    return frozenset(v for v in X.vertices if v not in used)


def h_out(X: WeightedComplex, family: SubsetFamily) -> float:
    """m(U_0..U_k, rest) / m(U_0..U_k); 0 when the rest is empty or no k-simplex spans U."""
    _, sets = _class_map(X, family)
    k = len(sets) - 1
    if k > X.n - 1:
        raise ComplexError(f"outer connectivity needs k <= n-1, got {k}")
    rest = _complement(X, sets)
    if not rest:
        return 0.0
    base = m_tuple(X, sets)
    if base == 0:
        return 0.0
    return m_tuple(X, list(sets) + [rest]) / base


def h_out_via_norms(X: WeightedComplex, family: SubsetFamily) -> float:
    """||d chi||^2 / ||chi||^2 computed from the indicator form."""
    chi = indicator_form(X, family)
    base = chi.norm2()
    if base == 0:
        return 0.0
    dchi = coboundary_matrix(X, chi.k) @ chi.values
    return float(np.dot(X.weights(chi.k + 1), dchi * dchi)) / base


def h_inner_via_norms(X: WeightedComplex, family: SubsetFamily) -> float:
    """||delta chi||^2 / ((k+1) ||chi||^2) computed from the indicator form."""
    chi = indicator_form(X, family)
    base = chi.norm2()
    if base == 0:
        return 0.0
    dl = codifferential(X, chi.k - 1).matrix @ chi.values
    return float(np.dot(X.weights(chi.k - 1), dl * dl)) / ((chi.k + 1) * base)


def family_bound(k: int, inner: float, outer: float) -> float:
    """Largest eps allowed by one family; +inf when h_inner = 1."""
    if inner >= 1.0 - _INNER_ONE:
        return math.inf
    return (k / (k + 1) * inner + outer / (k + 1)) / (1.0 - inner)


def indicator_suite(X: WeightedComplex, families: Sequence[SubsetFamily], tol: float = 1e-12) -> list[Certificate]:
    """Norm identities of indicator forms and the two expressions for h_out and h_inner."""
    worst = {"norm": 0.0, "coboundary": 0.0, "coboundary_norm": 0.0, "codifferential_norm": 0.0, "outer": 0.0, "inner": 0.0}
    used = 0
    for fam in families:
        _, sets = _class_map(X, fam)
        k = len(sets) - 1
        if k > X.n - 1:
            continue
        used += 1
        chi = indicator_form(X, sets)
        worst["norm"] = max(worst["norm"], relative_gap(chi.norm2(), m_tuple(X, sets)))
        rest = _complement(X, sets)
        extended = list(sets) + [rest]
        dchi = coboundary_matrix(X, k) @ chi.values
        target = indicator_form(X, extended).values * (-1.0) ** (k + 1)
        worst["coboundary"] = max(worst["coboundary"], float(np.max(np.abs(dchi - target))) if dchi.size else 0.0)
        worst["coboundary_norm"] = max(
            worst["coboundary_norm"],
            relative_gap(float(np.dot(X.weights(k + 1), dchi * dchi)), m_tuple(X, extended) if rest else 0.0),
        )
        if k >= 1 and all(sets):
            from .walks import build_kgraph, path_c, spanned_subgraph

            dl = codifferential(X, k - 1).matrix @ chi.values
            G = build_kgraph(X, k - 1)
            verts, edges = spanned_subgraph(X, k - 1, sets)
            two = path_c(G, verts, [edges, edges]) / k
            worst["codifferential_norm"] = max(
                worst["codifferential_norm"], relative_gap(float(np.dot(X.weights(k - 1), dl * dl)), two)
            )
        if all(sets):
            worst["outer"] = max(worst["outer"], abs(h_out(X, sets) - h_out_via_norms(X, sets)))
            worst["inner"] = max(worst["inner"], abs(h_inner(X, k, sets) - h_inner_via_norms(X, sets)))
    anchors = {
        "norm": "||chi_U||^2 = m(U_0..U_k)",
        "coboundary": "d chi_(U_0..U_k) = (-1)^(k+1) chi_(U_0..U_k, rest)",
        "coboundary_norm": "||d chi_U||^2 = m(U_0..U_k, rest)",
        "codifferential_norm": "||delta chi_U||^2 = pathc_{k-1}(V, E, E)/k",
        "outer": "h_out = ||d chi||^2/||chi||^2",
        "inner": "h_inner = ||delta chi||^2/((k+1)||chi||^2)",
    }
    return [
        Certificate.check(f"indicator_{key}", anchors[key], val, "<=", 0.0, tol, {"families": used})
        for key, val in worst.items()
    ]


# ----- exhaustive search


@dataclass
class CheegerReport:
    k: int
    h_k: float
    witness: list[list[int]] | None
    epsilon_bound: float | None = None
    passed: bool | None = None
    mode: str = "exhaustive"
    families: int = 0
    skipped_unspanned: int = 0
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "h_k": "inf" if math.isinf(self.h_k) else self.h_k,
            "witness": self.witness,
            "epsilon_bound": self.epsilon_bound,
            "pass": self.passed,
            "mode": self.mode,
            "families": self.families,
            "skipped_unspanned": self.skipped_unspanned,
        }


class _BatchEvaluator:
    """Vectorized per-family bounds for label arrays (value k+1 means unassigned)."""

    def __init__(self, X: WeightedComplex, k: int):
        if not 0 <= k <= X.n - 1:
            raise ComplexError(f"h^k needs 0 <= k <= n-1, got {k}")
        self.X, self.k = X, k
        self.simp_k = np.array(X.simplices(k), dtype=int).reshape(-1, k + 1)
        self.simp_up = np.array(X.simplices(k + 1), dtype=int).reshape(-1, k + 2)
        self.w_k = X.weights(k)
        self.w_up = X.weights(k + 1)
        self.w_down = X.weights(k - 1)
        self.delta = codifferential(X, k - 1).matrix
        self.m_empty = X.weight(EMPTY)

    @staticmethod
    def _transversal_sign(cls: np.ndarray, size: int) -> np.ndarray:
        """sgn of the class sequence when it is a permutation of 0..size-1, else 0."""
        ok = np.all(np.sort(cls, axis=-1) == np.arange(size), axis=-1)
        inv = np.zeros(cls.shape[:-1], dtype=int)
        for i in range(size):
            for j in range(i + 1, size):
                inv += cls[..., i] > cls[..., j]
        return np.where(ok, 1.0 - 2.0 * (inv % 2), 0.0)

    def evaluate(self, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(bound, mass, valid) per row; rows with an empty U_i are invalid."""
        k = self.k
        counts = np.stack([(labels == i).sum(axis=1) for i in range(k + 2)], axis=1)
        valid = np.all(counts[:, : k + 1] > 0, axis=1)
        chi = self._transversal_sign(labels[:, self.simp_k], k + 1)
        mass = (chi * chi) @ self.w_k
        up = np.abs(self._transversal_sign(labels[:, self.simp_up], k + 2)) @ self.w_up
        has_rest = counts[:, k + 1] > 0
        if k == 0:
            # h_in(U) = m(U)/m(empty), so the bound is up m(empty) / (m(U) (m(empty) - m(U)))
            inner_mass = mass * mass / self.m_empty
        else:
            dl = chi @ self.delta.T
            inner_mass = ((dl * dl) @ self.w_down) / (k + 1)
        # bound = (k/(k+1) inner + outer/(k+1)) / (1 - inner) with both sides scaled by mass
        gap = mass - inner_mass if k else mass * (self.m_empty - mass) / self.m_empty
        finite = (mass > 0) & (gap > _INNER_ONE * np.where(mass > 0, mass, 1.0))
        outer_mass = np.where(has_rest, up, 0.0)
        if k == 0:
            value = outer_mass * self.m_empty / np.where(finite, mass * (self.m_empty - mass), 1.0)
        else:
            value = (k * inner_mass + outer_mass) / ((k + 1) * np.where(finite, gap, 1.0))
        bound = np.where(finite, value, np.inf)
        return bound, mass, valid


def _labels_for(indices: np.ndarray, base: int, N: int) -> np.ndarray:
    powers = base ** np.arange(N, dtype=np.int64)
    return (indices[:, None] // powers[None, :]) % base


def _labels_to_family(labels: np.ndarray, k: int) -> list[list[int]]:
    return [[int(v) for v in np.flatnonzero(labels == i)] for i in range(k + 1)]


def h_k_exhaustive(X: WeightedComplex, k: int, budget: int | None = None, workers: int = 1) -> CheegerReport:
    """h^k(X) by enumerating every assignment of vertices to U_0..U_k or to none."""
    N = X.num_vertices
    base = k + 2
    total = base**N
    budget = enumeration_budget() if budget is None else budget
    if total > budget:
        raise BudgetExceeded(
            f"{total} assignments exceed the budget {budget}; use sampling mode or raise HDX_BUDGET"
        )
    ev = _BatchEvaluator(X, k)
    starts = list(range(0, total, _CHUNK))

    def run(start: int):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        labels = _labels_for(idx, base, N)
        bound, mass, valid = ev.evaluate(labels)
        skipped = int(np.sum(valid & (mass == 0)))
        ok = valid & (mass > 0)
        count = int(np.sum(valid))
        if not ok.any():
            return math.inf, None, skipped, count
        cand = np.where(ok, bound, np.inf)
        j = int(np.argmin(cand))
        return float(cand[j]), labels[j], skipped, count

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(s) for s in starts]
    return _reduce(k, results, "exhaustive")


def h_k_sampled(X: WeightedComplex, k: int, samples: int, seed: int = 0) -> CheegerReport:
    """Minimum over random families; an upper estimate of h^k (a failure is a real counterexample)."""
    rng = np.random.default_rng(seed)
    ev = _BatchEvaluator(X, k)
    results = []
    remaining = samples
    while remaining > 0:
        size = min(remaining, _CHUNK)
        labels = rng.integers(0, k + 2, size=(size, X.num_vertices))
        bound, mass, valid = ev.evaluate(labels)
        ok = valid & (mass > 0)
        cand = np.where(ok, bound, np.inf)
        j = int(np.argmin(cand))
        results.append((float(cand[j]), labels[j] if ok.any() else None, int(np.sum(valid & (mass == 0))), int(np.sum(valid))))
        remaining -= size
    return _reduce(k, results, "sampled")


def _reduce(k: int, results: list, mode: str) -> CheegerReport:
    best, witness = math.inf, None
    skipped = families = 0
    for val, lab, sk, cnt in results:
        skipped += sk
        families += cnt
        if lab is not None and val < best:
            best, witness = val, lab
    h = max(0.0, best)
    fam = _labels_to_family(witness, k) if witness is not None else None
    return CheegerReport(k, h, fam, mode=mode, families=families, skipped_unspanned=skipped)


# ----- one-dimensional quantities


def cheeger_constant(X: WeightedComplex) -> tuple[float, list[int] | None]:
    """min h_out(U) over nonempty proper U with m(U) <= m(V)/2."""
    N = X.num_vertices
    total = X.mass(X.vertices)
    best, arg = math.inf, None
    ev = _BatchEvaluator(X, 0)
    idx = np.arange(1, 2**N - 1, dtype=np.int64)
    if idx.size == 0:
        return math.inf, None
    labels = 1 - _labels_for(idx, 2, N)  # label 0 marks membership in U
    w = X.weights(0)
    mass = (labels == 0).astype(float) @ w
    keep = mass <= total / 2 + 1e-12 * total
    if not keep.any():
        return math.inf, None
    up = np.abs(ev._transversal_sign(labels[:, ev.simp_up], 2)) @ ev.w_up
    vals = np.where(keep, up / np.where(mass > 0, mass, 1.0), np.inf)
    j = int(np.argmin(vals))
    best, arg = float(vals[j]), [int(v) for v in np.flatnonzero(labels[j] == 0)]
    return best, arg


def second_eigenvalue(X: WeightedComplex) -> float:
    """Second smallest eigenvalue of Delta+_0 (0 when X is disconnected)."""
    vals = symmetric_spectrum(laplacian(X, 0, "up")).eigenvalues
    vals = np.sort(vals)
    return float(max(vals[1], 0.0)) if vals.size > 1 else 0.0


def one_dimensional_checks(X: WeightedComplex) -> list[Certificate]:
    """h^2/2 <= lambda <= 2h and lambda <= h^0 <= 2h for a weighted graph."""
    if X.n != 1:
        raise ComplexError("one-dimensional checks need a graph")
    lam = second_eigenvalue(X)
    h, witness = cheeger_constant(X)
    h0 = h_k_exhaustive(X, 0).h_k
    tol = CHEEGER_SLACK
    ctx = {"lambda": lam, "h": h, "h0": h0, "cheeger_witness": witness}
    return [
        Certificate.check("graph_cheeger_lower", "h^2/2 <= lambda", h * h / 2, "<=", lam, tol, ctx),
        Certificate.check("graph_cheeger_upper", "lambda <= 2h", lam, "<=", 2 * h, tol, ctx),
        Certificate.check("graph_h0_lower", "lambda <= h^0", lam, "<=", h0, tol, ctx),
        Certificate.check("graph_h0_upper", "h^0 <= 2h", h0, "<=", 2 * h, tol, ctx),
    ]


# ----- verification


def link_gap(X: WeightedComplex, level: int) -> float | None:
    """Smallest nonzero eigenvalue of Delta+_0 over the links of all simplices of dimension ``level``."""
    if level == -1:
        return symmetric_spectrum(laplacian(X, 0, "up")).lam
    return link_profile(X, level).lam


def verify_cheeger(
    X: WeightedComplex,
    ks: Sequence[int] | None = None,
    samples: int | None = None,
    seed: int = 0,
    budget: int | None = None,
    strict: bool = False,
) -> tuple[list[Certificate], list[CheegerReport]]:
    """h^k(X) against the gap of the links one level below, and against the top-level corollary.

    An exceeded enumeration budget becomes a not-applicable certificate unless
    ``strict`` is set, in which case BudgetExceeded propagates.
    """
    certs: list[Certificate] = []
    reports: list[CheegerReport] = []
    anchor_thm = "h^k(X) >= eps when link spectra at level k-1 lie in [k/(k+1) + eps, inf)"
    anchor_cor = "h^k(X) >= f^(n-k-1)((n-1)/n + eps) - k/(k+1)"
    if X.n == 1:
        certs.extend(one_dimensional_checks(X))
    conn = connectivity_report(X)
    ks = range(X.n) if ks is None else ks
    top = link_gap(X, X.n - 2) if X.n >= 1 else None
    for k in ks:
        if not 0 <= k <= X.n - 1:
            raise ComplexError(f"h^k needs 0 <= k <= n-1, got {k}")
        if k >= 1 and not conn.links_connected:
            certs.append(Certificate.not_applicable(f"cheeger[k={k}]", anchor_thm, "links of positive dimension must be connected"))
            continue
        if k == 0 and not conn.connected:
            certs.append(Certificate.not_applicable(f"cheeger[k={k}]", anchor_thm, "complex is disconnected"))
            continue
        try:
            report = h_k_sampled(X, k, samples, seed) if samples else h_k_exhaustive(X, k, budget)
        except BudgetExceeded as exc:
            if strict:
                raise
            certs.append(Certificate.not_applicable(f"cheeger[k={k}]", anchor_thm, str(exc)))
            continue
        gap = link_gap(X, k - 1)
        eps = None if gap is None else gap - k / (k + 1)
        report.epsilon_bound = eps
        witness = {"k": k, "mode": report.mode, "witness": report.witness, "skipped_unspanned": report.skipped_unspanned}
        if eps is None or eps <= 0:
            certs.append(Certificate.not_applicable(f"cheeger[k={k}]", anchor_thm, "link gap does not exceed k/(k+1)", witness))
        else:
            cert = Certificate.check(f"cheeger[k={k}]", anchor_thm, report.h_k, ">=", eps, CHEEGER_SLACK, dict(witness, epsilon=eps))
            report.passed = cert.passed
            certs.append(cert)
        name = f"cheeger_from_top_links[k={k}]"
        if X.n < 2 or top is None or not top > (X.n - 1) / X.n or not conn.links_connected:
            certs.append(Certificate.not_applicable(name, anchor_cor, "top links do not exceed (n-1)/n"))
        else:
            eps_k = iterate(top, X.n - k - 1) - k / (k + 1)
            certs.append(Certificate.check(name, anchor_cor, report.h_k, ">=", eps_k, CHEEGER_SLACK, dict(witness, epsilon=eps_k)))
        reports.append(report)
    return certs, reports


__all__ = [
    "BudgetExceeded",
    "CheegerReport",
    "cheeger_constant",
    "enumeration_budget",
    "family_bound",
    "h_inner_via_norms",
    "h_k_exhaustive",
    "h_k_sampled",
    "h_out",
    "h_out_via_norms",
    "indicator_form",
    "indicator_suite",
    "one_dimensional_checks",
    "second_eigenvalue",
    "verify_cheeger",
]
