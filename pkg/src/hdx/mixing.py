"""Projections onto spanned simplices, random-walk forms and mixing bounds.

A family ``U_0..U_l`` of disjoint vertex sets spans ordered k-simplices with one
vertex per set among ``k + 1`` consecutive sets.  Products of projections and
Laplacians applied to indicator forms compute coarse path conductances, and the
spectral gaps of the Laplacians then bound how far ``m(U_0..U_l)`` can deviate
from the product of the masses.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .certificates import Certificate, relative_gap
from .cheeger import BudgetExceeded, enumeration_budget, indicator_form
from .cochains import Cochain, OperatorMatrix, inner_product, laplacian
from .complex_core import EMPTY, ComplexError, WeightedComplex, connectivity_report
from .spectra import iterate, link_profile, local_expansion
from .walks import KGraph, SubsetFamily, _class_map, build_kgraph, m_tuple, path_c, path_mu, spanned_simplices, spanned_subgraph

IDENTITY_TOL = 1e-9
MIXING_SLACK = 1e-10
_CHUNK = 1 << 12

__all__ = [
    "IDENTITY_TOL",
    "MIXING_SLACK",
    "MixingConstants",
    "projection",
    "psi_form",
    "psi_recursion_gap",
    "path_conductance",
    "operator_product",
    "operator_product_identities",
    "mixing_constants",
    "measured_levels",
    "verify_mixing",
    "verify_mixing_theorem",
    "random_families",
]


def _sets(X: WeightedComplex, family: SubsetFamily) -> list[frozenset[int]]:
    return _class_map(X, family)[1]


# ----- projections and random-walk forms


def projection(X: WeightedComplex, k: int, family: SubsetFamily) -> OperatorMatrix:
    """Pointwise multiplication by |chi_{U_0..U_k}| on C^k."""
    if len(family) != k + 1:
        raise ComplexError(f"projection on degree {k} needs {k + 1} sets, got {len(family)}")
    chi = indicator_form(X, family)
    w = X.weights(k)
    return OperatorMatrix(f"P_{k}", np.diag(np.abs(chi.values)), k, k, w, w)


def _step_edges(X: WeightedComplex, k: int, sets: Sequence[frozenset[int]]) -> list[frozenset]:
    """E_k(U_i..U_{i+k+1}) for i = 0..l-k-1 (loops of U_i when k = -1)."""
    l = len(sets) - 1
    return [spanned_subgraph(X, k, sets[i : i + k + 2])[1] for i in range(l - k)]


def psi_form(X: WeightedComplex, k: int, family: SubsetFamily, graph: KGraph | None = None) -> Cochain:
    """The k random-walk form of the family.

    On a simplex spanned by ``U_0..U_k`` its value is the class-order sign times
    the probability of walking through ``E_k(U_0..U_{k+1}), ..., E_k(U_{l-k-1}..U_l)``;
    elsewhere it is zero.  For ``k = -1`` it is ``m(U_0)...m(U_l)/m(empty)^{l+1}``.
    """
    sets = _sets(X, family)
    l = len(sets) - 1
    if k == -1:
        if l < 0:
            raise ComplexError("the random-walk form needs at least one set")
        value = math.prod(X.mass(U) for U in sets) / X.weight(EMPTY) ** (l + 1)
        return Cochain(X, -1, np.array([value]))
    if not 0 <= k < min(l, X.n):
        raise ComplexError(f"random-walk form needs 0 <= k < min(l, n), got k={k}, l={l}, n={X.n}")
    values = np.zeros(X.count(k))
    if any(not U for U in sets):
        return Cochain(X, k, values)
    G = graph if graph is not None else build_kgraph(X, k)
    steps = _step_edges(X, k, sets)
    chi = indicator_form(X, sets[: k + 1])
    for s in spanned_simplices(X, k, sets[: k + 1]):
        idx = X.index(s)
        values[idx] = chi.values[idx] * path_mu(G, [s], steps)
    return Cochain(X, k, values)


def psi_recursion_gap(X: WeightedComplex, k: int, family: SubsetFamily, graph: KGraph | None = None) -> float:
    """Largest relative gap in the one-step concatenation of random-walk forms.

    Compares the form of ``U_0..U_l`` with the mu-weighted sum of the form of
    ``U_1..U_l`` over ordered simplices in ``U_1 x ... x U_{k+1}``.
    """
    sets = _sets(X, family)
    l = len(sets) - 1
    if not 0 <= k < min(l, X.n) - 1:
        raise ComplexError(f"concatenation needs 0 <= k < min(l, n) - 1, got k={k}, l={l}")
    G = graph if graph is not None else build_kgraph(X, k)
    whole = psi_form(X, k, sets, G)
    tail = psi_form(X, k, sets[1:], G)
    chi = indicator_form(X, sets[: k + 1])
    owner = {v: i for i, U in enumerate(sets) for v in U}
    worst = 0.0
    for s in spanned_simplices(X, k, sets[: k + 1]):
        total = 0.0
        for e in G.incident.get(s, ()):
            t = G.other_end(s, e)
            classes = sorted(owner.get(v, -1) for v in t)
            if classes != list(range(1, k + 2)):
                continue
            ordered = tuple(sorted(t, key=lambda v: owner[v]))
            total += G.transition(s, e) * tail(ordered)
        expected = chi.values[X.index(s)] * total
        worst = max(worst, relative_gap(whole.values[X.index(s)], expected))
    return worst


# ----- coarse path conductance of a family


def path_conductance(X: WeightedComplex, k: int, family: SubsetFamily, graph: KGraph | None = None) -> float:
    """pathc_k(V_k(U_0..U_k), E_k(U_0..U_{k+1}), ..., E_k(U_{l-k-1}..U_l))."""
    sets = _sets(X, family)
    l = len(sets) - 1
    if not -1 <= k < l:
        raise ComplexError(f"path conductance needs -1 <= k < l, got k={k}, l={l}")
    if any(not U for U in sets):
        return 0.0
    G = graph if graph is not None else build_kgraph(X, k)
    start = [EMPTY] if k == -1 else spanned_simplices(X, k, sets[: k + 1])
    return path_c(G, start, _step_edges(X, k, sets))


# ----- operator products


def operator_product(X: WeightedComplex, k: int, family: SubsetFamily, kind: str) -> Cochain:
    """(P_{U_0..U_k} L)(P_{U_1..U_{k+1}} L)...(P_{U_{l-k-1}..U_{l-1}} L) chi_{U_{l-k}..U_l}.

    ``kind`` selects L as the upper ("up") or lower ("down") Laplacian on C^k.
    """
    sets = _sets(X, family)
    l = len(sets) - 1
    if not 0 <= k < l:
        raise ComplexError(f"operator product needs 0 <= k < l, got k={k}, l={l}")
    L = laplacian(X, k, kind).matrix
    v = indicator_form(X, sets[l - k :]).values
    for i in reversed(range(l - k)):
        mask = np.abs(indicator_form(X, sets[i : i + k + 1]).values)
        v = mask * (L @ v)
    return Cochain(X, k, v)


def _ordered_transversals(X: WeightedComplex, sets: Sequence[frozenset[int]]) -> list[tuple[int, ...]]:
    """Ordered simplices (u_0..u_k) with u_i in U_i."""
    owner = {v: i for i, U in enumerate(sets) for v in U}
    out = []
    for s in spanned_simplices(X, len(sets) - 1, sets):
        out.append(tuple(sorted(s, key=lambda v: owner[v])))
    return out


def operator_product_identities(
    X: WeightedComplex, k: int, l: int, family: SubsetFamily, tol: float = IDENTITY_TOL
) -> list[Certificate]:
    """Products of projected Laplacians against random-walk forms and path conductances.

    Returns one certificate per identity (relative error against ``tol``):
    the upper product equals a signed, scaled random-walk form; the lower product
    vanishes off the spanned simplices and localizes to the form one degree down
    (k >= 1); the lower product in degree 0 reproduces a multiple of chi_{U_0};
    and the inner products against chi_{U_0..U_k} give scaled path conductances.
    """
    sets = _sets(X, family)
    if len(sets) != l + 1:
        raise ComplexError(f"chain length l={l} needs {l + 1} sets, got {len(sets)}")
    if not 0 <= k <= X.n - 1 or not k < l:
        raise ComplexError(f"identities need 0 <= k <= n-1 and k < l, got k={k}, l={l}, n={X.n}")
    ctx = {"k": k, "l": l, "family": [sorted(U) for U in sets]}
    certs: list[Certificate] = []
    chi0 = indicator_form(X, sets[: k + 1])
    G = build_kgraph(X, k)

    up = operator_product(X, k, sets, "up")
    psi = psi_form(X, k, sets, G)
    scale = (-1) ** ((k + 1) * (l - k)) / (k + 1) ** (l - k - 1)
    certs.append(
        Certificate.check(
            "upper_product_is_walk_form", "(-1)^{(k+1)(l-k)}/(k+1)^{l-k-1} prod(P Delta+_k) chi = Psi_k(U_0..U_l)",
            _worst_vector_gap(scale * up.values, psi.values), "<=", 0.0, tol, ctx,
        )
    )
    pathc = path_conductance(X, k, sets, G)
    certs.append(
        Certificate.check(
            "upper_inner_product", "|<chi, prod(P Delta+_k) chi>| = (k+1)^{l-k-2} pathc_k(U_0..U_l)",
            relative_gap(abs(inner_product(chi0, up)), (k + 1) ** (l - k - 2) * pathc), "<=", 0.0, tol, ctx,
        )
    )

    if k >= 1:
        down = operator_product(X, k, sets, "down")
        support = np.abs(chi0.values) > 0
        off = float(np.max(np.abs(down.values[~support]), initial=0.0))
        certs.append(
            Certificate.check(
                "lower_product_support", "prod(P Delta-_k) chi vanishes off the simplices spanned by U_0..U_k",
                off, "<=", 0.0, tol, ctx,
            )
        )
        lower_psi = psi_form(X, k - 1, sets[1:])
        scale = (-1) ** ((l - k) * k) / k ** (l - k - 1)
        worst = 0.0
        for sigma in _ordered_transversals(X, sets[: k + 1]):
            worst = max(worst, relative_gap(scale * down(sigma), lower_psi(sigma[1:])))
        certs.append(
            Certificate.check(
                "lower_product_localizes", "(-1)^{(l-k)k}/k^{l-k-1} prod(P Delta-_k) chi (sigma) = Psi_{k-1}(U_1..U_l)(sigma_0)",
                worst, "<=", 0.0, tol, ctx,
            )
        )
        lower_pathc = path_conductance(X, k - 1, sets)
        certs.append(
            Certificate.check(
                "lower_inner_product", "|<chi, prod(P Delta-_k) chi>| = k^{l-1-k} pathc_{k-1}(U_0..U_l)",
                relative_gap(abs(inner_product(chi0, down)), k ** (l - 1 - k) * lower_pathc), "<=", 0.0, tol, ctx,
            )
        )

    if k == 0:
        down0 = operator_product(X, 0, sets, "down")
        factor = math.prod(X.mass(U) for U in sets[1:]) / X.weight(EMPTY) ** l
        first = indicator_form(X, sets[:1])
        certs.append(
            Certificate.check(
                "degree_zero_lower_product", "prod(P_{U_i} Delta-_0) chi_{U_l} = m(U_1)...m(U_l)/m(X^0)^l chi_{U_0}",
                _worst_vector_gap(down0.values, factor * first.values), "<=", 0.0, tol, ctx,
            )
        )
        certs.append(
            Certificate.check(
                "degree_zero_inner_product", "<chi_{U_0}, prod(P_{U_i} Delta-_0) chi_{U_l}> = pathc_{-1}(U_0..U_l)",
                relative_gap(inner_product(first, down0), path_conductance(X, -1, sets)), "<=", 0.0, tol, ctx,
            )
        )
    if k == l - 1:
        certs.append(
            Certificate.check(
                "last_level_conductance", "pathc_{l-1}(U_0..U_l) = l m(U_0..U_l)",
                relative_gap(pathc, l * m_tuple(X, sets)), "<=", 0.0, tol, ctx,
            )
        )
    return certs


def _worst_vector_gap(a: np.ndarray, b: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(b)))))


# ----- constants


@dataclass
class MixingConstants:
    """Per-level parameters and aggregate constants of the mixing bounds for chains of length l."""

    n: int
    l: int
    lam: float
    kappa: float
    partite: bool
    lams: list[float]
    kappas: list[float]
    rs: list[float]
    epsilons: list[float]
    leading: float
    error: float
    applicable: bool
    reason: str = ""
    partite_rs: list[float] = field(default_factory=list)
    partite_epsilons: list[float] = field(default_factory=list)
    partite_leading: float | None = None
    partite_error: float | None = None
    partite_error_tight: float | None = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "l": self.l,
            "lambda": self.lam,
            "kappa": self.kappa,
            "partite": self.partite,
            "levels": [
                {"j": j, "lambda": a, "kappa": b, "r": r, "epsilon": e}
                for j, (a, b, r, e) in enumerate(zip(self.lams, self.kappas, self.rs, self.epsilons))
            ],
            "A": self.leading,
            "E": self.error,
            "applicable": self.applicable,
            "reason": self.reason,
            "partite_r": self.partite_rs,
            "partite_epsilon": self.partite_epsilons,
            "partite_leading": self.partite_leading,
            "partite_E": self.partite_error,
            "partite_E_tight": self.partite_error_tight,
        }


def _aggregate(l: int, rs: Sequence[float], eps: Sequence[float], upto: int) -> tuple[float, float]:
    """prod_{j<=upto} r_j^{l-j} and sum_{i<=upto} eps_i prod_{j=i+1}^{upto} r_j^{l-j}."""
    lead = math.prod(rs[j] ** (l - j) for j in range(upto + 1))
    err = sum(eps[i] * math.prod(rs[j] ** (l - j) for j in range(i + 1, upto + 1)) for i in range(upto + 1))
    return lead, err


def mixing_constants(
    n: int,
    l: int,
    lam: float,
    kappa: float,
    partite: bool = False,
    levels: Sequence[tuple[float, float]] | None = None,
) -> MixingConstants:
    """Constants of the mixing bounds for chains U_0..U_l in an n-dimensional complex.

    By default level j uses (f^{n-1-j}(lam), f^{n-1-j}(kappa)); ``levels`` may
    supply measured per-level pairs instead (index j = link level j-1).
    The general constants are r_j = (lam_j + kappa_j)/2,
    eps_j = (l-j)(j+1)(((j+1)kappa_j - j)/2)^{l-j-1}(kappa_j - lam_j)/2,
    A_l = prod_{j<l} r_j^{l-j} and E_l = sum_i eps_i prod_{j>i} r_j^{l-j}.
    With ``partite`` the side-respecting constants use r_j = (n+1-j)/(n-j) and
    eps_j = (l-j)((n+1)/(2(n-j)))^{l-j-1}(j+1)(n+1-j)(1-lam_j)/2.
    """
    if not 1 <= l <= n:
        raise ComplexError(f"chain length must satisfy 1 <= l <= n, got l={l}, n={n}")
    reasons = []
    if lam > kappa:
        reasons.append(f"lambda {lam} exceeds kappa {kappa}")
    if not lam > (n - 1) / n:
        reasons.append(f"lambda {lam:.6g} does not exceed (n-1)/n")
    lams: list[float] = []
    kappas: list[float] = []
    for j in range(l):
        if levels is not None:
            a, b = levels[j]
        else:
            try:
                a, b = iterate(lam, n - 1 - j), iterate(kappa, n - 1 - j)
            except ValueError:
                a, b = float("nan"), float("nan")
        lams.append(float(a))
        kappas.append(float(b))
    for j, a in enumerate(lams):
        if not a > j / (j + 1):
            reasons.append(f"level {j} gap {a:.6g} does not exceed {j}/{j + 1}")
    rs = [(a + b) / 2 for a, b in zip(lams, kappas)]
    eps = [
        (l - j) * (j + 1) * (((j + 1) * b - j) / 2) ** (l - j - 1) * (b - a) / 2
        for j, (a, b) in enumerate(zip(lams, kappas))
    ]
    lead, err = _aggregate(l, rs, eps, l - 1)
    out = MixingConstants(
        n=n, l=l, lam=lam, kappa=kappa, partite=partite, lams=lams, kappas=kappas, rs=rs,
        epsilons=eps, leading=lead, error=err, applicable=not reasons, reason="; ".join(reasons),
    )
    if partite:
        prs = [(n + 1 - j) / (n - j) for j in range(l)]
        peps = [
            (l - j) * ((n + 1) / (2 * (n - j))) ** (l - j - 1) * (j + 1) * (n + 1 - j) * (1 - a) / 2
            for j, a in enumerate(lams)
        ]
        _, perr = _aggregate(l, prs, peps, l - 1)
        out.partite_rs = prs
        out.partite_epsilons = peps
        out.partite_leading = 1.0 / math.prod(n + 1 - i for i in range(l + 1))
        out.partite_error = (n + 1) * perr
        out.partite_error_tight = perr / (n + 1)
    return out


def measured_levels(X: WeightedComplex, l: int, workers: int = 1) -> list[tuple[float, float]]:
    """Measured (lam_j, kappa_j) for j < l: extremes of the nonzero link spectra at level j-1."""
    out = []
    for j in range(l):
        row = link_profile(X, j - 1, workers)
        if row.lam is None:
            raise ComplexError(f"no nonzero link spectrum at level {j - 1}")
        out.append((row.lam, row.kappa))
    return out


# ----- verification


def _normalize_families(X: WeightedComplex, families: Iterable[SubsetFamily]) -> list[list[frozenset[int]]]:
    return [_sets(X, fam) for fam in families]


def random_families(
    X: WeightedComplex, l: int, count: int, seed: int = 0, sides: bool = False
) -> list[list[frozenset[int]]]:
    """Uniform random disjoint families of l+1 nonempty sets (inside distinct sides when ``sides``)."""
    rng = np.random.default_rng(seed)
    N = X.num_vertices
    out: list[list[frozenset[int]]] = []
    if sides and not X.is_partite:
        raise ComplexError("side-respecting families need a partite complex")
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 1000 * max(count, 1):
            raise ComplexError("could not draw enough nonempty families")
        labels = rng.integers(0, l + 2, size=N)
        if sides:
            order = rng.permutation(X.num_sides)[: l + 1]
            fam = [
                frozenset(v for v in X.side(int(order[i])) if labels[v] == i)
                for i in range(l + 1)
            ]
        else:
            fam = [frozenset(int(v) for v in np.flatnonzero(labels == i)) for i in range(l + 1)]
        if all(fam):
            out.append(fam)
    return out


def _labels_to_sets(labels: np.ndarray, l: int) -> list[frozenset[int]]:
    return [frozenset(int(v) for v in np.flatnonzero(labels == i)) for i in range(l + 1)]


class _FamilyEvaluator:
    """Vectorized m(U_0..U_l) and m(U_i) for label vectors (label l+1 means unused)."""

    def __init__(self, X: WeightedComplex, l: int):
        self.l = l
        simplices = X.simplices(l)
        self.cells = np.array(simplices, dtype=np.int64).reshape(len(simplices), l + 1)
        self.cell_weights = X.weights(l)
        self.vertex_weights = X.weights(0)
        self.full = (1 << (l + 1)) - 1

    def evaluate(self, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        gathered = labels[:, self.cells]
        valid = np.all(gathered <= self.l, axis=2)
        bits = np.where(gathered <= self.l, np.left_shift(1, np.minimum(gathered, self.l)), 0)
        hit = valid & (np.bitwise_or.reduce(bits, axis=2) == self.full)
        joint = hit.astype(float) @ self.cell_weights
        masses = np.stack(
            [(labels == i).astype(float) @ self.vertex_weights for i in range(self.l + 1)], axis=1
        )
        return joint, masses


@dataclass
class _Worst:
    ratio: float = -math.inf
    slack: float = math.inf
    lhs: float = 0.0
    rhs: float = 0.0
    family: list | None = None

    def update(self, lhs: np.ndarray, rhs: np.ndarray, labels: np.ndarray, l: int) -> None:
        if lhs.size == 0:
            return
        gap = rhs - lhs
        i = int(np.argmin(gap))
        if gap[i] < self.slack:
            self.slack = float(gap[i])
            self.lhs = float(lhs[i])
            self.rhs = float(rhs[i])
            self.family = [sorted(U) for U in _labels_to_sets(labels[i], l)]


def _bounds(
    joint: np.ndarray, masses: np.ndarray, total: float, lead: float, err: float, l: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Deviation and the two right-hand sides for masses already normalized as needed."""
    deviation = np.abs(joint - lead * np.prod(masses, axis=1) / total**l)
    pairs = [masses[:, i] * masses[:, j] for i, j in itertools.combinations(range(l + 1), 2)]
    first = err * np.sqrt(np.min(np.stack(pairs, axis=1), axis=1))
    second = err * np.prod(masses, axis=1) ** (1.0 / (l + 1))
    return deviation, first, second


def _label_batches(X: WeightedComplex, l: int, families, exhaustive: bool, budget: int | None, partite: bool):
    N = X.num_vertices
    if not exhaustive:
        fams = _normalize_families(X, families)
        for fam in fams:
            if len(fam) != l + 1:
                raise ComplexError(f"family {fam} does not have {l + 1} sets")
        for start in range(0, len(fams), _CHUNK):
            chunk = fams[start : start + _CHUNK]
            labels = np.full((len(chunk), N), l + 1, dtype=np.int64)
            for r, fam in enumerate(chunk):
                for i, U in enumerate(fam):
                    labels[r, list(U)] = i
            yield labels
        return
    if partite:
        yield from _partite_label_batches(X, l, budget)
        return
    total = (l + 2) ** N
    cap = enumeration_budget() if budget is None else budget
    if total > cap:
        raise BudgetExceeded(f"{total} labelings exceed the budget {cap}")
    powers = (l + 2) ** np.arange(N, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        yield (idx[:, None] // powers[None, :]) % (l + 2)


def _partite_label_batches(X: WeightedComplex, l: int, budget: int | None):
    """Every assignment of l+1 distinct sides to the positions with a subset of each side."""
    cap = enumeration_budget() if budget is None else budget
    N = X.num_vertices
    count = 0
    rows = []
    for order in itertools.permutations(range(X.num_sides), l + 1):
        sides = [X.side(s) for s in order]
        for masks in itertools.product(*[range(1, 1 << len(S)) for S in sides]):
            count += 1
            if count > cap:
                raise BudgetExceeded(f"side-respecting families exceed the budget {cap}")
            row = np.full(N, l + 1, dtype=np.int64)
            for i, (S, mask) in enumerate(zip(sides, masks)):
                for b, v in enumerate(S):
                    if mask >> b & 1:
                        row[v] = i
            rows.append(row)
            if len(rows) == _CHUNK:
                yield np.array(rows)
                rows = []
    if rows:
        yield np.array(rows)


def _side_masses(X: WeightedComplex, labels: np.ndarray, l: int) -> np.ndarray:
    """m(S_i) of the side containing U_i, per row."""
    side_of = np.array([X.partition[v] for v in range(X.num_vertices)], dtype=np.int64)
    side_mass = np.array([X.mass(X.side(s)) for s in range(X.num_sides)])
    out = np.zeros((labels.shape[0], l + 1))
    for i in range(l + 1):
        first = np.argmax(labels == i, axis=1)
        out[:, i] = side_mass[side_of[first]]
    return out


def _check_sides(X: WeightedComplex, labels: np.ndarray, l: int) -> None:
    side_of = np.array([X.partition[v] for v in range(X.num_vertices)], dtype=np.int64)
    for row in labels:
        used = set()
        for i in range(l + 1):
            owners = set(side_of[row == i].tolist())
            if len(owners) != 1 or owners & used:
                raise ComplexError("partite families need each U_i inside its own side")
            used |= owners


def _hypotheses(X: WeightedComplex, l: int) -> str:
    if not 1 <= l <= X.n:
        return f"chain length l={l} must satisfy 1 <= l <= n={X.n}"
    conn = connectivity_report(X)
    if not conn.connected:
        return "complex is disconnected"
    if not conn.links_connected:
        return "some link of positive dimension is disconnected"
    return ""


def verify_mixing(
    X: WeightedComplex,
    l: int,
    families: Sequence[SubsetFamily] | None = None,
    exhaustive: bool = False,
    partite: bool = False,
    per_level: bool = False,
    budget: int | None = None,
    slack: float = MIXING_SLACK,
) -> list[Certificate]:
    """Check both mixing inequalities for every family.

    The general form compares m(U_0..U_l) with A_l m(U_0)...m(U_l)/m(X^0)^l.
    The partite form normalizes by the sides, m(U_0..U_l)/m(X^0) against
    m(U_0)...m(U_l)/((n+1)n...(n-l+1) m(S_0)...m(S_l)).  Families with an empty
    set are skipped.  ``per_level`` replaces the f-iterates of the top-level
    (lam, kappa) by the measured link spectra at every level.
    """
    tag = "partite" if partite else "general"
    anchor = (
        "|m(U_0..U_l)/m(X^0) - m(U_0)..m(U_l)/((n+1)n..(n-l+1) m(S_0)..m(S_l))| <= E_l min sqrt(m(U_i)m(U_j)/(m(S_i)m(S_j)))"
        if partite
        else "|m(U_0..U_l) - A_l m(U_0)..m(U_l)/m(X^0)^l| <= E_l min sqrt(m(U_i)m(U_j)) and E_l (prod m(U_i))^{1/(l+1)}"
    )
    name = f"mixing_{tag}[l={l}]"
    reason = _hypotheses(X, l)
    if partite and not X.is_partite:
        reason = reason or "complex carries no (n+1)-partition"
    if reason:
        return [Certificate.not_applicable(name, anchor, reason)]
    if families is None and not exhaustive:
        families = random_families(X, l, 64, seed=0, sides=partite)
    lam, kappa = local_expansion(X)
    if lam is None:
        return [Certificate.not_applicable(name, anchor, "one-dimensional links have no nonzero spectrum")]
    levels = measured_levels(X, l) if per_level else None
    consts = mixing_constants(X.n, l, lam, kappa, partite, levels)
    ctx = {"l": l, "mode": "per-level" if per_level else "descended", "constants": consts.to_dict()}
    if not consts.applicable:
        return [Certificate.not_applicable(name, anchor, consts.reason, ctx)]

    evaluator = _FamilyEvaluator(X, l)
    total = X.weight(EMPTY)
    worst = {"min_pair": _Worst(), "geometric_mean": _Worst()}
    tight = _Worst()
    checked = skipped = 0
    for labels in _label_batches(X, l, families, exhaustive, budget, partite):
        keep = np.all(np.stack([(labels == i).any(axis=1) for i in range(l + 1)], axis=1), axis=1)
        skipped += int(np.count_nonzero(~keep))
        labels = labels[keep]
        if labels.size == 0:
            continue
        joint, masses = evaluator.evaluate(labels)
        nonzero = np.all(masses > 0, axis=1)
        skipped += int(np.count_nonzero(~nonzero))
        labels, joint, masses = labels[nonzero], joint[nonzero], masses[nonzero]
        checked += len(labels)
        if partite:
            _check_sides(X, labels, l)
            ratios = masses / _side_masses(X, labels, l)
            dev, first, second = _bounds(joint / total, ratios, 1.0, consts.partite_leading, consts.partite_error, l)
            dev_t, first_t, _ = _bounds(joint / total, ratios, 1.0, consts.partite_leading, consts.partite_error_tight, l)
            tight.update(dev_t, first_t, labels, l)
        else:
            dev, first, second = _bounds(joint, masses, total, consts.leading, consts.error, l)
        worst["min_pair"].update(dev, first, labels, l)
        worst["geometric_mean"].update(dev, second, labels, l)
    certs = []
    for label, w in worst.items():
        if w.family is None:
            certs.append(Certificate.not_applicable(f"{name}.{label}", anchor, "no family with positive masses", ctx))
            continue
        certs.append(
            Certificate.check(
                f"{name}.{label}", anchor, w.lhs, "<=", w.rhs, slack,
                dict(ctx, families=checked, skipped=skipped, worst_family=w.family),
            )
        )
    if partite and tight.family is not None:
        certs.append(
            Certificate.check(
                f"{name}.min_pair_side_normalized", anchor + " with E_l replaced by E_l/(n+1)^2",
                tight.lhs, "<=", tight.rhs, slack,
                dict(ctx, families=checked, worst_family=tight.family),
            )
        )
    return certs


def verify_mixing_theorem(
    X: WeightedComplex,
    l: int,
    families: Sequence[SubsetFamily],
    partite: bool = False,
    slack: float = MIXING_SLACK,
) -> list[Certificate]:
    """The level-by-level bound on (k+1)^{l-k-2} pathc_k(U_0..U_l) for k = 0..l-1.

    |(k+1)^{l-k-2} pathc_k - prod_{j<=k} r_j^{l-j} pathc_{-1}|
        <= sum_{i<=k} eps_i prod_{j=i+1}^k r_j^{l-j} sqrt(m(U_0..U_i) m(U_{l-i}..U_l)).
    Path conductances come from the walks, not from the operator products.
    """
    tag = "partite" if partite else "general"
    anchor = "|(k+1)^{l-k-2} pathc_k - prod r_j^{l-j} pathc_{-1}| <= sum eps_i prod r_j^{l-j} sqrt(m(U_0..U_i) m(U_{l-i}..U_l))"
    reason = _hypotheses(X, l)
    if partite and not X.is_partite:
        reason = reason or "complex carries no (n+1)-partition"
    if reason:
        return [Certificate.not_applicable(f"mixing_theorem_{tag}[l={l}]", anchor, reason)]
    lam, kappa = local_expansion(X)
    if lam is None:
        return [Certificate.not_applicable(f"mixing_theorem_{tag}[l={l}]", anchor, "no nonzero link spectrum")]
    consts = mixing_constants(X.n, l, lam, kappa, partite)
    if not consts.applicable:
        return [Certificate.not_applicable(f"mixing_theorem_{tag}[l={l}]", anchor, consts.reason)]
    rs = consts.partite_rs if partite else consts.rs
    eps = consts.partite_epsilons if partite else consts.epsilons
    fams = _normalize_families(X, families)
    if partite:
        labels = np.full((len(fams), X.num_vertices), l + 1, dtype=np.int64)
        for r, fam in enumerate(fams):
            for i, U in enumerate(fam):
                labels[r, list(U)] = i
        _check_sides(X, labels, l)
    graphs = {k: build_kgraph(X, k) for k in range(-1, l)}
    certs = []
    for k in range(0, min(l, X.n)):
        lead, _ = _aggregate(l, rs, eps, k)
        best: tuple[float, float, list] | None = None
        for fam in fams:
            if len(fam) != l + 1:
                raise ComplexError(f"family {fam} does not have {l + 1} sets")
            if any(not U for U in fam):
                continue
            base = path_conductance(X, -1, fam, graphs[-1])
            value = (k + 1) ** (l - k - 2) * path_conductance(X, k, fam, graphs[k])
            lhs = abs(value - lead * base)
            rhs = sum(
                eps[i]
                * math.prod(rs[j] ** (l - j) for j in range(i + 1, k + 1))
                * math.sqrt(m_tuple(X, fam[: i + 1]) * m_tuple(X, fam[l - i :]))
                for i in range(k + 1)
            )
            if best is None or rhs - lhs < best[1] - best[0]:
                best = (lhs, rhs, [sorted(U) for U in fam])
        name = f"mixing_theorem_{tag}[l={l},k={k}]"
        if best is None:
            certs.append(Certificate.not_applicable(name, anchor, "no family with nonempty sets"))
            continue
        certs.append(
            Certificate.check(name, anchor, best[0], "<=", best[1], slack,
                              {"k": k, "l": l, "families": len(fams), "worst_family": best[2]})
        )
    return certs
