"""Cochains, the weighted inner product, and the operators d, delta and Laplacians.

A ``k``-cochain stores one value per canonical (sorted) ``k``-simplex. Its
value on an ordered simplex is the stored value times the sign of the sorting
permutation. In the canonical basis the inner product is
``<phi, psi> = sum_tau m(tau) phi(tau) psi(tau)``, so the metric is the
diagonal matrix of weights.

Sign convention: ``d phi(v0, v1) = phi(v1) - phi(v0)``; more generally
``d phi(s_0..s_{k+1}) = sum_i (-1)^i phi(s_0..^s_i..s_{k+1})``. The degree -1
space is spanned by the empty simplex and ``d_{-1} phi(v) = phi(())``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .certificates import Certificate, relative_gap
from .complex_core import ComplexError, Simplex, WeightedComplex, canonical, enumerate_ordered


@dataclass(eq=False)
class Cochain:
    complex: WeightedComplex
    k: int
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        expected = self.complex.count(self.k)
        if self.values.shape != (expected,):
            raise ValueError(f"expected {expected} values for degree {self.k}, got {self.values.shape}")

    def __call__(self, ordered: Sequence[int]) -> float:
        """Evaluate on an ordered simplex (antisymmetric extension)."""
        s, sign = canonical(ordered)
        if len(s) != self.k + 1:
            raise ComplexError(f"degree {self.k} cochain evaluated on {tuple(ordered)}")
        return sign * float(self.values[self.complex.index(s)])

    def _same(self, other: "Cochain") -> None:
        if other.complex is not self.complex or other.k != self.k:
            raise ValueError("cochains live on different spaces")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._same(other)
        return Cochain(self.complex, self.k, self.values + other.values)

    def __sub__(self, other: "Cochain") -> "Cochain":
        self._same(other)
        return Cochain(self.complex, self.k, self.values - other.values)

    def __mul__(self, scalar: float) -> "Cochain":
        return Cochain(self.complex, self.k, self.values * float(scalar))

    __rmul__ = __mul__

    def norm2(self) -> float:
        return inner_product(self, self)


def zero_cochain(X: WeightedComplex, k: int) -> Cochain:
    return Cochain(X, k, np.zeros(X.count(k)))


def cochain_from_function(X: WeightedComplex, k: int, fn: Callable[[Simplex], float]) -> Cochain:
    """Cochain whose value on each canonical simplex is ``fn(simplex)``."""
    return Cochain(X, k, np.array([fn(s) for s in X.simplices(k)], dtype=float))


def random_cochain(X: WeightedComplex, k: int, rng: np.random.Generator) -> Cochain:
    return Cochain(X, k, rng.standard_normal(X.count(k)))


def inner_product(phi: Cochain, psi: Cochain) -> float:
    if phi.k != psi.k:
        raise ValueError(f"degree mismatch: {phi.k} vs {psi.k}")
    if phi.complex is not psi.complex:
        raise ValueError("cochains live on different complexes")
    return float(np.dot(phi.complex.weights(phi.k) * phi.values, psi.values))


# ----- operator matrices


@dataclass(eq=False)
class OperatorMatrix:
    """Dense matrix of an operator in canonical bases.

    ``domain_weights`` and ``codomain_weights`` are the diagonal metrics of the
    source and target cochain spaces.
    """

    name: str
    matrix: np.ndarray
    domain_degree: int
    codomain_degree: int
    domain_weights: np.ndarray
    codomain_weights: np.ndarray

    def __matmul__(self, other):
        if isinstance(other, Cochain):
            if other.k != self.domain_degree:
                raise ValueError(f"{self.name} acts on degree {self.domain_degree}, got {other.k}")
            return Cochain(other.complex, self.codomain_degree, self.matrix @ other.values)
        return self.matrix @ other

    def symmetrized(self) -> np.ndarray:
        """W_out^{1/2} A W_in^{-1/2}: the matrix in orthonormal bases."""
        left = np.sqrt(self.codomain_weights)[:, None]
        right = 1.0 / np.sqrt(self.domain_weights)[None, :]
        return left * self.matrix * right

    def adjoint(self) -> "OperatorMatrix":
        mat = (self.matrix.T * self.codomain_weights[None, :]) / self.domain_weights[:, None]
        return OperatorMatrix(
            f"adjoint({self.name})",
            mat,
            self.codomain_degree,
            self.domain_degree,
            self.codomain_weights,
            self.domain_weights,
        )

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def coboundary_matrix(X: WeightedComplex, k: int, side: int | None = None) -> np.ndarray:
    """Matrix of ``d_k: C^k -> C^{k+1}`` (optionally only faces opposite side ``side``)."""
    if k < -1 or k > X.n - 1:
        raise ComplexError(f"d_k needs -1 <= k <= n-1, got k={k}")
    rows = X.simplices(k + 1)
    D = np.zeros((len(rows), X.count(k)))
    part = X.partition
    if side is not None and part is None:
        raise ComplexError("complex carries no partition")
    for r, s in enumerate(rows):
        for i in range(len(s)):
            if side is not None and part[s[i]] != side:
                continue
            D[r, X.index(s[:i] + s[i + 1 :])] += -1.0 if i % 2 else 1.0
    return D


def coboundary(X: WeightedComplex, k: int, side: int | None = None) -> OperatorMatrix:
    name = f"d_{k}" if side is None else f"d_({k},{side})"
    return OperatorMatrix(name, coboundary_matrix(X, k, side), k, k + 1, X.weights(k), X.weights(k + 1))


def codifferential(X: WeightedComplex, k: int, side: int | None = None) -> OperatorMatrix:
    """Matrix of ``delta_k: C^{k+1} -> C^k``, the weighted adjoint of ``d_k``."""
    D = coboundary_matrix(X, k, side)
    mat = (D.T * X.weights(k + 1)[None, :]) / X.weights(k)[:, None]
    name = f"delta_{k}" if side is None else f"delta_({k},{side})"
    return OperatorMatrix(name, mat, k + 1, k, X.weights(k + 1), X.weights(k))


def d(phi: Cochain) -> Cochain:
    """Coboundary of a cochain, evaluated by the alternating face sum."""
    X, k = phi.complex, phi.k
    if k > X.n - 1:
        raise ComplexError(f"d is not defined on top degree {k}")
    out = np.zeros(X.count(k + 1))
    for r, s in enumerate(X.simplices(k + 1)):
        total = 0.0
        for i in range(len(s)):
            value = phi.values[X.index(s[:i] + s[i + 1 :])]
            total += -value if i % 2 else value
        out[r] = total
    return Cochain(X, k + 1, out)


def delta(phi: Cochain) -> Cochain:
    """delta phi(tau) = sum over v with v.tau a simplex of m(v tau)/m(tau) phi(v, tau)."""
    X, k = phi.complex, phi.k
    if k < 0:
        raise ComplexError("delta is not defined on degree -1")
    out = np.zeros(X.count(k - 1))
    for r, tau in enumerate(X.simplices(k - 1)):
        m_tau = X.weight(tau)
        total = 0.0
        for v in X.cofaces(tau):
            total += X.weight(tau + (v,)) / m_tau * phi((v,) + tau)
        out[r] = total
    return Cochain(X, k - 1, out)


def delta_via_adjoint(phi: Cochain) -> Cochain:
    return codifferential(phi.complex, phi.k - 1) @ phi


def laplacian(X: WeightedComplex, k: int, kind: str = "full") -> OperatorMatrix:
    """Upper (delta d), lower (d delta) or full Laplacian on ``C^k``."""
    if k < 0 or k > X.n:
        raise ComplexError(f"Laplacian degree must lie in 0..{X.n}")
    w = X.weights(k)
    size = X.count(k)
    up = np.zeros((size, size))
    down = np.zeros((size, size))
    if kind in ("up", "full"):
        if k <= X.n - 1:
            up = codifferential(X, k).matrix @ coboundary_matrix(X, k)
        elif kind == "up":
            raise ComplexError("the upper Laplacian needs k <= n-1")
    if kind in ("down", "full"):
        down = coboundary_matrix(X, k - 1) @ codifferential(X, k - 1).matrix
    if kind == "up":
        mat = up
    elif kind == "down":
        mat = down
    elif kind == "full":
        mat = up + down
    else:
        raise ValueError(f"unknown Laplacian kind {kind!r}")
    names = {"up": "Delta+", "down": "Delta-", "full": "Delta"}
    return OperatorMatrix(f"{names[kind]}_{k}", mat, k, k, w, w)


# ----- localization and restriction


def localization_matrix(X: WeightedComplex, tau: Sequence[int], k: int) -> tuple[WeightedComplex, np.ndarray]:
    """The link of ``tau`` and the matrix of phi -> phi_tau from C^k(X).

    ``phi_tau(sigma) = phi(tau sigma)`` with ``tau`` ordered; the result has
    degree ``k - dim(tau) - 1`` on the link.
    """
    tau = tuple(tau)
    j = len(tau) - 1
    if not (j <= k <= X.n):
        raise ComplexError(f"localization needs dim(tau) <= k <= n, got {j}, {k}")
    if len(tau) and not X.contains(tau):
        raise ComplexError(f"{tau} is not a simplex of the complex")
    if k == X.n and j == X.n:
        raise ComplexError("cannot localize at a top simplex")
    L = X.link(tau)
    deg = k - j - 1
    rows = L.simplices(deg)
    M = np.zeros((len(rows), X.count(k)))
    for r, s in enumerate(rows):
        c, sign = canonical(tau + L.to_parent(s) if L is not X else s)
        M[r, X.index(c)] = sign
    return L, M


def localize(phi: Cochain, tau: Sequence[int]) -> Cochain:
    L, M = localization_matrix(phi.complex, tau, phi.k)
    return Cochain(L, phi.k - len(tuple(tau)), M @ phi.values)


def restriction_matrix(X: WeightedComplex, tau: Iterable[int], k: int) -> tuple[WeightedComplex, np.ndarray]:
    """The link of ``tau`` and the matrix of phi -> phi restricted to that link."""
    t = tuple(sorted(tau))
    if k + len(t) > X.n:
        raise ComplexError(f"restriction needs k + dim(tau) + 1 <= n, got k={k}, dim={len(t) - 1}")
    L = X.link(t)
    rows = L.simplices(k)
    M = np.zeros((len(rows), X.count(k)))
    for r, s in enumerate(rows):
        M[r, X.index(L.to_parent(s) if L is not X else s)] = 1.0
    return L, M


def restrict(phi: Cochain, tau: Iterable[int]) -> Cochain:
    L, M = restriction_matrix(phi.complex, tau, phi.k)
    return Cochain(L, phi.k, M @ phi.values)


# ----- partite operators


def partite_operators(X: WeightedComplex, k: int, j: int) -> dict[str, OperatorMatrix]:
    """d_(k,j), delta_(k,j) and the side lower Laplacian Delta-_(k,j).

    ``d_(k,j)`` keeps only the face terms whose removed vertex lies in side
    ``S_j``; ``delta_(k,j)`` is its weighted adjoint and
    ``Delta-_(k,j) = d_(k-1,j) delta_(k-1,j)`` on ``C^k``.
    """
    if X.partition is None:
        raise ComplexError("complex carries no partition")
    out: dict[str, OperatorMatrix] = {}
    if k <= X.n - 1:
        out["d"] = coboundary(X, k, side=j)
        out["delta"] = codifferential(X, k, side=j)
    lo = coboundary_matrix(X, k - 1, side=j) @ codifferential(X, k - 1, side=j).matrix
    w = X.weights(k)
    out["down"] = OperatorMatrix(f"Delta-_({k},{j})", lo, k, k, w, w)
    return out


def side_average_explicit(X: WeightedComplex, phi: Cochain, j: int) -> Cochain:
    """Delta-_(0,j) phi(v) = [v in S_j] sum_{u in S_j} m(u) phi(u) / m(())."""
    if X.partition is None:
        raise ComplexError("complex carries no partition")
    side = X.side(j)
    avg = sum(X.weight((u,)) * phi.values[X.index((u,))] for u in side) / X.weight(())
    vals = np.array([avg if X.partition[s[0]] == j else 0.0 for s in X.simplices(0)])
    return Cochain(X, 0, vals)


# ----- identity suite


def _ip_rows(weights: np.ndarray, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Column-wise weighted inner products of two batches of cochains."""
    return np.einsum("i,it,it->t", weights, A, B)


def _worst(lhs: np.ndarray, rhs: np.ndarray) -> tuple[float, int]:
    gaps = [relative_gap(a, b) for a, b in zip(lhs, rhs)]
    i = int(np.argmax(gaps)) if gaps else 0
    return (float(gaps[i]) if gaps else 0.0), i


def _cert(name: str, anchor: str, lhs: np.ndarray, rhs: np.ndarray, tol: float, extra: dict) -> Certificate:
    err, i = _worst(lhs, rhs)
    witness = dict(extra)
    if len(lhs):
        witness.update({"trial": i, "lhs": float(lhs[i]), "rhs": float(rhs[i])})
    return Certificate.check(name, anchor, err, "<=", 0.0, tol, witness)


def operator_algebra_suite(X: WeightedComplex, trials: int = 64, seed: int = 0) -> list[Certificate]:
    """d d = 0, adjointness of d and delta, and agreement of the two delta formulas."""
    rng = np.random.default_rng(seed)
    certs: list[Certificate] = []
    for k in range(-1, X.n - 1):
        Dk = coboundary_matrix(X, k)
        Dk1 = coboundary_matrix(X, k + 1)
        phis = rng.standard_normal((X.count(k), trials))
        worst = float(np.max(np.abs(Dk1 @ (Dk @ phis)))) if phis.size else 0.0
        exact = float(np.max(np.abs(Dk1 @ Dk))) if Dk.size and Dk1.size else 0.0
        certs.append(
            Certificate.check(
                f"dd_zero[k={k}]", "d_{k+1} d_k = 0", max(worst, exact), "<=", 0.0, 1e-14, {"matrix_max": exact}
            )
        )
    for k in range(-1, X.n):
        D = coboundary_matrix(X, k)
        Dt = codifferential(X, k).matrix
        psi = rng.standard_normal((X.count(k), trials))
        phi = rng.standard_normal((X.count(k + 1), trials))
        lhs = _ip_rows(X.weights(k + 1), D @ psi, phi)
        rhs = _ip_rows(X.weights(k), psi, Dt @ phi)
        certs.append(_cert(f"adjoint_d_delta[k={k}]", "<d psi, phi> = <psi, delta phi>", lhs, rhs, 1e-10, {"k": k}))
    for k in range(0, X.n + 1):
        phi = Cochain(X, k, rng.standard_normal(X.count(k)))
        a = delta(phi).values
        b = delta_via_adjoint(phi).values
        err = float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(a))))) if a.size else 0.0
        certs.append(
            Certificate.check(
                f"delta_formula_matches_adjoint[k={k}]",
                "delta phi(tau) = sum_v m(v tau)/m(tau) phi(v tau) equals the weighted adjoint of d",
                err,
                "<=",
                0.0,
                1e-12,
                {"k": k},
            )
        )
    return certs


def _localization_terms(X: WeightedComplex, k: int, j: int) -> list[tuple[WeightedComplex, np.ndarray]]:
    """(link, localization matrix) for every ordered j-simplex, degree k."""
    return [localization_matrix(X, tau, k) for tau in enumerate_ordered(X, j)]


def identity_suite(X: WeightedComplex, trials: int = 64, seed: int = 0, tol: float = 1e-9) -> list[Certificate]:
    """Localization and restriction norm identities on random cochains."""
    rng = np.random.default_rng(seed)
    certs: list[Certificate] = []
    n = X.n
    for k in range(0, n + 1):
        phi = rng.standard_normal((X.count(k), trials))
        psi = rng.standard_normal((X.count(k), trials))
        w = X.weights(k)
        terms = _localization_terms(X, k, k - 1)
        # (k+1)! <phi, psi> = sum_tau <phi_tau, psi_tau>
        lhs = math.factorial(k + 1) * _ip_rows(w, phi, psi)
        rhs = sum(_ip_rows(L.weights(0), M @ phi, M @ psi) for L, M in terms)
        certs.append(_cert(f"localized_inner_product[k={k}]", "(k+1)! <phi,psi> = sum_tau <phi_tau, psi_tau>", lhs, rhs, tol, {"k": k}))
        # k! <delta phi, delta psi> = sum_tau <delta_tau phi_tau, delta_tau psi_tau>
        Dt = codifferential(X, k - 1).matrix
        lhs = math.factorial(k) * _ip_rows(X.weights(k - 1), Dt @ phi, Dt @ psi)
        rhs = np.zeros(trials)
        for L, M in terms:
            Lt = codifferential(L, -1).matrix
            rhs = rhs + _ip_rows(L.weights(-1), Lt @ (M @ phi), Lt @ (M @ psi))
        certs.append(
            _cert(
                f"localized_codifferential[k={k}]",
                "k! <delta phi, delta psi> = sum_tau <delta_tau phi_tau, delta_tau psi_tau>",
                lhs,
                rhs,
                tol,
                {"k": k},
            )
        )
        if k <= n - 1:
            D = coboundary_matrix(X, k)
            dd = _ip_rows(X.weights(k + 1), D @ phi, D @ psi)
            loc_d = np.zeros(trials)
            loc_ip = np.zeros(trials)
            loc_dd_self = np.zeros(trials)
            for L, M in terms:
                DL = coboundary_matrix(L, 0)
                a, b = M @ phi, M @ psi
                loc_d = loc_d + _ip_rows(L.weights(1), DL @ a, DL @ b)
                loc_ip = loc_ip + _ip_rows(L.weights(0), a, b)
                loc_dd_self = loc_dd_self + _ip_rows(L.weights(1), DL @ a, DL @ a)
            lhs = math.factorial(k) * dd
            rhs = loc_d - k / (k + 1) * loc_ip
            certs.append(
                _cert(
                    f"localized_coboundary[k={k}]",
                    "k! <d phi, d psi> = sum_tau (<d_tau phi_tau, d_tau psi_tau> - k/(k+1) <phi_tau, psi_tau>)",
                    lhs,
                    rhs,
                    tol,
                    {"k": k},
                )
            )
            lhs = math.factorial(k) * (_ip_rows(X.weights(k + 1), D @ phi, D @ phi) + k * _ip_rows(w, phi, phi))
            certs.append(
                _cert(
                    f"localized_coboundary_norm[k={k}]",
                    "k! |d phi|^2 + k! k |phi|^2 = sum_tau |d_tau phi_tau|^2",
                    lhs,
                    loc_dd_self,
                    tol,
                    {"k": k},
                )
            )
    # restriction identities
    for k in range(0, n + 1):
        for l in range(0, n - k):
            phi = rng.standard_normal((X.count(k), trials))
            psi = rng.standard_normal((X.count(k), trials))
            lhs = _ip_rows(X.weights(k), phi, psi)
            rhs = np.zeros(trials)
            for tau in enumerate_ordered(X, l):
                L, M = restriction_matrix(X, tau, k)
                rhs = rhs + _ip_rows(L.weights(k), M @ phi, M @ psi)
            certs.append(
                _cert(f"restricted_inner_product[k={k},l={l}]", "<phi,psi> = sum_{tau in ordered l-simplices} <phi^tau, psi^tau>", lhs, rhs, tol, {"k": k, "l": l})
            )
    for l in range(0, n - 1):
        phi = rng.standard_normal((X.count(0), trials))
        psi = rng.standard_normal((X.count(0), trials))
        D = coboundary_matrix(X, 0)
        lhs = _ip_rows(X.weights(1), D @ phi, D @ psi)
        rhs = np.zeros(trials)
        for tau in enumerate_ordered(X, l):
            L, M = restriction_matrix(X, tau, 0)
            DL = coboundary_matrix(L, 0)
            rhs = rhs + _ip_rows(L.weights(1), DL @ (M @ phi), DL @ (M @ psi))
        certs.append(
            _cert(f"restricted_coboundary[l={l}]", "<d phi, d psi> = sum_tau <d_tau phi^tau, d_tau psi^tau> for 0-forms", lhs, rhs, tol, {"l": l})
        )
    # <Delta0- phi, phi> = |delta_{-1} phi|^2 = |Delta0- phi|^2
    phi = rng.standard_normal((X.count(0), trials))
    low = laplacian(X, 0, "down").matrix
    Dt = codifferential(X, -1).matrix
    a = _ip_rows(X.weights(0), low @ phi, phi)
    b = _ip_rows(X.weights(-1), Dt @ phi, Dt @ phi)
    c = _ip_rows(X.weights(0), low @ phi, low @ phi)
    certs.append(_cert("lower_laplacian_degree0_quadratic_form", "<Delta0- phi, phi> = |delta_{-1} phi|^2", a, b, tol, {}))
    certs.append(_cert("lower_laplacian_degree0_projection", "|delta_{-1} phi|^2 = |Delta0- phi|^2", b, c, tol, {}))
    # localization of the Laplacians
    for k in range(0, n + 1):
        phi = rng.standard_normal((X.count(k), trials))
        terms = _localization_terms(X, k, k - 1)
        low = laplacian(X, k, "down").matrix
        lhs = math.factorial(k) * _ip_rows(X.weights(k), low @ phi, phi)
        rhs = np.zeros(trials)
        for L, M in terms:
            a = M @ phi
            rhs = rhs + _ip_rows(L.weights(0), laplacian(L, 0, "down").matrix @ a, a)
        certs.append(_cert(f"localized_lower_laplacian[k={k}]", "k! <Delta-_k phi, phi> = sum_tau <Delta-_{tau,0} phi_tau, phi_tau>", lhs, rhs, tol, {"k": k}))
        if X.partition is not None:
            for j in range(X.num_sides):
                low_j = partite_operators(X, k, j)["down"].matrix
                lhs = math.factorial(k) * _ip_rows(X.weights(k), low_j @ phi, phi)
                rhs = np.zeros(trials)
                for L, M in terms:
                    a = M @ phi
                    rhs = rhs + _ip_rows(L.weights(0), partite_operators(L, 0, j)["down"].matrix @ a, a)
                certs.append(
                    _cert(
                        f"localized_side_lower_laplacian[k={k},j={j}]",
                        "k! <Delta-_(k,j) phi, phi> = sum_tau <Delta-_{tau,(0,j)} phi_tau, phi_tau>",
                        lhs,
                        rhs,
                        tol,
                        {"k": k, "side": j},
                    )
                )
    return certs
