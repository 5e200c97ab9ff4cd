"""Spectra of weighted Laplacians, link profiles, and the spectral-gap theorems.

Eigenvalues are computed from the symmetrized matrix ``W^{1/2} A W^{-1/2}``
with :func:`numpy.linalg.eigh`. An eigenvalue counts as zero when
``|x| <= 1e-8 * max(1, largest eigenvalue)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .certificates import Certificate
from .cochains import OperatorMatrix, coboundary_matrix, laplacian, partite_operators
from .complex_core import ComplexError, Simplex, WeightedComplex, connectivity_report

ZERO_TOL = 1e-8
INCLUSION_TOL = 1e-8


@dataclass
class SpectrumSummary:
    eigenvalues: np.ndarray
    lam: float | None
    kappa: float
    zero_multiplicity: int

    @property
    def nonzero(self) -> np.ndarray:
        return self.eigenvalues[self.zero_multiplicity :]


def _zero_cut(values: np.ndarray) -> float:
    top = float(values[-1]) if values.size else 0.0
    return ZERO_TOL * max(1.0, top)


def summarize_eigenvalues(values: np.ndarray) -> SpectrumSummary:
    values = np.sort(np.asarray(values, dtype=float))
    cut = _zero_cut(values)
    zeros = int(np.sum(np.abs(values) <= cut))
    nonzero = values[np.abs(values) > cut]
    lam = float(nonzero.min()) if nonzero.size else None
    kappa = float(values[-1]) if values.size else 0.0
    # keep the zero block first so `nonzero` slicing is valid
    ordered = np.concatenate([values[np.abs(values) <= cut], np.sort(nonzero)])
    return SpectrumSummary(ordered, lam, kappa, zeros)


def symmetrize(A: OperatorMatrix | np.ndarray) -> np.ndarray:
    S = A.symmetrized() if isinstance(A, OperatorMatrix) else np.asarray(A, dtype=float)
    if S.shape[0] != S.shape[1]:
        raise ValueError("operator is not square")
    scale = max(1.0, float(np.max(np.abs(S)))) if S.size else 1.0
    asym = float(np.max(np.abs(S - S.T))) if S.size else 0.0
    if asym > 1e-9 * scale:
        raise ValueError(f"operator is not self-adjoint (asymmetry {asym:.3e})")
    return 0.5 * (S + S.T)


def eigensystem(A: OperatorMatrix | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors of the symmetrized operator."""
    S = symmetrize(A)
    if S.size == 0:
        return np.zeros(0), np.zeros((0, 0))
    values, vectors = np.linalg.eigh(S)
    resid = float(np.max(np.abs(S @ vectors - vectors * values[None, :])))
    norm = max(1.0, float(np.max(np.abs(values))))
    if resid > 1e-9 * norm:
        raise ArithmeticError(f"eigensolver residual {resid:.3e} too large")
    return values, vectors


def symmetric_spectrum(A: OperatorMatrix | np.ndarray) -> SpectrumSummary:
    values, _ = eigensystem(A)
    return summarize_eigenvalues(values)


def operator_norm(A: OperatorMatrix) -> float:
    """Norm of a self-adjoint operator with respect to its weighted inner product."""
    values, _ = eigensystem(A)
    return float(np.max(np.abs(values))) if values.size else 0.0


def matrix_rank(M: np.ndarray) -> int:
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > 1e-8 * max(1.0, float(s[0]))))


# ----- descent map


def descent_map(x: float) -> float:
    """f(x) = 2 - 1/x."""
    if not x > 0:
        raise ValueError(f"the descent map needs x > 0, got {x}")
    return 2.0 - 1.0 / x


def iterate(x: float, j: int) -> float:
    """f composed j times (j >= 0)."""
    if j < 0:
        raise ValueError("iteration count must be non-negative")
    for _ in range(j):
        x = descent_map(x)
    return x


def _safe_iterate(x: float, j: int) -> float | None:
    try:
        return iterate(x, j)
    except ValueError:
        return None


# ----- links


def link_up_laplacian(X: WeightedComplex, tau: Simplex) -> OperatorMatrix:
    L = X.link(tau)
    if L.n < 1:
        raise ComplexError("the upper Laplacian of a 0-dimensional link is not used")
    return laplacian(L, 0, "up")


def link_spectrum(X: WeightedComplex, tau: Simplex) -> SpectrumSummary:
    return symmetric_spectrum(link_up_laplacian(X, tau))


@dataclass
class ProfileRow:
    k: int
    lam: float | None
    kappa: float
    links: int
    disconnected: list[Simplex] = field(default_factory=list)
    predicted: tuple[float, float] | None = None

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "lambda": self.lam,
            "kappa": self.kappa,
            "links": self.links,
            "disconnected": [list(t) for t in self.disconnected],
            "predicted": list(self.predicted) if self.predicted else None,
        }


def _map_links(X: WeightedComplex, taus: Sequence[Simplex], fn, workers: int) -> list:
    if workers > 1 and len(taus) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, taus))
    return [fn(t) for t in taus]


def link_profile(X: WeightedComplex, k: int, workers: int = 1) -> ProfileRow:
    """Extremes of the nonzero spectra of the link Laplacians over all k-simplices."""
    if k < -1 or k > X.n - 2:
        raise ComplexError(f"link profile needs -1 <= k <= n-2, got {k}")
    taus = X.simplices(k)
    for tau in taus:
        X.link(tau)  # populate the link cache before any threads run
    spectra = _map_links(X, taus, lambda t: link_spectrum(X, t), workers)
    lams = [s.lam for s in spectra if s.lam is not None]
    bad = [t for t, s in zip(taus, spectra) if s.zero_multiplicity != 1]
    return ProfileRow(
        k=k,
        lam=min(lams) if lams else None,
        kappa=max(s.kappa for s in spectra),
        links=len(taus),
        disconnected=bad,
    )


def local_expansion(X: WeightedComplex, workers: int = 1) -> tuple[float | None, float]:
    """(lambda, kappa) over the one-dimensional links, or of X itself when n = 1."""
    row = link_profile(X, X.n - 2, workers)
    return row.lam, row.kappa


def descent_profile(X: WeightedComplex, workers: int = 1) -> list[ProfileRow]:
    """Rows for k = n-2 down to -1 with the predicted intervals filled in."""
    if X.n < 1:
        return []
    rows = [link_profile(X, k, workers) for k in range(X.n - 2, -2, -1)]
    lam, kappa = rows[0].lam, rows[0].kappa
    for row in rows:
        j = X.n - 2 - row.k
        if lam is not None:
            lo, hi = _safe_iterate(lam, j), _safe_iterate(kappa, j)
            if lo is not None and hi is not None:
                row.predicted = (lo, hi)
    return rows


def _hypotheses(X: WeightedComplex, workers: int = 1) -> tuple[bool, str, float | None, float]:
    if X.n < 1:
        return False, "dimension must be at least 1", None, 0.0
    conn = connectivity_report(X)
    if not conn.connected:
        return False, "complex is disconnected", None, 0.0
    if not conn.links_connected:
        return False, "some link of positive dimension is disconnected", None, 0.0
    lam, kappa = local_expansion(X, workers)
    if lam is None:
        return False, "one-dimensional links have no nonzero spectrum", None, kappa
    if not lam > (X.n - 1) / X.n:
        return False, f"lambda = {lam:.6g} does not exceed (n-1)/n", lam, kappa
    return True, "", lam, kappa


def verify_descent(X: WeightedComplex, workers: int = 1) -> list[Certificate]:
    """Descent of link gaps through the levels, plus the universal upper bound."""
    anchor_step = "link spectra at level k lie in [2 - 1/lam, 2 - 1/kappa] of level k+1"
    anchor_chain = "link spectra at level k lie in [f^(n-k-2)(lam), f^(n-k-2)(kappa)]"
    anchor_univ = "link spectra at level k lie in [0, (n-k)/(n-k-1)]"
    if X.n < 2:
        return [Certificate.not_applicable("descent", anchor_chain, "descent needs n > 1")]
    conn = connectivity_report(X)
    if not (conn.connected and conn.links_connected):
        return [Certificate.not_applicable("descent", anchor_chain, "links of positive dimension must be connected")]
    rows = {r.k: r for r in descent_profile(X, workers)}
    certs: list[Certificate] = []
    for k in range(X.n - 2, -2, -1):
        row = rows[k]
        bound = (X.n - k) / (X.n - k - 1)
        certs.append(
            Certificate.check(
                f"link_spectrum_upper_bound[k={k}]", anchor_univ, row.kappa, "<=", bound, INCLUSION_TOL, {"k": k}
            )
        )
    for k in range(X.n - 3, -2, -1):
        prev, row = rows[k + 1], rows[k]
        name = f"descent_step[k={k}]"
        if prev.lam is None or prev.lam <= 0 or row.lam is None:
            certs.append(Certificate.not_applicable(name, anchor_step, "previous level has no positive gap"))
            continue
        lo, hi = descent_map(prev.lam), descent_map(prev.kappa)
        excess = max(lo - row.lam, row.kappa - hi)
        certs.append(
            Certificate.check(
                name, anchor_step, excess, "<=", 0.0, INCLUSION_TOL,
                {"observed": [row.lam, row.kappa], "predicted": [lo, hi]},
            )
        )
    top = rows[X.n - 2]
    applicable = top.lam is not None and top.lam > (X.n - 1) / X.n
    for k in range(X.n - 3, -2, -1):
        row = rows[k]
        name = f"descent_chain[k={k}]"
        if not applicable or row.predicted is None or row.lam is None:
            certs.append(Certificate.not_applicable(name, anchor_chain, "lambda does not exceed (n-1)/n"))
            continue
        lo, hi = row.predicted
        excess = max(lo - row.lam, row.kappa - hi)
        certs.append(
            Certificate.check(
                name, anchor_chain, excess, "<=", 0.0, INCLUSION_TOL,
                {"observed": [row.lam, row.kappa], "predicted": [lo, hi]},
            )
        )
    return certs


def descent_exactness(X: WeightedComplex) -> float:
    """Largest deviation between observed link extremes and iterates of the top level."""
    rows = descent_profile(X)
    worst = 0.0
    for row in rows:
        if row.predicted is None or row.lam is None:
            return math.inf
        worst = max(worst, abs(row.lam - row.predicted[0]), abs(row.kappa - row.predicted[1]))
    return worst


# ----- global gaps


def _kernel_basis(A: OperatorMatrix) -> np.ndarray:
    """Orthonormal (in the symmetrized frame) basis of the kernel."""
    values, vectors = eigensystem(A)
    cut = _zero_cut(values)
    return vectors[:, np.abs(values) <= cut]


def reduced_cohomology_dimension(X: WeightedComplex, k: int) -> int:
    """dim ker d_k - rank d_{k-1}, with d_n = 0 and d_{-1} the augmentation."""
    size = X.count(k)
    rank_dk = matrix_rank(coboundary_matrix(X, k)) if k <= X.n - 1 else 0
    rank_prev = matrix_rank(coboundary_matrix(X, k - 1))
    return size - rank_dk - rank_prev


def _inclusion(name: str, anchor: str, values: np.ndarray, lo: float, hi: float, extra: dict) -> Certificate:
    if values.size == 0:
        return Certificate.check(name, anchor, 0.0, "<=", 0.0, INCLUSION_TOL, dict(extra, empty=True))
    excess = max(lo - float(values.min()), float(values.max()) - hi)
    return Certificate.check(
        name, anchor, excess, "<=", 0.0, INCLUSION_TOL,
        dict(extra, observed=[float(values.min()), float(values.max())], bound=[lo, hi]),
    )


def hodge_suite(X: WeightedComplex) -> list[Certificate]:
    """Kernel and spectrum relations between d, the Laplacians and cohomology."""
    certs: list[Certificate] = []
    for k in range(0, X.n + 1):
        full = laplacian(X, k, "full")
        harmonic = _kernel_basis(full).shape[1]
        certs.append(
            Certificate.check(
                f"harmonic_dimension[k={k}]", "dim ker Delta_k = dim of reduced cohomology in degree k",
                harmonic, "==", reduced_cohomology_dimension(X, k), 0.0, {"k": k},
            )
        )
        if k <= X.n - 1:
            up = laplacian(X, k, "up")
            ker_up = _kernel_basis(up).shape[1]
            nullity_d = X.count(k) - matrix_rank(coboundary_matrix(X, k))
            certs.append(
                Certificate.check(
                    f"kernel_d_equals_kernel_up[k={k}]", "ker d_k = ker Delta+_k", ker_up, "==", nullity_d, 0.0, {"k": k}
                )
            )
        down = laplacian(X, k, "down")
        certs.append(
            Certificate.check(
                f"image_d_equals_image_down[k={k}]", "im d_{k-1} = im Delta-_k",
                matrix_rank(down.matrix), "==", matrix_rank(coboundary_matrix(X, k - 1)), 0.0, {"k": k},
            )
        )
        if k >= 1:
            a = symmetric_spectrum(laplacian(X, k - 1, "up")).nonzero
            b = symmetric_spectrum(down).nonzero
            gap = float(np.max(np.abs(np.sort(a) - np.sort(b)))) if a.size == b.size and a.size else (0.0 if a.size == b.size else math.inf)
            certs.append(
                Certificate.check(
                    f"up_down_nonzero_spectra_agree[k={k}]", "Spec(Delta+_{k-1}) and Spec(Delta-_k) agree away from 0",
                    gap, "<=", 0.0, 1e-8, {"k": k, "sizes": [int(a.size), int(b.size)]},
                )
            )
    if X.n >= 1:
        top = symmetric_spectrum(laplacian(X, 0, "up")).kappa
        certs.append(Certificate.check("degree0_upper_norm_at_most_2", "|Delta+_0| <= 2", top, "<=", 2.0, 1e-9, {}))
        certs.append(Certificate.check("degree0_upper_top_at_least_1", "max Spec(Delta+_0) >= 1", top, ">=", 1.0, 1e-9, {}))
    return certs


def verify_global_gaps(X: WeightedComplex, workers: int = 1) -> list[Certificate]:
    """Vanishing cohomology, Hodge splitting and spectral inclusions from link gaps."""
    anchor = "local gaps lam > (n-1)/n on 1-dim links give global gaps through f"
    certs: list[Certificate] = []
    n = X.n
    conn = connectivity_report(X)
    if n >= 1 and conn.connected and conn.links_connected:
        for k in range(0, n):
            top = symmetric_spectrum(laplacian(X, k, "up")).kappa
            certs.append(
                Certificate.check(
                    f"upper_laplacian_norm[k={k}]", "Spec(Delta+_k) lies in [0, (n+1)/(n-k)]",
                    top, "<=", (n + 1) / (n - k), INCLUSION_TOL, {"k": k},
                )
            )
            top = symmetric_spectrum(laplacian(X, k + 1, "down")).kappa
            certs.append(
                Certificate.check(
                    f"lower_laplacian_norm[k={k + 1}]", "Spec(Delta-_{k+1}) lies in [0, (n+1)/(n-k)]",
                    top, "<=", (n + 1) / (n - k), INCLUSION_TOL, {"k": k + 1},
                )
            )
    ok, reason, lam, kappa = _hypotheses(X, workers)
    if not ok:
        certs.append(Certificate.not_applicable("global_gaps", anchor, reason))
        return certs
    rows = {r.k: r for r in descent_profile(X, workers)}
    for k in range(0, n):
        lo = iterate(lam, n - 1 - k)
        hi = iterate(kappa, n - 1 - k)
        ctx = {"k": k, "link_bounds": [lo, hi]}
        certs.append(
            Certificate.check(
                f"reduced_cohomology_vanishes[k={k}]", "reduced cohomology vanishes in degree k",
                reduced_cohomology_dimension(X, k), "==", 0, 0.0, ctx,
            )
        )
        up = laplacian(X, k, "up")
        down = laplacian(X, k, "down")
        ker_up = _kernel_basis(up)
        ker_down = _kernel_basis(down)
        total = ker_up.shape[1] + ker_down.shape[1]
        certs.append(
            Certificate.check(
                f"hodge_split_dimension[k={k}]", "dim ker Delta+_k + dim ker Delta-_k = dim C^k",
                total, "==", X.count(k), 0.0, ctx,
            )
        )
        overlap = float(np.max(np.abs(ker_up.T @ ker_down))) if ker_up.size and ker_down.size else 0.0
        certs.append(
            Certificate.check(
                f"hodge_split_orthogonal[k={k}]", "ker Delta+_k is orthogonal to ker Delta-_k",
                overlap, "<=", 0.0, 1e-9, ctx,
            )
        )
        a, b = (k + 1) * lo - k, (k + 1) * hi - k
        certs.append(
            _inclusion(f"upper_gap[k={k}]", "Spec(Delta+_k) minus 0 lies in [(k+1)lam_k - k, (k+1)kappa_k - k]",
                       symmetric_spectrum(up).nonzero, a, b, ctx)
        )
        certs.append(
            _inclusion(f"lower_gap[k={k + 1}]", "Spec(Delta-_{k+1}) minus 0 lies in [(k+1)lam_k - k, (k+1)kappa_k - k]",
                       symmetric_spectrum(laplacian(X, k + 1, "down")).nonzero, a, b, ctx)
        )
        if k >= 1:
            a2, b2 = (k + 1) - k / lo, (k + 1) - k / hi
            certs.append(
                _inclusion(f"lower_gap_same_degree[k={k}]", "Spec(Delta-_k) minus 0 lies in [(k+1) - k/lam_k, (k+1) - k/kappa_k]",
                           symmetric_spectrum(down).nonzero, a2, b2, ctx)
            )
            certs.append(
                _inclusion(f"upper_gap_previous_degree[k={k - 1}]", "Spec(Delta+_{k-1}) minus 0 lies in [(k+1) - k/lam_k, (k+1) - k/kappa_k]",
                           symmetric_spectrum(laplacian(X, k - 1, "up")).nonzero, a2, b2, ctx)
            )
        certs.append(_norm_bound_certificate(X, k, lo, hi, f"combined_norm_bound[k={k}]", ctx))
        measured = rows.get(k - 1)
        if measured is not None and measured.lam is not None and measured.lam > k / (k + 1):
            certs.append(
                _norm_bound_certificate(
                    X, k, measured.lam, measured.kappa, f"combined_norm_bound_measured[k={k}]",
                    {"k": k, "link_bounds": [measured.lam, measured.kappa]},
                )
            )
    return certs


def combined_operator(X: WeightedComplex, k: int, lam: float, kappa: float) -> OperatorMatrix:
    """Delta+_k + r Delta-_k - (k+1)(r - k/(k+1)) I with r = (lam + kappa)/2."""
    r = 0.5 * (lam + kappa)
    up = laplacian(X, k, "up")
    down = laplacian(X, k, "down")
    mat = up.matrix + r * down.matrix - (k + 1) * (r - k / (k + 1)) * np.eye(X.count(k))
    return OperatorMatrix(f"combined_{k}", mat, k, k, up.domain_weights, up.domain_weights)


def _norm_bound_certificate(X: WeightedComplex, k: int, lam: float, kappa: float, name: str, ctx: dict) -> Certificate:
    norm = operator_norm(combined_operator(X, k, lam, kappa))
    return Certificate.check(
        name, "|Delta+ + r Delta- - (k+1)(r - k/(k+1)) I| <= (k+1)(kappa - lam)/2",
        norm, "<=", (k + 1) * (kappa - lam) / 2, INCLUSION_TOL, ctx,
    )


# ----- partite complexes


def side_indicator_matrix(X: WeightedComplex) -> np.ndarray:
    """Columns are the indicators of the nonempty sides (vertex order)."""
    if X.partition is None:
        raise ComplexError("complex carries no partition")
    cols = []
    for j in range(X.num_sides):
        col = np.array([1.0 if X.partition[v] == j else 0.0 for v in X.vertices])
        if col.any():
            cols.append(col)
    return np.array(cols).T


def nontrivial_spectrum(X: WeightedComplex) -> np.ndarray:
    """Spectrum of Delta+_0 restricted to forms orthogonal to every side indicator."""
    S = symmetrize(laplacian(X, 0, "up"))
    B = np.sqrt(X.weights(0))[:, None] * side_indicator_matrix(X)
    Q, _ = np.linalg.qr(B)
    P = np.eye(S.shape[0]) - Q @ Q.T
    values = np.linalg.eigvalsh(P @ S @ P)
    dim = S.shape[0] - Q.shape[1]
    return np.sort(values)[len(values) - dim :] if dim > 0 else np.zeros(0)


def partite_link_profile(X: WeightedComplex, k: int, workers: int = 1) -> tuple[float | None, float | None]:
    """Extremes over tau in X(k) of the nontrivial link spectra."""
    taus = X.simplices(k)
    for t in taus:
        X.link(t)
    spectra = _map_links(X, taus, lambda t: nontrivial_spectrum(X.link(t)), workers)
    values = [v for s in spectra for v in s]
    if not values:
        return None, None
    return float(min(values)), float(max(values))


def partite_combined_operator(X: WeightedComplex, k: int, lam: float, kappa: float) -> OperatorMatrix:
    """Delta+ + a/(n-k) Delta- + (k - (k+1) r) I - (a^2/(n-k) - a r) sum_j Delta-_(k,j).

    Here a = n+1-k and r = (lam + kappa)/2. Each a Delta-_(0,j) on a link is an
    orthogonal projection, which fixes the coefficient a r in the side sum.
    """
    n = X.n
    r = 0.5 * (lam + kappa)
    a = n + 1 - k
    up = laplacian(X, k, "up").matrix
    down = laplacian(X, k, "down").matrix
    sides = sum(partite_operators(X, k, j)["down"].matrix for j in range(X.num_sides))
    mat = up + a / (n - k) * down + (k - (k + 1) * r) * np.eye(X.count(k)) - (a * a / (n - k) - a * r) * sides
    w = X.weights(k)
    return OperatorMatrix(f"partite_combined_{k}", mat, k, k, w, w)


def partite_spectral_suite(X: WeightedComplex, workers: int = 1) -> list[Certificate]:
    """Trivial eigenfunctions, the side projector and the partite norm bounds."""
    if X.partition is None:
        raise ComplexError("complex carries no partition")
    n = X.n
    certs: list[Certificate] = []
    if n < 1:
        return [Certificate.not_applicable("partite_spectral", "partite spectral theory", "dimension 0")]
    trivial = (n + 1) / n
    up = laplacian(X, 0, "up")
    values, vectors = eigensystem(up)
    # (a) phi_i = n on S_i, -1 elsewhere is an eigenfunction with eigenvalue (n+1)/n
    worst = 0.0
    phis = []
    for i in range(n + 1):
        phi = np.array([float(n) if X.partition[v] == i else -1.0 for v in X.vertices])
        phis.append(phi)
        worst = max(worst, float(np.max(np.abs(up.matrix @ phi - trivial * phi))))
    certs.append(
        Certificate.check("side_eigenfunctions", "Delta+_0 phi_i = (n+1)/n phi_i", worst, "<=", 0.0, 1e-9, {})
    )
    # (b) the eigenspace of (n+1)/n is spanned by the phi_i
    mult = int(np.sum(np.abs(values - trivial) <= 1e-8 * max(1.0, trivial)))
    rank = matrix_rank(np.array(phis).T)
    certs.append(
        Certificate.check(
            "trivial_eigenspace_dimension", "eigenspace of (n+1)/n equals span of phi_i",
            mult, "==", rank, 0.0, {"rank_phi": rank, "multiplicity": mult},
        )
    )
    # (c) I - (n+1) sum_j Delta-_(0,j) is the orthogonal projection onto the nontrivial space
    sides = sum(partite_operators(X, 0, j)["down"].matrix for j in range(n + 1))
    Q = np.eye(X.count(0)) - (n + 1) * sides
    w = X.weights(0)
    half = np.sqrt(w)
    Qs = half[:, None] * Q / half[None, :]
    chi = side_indicator_matrix(X)
    defect = max(
        float(np.max(np.abs(Qs @ Qs - Qs))),
        float(np.max(np.abs(Qs - Qs.T))),
        float(np.max(np.abs(Q @ chi))),
    )
    certs.append(
        Certificate.check(
            "nontrivial_projection", "projection onto the nontrivial space is phi - (n+1) sum_j Delta-_(0,j) phi",
            defect, "<=", 0.0, 1e-9, {"rank": matrix_rank(Qs), "expected_rank": X.count(0) - chi.shape[1]},
        )
    )
    certs.append(
        Certificate.check(
            "nontrivial_projection_rank", "rank of the nontrivial projection is |V| - (n+1)",
            matrix_rank(Qs), "==", X.count(0) - chi.shape[1], 0.0, {},
        )
    )
    # (d) 1 + (1 - lam)/n <= kappa <= 1 + n (1 - lam)
    summary = summarize_eigenvalues(values)
    below = summary.nonzero[summary.nonzero < trivial - 1e-8]
    name = "partite_spectrum_symmetry"
    anchor = "1 + (1 - lam(X))/n <= kappa(X) <= 1 + n (1 - lam(X))"
    if len(X.facets) <= 1 or below.size == 0 or summary.lam is None:
        certs.append(Certificate.not_applicable(name, anchor, "no nontrivial spectrum"))
    else:
        lam, kappa = summary.lam, float(below.max())
        lo, hi = 1 + (1 - lam) / n, 1 + n * (1 - lam)
        excess = max(lo - kappa, kappa - hi)
        certs.append(
            Certificate.check(name, anchor, excess, "<=", 0.0, INCLUSION_TOL, {"lambda": lam, "kappa": kappa, "bounds": [lo, hi]})
        )
    # (e) norm bounds for 0 <= k <= n-1, from measured nontrivial link spectra
    conn = connectivity_report(X)
    for k in range(0, n):
        name = f"partite_norm_bound[k={k}]"
        anchor = "partite combined operator norm <= (k+1)(kappa - lam)/2"
        if not (conn.connected and conn.links_connected):
            certs.append(Certificate.not_applicable(name, anchor, "links must be connected"))
            continue
        lam_k, kappa_k = partite_link_profile(X, k - 1, workers)
        if lam_k is None:
            certs.append(Certificate.not_applicable(name, anchor, "links have no nontrivial spectrum"))
            continue
        norm = operator_norm(partite_combined_operator(X, k, lam_k, kappa_k))
        certs.append(
            Certificate.check(name, anchor, norm, "<=", (k + 1) * (kappa_k - lam_k) / 2, INCLUSION_TOL,
                              {"k": k, "link_bounds": [lam_k, kappa_k]})
        )
        # corollary form: only the smallest positive link eigenvalue is used
        name = f"partite_norm_bound_lambda_only[k={k}]"
        anchor = "partite combined operator norm <= (k+1)(n+1-k)(1-lam)/2"
        lam_pos = _min_positive_link_eigenvalue(X, k - 1)
        if lam_pos is None or not lam_pos > k / (k + 1):
            certs.append(Certificate.not_applicable(name, anchor, "lambda does not exceed k/(k+1)"))
            continue
        kappa_upper = 1 + (n - k) * (1 - lam_pos)
        norm = operator_norm(partite_combined_operator(X, k, lam_pos, kappa_upper))
        certs.append(
            Certificate.check(name, anchor, norm, "<=", (k + 1) * (n + 1 - k) * (1 - lam_pos) / 2, INCLUSION_TOL,
                              {"k": k, "lambda": lam_pos})
        )
    return certs


def _min_positive_link_eigenvalue(X: WeightedComplex, k: int) -> float | None:
    lams = [link_spectrum(X, t).lam for t in X.simplices(k)]
    lams = [x for x in lams if x is not None]
    return min(lams) if lams else None
