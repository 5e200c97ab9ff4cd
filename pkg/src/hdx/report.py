"""Full verification report: every suite on one complex, assembled in a fixed order."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from .certificates import Certificate, summarize
from .cheeger import verify_cheeger
from .cochains import identity_suite, operator_algebra_suite
from .complex_core import (
    ComplexError,
    WeightedComplex,
    connectivity_report,
    homogeneous_weight_check,
    weight_formula_check,
    weight_recursion_check,
)
from .generators import complete_multipartite, complete_skeleton, flag_random
from .mixing import (
    mixing_constants,
    operator_product_identities,
    random_families,
    verify_mixing,
    verify_mixing_theorem,
)
from .overlap import Embedding, heavy_vertex_check, overlap_bruteforce, overlap_threshold, partite_overlap_threshold
from .spectra import hodge_suite, local_expansion, partite_spectral_suite, verify_descent, verify_global_gaps
from .walks import default_families, walk_identity_suite

SCHEMA = 1
STAGES = (
    "connectivity",
    "weights",
    "identities",
    "descent",
    "gaps",
    "partite",
    "walks",
    "cheeger",
    "mixing",
    "overlap",
)

__all__ = ["SCHEMA", "STAGES", "GeneratorSpec", "ReportOptions", "run_full_report", "report_json", "load_source"]


@dataclass(frozen=True)
class GeneratorSpec:
    """A reproducible recipe for a complex: a generator with parameters, or a file."""

    kind: str
    params: tuple = ()

    @classmethod
    def parse(cls, text: str) -> "GeneratorSpec":
        """``complete:N:n``, ``multipartite:a,b,c``, ``flag:N:p:n:seed`` or a file path."""
        head, _, rest = text.partition(":")
        try:
            if head == "complete":
                N, n = rest.split(":")
                return cls("complete_skeleton", (int(N), int(n)))
            if head == "multipartite":
                return cls("complete_multipartite", tuple(int(s) for s in rest.split(",")))
            if head == "flag":
                N, p, n, seed = rest.split(":")
                return cls("flag_random", (int(N), float(p), int(n), int(seed)))
        except ValueError:
            raise ComplexError(f"malformed generator spec {text!r}") from None
        return cls("file", (text,))

    def build(self) -> WeightedComplex:
        if self.kind == "complete_skeleton":
            return complete_skeleton(*self.params)
        if self.kind == "complete_multipartite":
            return complete_multipartite(self.params)
        if self.kind == "flag_random":
            return flag_random(*self.params)
        if self.kind == "file":
            from .formats import read_complex

            return read_complex(self.params[0])
        raise ComplexError(f"unknown generator kind {self.kind!r}")

    def describe(self) -> dict:
        return {"kind": self.kind, "params": list(self.params)}


def load_source(source: str | GeneratorSpec | WeightedComplex) -> tuple[WeightedComplex, dict]:
    if isinstance(source, WeightedComplex):
        return source, {"kind": "complex"}
    spec = source if isinstance(source, GeneratorSpec) else GeneratorSpec.parse(source)
    return spec.build(), spec.describe()


@dataclass
class ReportOptions:
    seed: int = 0
    trials: int = 64
    only: tuple[str, ...] | None = None
    cheeger_samples: int | None = None
    budget: int | None = None
    mixing_families: int = 64
    embedding: Embedding | None = None
    grid: int | None = None
    omega: float | None = None
    c: float | None = None
    workers: int = 1
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "only": list(self.only) if self.only else None,
            "cheeger_samples": self.cheeger_samples,
            "budget": self.budget,
            "mixing_families": self.mixing_families,
            "embedding": self.embedding is not None,
            "grid": self.grid,
            "omega": self.omega,
            "c": self.c,
        }


def _stage_connectivity(X: WeightedComplex, opt: ReportOptions) -> list[Certificate]:
    rep = connectivity_report(X)
    anchor = "X and every link of positive dimension are connected"
    witness = {"disconnected_links": [list(t) for t in rep.disconnected_links]}
    return [
        Certificate.check("connected", anchor, float(rep.connected), "==", 1.0, 0.0, witness),
        Certificate.check("links_connected", anchor, float(rep.links_connected), "==", 1.0, 0.0, witness),
        Certificate.check(
            "gallery_connected", "n-simplices joined through shared (n-1)-faces",
            float(rep.gallery_connected), "==", 1.0, 0.0, {},
        ),
    ]


def _stage_weights(X: WeightedComplex, opt: ReportOptions) -> list[Certificate]:
    certs = [weight_recursion_check(X)]
    certs.extend(weight_formula_check(X, l) for l in range(-1, X.n + 1))
    certs.append(homogeneous_weight_check(X))
    return certs


def _stage_identities(X: WeightedComplex, opt: ReportOptions) -> list[Certificate]:
    return operator_algebra_suite(X, opt.trials, opt.seed) + identity_suite(X, opt.trials, opt.seed)


def _stage_descent(X: WeightedComplex, opt: ReportOptions) -> list[Certificate]:
    return verify_descent(X)


def _stage_gaps(X: WeightedComplex, opt: ReportOptions) -> list[Certificate]:
    return verify_global_gaps(X) + hodge_suite(X)


def _stage_partite(X: WeightedComplex, opt: ReportOptions) -> list[Certificate]:
    if not X.is_partite:
        return []
    return partite_spectral_suite(X)


def _stage_walks(X: WeightedComplex, opt: ReportOptions) -> list[Certificate]:
    return walk_identity_suite(X, default_families(X, seed=opt.seed))


def _stage_cheeger(X: WeightedComplex, opt: ReportOptions) -> list[Certificate]:
    certs, _ = verify_cheeger(X, samples=opt.cheeger_samples, seed=opt.seed, budget=opt.budget)
    return certs


def _stage_mixing(X: WeightedComplex, opt: ReportOptions) -> list[Certificate]:
    certs: list[Certificate] = []
    for l in range(1, X.n + 1):
        fams = random_families(X, l, opt.mixing_families, seed=opt.seed + l)
        for k in range(0, min(l, X.n)):
            for fam in fams[:3]:
                certs.extend(operator_product_identities(X, k, l, fam))
        certs.extend(verify_mixing(X, l, fams))
        certs.extend(verify_mixing_theorem(X, l, fams))
        if X.is_partite and l <= X.num_sides - 1:
            side_fams = random_families(X, l, opt.mixing_families, seed=opt.seed + l, sides=True)
            certs.extend(verify_mixing(X, l, side_fams, partite=True))
    return certs


def _stage_overlap(X: WeightedComplex, opt: ReportOptions) -> list[Certificate]:
    if opt.embedding is None:
        return []
    result = overlap_bruteforce(X, opt.embedding, grid=opt.grid if opt.grid or X.n <= 2 else 16)
    anchor = "some point lies in the images of a weighted fraction of the n-simplices"
    certs = [
        Certificate.check(
            "overlap_measured", anchor, result.ratio, ">=", 0.0, 0.0, result.to_dict()
        )
    ]
    if opt.omega is not None:
        certs.extend(heavy_vertex_check(X, opt.embedding, opt.omega))
    if opt.omega is not None and opt.c is not None:
        lam, kappa = local_expansion(X)
        name = "overlap_threshold"
        thr_anchor = "overlap >= min{omega/(2(n+1)^2), A n! c/2 ((c/(2(n+1)))^n - E/A)}"
        if lam is None:
            certs.append(Certificate.not_applicable(name, thr_anchor, "one-dimensional links have no nonzero spectrum"))
            return certs
        consts = mixing_constants(X.n, X.n, lam, kappa, partite=X.is_partite)
        if not consts.applicable:
            certs.append(Certificate.not_applicable(name, thr_anchor, consts.reason))
            return certs
        if X.is_partite:
            thr = partite_overlap_threshold(X.n, consts.partite_error, opt.omega, opt.c)
            thr_anchor = "partite overlap >= min{omega/(n+1)^2, c(c^n - (n+1)! E)}"
        else:
            thr = overlap_threshold(X.n, consts.leading, consts.error, opt.omega, opt.c)
        witness = {"terms": list(thr.terms), "omega": opt.omega, "c": opt.c}
        if not thr.applicable:
            certs.append(Certificate.not_applicable(name, thr_anchor, thr.reason, witness))
        else:
            certs.append(Certificate.check(name, thr_anchor, result.ratio, ">=", thr.value, 1e-12, witness))
    return certs


_STAGE_FUNCS: dict[str, Callable[[WeightedComplex, ReportOptions], list[Certificate]]] = {
    "connectivity": _stage_connectivity,
    "weights": _stage_weights,
    "identities": _stage_identities,
    "descent": _stage_descent,
    "gaps": _stage_gaps,
    "partite": _stage_partite,
    "walks": _stage_walks,
    "cheeger": _stage_cheeger,
    "mixing": _stage_mixing,
    "overlap": _stage_overlap,
}


def run_full_report(source: str | GeneratorSpec | WeightedComplex, options: ReportOptions | None = None) -> dict:
    """Run the selected stages and return the report as a plain dict.

    Stages may run on a thread pool (``options.workers``); the assembled
    report is always in ``STAGES`` order, so equal inputs give equal output.
    """
    opt = options or ReportOptions()
    X, described = load_source(source)
    selected = [s for s in STAGES if opt.only is None or s in opt.only]
    unknown = set(opt.only or ()) - set(STAGES)
    if unknown:
        raise ValueError(f"unknown stages {sorted(unknown)}; choose from {list(STAGES)}")

    def run(stage: str) -> list[Certificate]:
        return _STAGE_FUNCS[stage](X, opt)

    if opt.workers > 1:
        with ThreadPoolExecutor(max_workers=opt.workers) as pool:
            results = list(pool.map(run, selected))
    else:
        results = [run(s) for s in selected]
    certificates = []
    for stage, certs in zip(selected, results):
        for c in certs:
            entry = c.to_dict()
            entry["stage"] = stage
            certificates.append(entry)
    flat = [c for certs in results for c in certs]
    return {
        "schema": SCHEMA,
        "source": described,
        "complex": {
            "dim": X.n,
            "vertices": X.num_vertices,
            "facets": len(X.facets),
            "partite": X.is_partite,
        },
        "options": opt.to_dict(),
        "stages": selected,
        "summary": summarize(flat),
        "certificates": certificates,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"
