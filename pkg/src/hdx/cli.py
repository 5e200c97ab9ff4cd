"""Command line interface: ``hdx <generate|analyze|verify|cheeger|mixing|overlap|spectra>``.

Exit codes: 0 when no certificate failed, 1 when one did, 2 for unreadable or
invalid input, 3 when an enumeration budget was exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .certificates import Certificate, summarize
from .cheeger import BudgetExceeded, verify_cheeger
from .complex_core import ComplexError, WeightedComplex, connectivity_report
from .formats import complex_to_json, complex_to_text, read_embedding
from .mixing import mixing_constants, random_families, verify_mixing
from .overlap import heavy_vertex_check, overlap_bruteforce
from .report import SCHEMA, STAGES, ReportOptions, load_source, report_json, run_full_report
from .spectra import descent_profile, local_expansion, verify_descent, verify_global_gaps

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

SOURCE_HELP = "complete:N:n, multipartite:a,b,..., flag:N:p:n:seed, or a complex file (text or JSON)"


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _certificate_payload(command: str, X: WeightedComplex, certs: list[Certificate], **extra) -> dict:
    payload = {
        "schema": SCHEMA,
        "command": command,
        "complex": {"dim": X.n, "vertices": X.num_vertices, "facets": len(X.facets), "partite": X.is_partite},
        "summary": summarize(certs),
        "certificates": [c.to_dict() for c in certs],
    }
    payload.update(extra)
    return payload


def _status(certs: list[Certificate]) -> int:
    return EXIT_FAILED if any(c.failed for c in certs) else EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    X, _ = load_source(args.source)
    text = complex_to_json(X) + "\n" if args.json else complex_to_text(X)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    X, described = load_source(args.source)
    conn = connectivity_report(X)
    lam, kappa = local_expansion(X) if X.n >= 1 else (None, 0.0)
    payload = {
        "schema": SCHEMA,
        "command": "analyze",
        "source": described,
        "dim": X.n,
        "vertices": X.num_vertices,
        "counts": {str(k): X.count(k) for k in range(-1, X.n + 1)},
        "partite": X.is_partite,
        "connected": conn.connected,
        "links_connected": conn.links_connected,
        "gallery_connected": conn.gallery_connected,
        "local_expansion": {"lambda": lam, "kappa": kappa},
        "top_weight": float(X.weights(X.n).sum()),
    }
    _emit(payload, args.out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    only = tuple(s.strip() for s in args.only.split(",")) if args.only else None
    embedding = read_embedding(args.embedding) if args.embedding else None
    options = ReportOptions(
        seed=args.seed,
        trials=args.trials,
        only=only,
        cheeger_samples=args.sample,
        embedding=embedding,
        grid=args.grid,
        omega=args.omega,
        c=args.c,
        workers=args.workers,
    )
    report = run_full_report(args.source, options)
    text = report_json(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_FAILED if report["summary"]["fail"] else EXIT_OK


def cmd_spectra(args: argparse.Namespace) -> int:
    X, _ = load_source(args.source)
    certs = verify_descent(X) + verify_global_gaps(X)
    profile = [row.to_dict() for row in descent_profile(X)]
    _emit(_certificate_payload("spectra", X, certs, profile=profile), args.out)
    return _status(certs)


def cmd_cheeger(args: argparse.Namespace) -> int:
    X, _ = load_source(args.source)
    ks = [args.k] if args.k is not None else None
    samples = None if args.exhaustive else args.sample
    certs, reports = verify_cheeger(X, ks, samples=samples, seed=args.seed, strict=True)
    _emit(_certificate_payload("cheeger", X, certs, reports=[r.to_dict() for r in reports]), args.out)
    return _status(certs)


def cmd_mixing(args: argparse.Namespace) -> int:
    X, _ = load_source(args.source)
    families = None
    if not args.exhaustive:
        families = random_families(X, args.l, args.trials, seed=args.seed, sides=args.partite)
    certs = verify_mixing(X, args.l, families, exhaustive=args.exhaustive, partite=args.partite)
    lam, kappa = local_expansion(X)
    extra = {}
    if lam is not None:
        extra["constants"] = mixing_constants(X.n, args.l, lam, kappa, partite=args.partite).to_dict()
    _emit(_certificate_payload("mixing", X, certs, **extra), args.out)
    return _status(certs)


def cmd_overlap(args: argparse.Namespace) -> int:
    X, _ = load_source(args.source)
    emb = read_embedding(args.embedding)
    result = overlap_bruteforce(X, emb, grid=args.grid)
    certs = heavy_vertex_check(X, emb, args.omega) if args.omega is not None else []
    _emit(_certificate_payload("overlap", X, certs, overlap=result.to_dict()), args.out)
    return _status(certs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hdx", description="Weighted simplicial complexes and their expansion certificates.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, source_required: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        if source_required:
            p.add_argument("source", help=SOURCE_HELP)
        else:
            p.add_argument("source", nargs="?", default="complete:4:2", help=SOURCE_HELP + " (default complete:4:2)")
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--seed", type=int, default=0)
        return p

    p = add("generate", "write a complex in the text (or JSON) format")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_generate)

    p = add("analyze", "summary statistics, connectivity and local expansion")
    p.set_defaults(func=cmd_analyze)

    p = add("verify", "run every suite and print the JSON report", source_required=False)
    p.add_argument("--trials", type=int, default=64, help="random trials per identity")
    p.add_argument("--only", help=f"comma separated stages from {','.join(STAGES)}")
    p.add_argument("--sample", type=int, help="sample this many families for h^k instead of enumerating")
    p.add_argument("--embedding", help="vertex coordinates for the overlap stage")
    p.add_argument("--grid", type=int)
    p.add_argument("--omega", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = add("spectra", "descent profile and global gap certificates")
    p.set_defaults(func=cmd_spectra)

    p = add("cheeger", "h^k against link gaps")
    p.add_argument("--k", type=int)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true", help="enumerate all families (default)")
    mode.add_argument("--sample", type=int, help="sample this many families")
    p.set_defaults(func=cmd_cheeger)

    p = add("mixing", "mixing inequalities with measured (lambda, kappa)")
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--partite", action="store_true")
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--trials", type=int, default=64, help="number of random families")
    p.set_defaults(func=cmd_mixing)

    p = add("overlap", "best covering point of an embedding")
    p.add_argument("--embedding", required=True)
    p.add_argument("--grid", type=int, help="lattice resolution (required for n > 2)")
    p.add_argument("--omega", type=float, help="also run the heavy-vertex check with this omega")
    p.set_defaults(func=cmd_overlap)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"hdx: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ComplexError, OSError, ValueError) as exc:
        print(f"hdx: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
