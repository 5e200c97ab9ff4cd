"""Plain-text and JSON formats for complexes, embeddings and operator matrices.

Complex text format::

    dim n
    partite s_0 s_1 ... s_{|V|-1}     (optional)
    w v_0 ... v_n                     (one facet per line, w optional)

Blank lines and lines starting with ``#`` are ignored.  The JSON mirror is
``{"dim": n, "facets": [{"w": w, "verts": [...]}, ...], "partition": [...]}``.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .complex_core import ComplexError, WeightedComplex, build_complex
from .overlap import Embedding

__all__ = [
    "ParseError",
    "parse_complex_text",
    "parse_complex_json",
    "read_complex",
    "complex_to_text",
    "complex_to_json",
    "write_complex",
    "parse_embedding",
    "read_embedding",
    "embedding_to_text",
    "matrix_to_text",
    "parse_matrix",
]


class ParseError(ComplexError):
    """Malformed input file."""


def _number(token: str, what: str, lineno: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"line {lineno}: {what} {token!r} is not a number") from None


def _integer(token: str, what: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"line {lineno}: {what} {token!r} is not an integer") from None


def _content_lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line.split()))
    return out


def parse_complex_text(text: str) -> WeightedComplex:
    lines = _content_lines(text)
    if not lines or lines[0][1][0] != "dim" or len(lines[0][1]) != 2:
        raise ParseError("first line must be 'dim n'")
    n = _integer(lines[0][1][1], "dimension", lines[0][0])
    if n < 0:
        raise ParseError("dimension must be non-negative")
    partition: list[int] | None = None
    facets: list[tuple[int, ...]] = []
    weights: list[float] = []
    explicit = False
    for lineno, tokens in lines[1:]:
        if tokens[0] == "partite":
            if partition is not None or facets:
                raise ParseError(f"line {lineno}: 'partite' must directly follow the header")
            partition = [_integer(t, "side", lineno) for t in tokens[1:]]
            continue
        if len(tokens) == n + 2:
            w = _number(tokens[0], "weight", lineno)
            verts = tokens[1:]
            explicit = True
        elif len(tokens) == n + 1:
            w = 1.0
            verts = tokens
        else:
            raise ParseError(
                f"line {lineno}: facet has {len(tokens)} fields, expected {n + 1} vertices with an optional weight"
            )
        facets.append(tuple(_integer(t, "vertex", lineno) for t in verts))
        weights.append(w)
    if not facets:
        raise ParseError("no facets")
    try:
        return build_complex(facets, weights if explicit else None, partition)
    except ParseError:
        raise
    except ComplexError as exc:
        raise ParseError(str(exc)) from None


def parse_complex_json(text: str) -> WeightedComplex:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(data, dict) or "dim" not in data or "facets" not in data:
        raise ParseError("JSON complex needs 'dim' and 'facets'")
    n = data["dim"]
    if not isinstance(n, int) or n < 0:
        raise ParseError("'dim' must be a non-negative integer")
    facets, weights = [], []
    for i, entry in enumerate(data["facets"]):
        if isinstance(entry, dict):
            verts, w = entry.get("verts"), entry.get("w", 1.0)
        else:
            verts, w = entry, 1.0
        if not isinstance(verts, list) or len(verts) != n + 1:
            raise ParseError(f"facet {i} must list {n + 1} vertices")
        try:
            facets.append(tuple(int(v) for v in verts))
            weights.append(float(w))
        except (TypeError, ValueError):
            raise ParseError(f"facet {i} has a non-numeric entry") from None
    if not facets:
        raise ParseError("no facets")
    try:
        return build_complex(facets, weights, data.get("partition"))
    except ComplexError as exc:
        raise ParseError(str(exc)) from None


def read_complex(path: str | os.PathLike) -> WeightedComplex:
    """Read a complex, choosing JSON when the file starts with '{'."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return parse_complex_json(text)
    return parse_complex_text(text)


def _original_partition(X: WeightedComplex) -> list[int] | None:
    if X.partition is None:
        return None
    part = {X.labels[v]: X.partition[v] for v in X.vertices}
    # unused ids get side 0; they never occur in a facet
    return [part.get(i, 0) for i in range(max(X.labels) + 1)]


def _facet_rows(X: WeightedComplex) -> list[tuple[float, list[int]]]:
    return [(X.weight(f), [X.labels[v] for v in f]) for f in X.facets]


def complex_to_text(X: WeightedComplex) -> str:
    lines = [f"dim {X.n}"]
    part = _original_partition(X)
    if part is not None:
        lines.append("partite " + " ".join(map(str, part)))
    for w, verts in _facet_rows(X):
        lines.append(f"{w!r} " + " ".join(map(str, verts)))
    return "\n".join(lines) + "\n"


def complex_to_json(X: WeightedComplex) -> str:
    data: dict = {"dim": X.n, "facets": [{"w": w, "verts": v} for w, v in _facet_rows(X)]}
    part = _original_partition(X)
    if part is not None:
        data["partition"] = part
    return json.dumps(data, sort_keys=True)


def write_complex(X: WeightedComplex, path: str | os.PathLike) -> None:
    text = complex_to_json(X) if str(path).endswith(".json") else complex_to_text(X)
    Path(path).write_text(text)


def parse_embedding(text: str) -> Embedding:
    coords: dict[int, np.ndarray] = {}
    width = None
    for lineno, tokens in _content_lines(text):
        v = _integer(tokens[0], "vertex", lineno)
        xs = [_number(t, "coordinate", lineno) for t in tokens[1:]]
        if not xs:
            raise ParseError(f"line {lineno}: vertex {v} has no coordinates")
        if width is not None and len(xs) != width:
            raise ParseError(f"line {lineno}: expected {width} coordinates, got {len(xs)}")
        if v in coords:
            raise ParseError(f"line {lineno}: vertex {v} listed twice")
        width = len(xs)
        coords[v] = np.array(xs)
    if not coords:
        raise ParseError("empty embedding")
    try:
        return Embedding(coords)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def read_embedding(path: str | os.PathLike) -> Embedding:
    return parse_embedding(Path(path).read_text())


def embedding_to_text(emb: Embedding) -> str:
    return "".join(
        f"{v} " + " ".join(repr(float(x)) for x in emb.coordinates[v]) + "\n" for v in sorted(emb.coordinates)
    )


def matrix_to_text(M: np.ndarray) -> str:
    """Dense row-major export with a ``rows cols`` header; values round-trip exactly."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    rows = [" ".join(repr(float(x)) for x in row) for row in M]
    return f"{M.shape[0]} {M.shape[1]}\n" + "".join(r + "\n" for r in rows)


def parse_matrix(text: str) -> np.ndarray:
    lines = _content_lines(text)
    if not lines or len(lines[0][1]) != 2:
        raise ParseError("first line must be 'rows cols'")
    r = _integer(lines[0][1][0], "rows", lines[0][0])
    c = _integer(lines[0][1][1], "cols", lines[0][0])
    body = [_number(t, "entry", ln) for ln, toks in lines[1:] for t in toks]
    if len(body) != r * c:
        raise ParseError(f"expected {r * c} entries, found {len(body)}")
    return np.array(body, dtype=float).reshape(r, c)
