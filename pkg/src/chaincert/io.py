"""Reading and writing chains.

Chain JSON::

    {"n": 2, "convention": "column", "P": [[0.9, 0.1], [0.1, 0.9]]}

``P`` is listed row by row.  With ``"convention": "row"`` rows are the
probability distributions and the matrix is transposed on load.

Weighted graphs are TSV lines ``u<TAB>v<TAB>w`` with 0-based vertex ids; they
load as the random walk on the graph.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .chain import ReversibleChain
from .errors import ParseError

CONVENTIONS = ("column", "row")


@dataclass(frozen=True)
class LoadedInput:
    kind: str  # "chain" or "graph"
    convention: str
    matrix: np.ndarray | None = None
    edges: tuple[tuple[int, int, float], ...] | None = None
    n: int | None = None


def parse_chain_json(text: str) -> LoadedInput:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "P" not in doc:
        raise ParseError('chain JSON must be an object with a "P" matrix')
    convention = doc.get("convention", "column")
    if convention not in CONVENTIONS:
        raise ParseError(f"convention must be 'column' or 'row', got {convention!r}")
    try:
        P = np.array(doc["P"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"P is not a numeric matrix: {exc}") from exc
    if P.ndim != 2:
        raise ParseError(f"P must be a 2-d matrix, got shape {P.shape}")
    n = doc.get("n", P.shape[0])
    if not isinstance(n, int) or isinstance(n, bool) or P.shape != (n, n):
        raise ParseError(f"declared n={n!r} does not match P of shape {P.shape}")
    if convention == "row":
        P = P.T
    return LoadedInput(kind="chain", convention=convention, matrix=P, n=n)


def parse_graph_tsv(text: str) -> LoadedInput:
    edges = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 3:
            raise ParseError(f"line {lineno}: expected u<TAB>v<TAB>w")
        try:
            u, v, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
        if u < 0 or v < 0:
            raise ParseError(f"line {lineno}: vertex ids are 0-based and nonnegative")
        if not (w > 0 and np.isfinite(w)):
            raise ParseError(f"line {lineno}: weight must be positive")
        edges.append((u, v, w))
    if not edges:
        raise ParseError("graph has no edges")
    n = 1 + max(max(u, v) for u, v, _ in edges)
    return LoadedInput(kind="graph", convention="graph", edges=tuple(edges), n=n)


def parse_input(text: str) -> LoadedInput:
    """Chain JSON if the text looks like a JSON object, TSV graph otherwise."""
    if text.lstrip().startswith("{"):
        return parse_chain_json(text)
    return parse_graph_tsv(text)


def chain_to_json(chain: ReversibleChain | np.ndarray, meta: dict | None = None) -> dict:
    P = chain.matrix if isinstance(chain, ReversibleChain) else np.asarray(chain)
    doc = {"n": int(P.shape[0]), "convention": "column", "P": [[float(x) for x in row] for row in P]}
    if meta:
        doc["meta"] = meta
    return doc
