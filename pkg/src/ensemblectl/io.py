"""Pattern and pair documents (JSON), DOT export and CSV eigen-trajectories."""
from __future__ import annotations

import csv
import io as _io
import json
import re
from dataclasses import dataclass, field
from importlib import resources

from .graph import PatternError, SparsityPattern
from .synthesis import EnsemblePair

__all__ = [
    "SCHEMA_VERSION",
    "PatternFormatError",
    "PatternDocument",
    "parse_pattern",
    "parse_document",
    "pattern_to_dict",
    "serialize_pattern",
    "export_dot",
    "parse_pair",
    "serialize_pair",
    "eigen_csv",
    "load_fixture",
    "load_schema",
    "dumps",
]

SCHEMA_VERSION = "1.0"
_CONTROL_RE = re.compile(r"b[1-9][0-9]*")


class PatternFormatError(ValueError):
    """Malformed pattern or pair document."""


@dataclass(frozen=True)
class PatternDocument:
    pattern: SparsityPattern
    name: str | None = None
    note: str | None = None
    extra: dict = field(default_factory=dict, compare=False)


def _load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise PatternFormatError(f"malformed JSON: {exc}") from None


def _require_int(doc: dict, key: str) -> int:
    if key not in doc:
        raise PatternFormatError(f"missing field {key!r}")
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise PatternFormatError(f"field {key!r} must be a non-negative integer")
    return value


def _pattern_from_dict(doc) -> SparsityPattern:
    if not isinstance(doc, dict):
        raise PatternFormatError("pattern document must be a JSON object")
    n = _require_int(doc, "n")
    m = _require_int(doc, "m")
    edges = doc.get("edges")
    if not isinstance(edges, list):
        raise PatternFormatError("field 'edges' must be a list of [from, to] pairs")
    pairs = []
    seen = set()
    for k, edge in enumerate(edges):
        if not (isinstance(edge, list) and len(edge) == 2 and all(isinstance(x, str) for x in edge)):
            raise PatternFormatError(f"edges[{k}] must be a [from, to] pair of node names")
        key = tuple(edge)
        if key in seen:
            raise PatternFormatError(f"edges[{k}] duplicate edge {edge[0]}->{edge[1]}")
        seen.add(key)
        if _CONTROL_RE.fullmatch(edge[1]):
            raise PatternFormatError(f"edges[{k}] {edge[0]}->{edge[1]}: edge into control-node")
        pairs.append(key)
    try:
        return SparsityPattern.from_names(n, m, pairs)
    except PatternError as exc:
        raise PatternFormatError(str(exc)) from None


def parse_document(text: str) -> PatternDocument:
    doc = _load_json(text)
    pattern = _pattern_from_dict(doc)
    meta = doc.get("metadata") or {}
    return PatternDocument(pattern, meta.get("name"), meta.get("note"), dict(meta))


def parse_pattern(text: str) -> SparsityPattern:
    """Parse a pattern document; errors name the offending field or edge."""
    return parse_document(text).pattern


def pattern_to_dict(G: SparsityPattern, name: str | None = None, note: str | None = None) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "n": G.n,
        "m": G.m,
        "edges": [list(e) for e in G.named_edges()],
    }
    meta = {k: v for k, v in (("name", name), ("note", note)) if v is not None}
    if meta:
        doc["metadata"] = meta
    return doc


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def serialize_pattern(G: SparsityPattern, name: str | None = None, note: str | None = None) -> str:
    return dumps(pattern_to_dict(G, name, note))


def export_dot(G: SparsityPattern, name: str = "G") -> str:
    """Graphviz digraph: state-nodes as circles, control-nodes as squares."""
    lines = [f"digraph {name} {{"]
    for v in range(G.num_nodes):
        shape = "circle" if G.is_state(v) else "square"
        lines.append(f'  "{G.node_name(v)}" [shape={shape}];')
    for u, v in G.named_edges():
        lines.append(f'  "{u}" -> "{v}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_pair(text: str) -> EnsemblePair:
    doc = _load_json(text)
    if not isinstance(doc, dict):
        raise PatternFormatError("pair document must be a JSON object")
    for key in ("A0", "b0", "kappa", "cycle_sizes"):
        if key not in doc:
            raise PatternFormatError(f"missing field {key!r}")
    try:
        return EnsemblePair.from_dict(doc)
    except (TypeError, ValueError) as exc:
        raise PatternFormatError(f"invalid pair: {exc}") from None


def serialize_pair(pair: EnsemblePair, pattern: SparsityPattern | None = None) -> str:
    doc = {"schema_version": SCHEMA_VERSION, **pair.to_dict()}
    if pattern is not None:
        doc["pattern"] = pattern_to_dict(pattern)
    return dumps(doc)


def eigen_csv(rows) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["sigma", "block", "k", "re", "im"])
    for sigma, block, k, re, im in rows:
        writer.writerow([f"{sigma:.6g}", block, k, repr(re), repr(im)])
    return buf.getvalue()


def load_fixture(name: str) -> PatternDocument:
    """Shipped pattern fixture by file stem, e.g. ``"four_state"``."""
    text = resources.files("ensemblectl.data").joinpath(f"{name}.json").read_text()
    return parse_document(text)


def load_schema(name: str) -> dict:
    text = resources.files("ensemblectl.schemas").joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)
