"""JSON file formats for spaces, poc sets and reports.

Output is canonical (sorted keys, two-space indent, ASCII, rationals as
``"num/den"`` strings), so ``serialize(parse(text)) == text`` for canonical text.
"""

from __future__ import annotations

import json

from .duality import MeasuredPocSet, make_pocset
from .errors import BadParams, ParseError
from .rational import format_rational, parse_rational
from .report import Report, canonical_json
from .space import MedianSpace

VERSION = 1


def _locate(text: str, needle) -> tuple[int, int]:
    """Line and column of the first occurrence of ``needle`` (as JSON) in ``text``."""
    for probe in (json.dumps(needle), str(needle)):
        pos = text.find(probe)
        if pos >= 0:
            line = text.count("\n", 0, pos) + 1
            col = pos - (text.rfind("\n", 0, pos) + 1) + 1
            return line, col
    return 1, 1


def _fail(text, message, needle=None):
    line, col = _locate(text, needle) if needle is not None else (1, 1)
    raise ParseError(message, line, col)


def _load(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(data, dict):
        _fail(text, "top level must be an object")
    if data.get("version", VERSION) != VERSION:
        _fail(text, f"unsupported version {data.get('version')!r}", "version")
    return data


def _rational(text, raw, where):
    try:
        return parse_rational(raw)
    except ValueError:
        _fail(text, f"bad rational {raw!r} in {where}", raw)


# -- spaces ------------------------------------------------------------------------


def parse_space(text: str, name: str = "") -> MedianSpace:
    data = _load(text)
    kind = data.get("kind")
    points = data.get("points")
    if kind not in ("graph", "table"):
        _fail(text, f"kind must be 'graph' or 'table', got {kind!r}", "kind")
    if not isinstance(points, list) or not all(isinstance(p, str) for p in points):
        _fail(text, "points must be a list of strings", "points")
    try:
        if kind == "graph":
            edges = []
            for e in data.get("edges", []):
                if not isinstance(e, dict) or set(e) != {"u", "v", "weight"}:
                    _fail(text, "each edge needs exactly u, v and weight", "edges")
                edges.append((e["u"], e["v"], _rational(text, e["weight"], "edge weight")))
            return MedianSpace.from_graph(points, edges, name=name)
        rows = data.get("medians")
        if not isinstance(rows, list):
            _fail(text, "table form needs a 'medians' list", "kind")
        for row in rows:
            if not (isinstance(row, list) and len(row) == 4 and all(isinstance(x, str) for x in row)):
                _fail(text, f"median row must be four point ids: {row!r}", row)
        return MedianSpace.from_table(points, rows, name=name)
    except ParseError:
        raise
    except BadParams as exc:
        _fail(text, str(exc), "edges" if kind == "graph" else "medians")


def serialize_space(S: MedianSpace) -> str:
    return canonical_json(S.to_dict())


def read_space(path, name: str | None = None) -> MedianSpace:
    with open(path, encoding="utf-8") as fh:
        return parse_space(fh.read(), name=name if name is not None else str(path))


def write_space(S: MedianSpace, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_space(S))


# -- poc sets ----------------------------------------------------------------------


def parse_pocset(text: str) -> MeasuredPocSet:
    data = _load(text)
    elements = data.get("elements")
    pairs = data.get("pairs")
    if not isinstance(elements, list) or not all(isinstance(p, str) for p in elements):
        _fail(text, "elements must be a list of strings", "elements")
    if not isinstance(pairs, list):
        _fail(text, "pairs must be a list", "pairs")
    names = []
    for pair in pairs:
        if not (isinstance(pair, list) and len(pair) == 2 and all(p in elements for p in pair)):
            _fail(text, f"malformed pair {pair!r}", pair)
        names.extend(pair)
    if sorted(names) != sorted(elements):
        _fail(text, "pairs must cover every element exactly once", "pairs")
    index = {p: k for k, p in enumerate(names)}
    order = []
    for rel in data.get("order", []):
        if not (isinstance(rel, list) and len(rel) == 2 and all(p in index for p in rel)):
            bad = [p for p in rel if p not in index] if isinstance(rel, list) else []
            _fail(text, f"malformed order relation {rel!r}", bad[0] if bad else "order")
        order.append((index[rel[0]], index[rel[1]]))
    weights_raw = data.get("weights", {})
    if not isinstance(weights_raw, dict):
        _fail(text, "weights must be an object", "weights")
    weights = []
    for a, _ in pairs:
        if a not in weights_raw:
            _fail(text, f"missing weight for pair {a!r}", "weights")
        weights.append(_rational(text, weights_raw[a], "weights"))
    base = data.get("basepoint")
    sides = None
    if base is not None:
        if not isinstance(base, list) or not all(p in index for p in base) or len(base) != len(pairs):
            _fail(text, "basepoint must name one element of each pair", "basepoint")
        chosen = {index[p] for p in base}
        sides = tuple(0 if 2 * w in chosen else 1 for w in range(len(pairs)))
        if any((2 * w in chosen) == (2 * w + 1 in chosen) for w in range(len(pairs))):
            _fail(text, "basepoint must name one element of each pair", "basepoint")
    try:
        return make_pocset(names, order, weights, sides)
    except BadParams as exc:
        _fail(text, str(exc), "order")


def covering_relations(P: MeasuredPocSet) -> list[tuple[int, int]]:
    """The Hasse diagram: p < q with nothing strictly between."""
    out = []
    for p, q in P.relations():
        if not any(P.less(p, r) and P.less(r, q) for r in range(len(P.names))):
            out.append((p, q))
    return out


def pocset_to_dict(P: MeasuredPocSet) -> dict:
    names = P.names
    out = {
        "version": VERSION,
        "elements": list(names),
        "pairs": [[names[2 * w], names[2 * w + 1]] for w in range(P.walls)],
        "order": [[names[p], names[q]] for p, q in covering_relations(P)],
        "weights": {names[2 * w]: format_rational(P.weights[w]) for w in range(P.walls)},
    }
    if P.basepoint is not None:
        out["basepoint"] = [names[2 * w + s] for w, s in enumerate(P.basepoint)]
    return out


def serialize_pocset(P: MeasuredPocSet) -> str:
    return canonical_json(pocset_to_dict(P))


# -- reports ---------------------------------------------------------------------


def serialize_report(R: Report) -> str:
    return canonical_json(R.to_dict())


def parse_report(text: str) -> Report:
    data = _load(text)
    try:
        return Report.from_dict(data)
    except (KeyError, TypeError) as exc:
        _fail(text, f"malformed report: missing {exc}", "checks")


def sniff(text: str) -> str:
    """'space', 'pocset' or 'report', judged by the top-level keys."""
    data = _load(text)
    if "kind" in data:
        return "space"
    if "elements" in data:
        return "pocset"
    if "checks" in data:
        return "report"
    raise ParseError("unrecognised file", 1, 1)


__all__ = [
    "parse_space", "serialize_space", "read_space", "write_space",
    "parse_pocset", "serialize_pocset", "pocset_to_dict", "covering_relations",
    "parse_report", "serialize_report", "sniff",
]
