"""Versioned JSON documents for groupoids, systems, actions, and friends.

One text format for every object kind, built for bit-exact reproducibility:
keys sorted, lists canonically ordered, rationals as reduced "p/q" strings.
Parsing enforces referential integrity (every mentioned token must be
declared) but not the algebraic axioms; broken tables must stay parseable so
the validators can report them as violations rather than parse errors.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .actions import Action, Equivalence
from .convolution import GroupoidFunction
from .groupoids import (
    Groupoid,
    group_as_groupoid,
    make_groupoid,
    pair_groupoid,
    relation_groupoid,
)
from .systems import Cutoff, FiberSystem, Measure, fiber_system

__all__ = [
    "Document",
    "KINDS",
    "SCHEMA_VERSION",
    "SchemaError",
    "parse",
    "serialize",
]

SCHEMA_VERSION = 1

KINDS = ("groupoid", "system", "action", "equivalence", "cutoff", "function")

SUGAR_KINDS = ("pair", "group", "relation")

_RATIONAL = re.compile(r"^-?\d+(/[1-9]\d*)?$")


class SchemaError(ValueError):
    """A malformed document: bad JSON, bad shape, or an unknown token."""


@dataclass(frozen=True)
class Document:
    """A tagged payload: the live object, its kind, and free-form metadata."""

    kind: str
    payload: object
    meta: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# encoding


def _rat(value: Fraction) -> str:
    return str(value)


def _encode_groupoid(G: Groupoid) -> dict:
    return {
        "elements": G.sorted_elements(),
        "units": G.sorted_units(),
        "range": dict(G.range_map),
        "source": dict(G.source_map),
        "inverse": dict(G.inverse_map),
        "compose": sorted([x, y, z] for (x, y), z in G.compose_map.items()),
    }


def _encode_system(S: FiberSystem) -> dict:
    return {
        "base": dict(S.base_map),
        "measures": {u: {y: _rat(w) for y, w in m.items()} for u, m in S.measures.items()},
    }


def _encode_action(A: Action) -> dict:
    if A.side == "left":
        rows = sorted([g, z, w] for (g, z), w in A.act.items())
    else:
        inv = A.groupoid.inverse_map
        for g, _ in A.act:
            if g not in inv:
                raise ValueError(f"cannot present right action: no inverse for {g}")
        rows = sorted([z, inv[g], w] for (g, z), w in A.act.items())
    return {
        "side": A.side,
        "groupoid": _encode_groupoid(A.groupoid),
        "carrier": A.sorted_carrier(),
        "moment": dict(A.moment),
        "table": rows,
    }


def _encode_equivalence(E: Equivalence) -> dict:
    return {"left": _encode_action(E.left), "right": _encode_action(E.right)}


def _encode_cutoff(phi: Cutoff) -> dict:
    return {
        "weights": {z: _rat(w) for z, w in phi.weights.items()},
        "quotient": dict(phi.quotient_map),
    }


def _encode_function(values: object) -> dict:
    if isinstance(values, GroupoidFunction):
        values = dict(values.items())
    return {"values": {x: _rat(v) for x, v in sorted(values.items())}}


_ENCODERS = {
    "groupoid": _encode_groupoid,
    "system": _encode_system,
    "action": _encode_action,
    "equivalence": _encode_equivalence,
    "cutoff": _encode_cutoff,
    "function": _encode_function,
}


def serialize(doc: Document) -> str:
    """Render a document as canonical JSON text: sorted keys, "p/q" rationals."""
    if doc.kind not in _ENCODERS:
        raise SchemaError(f"unknown document kind: {doc.kind!r}")
    body = {"version": SCHEMA_VERSION, "kind": doc.kind}
    body.update(_ENCODERS[doc.kind](doc.payload))
    if doc.meta:
        body["meta"] = {str(k): str(v) for k, v in sorted(doc.meta.items())}
    return json.dumps(body, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# decoding


def _fail(where: str, problem: str) -> SchemaError:
    return SchemaError(f"field {where!r}: {problem}")


def _need(data: dict, key: str, kind: type, where: str):
    if key not in data:
        raise _fail(f"{where}.{key}" if where else key, "missing")
    value = data[key]
    if not isinstance(value, kind):
        raise _fail(f"{where}.{key}" if where else key, f"expected {kind.__name__}")
    return value


def _str_list(data: dict, key: str, where: str) -> list[str]:
    value = _need(data, key, list, where)
    for item in value:
        if not isinstance(item, str):
            raise _fail(f"{where}.{key}" if where else key, f"non-string token: {item!r}")
    return value


def _str_map(data: dict, key: str, where: str) -> dict[str, str]:
    value = _need(data, key, dict, where)
    for k, v in value.items():
        if not isinstance(v, str):
            raise _fail(f"{where}.{key}" if where else key, f"non-string value for {k!r}: {v!r}")
    return value


def _rational(value: object, where: str) -> Fraction:
    if isinstance(value, bool):
        raise _fail(where, f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise _fail(where, "decimal numbers are not exact; write the rational as a \"p/q\" string")
    if isinstance(value, str) and _RATIONAL.match(value):
        return Fraction(value)
    raise _fail(where, f"not a rational \"p/q\" string: {value!r}")


def _check_keys(data: dict, allowed: set[str], where: str) -> None:
    extra = sorted(set(data) - allowed)
    if extra:
        raise _fail(extra[0] if not where else f"{where}.{extra[0]}", "unexpected field")


def _decode_groupoid(data: dict, where: str = "") -> Groupoid:
    _check_keys(
        data,
        {"version", "kind", "meta", "elements", "units", "range", "source", "inverse", "compose"},
        where,
    )
    elements = _str_list(data, "elements", where)
    known = set(elements)

    def token(t: object, ctx: str) -> str:
        if not isinstance(t, str):
            raise _fail(ctx, f"non-string token: {t!r}")
        if t not in known:
            raise _fail(ctx, f"references unknown element: {t!r}")
        return t

    units = [token(u, f"{where}.units" if where else "units") for u in _str_list(data, "units", where)]
    maps: dict[str, dict[str, str]] = {}
    for name in ("range", "source", "inverse"):
        ctx = f"{where}.{name}" if where else name
        raw = _str_map(data, name, where)
        maps[name] = {token(k, ctx): token(v, ctx) for k, v in raw.items()}
    compose_rows = _need(data, "compose", list, where)
    ctx = f"{where}.compose" if where else "compose"
    compose: dict[tuple[str, str], str] = {}
    for row in compose_rows:
        if not isinstance(row, list) or len(row) != 3:
            raise _fail(ctx, f"expected [x, y, xy] triple, got {row!r}")
        x, y, z = (token(t, ctx) for t in row)
        if (x, y) in compose:
            raise _fail(ctx, f"duplicate pair: [{x!r}, {y!r}]")
        compose[(x, y)] = z
    return make_groupoid(elements, units, maps["range"], maps["source"], maps["inverse"], compose)


def _decode_system(data: dict, where: str = "") -> FiberSystem:
    _check_keys(data, {"version", "kind", "meta", "base", "measures"}, where)
    base = _str_map(data, "base", where)
    raw = _need(data, "measures", dict, where)
    measures: dict[str, Measure] = {}
    for u, entries in raw.items():
        ctx = f"{where}.measures.{u}" if where else f"measures.{u}"
        if not isinstance(entries, dict):
            raise _fail(ctx, "expected an object of weights")
        try:
            measures[u] = Measure({y: _rational(v, f"{ctx}.{y}") for y, v in entries.items()})
        except ValueError as exc:
            if isinstance(exc, SchemaError):
                raise
            raise _fail(ctx, str(exc)) from exc
    return fiber_system(base, measures)


def _decode_action(data: dict, where: str = "") -> Action:
    _check_keys(
        data, {"version", "kind", "meta", "side", "groupoid", "carrier", "moment", "table"}, where
    )
    side = _need(data, "side", str, where)
    if side not in ("left", "right"):
        raise _fail(f"{where}.side" if where else "side", f"expected left or right, got {side!r}")
    gdata = _need(data, "groupoid", dict, where)
    G = _decode_groupoid(gdata, f"{where}.groupoid" if where else "groupoid")
    carrier = _str_list(data, "carrier", where)
    points = set(carrier)
    moment_ctx = f"{where}.moment" if where else "moment"
    moment = {}
    for z, u in _str_map(data, "moment", where).items():
        if z not in points:
            raise _fail(moment_ctx, f"references unknown carrier point: {z!r}")
        if u not in G.elements:
            raise _fail(moment_ctx, f"references unknown element: {u!r}")
        moment[z] = u
    rows = _need(data, "table", list, where)
    ctx = f"{where}.table" if where else "table"
    act: dict[tuple[str, str], str] = {}
    for row in rows:
        if not isinstance(row, list) or len(row) != 3:
            raise _fail(ctx, f"expected a three-token row, got {row!r}")
        a, b, c = row
        if side == "left":
            g, z, w = a, b, c
        else:
            z, g, w = a, b, c
        if g not in G.elements:
            raise _fail(ctx, f"references unknown element: {g!r}")
        if z not in points:
            raise _fail(ctx, f"references unknown carrier point: {z!r}")
        if w not in points:
            raise _fail(ctx, f"references unknown carrier point: {w!r}")
        if side == "right":
            if g not in G.inverse_map:
                raise _fail(ctx, f"no inverse declared for acting element: {g!r}")
            g = G.inverse_map[g]
        if (g, z) in act:
            raise _fail(ctx, f"duplicate pair: [{row[0]!r}, {row[1]!r}]")
        act[(g, z)] = w
    return Action(
        groupoid=G,
        carrier=frozenset(carrier),
        moment=dict(sorted(moment.items())),
        act=dict(sorted(act.items())),
        side=side,
    )


def _decode_equivalence(data: dict, where: str = "") -> Equivalence:
    _check_keys(data, {"version", "kind", "meta", "left", "right"}, where)
    left = _decode_action(
        _need(data, "left", dict, where), f"{where}.left" if where else "left"
    )
    right = _decode_action(
        _need(data, "right", dict, where), f"{where}.right" if where else "right"
    )
    try:
        return Equivalence(left, right)
    except ValueError as exc:
        raise SchemaError(f"equivalence shape: {exc}") from exc


def _decode_cutoff(data: dict, where: str = "") -> Cutoff:
    _check_keys(data, {"version", "kind", "meta", "weights", "quotient"}, where)
    raw = _need(data, "weights", dict, where)
    ctx = f"{where}.weights" if where else "weights"
    try:
        weights = Measure({z: _rational(v, f"{ctx}.{z}") for z, v in raw.items()})
        return Cutoff(weights, _str_map(data, "quotient", where))
    except ValueError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise _fail(ctx, str(exc)) from exc


def _decode_function(data: dict, where: str = "") -> dict[str, Fraction]:
    _check_keys(data, {"version", "kind", "meta", "values"}, where)
    raw = _need(data, "values", dict, where)
    ctx = f"{where}.values" if where else "values"
    return {str(x): _rational(v, f"{ctx}.{x}") for x, v in sorted(raw.items())}


def _decode_pair(data: dict) -> Groupoid:
    _check_keys(data, {"version", "kind", "meta", "points"}, "")
    try:
        return pair_groupoid(_str_list(data, "points", ""))
    except ValueError as exc:
        raise SchemaError(f"pair constructor: {exc}") from exc


def _decode_group(data: dict) -> Groupoid:
    _check_keys(data, {"version", "kind", "meta", "table"}, "")
    rows = _need(data, "table", list, "")
    table: dict[tuple[str, str], str] = {}
    for row in rows:
        if not isinstance(row, list) or len(row) != 3 or not all(isinstance(t, str) for t in row):
            raise _fail("table", f"expected [a, b, ab] string triple, got {row!r}")
        table[(row[0], row[1])] = row[2]
    try:
        return group_as_groupoid(table)
    except ValueError as exc:
        raise SchemaError(f"group constructor: {exc}") from exc


def _decode_relation(data: dict) -> Groupoid:
    _check_keys(data, {"version", "kind", "meta", "map", "codomain"}, "")
    codomain = _str_list(data, "codomain", "") if "codomain" in data else None
    try:
        return relation_groupoid(_str_map(data, "map", ""), codomain)
    except ValueError as exc:
        raise SchemaError(f"relation constructor: {exc}") from exc


_DECODERS = {
    "groupoid": _decode_groupoid,
    "system": _decode_system,
    "action": _decode_action,
    "equivalence": _decode_equivalence,
    "cutoff": _decode_cutoff,
    "function": _decode_function,
}

_SUGAR = {
    "pair": _decode_pair,
    "group": _decode_group,
    "relation": _decode_relation,
}


def parse(text: str) -> Document:
    """Parse canonical JSON text into a Document holding the live object.

    Constructor shorthand kinds (pair, group, relation) expand to groupoid
    documents on load.  Tokens must be declared before use; algebraic axioms
    are deliberately not enforced here.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}") from None
    if not isinstance(data, dict):
        raise SchemaError("expected a top-level object")
    version = data.get("version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unknown version: {version!r} (expected {SCHEMA_VERSION})")
    kind = data.get("kind")
    meta_raw = data.get("meta", {})
    if not isinstance(meta_raw, dict):
        raise _fail("meta", "expected an object")
    meta = {str(k): str(v) for k, v in sorted(meta_raw.items())}
    if kind in _SUGAR:
        return Document("groupoid", _SUGAR[kind](data), meta)
    if kind in _DECODERS:
        return Document(kind, _DECODERS[kind](data), meta)
    raise SchemaError(f"unknown document kind: {kind!r}")
