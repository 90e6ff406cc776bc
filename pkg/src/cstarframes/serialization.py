"""Strict JSON schemas for every value the CLI reads or writes.

Documents are objects with "version": 1 and a "kind" tag; unknown fields
are rejected so schema drift fails loudly.  Complex scalars are [re, im]
pairs of finite floats, matrices are row lists, and nested payloads
(shapes, elements, vectors) are bare arrays without the version stutter.
Serialization uses sorted keys, no whitespace, and shortest round-trip
decimals, so equal values produce identical bytes.  Parsing enforces the
domain invariants too: a non-PSD density or a degenerate frame is a
schema error with a path, not a crash later.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .algebra import AlgebraElement, AlgebraShape, State
from .counterexample import TruncatedCSetting, build_setting
from .frames import DegenerateFrameError, Frame
from .modules import ModuleOperator, ModuleVector
from .seminorms import AdmissibleSystem, SampleSet, SeminormSpec


class SchemaError(ValueError):
    """Schema or invariant violation, carrying the JSON path at fault."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


# -- low-level helpers --------------------------------------------------------


def _expect_object(val, path: str) -> dict:
    if not isinstance(val, dict):
        raise SchemaError(path, f"expected an object, found {type(val).__name__}")
    return val


def _expect_list(val, path: str) -> list:
    if not isinstance(val, list):
        raise SchemaError(path, f"expected an array, found {type(val).__name__}")
    return val


def _expect_int(val, path: str) -> int:
    if isinstance(val, bool) or not isinstance(val, int):
        raise SchemaError(path, f"expected an integer, found {val!r}")
    return val


def _get(doc: dict, key: str, path: str):
    if key not in doc:
        raise SchemaError(f"{path}.{key}", "required field missing")
    return doc[key]


def _reject_unknown(doc: dict, allowed: set, path: str) -> None:
    extra = sorted(set(doc) - allowed)
    if extra:
        raise SchemaError(f"{path}.{extra[0]}", "unknown field (strict schema)")


def _complex_in(val, path: str) -> complex:
    pair = _expect_list(val, path)
    if len(pair) != 2:
        raise SchemaError(path, f"complex scalar needs [re, im], found {len(pair)} entries")
    parts = []
    for i, p in enumerate(pair):
        if isinstance(p, bool) or not isinstance(p, (int, float)):
            raise SchemaError(f"{path}[{i}]", f"expected a number, found {p!r}")
        if not math.isfinite(p):
            raise SchemaError(f"{path}[{i}]", f"non-finite value {p!r}")
        parts.append(float(p))
    return complex(parts[0], parts[1])


def _complex_out(z: complex) -> list:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"cannot serialize non-finite scalar {z!r}")
    return [z.real, z.imag]


def _matrix_in(val, n: int, path: str) -> np.ndarray:
    rows = _expect_list(val, path)
    if len(rows) != n:
        raise SchemaError(path, f"expected {n} rows, found {len(rows)}")
    out = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(rows):
        row = _expect_list(row, f"{path}[{i}]")
        if len(row) != n:
            raise SchemaError(f"{path}[{i}]", f"expected {n} columns, found {len(row)}")
        for j, cell in enumerate(row):
            out[i, j] = _complex_in(cell, f"{path}[{i}][{j}]")
    return out


def _matrix_out(mat: np.ndarray) -> list:
    return [[_complex_out(cell) for cell in row] for row in np.asarray(mat)]


# -- nested payloads ----------------------------------------------------------


def shape_payload(shape: AlgebraShape) -> list:
    return list(shape.block_dims)


def parse_shape_payload(val, path: str) -> AlgebraShape:
    dims = _expect_list(val, path)
    if not dims:
        raise SchemaError(path, "shape needs at least one block")
    out = []
    for i, d in enumerate(dims):
        d = _expect_int(d, f"{path}[{i}]")
        if d < 1:
            raise SchemaError(f"{path}[{i}]", f"block dimension must be >= 1, found {d}")
        out.append(d)
    return AlgebraShape(tuple(out))


def element_payload(a: AlgebraElement) -> list:
    return [_matrix_out(b) for b in a.blocks]


def parse_element_payload(val, shape: AlgebraShape, path: str) -> AlgebraElement:
    blocks = _expect_list(val, path)
    if len(blocks) != shape.num_blocks:
        raise SchemaError(path, f"expected {shape.num_blocks} blocks, found {len(blocks)}")
    mats = tuple(
        _matrix_in(b, n, f"{path}[{k}]")
        for k, (b, n) in enumerate(zip(blocks, shape.block_dims))
    )
    return AlgebraElement(shape, mats)


def vector_payload(v: ModuleVector) -> list:
    return [element_payload(c) for c in v.coords]


def parse_vector_payload(val, shape: AlgebraShape, path: str) -> ModuleVector:
    coords = _expect_list(val, path)
    if not coords:
        raise SchemaError(path, "module vector needs at least one coordinate")
    return ModuleVector(
        shape,
        tuple(
            parse_element_payload(c, shape, f"{path}[{i}]")
            for i, c in enumerate(coords)
        ),
    )


def state_payload(s: State) -> list:
    return [_matrix_out(d) for d in s.densities]


def parse_state_payload(val, shape: AlgebraShape, path: str) -> State:
    mats = _expect_list(val, path)
    if len(mats) != shape.num_blocks:
        raise SchemaError(path, f"expected {shape.num_blocks} density blocks, found {len(mats)}")
    densities = tuple(
        _matrix_in(m, n, f"{path}[{k}]")
        for k, (m, n) in enumerate(zip(mats, shape.block_dims))
    )
    try:
        return State(shape, densities)
    except ValueError as e:
        raise SchemaError(path, str(e)) from e


# -- top-level documents ------------------------------------------------------


def document(value) -> dict:
    """JSON document for a library value; inverse of parse for its kind."""
    if isinstance(value, AlgebraShape):
        return {"version": 1, "kind": "shape", "blocks": shape_payload(value)}
    if isinstance(value, AlgebraElement):
        return {
            "version": 1,
            "kind": "element",
            "shape": shape_payload(value.shape),
            "blocks": element_payload(value),
        }
    if isinstance(value, State):
        return {
            "version": 1,
            "kind": "state",
            "shape": shape_payload(value.shape),
            "densities": state_payload(value),
        }
    if isinstance(value, ModuleVector):
        return {
            "version": 1,
            "kind": "vector",
            "shape": shape_payload(value.shape),
            "coords": vector_payload(value),
        }
    if isinstance(value, ModuleOperator):
        return {
            "version": 1,
            "kind": "operator",
            "shape": shape_payload(value.shape),
            "entries": [[element_payload(e) for e in row] for row in value.entries],
        }
    if isinstance(value, Frame):
        return {
            "version": 1,
            "kind": "frame",
            "shape": shape_payload(value.shape),
            "spanning": value.spanning,
            "vectors": [vector_payload(v) for v in value.vectors],
        }
    if isinstance(value, SampleSet):
        if not value.points:
            raise ValueError("an empty sample set has no shape and cannot be serialized")
        doc = {
            "version": 1,
            "kind": "sample_set",
            "shape": shape_payload(value.shape),
            "points": [vector_payload(p) for p in value.points],
        }
        if value.label:
            doc["label"] = value.label
        return doc
    if isinstance(value, SeminormSpec):
        sys_vectors = value.system.vectors
        return {
            "version": 1,
            "kind": "seminorm_spec",
            "shape": shape_payload(sys_vectors[0].shape),
            "system": [vector_payload(v) for v in sys_vectors],
            "states": [state_payload(s) for s in value.states],
        }
    if isinstance(value, TruncatedCSetting):
        return {
            "version": 1,
            "kind": "setting",
            "trunc": value.trunc,
            "dim": value.dim,
        }
    if hasattr(value, "to_json_dict"):
        return value.to_json_dict()
    raise TypeError(f"no schema for {type(value).__name__}")


def serialize(value) -> bytes:
    """Canonical bytes: sorted keys, no whitespace, shortest decimals."""
    return json.dumps(
        document(value), sort_keys=True, separators=(",", ":"), allow_nan=False
    ).encode("utf-8")


def _parse_shape_doc(doc: dict) -> AlgebraShape:
    _reject_unknown(doc, {"version", "kind", "blocks"}, "$")
    return parse_shape_payload(_get(doc, "blocks", "$"), "$.blocks")


def _parse_element_doc(doc: dict) -> AlgebraElement:
    _reject_unknown(doc, {"version", "kind", "shape", "blocks"}, "$")
    shape = parse_shape_payload(_get(doc, "shape", "$"), "$.shape")
    return parse_element_payload(_get(doc, "blocks", "$"), shape, "$.blocks")


def _parse_state_doc(doc: dict) -> State:
    _reject_unknown(doc, {"version", "kind", "shape", "densities"}, "$")
    shape = parse_shape_payload(_get(doc, "shape", "$"), "$.shape")
    return parse_state_payload(_get(doc, "densities", "$"), shape, "$.densities")


def _parse_vector_doc(doc: dict) -> ModuleVector:
    _reject_unknown(doc, {"version", "kind", "shape", "coords"}, "$")
    shape = parse_shape_payload(_get(doc, "shape", "$"), "$.shape")
    return parse_vector_payload(_get(doc, "coords", "$"), shape, "$.coords")


def _parse_operator_doc(doc: dict) -> ModuleOperator:
    _reject_unknown(doc, {"version", "kind", "shape", "entries"}, "$")
    shape = parse_shape_payload(_get(doc, "shape", "$"), "$.shape")
    rows = _expect_list(_get(doc, "entries", "$"), "$.entries")
    if not rows:
        raise SchemaError("$.entries", "operator needs at least one row")
    width = None
    entries = []
    for i, row in enumerate(rows):
        row = _expect_list(row, f"$.entries[{i}]")
        if not row:
            raise SchemaError(f"$.entries[{i}]", "operator row is empty")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise SchemaError(
                f"$.entries[{i}]", f"ragged row: expected {width} entries, found {len(row)}"
            )
        entries.append(
            tuple(
                parse_element_payload(e, shape, f"$.entries[{i}][{j}]")
                for j, e in enumerate(row)
            )
        )
    return ModuleOperator(shape, tuple(entries))


def _parse_frame_doc(doc: dict) -> Frame:
    _reject_unknown(doc, {"version", "kind", "shape", "vectors", "spanning"}, "$")
    shape = parse_shape_payload(_get(doc, "shape", "$"), "$.shape")
    spanning = doc.get("spanning", "ambient")
    if spanning not in ("ambient", "range"):
        raise SchemaError("$.spanning", f"expected 'ambient' or 'range', found {spanning!r}")
    raw = _expect_list(_get(doc, "vectors", "$"), "$.vectors")
    if not raw:
        raise SchemaError("$.vectors", "frame needs at least one vector")
    vectors = [
        parse_vector_payload(v, shape, f"$.vectors[{i}]") for i, v in enumerate(raw)
    ]
    dims = {v.dim for v in vectors}
    if len(dims) != 1:
        raise SchemaError("$.vectors", f"mixed module dimensions {sorted(dims)}")
    try:
        return Frame(tuple(vectors), spanning=spanning)
    except DegenerateFrameError as e:
        raise SchemaError("$.vectors", str(e)) from e


def _parse_sample_set_doc(doc: dict) -> SampleSet:
    _reject_unknown(doc, {"version", "kind", "shape", "points", "label"}, "$")
    shape = parse_shape_payload(_get(doc, "shape", "$"), "$.shape")
    label = doc.get("label", "")
    if not isinstance(label, str):
        raise SchemaError("$.label", f"expected a string, found {label!r}")
    raw = _expect_list(_get(doc, "points", "$"), "$.points")
    points = [
        parse_vector_payload(p, shape, f"$.points[{i}]") for i, p in enumerate(raw)
    ]
    dims = {p.dim for p in points}
    if len(dims) > 1:
        raise SchemaError("$.points", f"mixed module dimensions {sorted(dims)}")
    return SampleSet(tuple(points), label=label)


def _parse_seminorm_spec_doc(doc: dict) -> SeminormSpec:
    _reject_unknown(doc, {"version", "kind", "shape", "system", "states"}, "$")
    shape = parse_shape_payload(_get(doc, "shape", "$"), "$.shape")
    raw_sys = _expect_list(_get(doc, "system", "$"), "$.system")
    if not raw_sys:
        raise SchemaError("$.system", "admissible system needs at least one vector")
    vectors = [
        parse_vector_payload(v, shape, f"$.system[{i}]") for i, v in enumerate(raw_sys)
    ]
    dims = {v.dim for v in vectors}
    if len(dims) != 1:
        raise SchemaError("$.system", f"mixed module dimensions {sorted(dims)}")
    try:
        system = AdmissibleSystem(tuple(vectors))
    except ValueError as e:
        raise SchemaError("$.system", str(e)) from e
    raw_states = _expect_list(_get(doc, "states", "$"), "$.states")
    states = tuple(
        parse_state_payload(s, shape, f"$.states[{i}]")
        for i, s in enumerate(raw_states)
    )
    try:
        return SeminormSpec(system, states)
    except ValueError as e:
        raise SchemaError("$.states", str(e)) from e


def _parse_setting_doc(doc: dict) -> TruncatedCSetting:
    _reject_unknown(doc, {"version", "kind", "trunc", "dim"}, "$")
    trunc = _expect_int(_get(doc, "trunc", "$"), "$.trunc")
    dim = _expect_int(_get(doc, "dim", "$"), "$.dim")
    try:
        return build_setting(trunc, dim)
    except ValueError as e:
        raise SchemaError("$.dim", str(e)) from e


_PARSERS = {
    "shape": _parse_shape_doc,
    "element": _parse_element_doc,
    "state": _parse_state_doc,
    "vector": _parse_vector_doc,
    "operator": _parse_operator_doc,
    "frame": _parse_frame_doc,
    "sample_set": _parse_sample_set_doc,
    "seminorm_spec": _parse_seminorm_spec_doc,
    "setting": _parse_setting_doc,
}


def parse(kind: str, data):
    """Parse bytes or text into the typed value for the given kind.

    Rejects wrong versions, mismatched kinds, unknown fields, malformed
    payloads, and invariant violations; every error carries the JSON
    path of the offending field.
    """
    if kind not in _PARSERS:
        raise SchemaError("$", f"unknown entity kind {kind!r}")
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise SchemaError("$", f"not valid JSON: {e}") from e
    _expect_object(doc, "$")
    version = _get(doc, "version", "$")
    if version != 1:
        raise SchemaError("$.version", f"unsupported schema version {version!r}")
    actual = _get(doc, "kind", "$")
    if actual != kind:
        raise SchemaError("$.kind", f"expected kind {kind!r}, found {actual!r}")
    return _PARSERS[kind](doc)
