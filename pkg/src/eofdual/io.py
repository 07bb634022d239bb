"""Canonical JSON serialization for states and observables.

Top-level schema::

    {"kind": "pure" | "density" | "hermitian",
     "dims": {"a": int, "b": int}                       (bipartite)
           | {"d1a": .., "d1b": .., "d2a": .., "d2b": ..}  (four-party),
     "data": nested arrays of [re, im] pairs, row-major, A-major indexing}

Encoding is canonical: fixed key order, floats at 17 significant digits,
so file hashes are stable and encode(decode(file)) is byte-identical for
canonical files.
"""

from __future__ import annotations

import json

import numpy as np

from .states import (
    BipartiteDims,
    DensityMatrix,
    FourPartyDims,
    HermitianObservable,
    PureState,
)


class SchemaError(ValueError):
    """A state file violates the schema; carries the offending JSON path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _fmt(x: float) -> str:
    if not np.isfinite(x):
        raise SchemaError("data", f"non-finite number {x!r}")
    return format(float(x), ".17g")


def _pair(z: complex) -> str:
    return f"[{_fmt(z.real)},{_fmt(z.imag)}]"


def _dims_json(dims) -> str:
    if isinstance(dims, BipartiteDims):
        return f'{{"a":{dims.a},"b":{dims.b}}}'
    return (
        f'{{"d1a":{dims.d1a},"d1b":{dims.d1b},'
        f'"d2a":{dims.d2a},"d2b":{dims.d2b}}}'
    )


def encode_state(obj) -> str:
    """Canonical JSON text (with trailing newline) for a state object."""
    if isinstance(obj, PureState):
        kind = "pure"
        data = ",".join(_pair(z) for z in obj.amplitudes)
        body = f"[{data}]"
    elif isinstance(obj, (DensityMatrix, HermitianObservable)):
        kind = "density" if isinstance(obj, DensityMatrix) else "hermitian"
        rows = (
            "[" + ",".join(_pair(z) for z in row) + "]" for row in obj.matrix
        )
        body = "[" + ",".join(rows) + "]"
    else:
        raise TypeError(f"cannot encode object of type {type(obj).__name__}")
    return f'{{"kind":"{kind}","dims":{_dims_json(obj.dims)},"data":{body}}}\n'


def _parse_dims(node, path: str):
    if not isinstance(node, dict):
        raise SchemaError(path, "dims must be an object")
    if set(node) == {"a", "b"}:
        return BipartiteDims(_int(node["a"], f"{path}.a"), _int(node["b"], f"{path}.b"))
    if set(node) == {"d1a", "d1b", "d2a", "d2b"}:
        return FourPartyDims(
            _int(node["d1a"], f"{path}.d1a"),
            _int(node["d1b"], f"{path}.d1b"),
            _int(node["d2a"], f"{path}.d2a"),
            _int(node["d2b"], f"{path}.d2b"),
        )
    raise SchemaError(path, f"unexpected dims keys {sorted(node)}")


def _int(v, path: str) -> int:
    if not isinstance(v, int) or isinstance(v, bool):
        raise SchemaError(path, f"expected an integer, got {v!r}")
    return v


def _complex(node, path: str) -> complex:
    if (
        not isinstance(node, list)
        or len(node) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in node)
    ):
        raise SchemaError(path, f"expected an [re, im] pair, got {node!r}")
    return complex(node[0], node[1])


def decode_state(text: str):
    """Parse and validate a state file; returns the typed object."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("$", "top level must be an object")
    for key in ("kind", "dims", "data"):
        if key not in doc:
            raise SchemaError("$", f"missing key {key!r}")
    kind = doc["kind"]
    if kind not in ("pure", "density", "hermitian"):
        raise SchemaError("$.kind", f"unknown kind {kind!r}")
    dims = _parse_dims(doc["dims"], "$.dims")
    data = doc["data"]
    if not isinstance(data, list):
        raise SchemaError("$.data", "data must be an array")

    if kind == "pure":
        if not isinstance(dims, BipartiteDims):
            raise SchemaError("$.dims", "pure states need bipartite dims")
        vec = np.array(
            [_complex(v, f"$.data[{i}]") for i, v in enumerate(data)]
        )
        if vec.size != dims.total:
            raise SchemaError("$.data", f"length {vec.size} != dimA*dimB {dims.total}")
        return PureState(dims, vec)

    d = dims.total
    if len(data) != d:
        raise SchemaError("$.data", f"expected {d} rows, got {len(data)}")
    rows = []
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != d:
            raise SchemaError(f"$.data[{i}]", f"expected a row of {d} pairs")
        rows.append([_complex(v, f"$.data[{i}][{j}]") for j, v in enumerate(row)])
    m = np.array(rows)
    if kind == "density":
        return DensityMatrix(dims, m)
    if not isinstance(dims, BipartiteDims):
        raise SchemaError("$.dims", "hermitian observables need bipartite dims")
    return HermitianObservable(dims, m)


def load_state(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return decode_state(fh.read())


def save_state(obj, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(encode_state(obj))
