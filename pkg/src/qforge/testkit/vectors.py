"""
Test-vector model and JSON format.

A vector file is a JSON array of ``{"name", "input", "expected_output"}``
objects. Classical cases use lists of 0/1 integers indexed by qubit;
quantum cases use lists of ``[re, im]`` amplitude pairs.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import jsonschema
import numpy as np

Bits = list[int]
Payload = Union[Bits, np.ndarray]

_BITS = {"type": "array", "items": {"enum": [0, 1]}, "minItems": 1}
_AMPS = {
    "type": "array",
    "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    "minItems": 2,
}
VECTORS_SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "properties": {
            "name": {"type": "string"},
            "input": {"anyOf": [_BITS, _AMPS]},
            "expected_output": {"anyOf": [_BITS, _AMPS]},
        },
        "required": ["name", "input", "expected_output"],
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(VECTORS_SCHEMA)
NORM_WARN = 1e-2


class VectorFormatError(ValueError):
    """A vector file is not valid JSON or does not match the schema."""


@dataclass
class TestCase:
    name: str
    input: Payload
    expected_output: Payload

    __test__ = False  # not a pytest class

    @property
    def classical(self) -> bool:
        return not isinstance(self.input, np.ndarray)


def _normalize(vec: np.ndarray, name: str) -> np.ndarray:
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise VectorFormatError(f"{name}: zero state vector")
    if abs(norm - 1) > NORM_WARN:
        warnings.warn(f"{name}: state vector norm {norm:.4f} renormalized", stacklevel=3)
    return vec / norm


def _decode(value: list, name: str) -> Payload:
    if value and isinstance(value[0], list):
        vec = np.array([complex(re, im) for re, im in value], dtype=complex)
        if vec.size & (vec.size - 1):
            raise VectorFormatError(f"{name}: state vector length {vec.size} is not a power of two")
        return _normalize(vec, name)
    return [int(b) for b in value]


def _encode(value: Payload) -> list:
    if isinstance(value, np.ndarray):
        return [[float(a.real), float(a.imag)] for a in value]
    return [int(b) for b in value]


def cases_from_json(data) -> list[TestCase]:
    errors = sorted(_VALIDATOR.iter_errors(data), key=lambda e: [str(p) for p in e.absolute_path])
    if errors:
        exc = errors[0]
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise VectorFormatError(f"schema violation at {where}: {exc.message}") from None
    cases = []
    for entry in data:
        name = entry["name"]
        inp = _decode(entry["input"], f"{name} input")
        out = _decode(entry["expected_output"], f"{name} expected_output")
        if isinstance(inp, np.ndarray) != isinstance(out, np.ndarray):
            raise VectorFormatError(f"{name}: input and expected_output must be the same kind")
        cases.append(TestCase(name, inp, out))
    return cases


def loads(text: str) -> list[TestCase]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise VectorFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return cases_from_json(data)


def load(path: str | Path) -> list[TestCase]:
    return loads(Path(path).read_text(encoding="utf-8"))


def to_json(cases: Sequence[TestCase]) -> list[dict]:
    return [
        {"name": c.name, "input": _encode(c.input), "expected_output": _encode(c.expected_output)}
        for c in cases
    ]


def dumps(cases: Sequence[TestCase], one_per_line: bool = True) -> str:
    """Serialize cases; by default each case sits on its own line."""
    items = to_json(cases)
    if not one_per_line or not items:
        return json.dumps(items)
    return "[\n  " + ",\n  ".join(json.dumps(item) for item in items) + "\n]"


def dump(cases: Sequence[TestCase], path: str | Path) -> None:
    Path(path).write_text(dumps(cases) + "\n", encoding="utf-8")
