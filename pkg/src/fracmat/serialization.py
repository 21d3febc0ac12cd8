"""
JSON helpers shared by every serializable value.

Complex scalars travel as {"re": float, "im": float}. Floats are written with
17 significant digits (the CSV reports use the same format), so
load(dump(v)) reproduces every value bit for bit and identical inputs
always produce identical bytes.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterator
from typing import Any

from fracmat.errors import SerializationError


def complex_to_json(z: complex) -> dict[str, float]:
    """Encode a complex scalar; refuses NaN and Inf."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise SerializationError(f"Cannot serialize non-finite value {z!r}")
    # +0.0 for -0.0 keeps byte output independent of how a zero was produced
    return {"re": z.real + 0.0, "im": z.imag + 0.0}


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SerializationError(f"{path}: expected a number, got {type(value).__name__}")
    result = float(value)
    if not math.isfinite(result):
        raise SerializationError(f"{path}: value must be finite")
    return result


def complex_from_json(data: Any, path: str = "value") -> complex:
    """
    Decode a complex scalar.

    Accepts {"re", "im"} objects and, for convenience in hand-written task
    files, bare real numbers.

    Raises:
        SerializationError: With the dotted path of the offending field
    """
    if isinstance(data, dict):
        unknown = set(data) - {"re", "im"}
        if unknown:
            raise SerializationError(f"{path}: unknown keys {sorted(unknown)}")
        if "re" not in data:
            raise SerializationError(f"{path}.re: required")
        return complex(_number(data["re"], f"{path}.re"), _number(data.get("im", 0.0), f"{path}.im"))
    return complex(_number(data, path), 0.0)


def real_from_json(data: Any, path: str = "value") -> float:
    """Decode a finite real number."""
    return _number(data, path)


FLOAT_FORMAT = ".17g"


def format_float(value: float) -> str:
    """17 significant digits, keeping a decimal point or exponent."""
    if not math.isfinite(value):
        raise ValueError(f"Out of range float values are not JSON compliant: {value!r}")
    text = format(value + 0.0, FLOAT_FORMAT)
    if "." not in text and "e" not in text:
        text += ".0"
    return text


class FixedDigitsEncoder(json.JSONEncoder):
    """JSONEncoder writing every float through format_float."""

    def iterencode(self, o: Any, _one_shot: bool = False) -> Iterator[str]:
        indent = self.indent
        if indent is not None and not isinstance(indent, str):
            indent = " " * indent
        encoder = json.encoder.encode_basestring_ascii if self.ensure_ascii else json.encoder.encode_basestring
        return json.encoder._make_iterencode(  # type: ignore[attr-defined,no-any-return]
            {} if self.check_circular else None,
            self.default,
            encoder,
            indent,
            format_float,
            self.key_separator,
            self.item_separator,
            self.sort_keys,
            self.skipkeys,
            _one_shot,
        )


def dumps(payload: Any, indent: int | None = 2) -> str:
    """Deterministic JSON text: sorted keys, 17-digit floats, no NaN, trailing newline."""
    try:
        text = json.dumps(
            payload,
            cls=FixedDigitsEncoder,
            sort_keys=True,
            indent=indent,
            allow_nan=False,
            ensure_ascii=False,
        )
    except ValueError as e:
        raise SerializationError(f"Report contains a non-finite number: {e}") from e
    return text + "\n"


def loads(text: str, origin: str = "document") -> Any:
    """Parse JSON text, converting decode failures to SerializationError."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SerializationError(f"{origin}: invalid JSON ({e.msg} at line {e.lineno})") from e
