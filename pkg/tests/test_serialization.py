"""Tests for the shared JSON helpers."""

from __future__ import annotations

import json
import math

import pytest

from fracmat.errors import SerializationError
from fracmat.serialization import complex_from_json, complex_to_json, dumps, loads


class TestComplexJson:
    """Tests for complex scalar encoding."""

    def test_encodes_re_im(self) -> None:
        assert complex_to_json(1.5 - 2j) == {"re": 1.5, "im": -2.0}

    def test_normalizes_negative_zero(self) -> None:
        encoded = complex_to_json(complex(-0.0, -0.0))
        assert math.copysign(1.0, encoded["re"]) == 1.0
        assert math.copysign(1.0, encoded["im"]) == 1.0

    def test_refuses_non_finite(self) -> None:
        with pytest.raises(SerializationError):
            complex_to_json(complex(math.inf, 0.0))

    def test_decodes_object_and_bare_number(self) -> None:
        assert complex_from_json({"re": 1.0, "im": 2.0}) == 1 + 2j
        assert complex_from_json({"re": 3}) == 3 + 0j
        assert complex_from_json(4) == 4 + 0j

    @pytest.mark.parametrize(
        ("data", "message"),
        [
            ({"im": 1.0}, r"order\.re: required"),
            ({"re": 1.0, "phase": 0.0}, "unknown keys"),
            (True, "expected a number"),
            ("1.0", "expected a number"),
        ],
    )
    def test_decode_errors_carry_path(self, data: object, message: str) -> None:
        with pytest.raises(SerializationError, match=message):
            complex_from_json(data, "order")


class TestDocuments:
    """Tests for whole-document encoding."""

    def test_dumps_is_sorted_with_trailing_newline(self) -> None:
        text = dumps({"b": 1, "a": [0.1, 2]})
        assert text.endswith("\n")
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"a": [0.1, 2], "b": 1}

    def test_dumps_writes_seventeen_digits(self) -> None:
        assert '"x": 0.10000000000000001' in dumps({"x": 0.1})
        assert '"x": 2.0' in dumps({"x": 2.0})
        assert '"x": 0.5' in dumps({"x": 0.5})
        assert json.loads(dumps({"x": 0.1 + 0.2}))["x"] == 0.1 + 0.2

    def test_dumps_normalizes_negative_zero(self) -> None:
        assert '"x": 0.0' in dumps({"x": -0.0})

    def test_dumps_refuses_nan(self) -> None:
        with pytest.raises(SerializationError, match="non-finite"):
            dumps({"x": math.nan})

    def test_loads_reports_origin(self) -> None:
        with pytest.raises(SerializationError, match="task.json: invalid JSON"):
            loads("{not json", "task.json")
