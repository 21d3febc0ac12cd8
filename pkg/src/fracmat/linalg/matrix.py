"""Square complex matrices: validation, norms and JSON form."""

from __future__ import annotations

from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from fracmat.config import get_settings
from fracmat.errors import MatrixShapeError, SerializationError
from fracmat.serialization import complex_from_json, complex_to_json

CMatrix = NDArray[np.complex128]


def as_cmatrix(values: ArrayLike, max_dimension: int | None = None) -> CMatrix:
    """
    Copy values into a square, finite complex128 array.

    Raises:
        MatrixShapeError: If the input is not square, is empty, has non-finite
            entries or exceeds the configured dimension cap
    """
    try:
        matrix = np.array(values, dtype=complex)
    except (TypeError, ValueError) as e:
        raise MatrixShapeError(f"Matrix entries must be numbers: {e}") from e
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise MatrixShapeError(f"Matrix must be square, got shape {matrix.shape}")
    n = matrix.shape[0]
    if n == 0:
        raise MatrixShapeError("Matrix must have at least one row")
    cap = max_dimension if max_dimension is not None else get_settings().linalg.max_dimension
    if n > cap:
        raise MatrixShapeError(f"Matrix dimension {n} exceeds the supported maximum {cap}")
    if not np.all(np.isfinite(matrix)):
        raise MatrixShapeError("Matrix entries must be finite")
    return matrix


def frobenius(matrix: NDArray[Any]) -> float:
    return float(np.linalg.norm(matrix, "fro"))


def is_real(matrix: CMatrix) -> bool:
    return bool(np.all(matrix.imag == 0))


def is_real_symmetric(matrix: CMatrix, rel_tol: float) -> bool:
    """Real with ‖A - Aᵀ‖_F <= rel_tol·max(1, ‖A‖_F)."""
    if not is_real(matrix):
        return False
    return frobenius(matrix - matrix.T) <= rel_tol * max(1.0, frobenius(matrix))


def matrix_to_json(matrix: CMatrix) -> dict[str, Any]:
    """{n, entries: [[{re, im}, ...], ...]} in row-major order."""
    n = matrix.shape[0]
    return {"n": n, "entries": [[complex_to_json(matrix[r, c]) for c in range(n)] for r in range(n)]}


def matrix_from_json(data: Any, path: str = "matrix") -> CMatrix:
    """
    Decode a matrix object; a bare list of rows is also accepted.

    Raises:
        SerializationError: With the dotted path of the offending field
        MatrixShapeError: If the decoded matrix is not square
    """
    if isinstance(data, dict):
        unknown = set(data) - {"n", "entries"}
        if unknown:
            raise SerializationError(f"{path}: unknown keys {sorted(unknown)}")
        rows = data.get("entries")
        declared = data.get("n")
        entries_path = f"{path}.entries"
    else:
        rows = data
        declared = None
        entries_path = path

    if not isinstance(rows, list) or not rows:
        raise SerializationError(f"{entries_path}: expected a non-empty list of rows")
    decoded = []
    for r, row in enumerate(rows):
        if not isinstance(row, list):
            raise SerializationError(f"{entries_path}[{r}]: expected a list")
        decoded.append([complex_from_json(v, f"{entries_path}[{r}][{c}]") for c, v in enumerate(row)])

    if declared is not None and (
        isinstance(declared, bool) or not isinstance(declared, int) or declared != len(decoded)
    ):
        raise SerializationError(f"{path}.n: does not match the number of rows ({len(decoded)})")
    if any(len(row) != len(decoded) for row in decoded):
        raise MatrixShapeError(f"{entries_path}: matrix must be square")
    return as_cmatrix(decoded)
