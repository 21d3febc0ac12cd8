"""
Small dense complex linear algebra: eigenvalues, classification, spectral
projectors, Jordan form and matrix functions.
"""

from __future__ import annotations

from fracmat.linalg.eigen import (
    Classification,
    EigenCluster,
    EigenDecomposition,
    MatrixClass,
    classify,
    eigen_decompose,
    hessenberg,
    qr_eigenvalues,
)
from fracmat.linalg.functions import FunctionWithDerivatives, matrix_function
from fracmat.linalg.jordan import JordanData, JordanSegment, jordan_decompose
from fracmat.linalg.matrix import (
    CMatrix,
    as_cmatrix,
    frobenius,
    is_real_symmetric,
    matrix_from_json,
    matrix_to_json,
)
from fracmat.linalg.spectral import SpectralData, frobenius_covariants, spectral_projectors

__all__ = [
    "CMatrix",
    "Classification",
    "EigenCluster",
    "EigenDecomposition",
    "FunctionWithDerivatives",
    "JordanData",
    "JordanSegment",
    "MatrixClass",
    "SpectralData",
    "as_cmatrix",
    "classify",
    "eigen_decompose",
    "frobenius",
    "frobenius_covariants",
    "hessenberg",
    "is_real_symmetric",
    "jordan_decompose",
    "matrix_from_json",
    "matrix_function",
    "matrix_to_json",
    "qr_eigenvalues",
    "spectral_projectors",
]
