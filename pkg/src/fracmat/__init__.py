"""
fracmat - Riemann-Liouville differintegrals of complex and matrix order.

Closed forms on the power-log basis c·(x-a)^p·ln^m(x-a), lifted to matrix
order through spectral projectors or Jordan chains, and checked against
Grünwald-Letnikov and quadrature oracles.
"""

from __future__ import annotations

__version__ = "0.1.0"
__all__ = [
    "Expression",
    "__version__",
    "apply_scalar",
    "build_operator",
    "differint_expr",
]

from fracmat.operators import apply_scalar, build_operator
from fracmat.symbolic import Expression, differint_expr
