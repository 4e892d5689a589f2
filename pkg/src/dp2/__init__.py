"""Divided power algebras of symplectic spaces in characteristic 2.

The complex ``(DV, d)`` with ``d`` multiplication by ``omega``, its cohomology
over GF(2^e), and machine checks of its structure as a symplectic group module.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .complexes import CohomologyReport, cohomology, expected_dim
from .dpalgebra import AlgebraElement, differential, omega, symplectic_basis
from .field import FieldElement, FieldSpec, gf, parse_field
from .linalg import BinMatrix, Subspace

__all__ = [
    "AlgebraElement",
    "BinMatrix",
    "CohomologyReport",
    "FieldElement",
    "FieldSpec",
    "Subspace",
    "cohomology",
    "differential",
    "expected_dim",
    "gf",
    "omega",
    "parse_field",
    "symplectic_basis",
]
