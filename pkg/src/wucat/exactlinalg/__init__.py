"""Exact linear algebra substrate: fields, sparse matrices, graded complexes."""

from .field import QQ, GF32003, PrimeField, RationalField, field_by_name
from .sparse import SparseMatrix, Subspace, kernel_basis, rank, solve
from .complexes import (
    ChainMap,
    ComplexError,
    GradedComplex,
    QuasiIsoReport,
    cone_complex,
    ground_field_complex,
    is_quasi_iso,
)
from .serial import (
    complex_from_text,
    complex_to_text,
    matrix_from_text,
    matrix_to_text,
)

__all__ = [
    "QQ", "GF32003", "PrimeField", "RationalField", "field_by_name",
    "SparseMatrix", "Subspace", "kernel_basis", "rank", "solve",
    "ChainMap", "ComplexError", "GradedComplex", "QuasiIsoReport",
    "cone_complex", "ground_field_complex", "is_quasi_iso",
    "complex_from_text", "complex_to_text", "matrix_from_text", "matrix_to_text",
]
