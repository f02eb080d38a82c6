"""Quantum integers and binomials over Z[v, v^-1] and their images in coefficient fields."""

from .fields import (
    CyclotomicField,
    Field,
    FieldContext,
    PrimeField,
    Rationals,
    UnsupportedContext,
    evaluate,
    evaluate_binomial,
    make_context,
    parse_field,
    quantum_characteristic,
)
from .laurent import LaurentPoly, binomial_by_product, quantum_binomial, quantum_integer

__all__ = [
    "CyclotomicField",
    "Field",
    "FieldContext",
    "LaurentPoly",
    "PrimeField",
    "Rationals",
    "UnsupportedContext",
    "binomial_by_product",
    "evaluate",
    "evaluate_binomial",
    "make_context",
    "parse_field",
    "quantum_binomial",
    "quantum_characteristic",
    "quantum_integer",
]
