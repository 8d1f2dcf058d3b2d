"""Sieves over rings of integers of Q and quadratic fields, and their shift spaces."""

from .rings import (
    AlgebraHom,
    AlgebraicInt,
    EtaleAlgebra,
    FieldSpec,
    Modulus,
    PrimeIdeal,
    QQ,
    algebra_homs,
    algebra_isomorphisms,
    fundamental_unit,
    ideal_power,
    make_algebra,
    parse_algebra,
    parse_element,
    reduce_mod,
    split_prime,
    units_up_to,
)

__all__ = [
    "AlgebraHom",
    "AlgebraicInt",
    "EtaleAlgebra",
    "FieldSpec",
    "Modulus",
    "PrimeIdeal",
    "QQ",
    "algebra_homs",
    "algebra_isomorphisms",
    "fundamental_unit",
    "ideal_power",
    "make_algebra",
    "parse_algebra",
    "parse_element",
    "reduce_mod",
    "split_prime",
    "units_up_to",
]

__version__ = "0.1.0"
