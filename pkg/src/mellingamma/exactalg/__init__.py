"""Exact arithmetic over Q: scalars, matrices, polynomials, Groebner bases."""
from mellingamma.exactalg.groebner import (
    GroebnerBasis,
    GroebnerBudgetExceeded,
    buchberger,
    normal_form,
    standard_monomials,
)
from mellingamma.exactalg.matrix import (
    QMatrix,
    SingularMatrixError,
    det,
    inverse,
    kernel,
    rank,
    rref,
    solve,
    span_basis,
)
from mellingamma.exactalg.poly import Polynomial, grevlex_key
from mellingamma.exactalg.rational import (
    Rational,
    RationalParseError,
    floor_split,
    format_rational,
    parse_rational,
)

__all__ = [
    "GroebnerBasis",
    "GroebnerBudgetExceeded",
    "Polynomial",
    "QMatrix",
    "Rational",
    "RationalParseError",
    "SingularMatrixError",
    "buchberger",
    "det",
    "floor_split",
    "format_rational",
    "grevlex_key",
    "inverse",
    "kernel",
    "normal_form",
    "parse_rational",
    "rank",
    "rref",
    "solve",
    "span_basis",
    "standard_monomials",
]
