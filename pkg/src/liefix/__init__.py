"""liefix: exact fixed-point-free automorphism analysis for Lie algebras.

The package works over cyclotomic extensions of the rationals with exact
arithmetic throughout; every positive answer is returned together with a
certificate that is re-verified before it is reported.
"""

from .cyclofield import (
    CycPolynomial,
    CycScalar,
    Rational,
    cyclotomic_polynomial,
    format_scalar,
    lift_conductor,
    numeric_eval,
    parse_scalar,
    scalar,
    zeta,
)

__all__ = [
    "CycPolynomial",
    "CycScalar",
    "Rational",
    "cyclotomic_polynomial",
    "format_scalar",
    "lift_conductor",
    "numeric_eval",
    "parse_scalar",
    "scalar",
    "zeta",
]

__version__ = "0.1.0"
