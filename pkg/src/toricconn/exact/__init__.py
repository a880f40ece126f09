"""Exact kernels: rationals, integer lattices, Laurent polynomials, log forms."""

from .forms import LogOneForm, LogTwoForm, exterior_derivative, total_derivative, wedge
from .lattice import int_det, smith_normal_form, solve_integer, unimodular_inverse
from .laurent import LaurentMatrix, LaurentPoly, laurent_substitute
from .rational import format_rational, parse_rational

__all__ = [
    "LaurentMatrix",
    "LaurentPoly",
    "LogOneForm",
    "LogTwoForm",
    "exterior_derivative",
    "format_rational",
    "int_det",
    "laurent_substitute",
    "parse_rational",
    "smith_normal_form",
    "solve_integer",
    "total_derivative",
    "unimodular_inverse",
    "wedge",
]
