"""Exact exponent bookkeeping for bilinear decoupling, plus a Cantor-set lab."""

from .errors import InvariantViolation
from .exact_lp import LinearProgram, as_rational, format_rational, solve_lp
from .exponent_system import Regime, build_system, optimal_exponent, verify_paper_certificate
from .exponent_formulas import c_exponent, gamma8, gamma_dec, gamma_p, phi
from .cantor_lab import CantorSpec, build_cantor, energy, exp_sum_norm

__version__ = "0.1.0"
