"""Exact computation of generators and relations for the odd-prime torsion
of the Brauer group of an elliptic curve over a field with a primitive
q-th root of unity."""

from .config import JobConfig, load_config, load_config_file
from .curves import Curve, Point, division_polynomial, mordell_weil_mod_q, mult_by_q_map
from .engine import (
    KummerPair,
    Presentation,
    Symbol,
    SymbolTensor,
    kummer_delta,
    presentation_coprime,
    presentation_q_divides,
    presentation_split,
    symbol_cocycle_oracle,
)
from .errors import EllBrauerError
from .factor import factor_univariate, set_degree_cap
from .fields import (
    FieldDescriptor,
    FieldElement,
    extend_field,
    is_qth_power,
    make_prime_field,
    make_rationals,
    relative_norm,
    rho_index,
)
from .funcfield import (
    CertifiedFunction,
    CurveFunction,
    Divisor,
    function_divisor,
    function_with_divisor,
    normalize_tangent,
    weil_pairing,
)
from .pipeline import EXAMPLE_CONFIGS, run_job, verify_example
from .report import Report
from .torsion import GaloisAction, TorsionBasis, classify_case, splitting_field_and_action, torsion_basis

__version__ = "0.1.0"

__all__ = [
    "Curve",
    "CurveFunction",
    "CertifiedFunction",
    "Divisor",
    "EXAMPLE_CONFIGS",
    "EllBrauerError",
    "FieldDescriptor",
    "FieldElement",
    "GaloisAction",
    "JobConfig",
    "KummerPair",
    "Point",
    "Presentation",
    "Report",
    "Symbol",
    "SymbolTensor",
    "TorsionBasis",
    "classify_case",
    "division_polynomial",
    "extend_field",
    "factor_univariate",
    "function_divisor",
    "function_with_divisor",
    "is_qth_power",
    "kummer_delta",
    "load_config",
    "load_config_file",
    "make_prime_field",
    "make_rationals",
    "mordell_weil_mod_q",
    "mult_by_q_map",
    "normalize_tangent",
    "presentation_coprime",
    "presentation_q_divides",
    "presentation_split",
    "relative_norm",
    "rho_index",
    "run_job",
    "set_degree_cap",
    "splitting_field_and_action",
    "symbol_cocycle_oracle",
    "torsion_basis",
    "verify_example",
    "weil_pairing",
]
