"""Exponential-form Liouville-Green expansions with computable error bounds."""
from .algebra import BigRational, Jet, JetDerivation, PolyDerivation, RationalPoly, SymbolicDerivation
from .bessel import (
    BesselModel,
    bound_I,
    bound_K,
    build_bessel_model,
    eta_exact,
    eval_I_expansion,
    eval_K_expansion,
    omega_diag,
    phi_diag,
    reproduce_table,
    xi_of_z,
)
from .bounds import (
    BoundInputs,
    BoundReport,
    BoundUnavailable,
    bound_delta_exponent,
    bound_eta_derivative,
    bound_kappa,
    bound_thm1,
    bound_thm2,
    bound_thm3,
)
from .coefficients import (
    CoefficientTable,
    build_coefficients,
    build_coefficients_general,
    chi_decomposition,
    even_E_via_abel,
    verify_chi_identity,
)
from .nonhomog import NonhomogBoundInputs, NonhomogModel, bound_thm4, build_G_sequence, eval_G_expansion
from .paths import Arc, PathSpec, certify_progressive, integrate_abs, integrate_abs_poly_exact

__version__ = "0.1.0"
