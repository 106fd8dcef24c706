"""Reconstruction of a time-independent source in (sub)diffusion problems.

Given an initial state ``phi`` and a terminal observation ``psi`` the package
recovers the temperature ``u`` and the source ``f`` through eigenfunction
series, and checks the result with independent forward solvers.
"""

from .forward import (
    SpaceGrid,
    TimeGrid,
    VerificationReport,
    forward_fd_heat,
    forward_l1_subdiffusion,
    forward_modal,
    involution_matrix,
    verify_reconstruction,
)
from .inverse import (
    DegenerateDenominator,
    InverseSolution,
    ProblemData,
    SobolevDiagnostic,
    evaluate_f,
    evaluate_u,
    hypothesis_check,
    solve,
    solve_heat,
)
from .mittag_leffler import decay_factor, ml_neg
from .operators import (
    EigenSystem,
    UnsupportedOperatorError,
    analyze,
    apply_operator,
    dirichlet_laplacian,
    harmonic_oscillator_1d,
    inner_product,
    involution,
    l2_norm,
    make_operator,
    synthesize,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateDenominator",
    "EigenSystem",
    "InverseSolution",
    "ProblemData",
    "SobolevDiagnostic",
    "SpaceGrid",
    "TimeGrid",
    "UnsupportedOperatorError",
    "VerificationReport",
    "analyze",
    "apply_operator",
    "decay_factor",
    "dirichlet_laplacian",
    "evaluate_f",
    "evaluate_u",
    "forward_fd_heat",
    "forward_l1_subdiffusion",
    "forward_modal",
    "harmonic_oscillator_1d",
    "hypothesis_check",
    "inner_product",
    "involution",
    "involution_matrix",
    "l2_norm",
    "make_operator",
    "ml_neg",
    "solve",
    "solve_heat",
    "synthesize",
    "verify_reconstruction",
]
