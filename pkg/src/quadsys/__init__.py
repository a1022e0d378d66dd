"""Closed-form solution families of systems of general quadratic functional equations in C^n.

The quadratic form is A(f, g) = a f^2 + 2 alpha f g + b g^2 + 2 beta f + 2 gamma g + C.
Submodules: coefficients, expr, periodic, builder, verifier, nevanlinna, cli.
"""

__version__ = "0.1.0"

from .coefficients import (  # noqa: E402
    CoefficientSet,
    SignBranch,
    check_admissibility,
    compute_corollary_constants,
    compute_R_constants,
    derive_constants,
)

__all__ = [
    "CoefficientSet",
    "SignBranch",
    "check_admissibility",
    "compute_corollary_constants",
    "compute_R_constants",
    "derive_constants",
    "__version__",
]
