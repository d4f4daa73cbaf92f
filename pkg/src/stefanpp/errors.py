"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: validation problems exit 2, numerical
failures exit 3, oracle violations exit 4.
"""


class StefanPPError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(StefanPPError):
    """Invalid input: parameters, profiles, configs, or preconditions."""


class RegimeError(ValidationError):
    """Operation invoked outside the parameter regime it is defined for."""


class GeometryError(ValidationError):
    """Inconsistent geometry: degenerate span, point outside a grid window."""


class BracketError(ValidationError):
    """Bisection bracket whose two endpoints do not straddle the threshold."""


class SolverError(StefanPPError):
    """Numerical failure: divergence, invariant breach after all retries."""


class FrontBreachError(SolverError):
    """A front reached the guard band of the truncated prey domain.

    Carries domain-enlargement advice: rerun with a larger half-width L.
    """


class OracleError(StefanPPError):
    """An independent oracle (barrier domination, cross-check) was violated."""
