"""Exception types shared across the package."""


class DiscriminationError(Exception):
    """Base class for all package-specific errors."""


class ConvergenceError(DiscriminationError):
    """An iterative routine hit its iteration cap without converging."""


class UnsupportedInstanceError(DiscriminationError):
    """No closed-form solver exists for this instance.

    Raised for ensembles of three or more states in dimension three or
    higher. Candidate solutions for such instances can still be checked
    with the certificate module (``qdiscrim.certify``).
    """


class InfeasibleDualError(DiscriminationError):
    """A candidate symmetry operator violates dual feasibility."""
