"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: input problems (domain, structure,
configuration, geometry, degeneracy) exit 2, numeric failures exit 3 and
internal invariant breaches exit 4.
"""


class HitchinKitError(Exception):
    """Base class for all toolkit errors."""


class DomainError(HitchinKitError, ValueError):
    """An argument lies outside the domain of an operation."""


class StructureError(HitchinKitError, ValueError):
    """Input data violates a structural condition (skewness, trace, blocks...)."""


class ConfigurationError(HitchinKitError, ValueError):
    """Required auxiliary data (structure, bounds, ...) was not supplied."""


class GeometryError(HitchinKitError, ValueError):
    """Chart data does not extend to the declared global object."""


class DegeneracyError(HitchinKitError, ValueError):
    """A non-degeneracy hypothesis (distinct leading eigenvalues...) fails."""


class NumericError(HitchinKitError, ArithmeticError):
    """A numerical procedure failed to converge.

    ``residual`` carries the best residual reached.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SolverError(NumericError):
    """The level-set solver exhausted its iteration budget."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message, residual)
        self.iterations = iterations


class InvariantError(HitchinKitError, AssertionError):
    """An internal invariant was breached; indicates a defect, not bad input."""
