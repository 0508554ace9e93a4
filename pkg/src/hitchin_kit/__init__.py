"""hitchin-kit: exact and numeric computations with Higgs bundle data.

Modules: ``exactalg`` (Gaussian-rational polynomials and matrices),
``formulas``, ``higgs``, ``spectral``, ``parabolic``, ``wild``, ``quiver``,
``branes`` and the ``cli`` front end.
"""

from .errors import (ConfigurationError, DegeneracyError, DomainError, GeometryError,
                     HitchinKitError, InvariantError, NumericError, SolverError, StructureError)
from .tracking import BACKEND as TRACKING_BACKEND

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "DegeneracyError", "DomainError", "GeometryError", "HitchinKitError",
    "InvariantError", "NumericError", "SolverError", "StructureError", "TRACKING_BACKEND",
    "__version__",
]
