"""Natural lifts of Riemannian metrics to the tangent bundle."""

from . import base, connection, curvature, kernels, lift, oracle, scalarfn
from .errors import (
    CoeffConstructionError,
    ConfigError,
    DecompositionError,
    DegenerateMetricError,
    DomainError,
    NatLiftError,
    OracleError,
    PlaneError,
    SingularityError,
)

__version__ = "0.1.0"

__all__ = [
    "base", "connection", "curvature", "kernels", "lift", "oracle", "scalarfn",
    "NatLiftError", "DomainError", "CoeffConstructionError", "DegenerateMetricError",
    "SingularityError", "PlaneError", "DecompositionError", "OracleError", "ConfigError",
]
