"""magflow: simulation and verification toolkit for magnetic Euler-Arnold
equations on the circle, the sphere, and the flat 3-torus."""

from .core import (
    FlowSystem,
    energy,
    extend_central,
    extended_state,
    momentum_system,
    pairing_identity_residual,
    rhs_eulerian,
    rhs_momentum,
    split_extended_state,
)
from .errors import (
    ConfigError,
    ContractViolationError,
    DivergenceError,
    MagflowError,
    NonInvertibleModeError,
    SingularInertiaError,
    UnsupportedSchemeError,
)
from .integrators import (
    DiagnosticsRecord,
    IntegratorConfig,
    evolve,
    if_rk4_step,
    rk4_step,
)

__version__ = "1.0.0"

__all__ = [
    "FlowSystem",
    "energy",
    "extend_central",
    "extended_state",
    "momentum_system",
    "pairing_identity_residual",
    "rhs_eulerian",
    "rhs_momentum",
    "split_extended_state",
    "IntegratorConfig",
    "DiagnosticsRecord",
    "evolve",
    "rk4_step",
    "if_rk4_step",
    "MagflowError",
    "ConfigError",
    "ContractViolationError",
    "DivergenceError",
    "NonInvertibleModeError",
    "SingularInertiaError",
    "UnsupportedSchemeError",
    "__version__",
]
