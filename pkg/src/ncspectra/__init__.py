"""Quasi-exact spectra of a 2D Coulomb + linear + harmonic potential with
first-order noncommutative corrections, plus an independent finite-difference
oracle."""

from .model import (
    ATermMode,
    ClosedFormMode,
    DivergentIntegralError,
    InvalidParameters,
    NCConfig,
    NCSpectraError,
    NoTerminationRoot,
    PotentialParams,
    QuadratureError,
    QuantumState,
    SpinBranch,
    ValidationReport,
    Variant,
    validate_params,
)
from .oracle import GridSpec, OracleResult, expectation_numeric, radial_eigensolve
from .perturbation import (
    NCEnergyLevel,
    branch_splitting,
    deform_potential,
    deform_radius,
    first_order_shift,
    total_levels,
    zeroth_energy,
)
from .series import SeriesSolution, build_recurrence, solve_quasi_exact, termination_constraints
from .special import gaussian_linear_moment, integrate_semi_infinite, upper_incomplete_gamma_int

__version__ = "0.1.0"

__all__ = [
    "ATermMode",
    "ClosedFormMode",
    "DivergentIntegralError",
    "GridSpec",
    "InvalidParameters",
    "NCConfig",
    "NCEnergyLevel",
    "NCSpectraError",
    "NoTerminationRoot",
    "OracleResult",
    "PotentialParams",
    "QuadratureError",
    "QuantumState",
    "SeriesSolution",
    "SpinBranch",
    "ValidationReport",
    "Variant",
    "branch_splitting",
    "build_recurrence",
    "deform_potential",
    "deform_radius",
    "expectation_numeric",
    "first_order_shift",
    "gaussian_linear_moment",
    "integrate_semi_infinite",
    "radial_eigensolve",
    "solve_quasi_exact",
    "termination_constraints",
    "total_levels",
    "upper_incomplete_gamma_int",
    "validate_params",
    "zeroth_energy",
]
