"""Darboux-dressed soliton solutions of the nonlinear von Neumann equation i drho/dt = [H, f(rho)]."""

from .darboux import DarbouxSolution, build_lax, darboux_sandwich, rho1_closed_form
from .matrix_core import DensityMatrixError, commutator, eig_hermitian, validate_density
from .models import ha_profile, ho_profile, maxwell_check
from .nonlinearity import QUADRATIC, Nonlinearity
from .seeds import build_equispaced_seed, build_hydrogen_seed, build_inhomogeneous_seed
from .verify import TimeGrid, VerificationReport, invariant_suite, nvne_residual_fd, rk4_integrate

__all__ = [
    "DarbouxSolution",
    "DensityMatrixError",
    "Nonlinearity",
    "QUADRATIC",
    "TimeGrid",
    "VerificationReport",
    "build_equispaced_seed",
    "build_hydrogen_seed",
    "build_inhomogeneous_seed",
    "build_lax",
    "commutator",
    "darboux_sandwich",
    "eig_hermitian",
    "ha_profile",
    "ho_profile",
    "invariant_suite",
    "maxwell_check",
    "nvne_residual_fd",
    "rho1_closed_form",
    "rk4_integrate",
    "validate_density",
]
