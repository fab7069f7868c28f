"""Spectral and transport analysis of a PT-symmetric tight-binding chain
with balanced gain and loss at mirror sites."""

__version__ = "0.1.0"

from .chain import ChainConfig, build_hamiltonian, is_pt_symmetric, pt_exchange
from .classify import (SpecialStateCensus, classify_eigenpair,
                       count_special_states, opaque_thetas,
                       special_state_census, transparent_thetas)
from .errors import (ClassificationError, ConfigurationError, DenseSolverError,
                     DomainError, OneSidedCouplingWarning, StepSizeError,
                     TransportError)
from .exceptional import (EPRecord, asymptotic_imaginary_energies,
                          asymptotic_real_thetas, ep_perturbation_energy,
                          ep_perturbation_theta, estimate_ep_order,
                          find_exceptional_points)
from .spectral import (EigenPair, SolverOptions, Spectrum, dense_eigensolve,
                       eigenvector_analytic, secular_dtheta, secular_residual,
                       solve_spectrum, theta_from_energy)
from .transport import (FluxProfile, TransportReport, WaveState,
                        build_transport_report, continuity_residual,
                        eigenstate_transport_coefficient, evolve, local_flux,
                        transport_coefficient, xi_asymptotic, xi_perturbative,
                        xi_time_independence_check)
from .tridiag import (GeneralTridiag, build_general_matrix, general_eigenvalue,
                      general_eigenvector, general_secular_residual)

__all__ = [
    "__version__",
    "ChainConfig", "build_hamiltonian", "pt_exchange", "is_pt_symmetric",
    "SolverOptions", "EigenPair", "Spectrum", "solve_spectrum",
    "secular_residual", "secular_dtheta", "eigenvector_analytic",
    "dense_eigensolve", "theta_from_energy",
    "GeneralTridiag", "build_general_matrix", "general_secular_residual",
    "general_eigenvalue", "general_eigenvector",
    "SpecialStateCensus", "special_state_census", "opaque_thetas",
    "transparent_thetas", "count_special_states", "classify_eigenpair",
    "WaveState", "FluxProfile", "TransportReport", "local_flux",
    "continuity_residual", "transport_coefficient",
    "eigenstate_transport_coefficient", "build_transport_report",
    "xi_perturbative", "xi_asymptotic", "evolve", "xi_time_independence_check",
    "EPRecord", "find_exceptional_points", "estimate_ep_order",
    "ep_perturbation_theta", "ep_perturbation_energy",
    "asymptotic_imaginary_energies", "asymptotic_real_thetas",
    "ConfigurationError", "DomainError", "ClassificationError",
    "DenseSolverError", "StepSizeError", "TransportError",
    "OneSidedCouplingWarning",
]
