"""Central-spin decoherence in a self-interacting spin environment.

Exact thermal-ensemble wavefunction dynamics and a mean-field memory-kernel
master equation for the same model, built for side-by-side comparison of
entropy and spin observables from a single configuration.
"""
from .bath import (BathEnsemble, boltzmann_weights, build_bath_ensemble,
                   canonical_sigma_x_stats, debye_frequencies, lowest_eigenpairs)
from .config import ConfigError, RunConfig, parse_config
from .exact import (ReducedTrajectory, free_spin_trajectory,
                    propagate_schrodinger, thermal_reduced_density)
from .kernel import (FiniteBasisOperators, KernelParams,
                     assemble_finite_hamiltonian, brute_force_moments,
                     canonical_bath_density, ellipse_semiaxes, memory_function,
                     moments_closed_form)
from .mft import (AuxGrid, MftState, build_grid, dvr_derivative, mft_rhs,
                  solve_mft, solve_mft_quadrature)
from .observables import DensityMatrix2, entropy, spin_components
from .spins import (ModelParams, PureState, apply_bath_hamiltonian,
                    apply_hamiltonian, apply_sigma, partial_trace_system)

__version__ = "0.1.0"

__all__ = [
    "AuxGrid", "BathEnsemble", "ConfigError", "DensityMatrix2",
    "FiniteBasisOperators", "KernelParams", "MftState", "ModelParams",
    "PureState", "ReducedTrajectory", "RunConfig",
    "apply_bath_hamiltonian", "apply_hamiltonian", "apply_sigma",
    "assemble_finite_hamiltonian", "boltzmann_weights", "brute_force_moments",
    "build_bath_ensemble", "build_grid", "canonical_bath_density",
    "canonical_sigma_x_stats", "debye_frequencies", "dvr_derivative",
    "ellipse_semiaxes", "entropy", "free_spin_trajectory", "lowest_eigenpairs",
    "memory_function", "mft_rhs", "moments_closed_form", "parse_config",
    "partial_trace_system", "propagate_schrodinger", "solve_mft",
    "solve_mft_quadrature", "spin_components", "thermal_reduced_density",
]
