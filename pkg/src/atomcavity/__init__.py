"""Strong coupling of a tweezer atom array to a high-finesse cavity.

Analytic vacuum-Rabi response, an exact master-equation oracle, spatial and
thermal coupling maps, Monte Carlo loading/detection statistics, and the
fitting toolkit that ties simulated or measured spectra back to parameters.
"""

from .errors import (AtomCavityError, DegenerateFitError,
                     DegenerateSteadyStateError, DimensionCapError,
                     SingularityError, SteadyStateConvergenceError,
                     TableFormatError)
from .fitting import (BimodalFit, FitResult, ModelSpec, fit_bimodal,
                      fit_exponential, fit_gaussian_profile,
                      fit_least_squares, fit_rabi, fit_sqrt_scaling, fit_vrs)
from .geometry import (ArrayLayout, ModeGeometry, beat_period_um,
                       coupling_spread, envelope, local_coupling,
                       microscopic_coupling, site_couplings)
from .lindblad import (Liouvillian, SystemSpec, build_hamiltonian,
                       build_liouvillian, build_operators, evolve,
                       expectation, oracle_transmission, steady_field,
                       steady_state, vacuum_state)
from .montecarlo import (DetectionModel, GofResult, LightShiftModel,
                         LoadingModel, SurvivalModel, atom_number_error,
                         classify, detection_error, occupancy_gof,
                         optimal_threshold, rng_from_seed, simulate_counts,
                         simulate_loading, simulate_survival)
from .qed import (CavityParams, CollectiveCoupling, Detunings, SpectrumScan,
                  collective_coupling, cooperativity, spectrum,
                  splitting_peaks, steady_state_field, transmission)
from .thermal import (PhononDistribution, TrapParams, convergence_report,
                      mean_phonon, phonon_density, probe_node_offset_nm,
                      thermal_coupling)

__version__ = "0.1.0"

__all__ = [
    "AtomCavityError", "DegenerateFitError", "DegenerateSteadyStateError",
    "DimensionCapError", "SingularityError", "SteadyStateConvergenceError",
    "TableFormatError",
    "BimodalFit", "FitResult", "ModelSpec", "fit_bimodal", "fit_exponential",
    "fit_gaussian_profile", "fit_least_squares", "fit_rabi",
    "fit_sqrt_scaling", "fit_vrs",
    "ArrayLayout", "ModeGeometry", "beat_period_um", "coupling_spread",
    "envelope", "local_coupling", "microscopic_coupling", "site_couplings",
    "Liouvillian", "SystemSpec", "build_hamiltonian", "build_liouvillian",
    "build_operators", "evolve", "expectation", "oracle_transmission",
    "steady_field", "steady_state", "vacuum_state",
    "DetectionModel", "GofResult", "LightShiftModel", "LoadingModel",
    "SurvivalModel", "atom_number_error", "classify", "detection_error",
    "occupancy_gof", "optimal_threshold", "rng_from_seed", "simulate_counts",
    "simulate_loading", "simulate_survival",
    "CavityParams", "CollectiveCoupling", "Detunings", "SpectrumScan",
    "collective_coupling", "cooperativity", "spectrum", "splitting_peaks",
    "steady_state_field", "transmission",
    "PhononDistribution", "TrapParams", "convergence_report", "mean_phonon",
    "phonon_density", "probe_node_offset_nm", "thermal_coupling",
    "__version__",
]
