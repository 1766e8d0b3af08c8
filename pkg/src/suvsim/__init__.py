"""Stochastic state-reduction simulator for two-state superpositions.

Simulates the collapse of a qubit superposition driven by a mean-reverting
colored field, alongside its analytic limiting cases: the white-noise
diffusion it converges to for short correlation times, the jump-like
stochastic Schrodinger unraveling, the static-field (frozen) limit, and
the dephasing master equation obeyed by the ensemble mean. Ensembles are
deterministic functions of a master seed and are reduced with compensated
summation, so results are bitwise reproducible regardless of chunking.
"""
from ._version import __version__
from .config import (
    EXPERIMENT_DEFAULTS,
    Experiment,
    ExperimentConfig,
    build_trajectory_config,
    make_config,
    parse_config_file,
)
from .dynamics import (
    PhysicsParams,
    QubitState,
    Scheme,
    TrajectoryConfig,
    sse_energy_correction,
    sse_step,
    suv_generator,
    suv_step,
    unnormalized_suv_step,
    white_ito_step,
    white_strat_step,
    z_step_colored,
    z_step_white,
)
from .engine import EnsembleResult, derive_stream, simulate_ensemble
from .errors import (
    ConfigError,
    InconclusiveError,
    IntegratorInstabilityError,
    InvalidParameterError,
    NotApplicableError,
    SimulationError,
    StateCorruptionError,
)
from .master import (
    STEADY_SECOND_MOMENT,
    DensityMatrix2,
    effective_diffusion,
    gksl_residual,
    gksl_solution,
    nonlinearity_coefficient,
)
from .noise import (
    NoiseKind,
    NoiseModel,
    NoiseState,
    autocorrelation,
    ou_step,
    sample_steady_state,
    sbm_step,
    simulate_paths,
    steady_samples,
    wiener_increment,
)
from .observables import (
    CollapseStats,
    CompensatedAccumulator,
    EnsembleSummary,
    born_deviation,
    collapse_statistics,
    density_matrix,
    ks_distance,
    quadratic_variation,
)
from .harness import run_experiment

__all__ = [
    "__version__",
    # noise
    "NoiseKind",
    "NoiseModel",
    "NoiseState",
    "wiener_increment",
    "ou_step",
    "sbm_step",
    "sample_steady_state",
    "steady_samples",
    "autocorrelation",
    "simulate_paths",
    # dynamics
    "QubitState",
    "PhysicsParams",
    "Scheme",
    "TrajectoryConfig",
    "suv_generator",
    "suv_step",
    "unnormalized_suv_step",
    "sse_step",
    "white_strat_step",
    "white_ito_step",
    "z_step_colored",
    "z_step_white",
    "sse_energy_correction",
    # observables
    "CompensatedAccumulator",
    "EnsembleSummary",
    "CollapseStats",
    "quadratic_variation",
    "density_matrix",
    "collapse_statistics",
    "ks_distance",
    "born_deviation",
    # master-equation reference
    "DensityMatrix2",
    "STEADY_SECOND_MOMENT",
    "effective_diffusion",
    "nonlinearity_coefficient",
    "gksl_solution",
    "gksl_residual",
    # engine
    "derive_stream",
    "simulate_ensemble",
    "EnsembleResult",
    # configuration and orchestration
    "Experiment",
    "ExperimentConfig",
    "EXPERIMENT_DEFAULTS",
    "parse_config_file",
    "make_config",
    "build_trajectory_config",
    "run_experiment",
    # errors
    "SimulationError",
    "InvalidParameterError",
    "StateCorruptionError",
    "IntegratorInstabilityError",
    "NotApplicableError",
    "InconclusiveError",
    "ConfigError",
]
