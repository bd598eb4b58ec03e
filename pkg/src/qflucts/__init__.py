"""Work and energy fluctuations of driven qubits, simulated shot by shot.

A small numpy circuit simulator (:mod:`qflucts.qsim`) runs two-point
measurement experiments (:mod:`qflucts.tpm`) on qubits prepared in Gibbs
states by purification (:mod:`qflucts.thermal`).  Closed-form references
live in :mod:`qflucts.oracles`, imperfection channels in
:mod:`qflucts.noise`, and seeded parameter sweeps in :mod:`qflucts.sweep`.
"""
from .noise import NoiseConfig, rotation_fidelity_curve
from .oracles import Mode, classify_mode, heat_leak_expansion, theoretical_phase_diagram
from .qsim import CircuitError, NumericalDegeneracyError
from .sweep import ConfigError, Report, RunConfig, compare_to_oracle, emit_report, run_sweep
from .thermal import QubitSpec, UndefinedTemperatureError, gibbs_populations, measured_beta
from .tpm import (ExperimentDef, JointDistribution, Kind, Protocol, energy_change_distribution,
                  exact_distribution, jarzynski_estimator, multivariate_fr_estimator,
                  repeat_for_error, run_experiment)

__version__ = "0.1.0"

__all__ = [
    "CircuitError", "ConfigError", "ExperimentDef", "JointDistribution", "Kind", "Mode",
    "NoiseConfig", "NumericalDegeneracyError", "Protocol", "QubitSpec", "Report", "RunConfig",
    "UndefinedTemperatureError", "classify_mode", "compare_to_oracle", "emit_report",
    "energy_change_distribution", "exact_distribution", "gibbs_populations",
    "heat_leak_expansion", "jarzynski_estimator", "measured_beta", "multivariate_fr_estimator",
    "repeat_for_error", "rotation_fidelity_curve", "run_experiment", "run_sweep",
    "theoretical_phase_diagram",
]
