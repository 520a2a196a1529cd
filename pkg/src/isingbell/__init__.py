"""Bell-state generation in an Ising-coupled spin pair under bounded controls."""

from .model import (
    ControlSample,
    PhysicalUnits,
    RotatingFrame,
    TripletAmplitudes,
    frame_transform,
    hamiltonian_c,
    hamiltonian_two_level,
    polar_controls,
)
from .propagator import (
    ControlWaveform,
    MethodMismatch,
    NonUnitaryDrift,
    Trajectory,
    fidelity,
    population_trace,
    propagate,
    write_trajectory_csv,
)
from .shortcut import (
    DomainError,
    GaugeAngle,
    ShortcutSpec,
    envelope,
    gauge_angle,
    modified_controls,
    short_time_controls,
    short_time_fidelity_limit,
    shortcut_waveform,
    theta,
    tqd_fidelity_curve,
    two_level_inversion,
)
from .optimize import (
    ControlProblem,
    InfeasibleResult,
    NoConvergence,
    OptimizationReport,
    SweepCell,
    TrigSeries,
    adiabatic_baseline,
    adjoint_gradient,
    evaluate_series,
    optimize_piecewise,
    optimize_trig,
    saturation_fraction,
    series_waveform,
    sweep_detuning,
    sweep_duration,
    trig_basis,
    trig_harmonic_scan,
)

__all__ = [
    "ControlProblem",
    "ControlSample",
    "ControlWaveform",
    "DomainError",
    "GaugeAngle",
    "InfeasibleResult",
    "MethodMismatch",
    "NoConvergence",
    "NonUnitaryDrift",
    "OptimizationReport",
    "PhysicalUnits",
    "RotatingFrame",
    "ShortcutSpec",
    "SweepCell",
    "Trajectory",
    "TrigSeries",
    "TripletAmplitudes",
    "adiabatic_baseline",
    "adjoint_gradient",
    "envelope",
    "evaluate_series",
    "fidelity",
    "frame_transform",
    "gauge_angle",
    "hamiltonian_c",
    "hamiltonian_two_level",
    "modified_controls",
    "optimize_piecewise",
    "optimize_trig",
    "polar_controls",
    "population_trace",
    "propagate",
    "saturation_fraction",
    "series_waveform",
    "short_time_controls",
    "short_time_fidelity_limit",
    "shortcut_waveform",
    "sweep_detuning",
    "sweep_duration",
    "theta",
    "tqd_fidelity_curve",
    "trig_basis",
    "trig_harmonic_scan",
    "two_level_inversion",
    "write_trajectory_csv",
]

__version__ = "0.1.0"
