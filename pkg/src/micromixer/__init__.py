"""Simulator of a thermally actuated chaotic micromixer.

Modules
-------
model      configuration types and kinematic helpers
actuator   square-wave drive -> cavity temperatures -> transverse flow
flowfield  analytic divergence-free junction velocity field
transport  tracer advection-diffusion and interface stretching
metrics    exit concentration profile, RMS, efficiency, peak count
config     unit-aware configuration files
sweep      single runs, (f, V) sweeps and report emission
"""

__version__ = "0.1.0"

from .actuator import (
    ActuatorWaveform,
    average_power,
    dilation_displacement,
    instantaneous_power,
    thermal_response,
    transverse_waveform,
)
from .config import MixerConfig, load_config, parse_config
from .errors import (
    BoilingRegimeError,
    ConfigError,
    ConvergenceError,
    DomainError,
    InsufficientSamplingError,
    InterfaceTruncationError,
    InvalidParameterError,
    MicromixerError,
    RunError,
)
from .flowfield import JunctionFlow, divergence_at, velocity_at
from .metrics import concentration_profile, mixing_report, rms_of_profile
from .model import (
    DriveSignal,
    FluidProperties,
    Geometry,
    SubstrateThermal,
    mean_velocity_from_flow_rate,
    reynolds,
    validate_config,
)
from .sweep import SweepPlan, emit_reports, run_single, run_sweep
from .transport import InterfaceLine, seed_inlet, simulate_to_exit, step, track_interface
