"""
🔧 Gyro Toolkit

Design and simulation toolkit for an x-axis tuning-fork MEMS gyroscope:
suspension stiffness, rigid-body modes, squeeze-film damping, capacitive
sensing, lumped two-frame dynamics and the readout chain.
"""

__version__ = "0.2.0"

from .errors import (
    GyroToolkitError,
    ConfigError,
    SpecValidationError,
    RankDeficiencyError,
    NotPositiveDefiniteError,
    ModeClassificationError,
    ContactError,
    SolverConvergenceError,
    IntegrationError,
    CalibrationError,
    UndersampledError,
)

from .config import DeviceConfig, parse_device_config, read_config_file
from .geometry import DeviceSpec, SuspensionVariant, load_device_spec, device_from_config
from .suspension import assemble_suspension, crab_leg_stiffness, beam_stiffness_guided
from .modal import analyze_variant, compare_configs, modal_analysis
from .damping import cell_damping_modified_reynolds, fd_reynolds_oracle, squeeze_film_params
from .sensing import CapacitorSpec, AsymmetryCase, delta_c, offset_vs_asymmetry
from .dynamics import LumpedGyroModel, RateProfile, build_lumped_model, simulate
from .readout import ReadoutChain, scale_factor, noise_equivalent_rate

# Export main components
__all__ = [
    "GyroToolkitError",
    "ConfigError",
    "SpecValidationError",
    "RankDeficiencyError",
    "NotPositiveDefiniteError",
    "ModeClassificationError",
    "ContactError",
    "SolverConvergenceError",
    "IntegrationError",
    "CalibrationError",
    "UndersampledError",
    "DeviceConfig",
    "parse_device_config",
    "read_config_file",
    "DeviceSpec",
    "SuspensionVariant",
    "load_device_spec",
    "device_from_config",
    "assemble_suspension",
    "crab_leg_stiffness",
    "beam_stiffness_guided",
    "analyze_variant",
    "compare_configs",
    "modal_analysis",
    "cell_damping_modified_reynolds",
    "fd_reynolds_oracle",
    "squeeze_film_params",
    "CapacitorSpec",
    "AsymmetryCase",
    "delta_c",
    "offset_vs_asymmetry",
    "LumpedGyroModel",
    "RateProfile",
    "build_lumped_model",
    "simulate",
    "ReadoutChain",
    "scale_factor",
    "noise_equivalent_rate",
]
