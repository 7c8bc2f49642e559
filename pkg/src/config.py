#!/usr/bin/env python3
"""
⚙️ Gyroscope Toolkit - Configuration Schema

YAML device documents validated with pydantic. Lengths are written in
micrometers (the unit the device drawings use); conversion to SI happens when
geometry.load_device_spec builds the frozen DeviceSpec.
"""

from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Union
import hashlib
import logging

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).parent.parent / "config" / "device_paper.cfg"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


# Device description
class MaterialSection(_Section):
    youngs_modulus_pa: float = 169.0e9
    poisson_ratio: float = 0.26
    density_kg_m3: float = 2330.0


class EnvironmentSection(_Section):
    air_viscosity_pa_s: float = 1.85e-5
    ambient_pressure_pa: float = 101325.0
    temperature_k: float = 300.0


class EquivalentHoleSection(_Section):
    lx_um: float = 0.0
    ly_um: float = 0.0
    lz_um: float = 0.0
    center_um: List[float] = Field(default_factory=lambda: [0.0, 0.0, 0.0])


class PerforationSection(_Section):
    hole_side_um: float = 50.0
    pitch_um: float = 250.0
    count_x: int = 0
    count_y: int = 0


class PlateSection(_Section):
    len_x_um: float
    len_y_um: float
    thickness_um: float
    equiv_hole: EquivalentHoleSection = Field(default_factory=EquivalentHoleSection)
    perforation: PerforationSection = Field(default_factory=PerforationSection)


class BeamSection(_Section):
    length_um: float
    width_um: float
    thickness_um: float


class SpringSiteSection(_Section):
    """One spring site: where the spring meets the proofmass, and its direction"""
    x_um: float
    y_um: float
    axis: Literal["x", "y"] = "y"


class SuspensionSection(_Section):
    variant: Literal["eight_one", "four_one"] = "eight_one"
    beam: BeamSection
    sites: List[SpringSiteSection]
    flex_length_ratio: float = 1.0
    plane_offset_um: Optional[float] = None  # defaults to half the plate thickness


class CapacitorSection(_Section):
    electrode_len_x_um: float
    electrode_len_y_um: float
    gap_um: float = 5.0
    center_um: List[float] = Field(default_factory=lambda: [0.0, 0.0])
    count: int = 2


class DriveSection(_Section):
    resonance_hz: float = 3998.0
    quality_factor: float = 500.0
    target_amplitude_um: float = 5.0
    frame_mass_kg: float = 0.0  # decoupling frame mass that moves with the proofmass in y


# Run settings (not part of the device itself)
class CalibrationSection(_Section):
    drive_hz: float
    sense_hz: float
    drive_q: float
    sense_q: float


class ReadoutSection(_Section):
    c2v_gain_v_per_f: Optional[float] = None
    target_sensitivity_mv_per_dps: Optional[float] = 0.15
    demod_phase_rad: Union[float, Literal["auto"]] = "auto"
    lpf_cutoff_hz: float = 100.0
    lpf_order: int = 1
    electronic_noise_psd_v_rthz: Optional[float] = None
    tone_margin_db: float = 40.0
    tone_rate_dps: float = 10.0
    tone_frequency_hz: float = 2.0


class SimulationSection(_Section):
    dt_s: float = 4.0e-6
    settle_s: float = 0.06
    horizon_s: float = 0.2
    seed: int = 7


class AsymmetrySection(_Section):
    axis: Literal["x", "y"] = "y"
    eta: List[float] = Field(default_factory=lambda: [0.005, 0.01, 0.015, 0.02])


class DeviceConfig(_Section):
    """Top-level document"""
    name: str = "device"
    material: MaterialSection = Field(default_factory=MaterialSection)
    environment: EnvironmentSection = Field(default_factory=EnvironmentSection)
    plate: PlateSection
    suspension: SuspensionSection
    four_one_beam: Optional[BeamSection] = None
    capacitor: CapacitorSection
    drive: DriveSection = Field(default_factory=DriveSection)
    calibration: Optional[CalibrationSection] = None
    readout: ReadoutSection = Field(default_factory=ReadoutSection)
    simulation: SimulationSection = Field(default_factory=SimulationSection)
    asymmetry: AsymmetrySection = Field(default_factory=AsymmetrySection)


def apply_overrides(document: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    """Apply `dotted.key=value` overrides in place; values are parsed as YAML scalars"""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override '{item}' is not of the form key=value")
        key, raw = item.split("=", 1)
        parts = key.strip().split(".")
        node = document
        try:
            for part in parts[:-1]:
                if isinstance(node, list):
                    node = node[int(part)]
                    continue
                node = node.setdefault(part, {})
                if not isinstance(node, (dict, list)):
                    raise ConfigError("cannot descend into a scalar", field=key)
            leaf = parts[-1]
            value = yaml.safe_load(raw)
            if isinstance(node, list):
                node[int(leaf)] = value
            else:
                node[leaf] = value
        except (IndexError, ValueError):
            raise ConfigError("list index missing or out of range", field=key)
        except yaml.YAMLError as e:
            raise ConfigError(f"value is not valid YAML: {e}", field=key)
        logger.debug(f"override {key} = {value!r}")
    return document


def parse_device_config(text: str, overrides: Sequence[str] = ()) -> DeviceConfig:
    """Parse a YAML document (plus overrides) into a validated DeviceConfig"""
    try:
        document = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"not a valid YAML document: {e}")

    if not isinstance(document, dict):
        raise ConfigError("top level of the config must be a mapping")

    apply_overrides(document, overrides)

    try:
        return DeviceConfig.model_validate(document)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(p) for p in first["loc"])
        raise ConfigError(first["msg"], field=field)


def read_config_file(path: Union[str, Path]) -> str:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return path.read_text()


def config_hash(text: str, overrides: Sequence[str] = ()) -> str:
    """Short content hash of the document plus overrides, for run manifests"""
    digest = hashlib.sha256(text.encode())
    for item in overrides:
        digest.update(b"\0" + item.encode())
    return digest.hexdigest()[:16]
