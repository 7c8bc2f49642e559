#!/usr/bin/env python3
"""
📐 Gyroscope Toolkit - Device Geometry

Parametric device description (SI units, frozen dataclasses), loading from the
YAML config, invariant checks and the proofmass mass properties with the
equivalent-hole correction.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np

from .config import BeamSection, DeviceConfig, parse_device_config
from .errors import SpecValidationError
from .sensing import CapacitorSpec

logger = logging.getLogger(__name__)

UM = 1.0e-6
AXES = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}
_SYMMETRY_TOL = 1.0e-12  # m


class SuspensionVariant(str, Enum):
    EIGHT_ONE = "eight_one"
    FOUR_ONE = "four_one"


@dataclass(frozen=True)
class MaterialProps:
    """Isotropic elastic material"""
    youngs_modulus: float  # Pa
    poisson_ratio: float
    density: float  # kg/m^3

    @property
    def shear_modulus(self) -> float:
        return self.youngs_modulus / (2.0 * (1.0 + self.poisson_ratio))


@dataclass(frozen=True)
class Environment:
    air_viscosity: float  # Pa*s
    ambient_pressure: float  # Pa
    temperature: float  # K


@dataclass(frozen=True)
class BeamSpec:
    """Straight spring beam. width is in-plane, thickness is along z.

    flex_ratio scales the length that actually bends (1.0 = the whole beam).
    """
    length: float
    width: float
    thickness: float
    longitudinal_axis: Tuple[float, float, float] = AXES["y"]
    attach_point: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    flex_ratio: float = 1.0

    @property
    def flex_length(self) -> float:
        return self.length * self.flex_ratio

    @property
    def in_plane_axis(self) -> Tuple[float, float, float]:
        """Unit vector in the device plane perpendicular to the beam"""
        ax, ay, _ = self.longitudinal_axis
        return (-ay, ax, 0.0)


@dataclass(frozen=True)
class PerforationSpec:
    hole_side: float
    pitch: float
    count_x: int
    count_y: int

    @property
    def hole_count(self) -> int:
        return self.count_x * self.count_y

    @property
    def footprint(self) -> Tuple[float, float]:
        return self.count_x * self.pitch, self.count_y * self.pitch


@dataclass(frozen=True)
class PlateSpec:
    len_x: float
    len_y: float
    thickness_z: float
    equiv_hole_lx: float = 0.0
    equiv_hole_ly: float = 0.0
    equiv_hole_lz: float = 0.0
    equiv_hole_center: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    perforation: PerforationSpec = field(default_factory=lambda: PerforationSpec(50 * UM, 250 * UM, 0, 0))

    @property
    def volume(self) -> float:
        return self.len_x * self.len_y * self.thickness_z

    @property
    def equiv_hole_volume(self) -> float:
        return self.equiv_hole_lx * self.equiv_hole_ly * self.equiv_hole_lz

    @property
    def area(self) -> float:
        return self.len_x * self.len_y


@dataclass(frozen=True)
class DualBeamPair:
    """Two identical beams in parallel ("twins"), one per spring plane"""
    top: BeamSpec
    bottom: BeamSpec

    @property
    def beams(self) -> Tuple[BeamSpec, BeamSpec]:
        return (self.top, self.bottom)


@dataclass(frozen=True)
class SuspensionLayout:
    variant: SuspensionVariant
    pairs: Tuple[Union[DualBeamPair, BeamSpec], ...]
    plane_offsets: Tuple[float, ...]

    def beams(self) -> List[BeamSpec]:
        out: List[BeamSpec] = []
        for member in self.pairs:
            if isinstance(member, DualBeamPair):
                out.extend(member.beams)
            else:
                out.append(member)
        return out


@dataclass(frozen=True)
class DriveSpec:
    resonance_hz: float
    quality_factor: float
    target_amplitude: float  # m
    frame_mass: float = 0.0  # kg


@dataclass(frozen=True)
class DeviceSpec:
    """Complete parametric description of one tuning-fork gyroscope"""
    name: str
    material: MaterialProps
    env: Environment
    plate: PlateSpec
    variant: SuspensionVariant
    eight_one_layout: Optional[SuspensionLayout]
    four_one_layout: Optional[SuspensionLayout]
    capacitor: CapacitorSpec
    drive: DriveSpec
    drive_axis: str = "y"
    sense_axis: str = "z"
    rate_axis: str = "x"
    frame_count: int = 2

    @property
    def suspension(self) -> SuspensionLayout:
        return self.layout_for(self.variant)

    def layout_for(self, variant: SuspensionVariant) -> SuspensionLayout:
        layout = self.eight_one_layout if variant == SuspensionVariant.EIGHT_ONE else self.four_one_layout
        if layout is None:
            raise SpecValidationError("layout-available", f"no {variant.value} layout in this device spec")
        return layout


# ---------------------------------------------------------------------------
# Invariant checks
# ---------------------------------------------------------------------------

def validate_material(mat: MaterialProps) -> None:
    if mat.youngs_modulus <= 0:
        raise SpecValidationError("material-modulus", "youngs_modulus must be > 0")
    if mat.density <= 0:
        raise SpecValidationError("material-density", "density must be > 0")
    if not 0.0 <= mat.poisson_ratio < 0.5:
        raise SpecValidationError("material-poisson", "poisson_ratio must be in [0, 0.5)")


def validate_environment(env: Environment) -> None:
    for name in ("air_viscosity", "ambient_pressure", "temperature"):
        if getattr(env, name) <= 0:
            raise SpecValidationError("environment-positive", f"{name} must be > 0")


def validate_beam(beam: BeamSpec) -> None:
    if min(beam.length, beam.width, beam.thickness) <= 0:
        raise SpecValidationError("beam-positive", "beam dimensions must be > 0")
    if beam.length <= beam.width or beam.length <= beam.thickness:
        raise SpecValidationError("beam-slender", "beam length must exceed width and thickness")
    if beam.flex_ratio <= 0 or beam.flex_ratio > 1:
        raise SpecValidationError("beam-flex-ratio", "flex ratio must be in (0, 1]")


def validate_plate(plate: PlateSpec) -> None:
    if min(plate.len_x, plate.len_y, plate.thickness_z) <= 0:
        raise SpecValidationError("plate-positive", "plate dimensions must be > 0")

    if plate.equiv_hole_volume > 0:
        cx, cy, _ = plate.equiv_hole_center
        if abs(cx) + plate.equiv_hole_lx / 2 >= plate.len_x / 2 or abs(cy) + plate.equiv_hole_ly / 2 >= plate.len_y / 2:
            raise SpecValidationError("equiv-hole-inside", "equivalent hole must fit strictly inside the plate footprint")
        if plate.equiv_hole_lz > plate.thickness_z * (1 + 1e-12):
            raise SpecValidationError("equiv-hole-depth", "equivalent hole deeper than the plate")

    perf = plate.perforation
    if perf.hole_count > 0:
        if perf.hole_side <= 0:
            raise SpecValidationError("perforation-hole", "hole_side must be > 0")
        if perf.pitch <= perf.hole_side:
            raise SpecValidationError("perforation-pitch", "pitch must be larger than hole_side")
        fx, fy = perf.footprint
        if fx > plate.len_x * (1 + 1e-12) or fy > plate.len_y * (1 + 1e-12):
            raise SpecValidationError("perforation-footprint", "hole array does not fit on the plate")


def validate_layout(layout: SuspensionLayout) -> None:
    for beam in layout.beams():
        validate_beam(beam)

    if layout.variant == SuspensionVariant.EIGHT_ONE:
        if len(layout.pairs) != 4 or not all(isinstance(p, DualBeamPair) for p in layout.pairs):
            raise SpecValidationError("eight-one-pairs", "EightOne layout needs exactly 4 dual-beam pairs")
        for pair in layout.pairs:
            t, b = np.array(pair.top.attach_point), np.array(pair.bottom.attach_point)
            if abs(t[0] - b[0]) > _SYMMETRY_TOL or abs(t[1] - b[1]) > _SYMMETRY_TOL or abs(t[2] + b[2]) > _SYMMETRY_TOL:
                raise SpecValidationError("eight-one-mirror", "dual-beam pair is not mirror-symmetric about the mid-plane")
    else:
        beams = layout.beams()
        if len(beams) != 4:
            raise SpecValidationError("four-one-beams", "FourOne layout needs exactly 4 beams")
        if len({round(b.attach_point[2] / _SYMMETRY_TOL) for b in beams}) != 1:
            raise SpecValidationError("four-one-plane", "FourOne beams must share one plane")

    sites = [(b.attach_point[0], b.attach_point[1]) for b in layout.beams()]
    for sx, sy in ((-1, 1), (1, -1)):
        for x, y in sites:
            if not any(abs(sx * x - u) <= _SYMMETRY_TOL and abs(sy * y - v) <= _SYMMETRY_TOL for u, v in sites):
                raise SpecValidationError("layout-symmetric", "layout is not symmetric about both in-plane axes")


def validate_capacitor(cap: CapacitorSpec, plate: PlateSpec) -> None:
    if cap.nominal_gap <= 0:
        raise SpecValidationError("capacitor-gap", "nominal_gap must be > 0")
    if cap.electrode_len_x <= 0 or cap.electrode_len_y <= 0:
        raise SpecValidationError("capacitor-size", "electrode dimensions must be > 0")
    cx, cy = cap.electrode_center
    if abs(cx) + cap.electrode_len_x / 2 > plate.len_x / 2 * (1 + 1e-12) or abs(cy) + cap.electrode_len_y / 2 > plate.len_y / 2 * (1 + 1e-12):
        raise SpecValidationError("capacitor-inside", "electrode must lie within the plate footprint")


def validate_device(spec: DeviceSpec) -> None:
    validate_material(spec.material)
    validate_environment(spec.env)
    validate_plate(spec.plate)
    for layout in (spec.eight_one_layout, spec.four_one_layout):
        if layout is not None:
            validate_layout(layout)
    spec.suspension  # configured variant must exist
    validate_capacitor(spec.capacitor, spec.plate)
    if len({spec.drive_axis, spec.sense_axis, spec.rate_axis}) != 3:
        raise SpecValidationError("axes-orthogonal", "drive, sense and rate axes must be distinct")
    if spec.frame_count != 2:
        raise SpecValidationError("two-frames", "tuning fork needs exactly two identical frames")
    if spec.drive.quality_factor <= 0 or spec.drive.resonance_hz <= 0:
        raise SpecValidationError("drive-positive", "drive resonance and quality factor must be > 0")
    if spec.drive.target_amplitude < 0:
        raise SpecValidationError("drive-amplitude", "target drive amplitude must be >= 0")


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

def _beam(section: BeamSection, axis: str, point: Sequence[float], ratio: float) -> BeamSpec:
    return BeamSpec(
        length=section.length_um * UM,
        width=section.width_um * UM,
        thickness=section.thickness_um * UM,
        longitudinal_axis=AXES[axis],
        attach_point=tuple(float(v) for v in point),
        flex_ratio=ratio,
    )


def build_layouts(cfg: DeviceConfig) -> Dict[SuspensionVariant, Optional[SuspensionLayout]]:
    """Build the configured layout and, when derivable, the other variant on the same spring sites"""
    susp = cfg.suspension
    ratio = susp.flex_length_ratio
    layouts: Dict[SuspensionVariant, Optional[SuspensionLayout]] = {
        SuspensionVariant.EIGHT_ONE: None,
        SuspensionVariant.FOUR_ONE: None,
    }

    if susp.variant == SuspensionVariant.EIGHT_ONE.value:
        h = (susp.plane_offset_um if susp.plane_offset_um is not None else cfg.plate.thickness_um / 2) * UM
        pairs = tuple(
            DualBeamPair(
                top=_beam(susp.beam, s.axis, (s.x_um * UM, s.y_um * UM, h), ratio),
                bottom=_beam(susp.beam, s.axis, (s.x_um * UM, s.y_um * UM, -h), ratio),
            )
            for s in susp.sites
        )
        layouts[SuspensionVariant.EIGHT_ONE] = SuspensionLayout(SuspensionVariant.EIGHT_ONE, pairs, (h, -h))
        single = cfg.four_one_beam
    else:
        single = susp.beam

    if single is not None:
        h = (susp.plane_offset_um or 0.0) * UM if susp.variant == SuspensionVariant.FOUR_ONE.value else 0.0
        beams = tuple(_beam(single, s.axis, (s.x_um * UM, s.y_um * UM, h), ratio) for s in susp.sites)
        layouts[SuspensionVariant.FOUR_ONE] = SuspensionLayout(SuspensionVariant.FOUR_ONE, beams, (h,))

    return layouts


def device_from_config(cfg: DeviceConfig) -> DeviceSpec:
    """Convert a validated config (micrometers) into a checked DeviceSpec (SI)"""
    p = cfg.plate
    hole = p.equiv_hole
    perf = p.perforation
    plate = PlateSpec(
        len_x=p.len_x_um * UM,
        len_y=p.len_y_um * UM,
        thickness_z=p.thickness_um * UM,
        equiv_hole_lx=hole.lx_um * UM,
        equiv_hole_ly=hole.ly_um * UM,
        equiv_hole_lz=hole.lz_um * UM,
        equiv_hole_center=tuple(v * UM for v in (list(hole.center_um) + [0.0, 0.0, 0.0])[:3]),
        perforation=PerforationSpec(perf.hole_side_um * UM, perf.pitch_um * UM, perf.count_x, perf.count_y),
    )
    c = cfg.capacitor
    capacitor = CapacitorSpec(
        electrode_len_x=c.electrode_len_x_um * UM,
        electrode_len_y=c.electrode_len_y_um * UM,
        nominal_gap=c.gap_um * UM,
        electrode_center=tuple(v * UM for v in (list(c.center_um) + [0.0, 0.0])[:2]),
        count=c.count,
    )
    layouts = build_layouts(cfg)
    spec = DeviceSpec(
        name=cfg.name,
        material=MaterialProps(cfg.material.youngs_modulus_pa, cfg.material.poisson_ratio, cfg.material.density_kg_m3),
        env=Environment(cfg.environment.air_viscosity_pa_s, cfg.environment.ambient_pressure_pa, cfg.environment.temperature_k),
        plate=plate,
        variant=SuspensionVariant(cfg.suspension.variant),
        eight_one_layout=layouts[SuspensionVariant.EIGHT_ONE],
        four_one_layout=layouts[SuspensionVariant.FOUR_ONE],
        capacitor=capacitor,
        drive=DriveSpec(
            resonance_hz=cfg.drive.resonance_hz,
            quality_factor=cfg.drive.quality_factor,
            target_amplitude=cfg.drive.target_amplitude_um * UM,
            frame_mass=cfg.drive.frame_mass_kg,
        ),
    )
    validate_device(spec)
    logger.info(f"📐 Loaded device '{spec.name}' ({spec.variant.value}, plate "
                f"{p.len_x_um:g}x{p.len_y_um:g}x{p.thickness_um:g} um)")
    return spec


def load_device_spec(text: str, overrides: Sequence[str] = ()) -> DeviceSpec:
    """Parse, validate and normalize a device config document"""
    return device_from_config(parse_device_config(text, overrides))


# ---------------------------------------------------------------------------
# Mass properties
# ---------------------------------------------------------------------------

def proofmass_mass(plate: PlateSpec, material: MaterialProps) -> float:
    """Plate mass minus the equivalent-hole mass (kg)"""
    return material.density * (plate.volume - plate.equiv_hole_volume)


def _cuboid_inertia(mass: float, lx: float, ly: float, lz: float) -> np.ndarray:
    return mass / 12.0 * np.diag([ly**2 + lz**2, lx**2 + lz**2, lx**2 + ly**2])


def center_of_mass(plate: PlateSpec, material: MaterialProps) -> np.ndarray:
    m_hole = material.density * plate.equiv_hole_volume
    return -m_hole * np.asarray(plate.equiv_hole_center, dtype=float) / proofmass_mass(plate, material)


def inertia_tensor(plate: PlateSpec, material: MaterialProps) -> np.ndarray:
    """3x3 inertia of plate minus equivalent-hole cuboid about the center of mass"""
    rho = material.density
    com = center_of_mass(plate, material)
    parts = [
        (rho * plate.volume, (plate.len_x, plate.len_y, plate.thickness_z), np.zeros(3)),
        (-rho * plate.equiv_hole_volume, (plate.equiv_hole_lx, plate.equiv_hole_ly, plate.equiv_hole_lz),
         np.asarray(plate.equiv_hole_center, dtype=float)),
    ]
    inertia = np.zeros((3, 3))
    for mass, dims, center in parts:
        d = center - com
        inertia += _cuboid_inertia(mass, *dims) + mass * (np.dot(d, d) * np.eye(3) - np.outer(d, d))
    return 0.5 * (inertia + inertia.T)
