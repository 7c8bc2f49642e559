#!/usr/bin/env python3
"""
🔋 Gyroscope Toolkit - Capacitive Sensing

Gap-changing parallel-plate capacitors between the proofmass and the glass
electrodes, including tilted-plate capacitance and the mass-asymmetry offset
study.
"""

from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Sequence, Tuple, Union
import logging

import numpy as np
from scipy.constants import epsilon_0, g as standard_gravity

from .errors import ContactError, SpecValidationError

logger = logging.getLogger(__name__)

SERIES_LIMIT = 0.05  # max relative tilt excursion for the series branch
SERIES_ORDER = 12
MAX_ASYMMETRY = 0.05


@dataclass(frozen=True)
class CapacitorSpec:
    """Sense electrode facing one frame.

    Each frame has one electrode under it. count=2 reads the two anti-phase
    frames as a differential pair (frame 1 minus frame 2); count=1 reads
    frame 1 alone.
    """
    electrode_len_x: float
    electrode_len_y: float
    nominal_gap: float
    electrode_center: Tuple[float, float] = (0.0, 0.0)
    count: int = 2

    @property
    def area(self) -> float:
        return self.electrode_len_x * self.electrode_len_y

    @property
    def nominal_capacitance(self) -> float:
        return capacitance(self.nominal_gap, self.area)

    @property
    def sensitivity(self) -> float:
        """dC/dz of one electrode at rest (F/m)"""
        return self.nominal_capacitance / self.nominal_gap


@dataclass(frozen=True)
class AsymmetryCase:
    asymmetry_fraction: float
    model: str = "com_shift"

    def __post_init__(self):
        if not 0.0 <= self.asymmetry_fraction <= MAX_ASYMMETRY:
            raise SpecValidationError("asymmetry-range", f"asymmetry fraction must be in [0, {MAX_ASYMMETRY}]")
        if self.model != "com_shift":
            raise SpecValidationError("asymmetry-model", f"unknown asymmetry model '{self.model}'")


@dataclass
class OffsetCurve:
    """Capacitance offset versus mass asymmetry for one suspension variant"""
    variant: str
    axis: str
    eta: np.ndarray
    offset: np.ndarray  # F
    deflections: List[Dict[str, float]] = field(default_factory=list)


def capacitance(gap: float, area: float) -> float:
    """Ideal parallel-plate capacitance, no fringe field"""
    if gap <= 0:
        raise ContactError(f"gap {gap:.3e} m <= 0: electrode contact")
    return epsilon_0 * area / gap


def _even_moment(a: float, half_x: float, b: float, half_y: float, k: int) -> float:
    """Integral of (a*X + b*Y)**k over [-half_x, half_x] x [-half_y, half_y], k even"""
    total = 0.0
    for j in range(0, k + 1, 2):
        ix = 2.0 * half_x ** (j + 1) / (j + 1)
        iy = 2.0 * half_y ** (k - j + 1) / (k - j + 1)
        total += comb(k, j) * a**j * b ** (k - j) * ix * iy
    return total


def _strip_primitive(c: float, d: float, half: float) -> float:
    """Antiderivative in c of the inner integral over the second tilt"""
    if d == 0.0:
        return half * (2.0 + 2.0 * np.log(c))
    return half * (2.0 * (c / d) * np.arctanh(d / c) + np.log(c * c - d * d))


def delta_c(spec: CapacitorSpec, z: float, theta_x: float, theta_y: float) -> float:
    """Capacitance change of one electrode for a rigid plate displacement.

    Local gap over the electrode is g0 - z - theta_x*(y - y0) - theta_y*(x - x0).
    """
    g = spec.nominal_gap - z
    half_x, half_y = spec.electrode_len_x / 2, spec.electrode_len_y / 2
    a, b = theta_y, theta_x
    excursion = abs(a) * half_x + abs(b) * half_y
    if g - excursion <= 0:
        raise ContactError(f"minimum gap {g - excursion:.3e} m <= 0: electrode contact")

    if excursion / g < SERIES_LIMIT:
        # 1/(g - u) expanded in powers of u/g; odd moments vanish on the symmetric electrode
        total = 4.0 * half_x * half_y * z / (g * spec.nominal_gap)
        for k in range(2, SERIES_ORDER + 1, 2):
            total += _even_moment(a, half_x, b, half_y, k) / g ** (k + 1)
        return float(epsilon_0 * total)

    # Outer integral over the tilt with the larger excursion
    if abs(b) * half_y > abs(a) * half_x:
        a, b, half_x, half_y = b, a, half_y, half_x
    d = b * half_y
    integral = (_strip_primitive(g + a * half_x, d, half_y) - _strip_primitive(g - a * half_x, d, half_y)) / a
    return float(epsilon_0 * integral - spec.nominal_capacitance)


def frame_delta_c(spec: CapacitorSpec, z: float, theta_x: float, theta_y: float) -> float:
    """Capacitance change of the electrode under one frame"""
    return delta_c(spec, z, theta_x, theta_y)


def pair_delta_c(spec: CapacitorSpec, frame1, frame2):
    """Read-out signal from the two frame electrodes: their difference, or frame 1 single-ended"""
    if spec.count == 2:
        return frame1 - frame2
    return frame1


def delta_c_translation(spec: CapacitorSpec, z: np.ndarray) -> np.ndarray:
    """Vectorized electrode signal for pure translation z (positive z closes the gap)"""
    z = np.asarray(z, dtype=float)
    g0 = spec.nominal_gap
    if np.any(z >= g0):
        raise ContactError("translation closes the electrode gap")
    return spec.nominal_capacitance * z / (g0 - z)


def offset_vs_asymmetry(spec, cases: Union[AsymmetryCase, Sequence[AsymmetryCase]], variant, axis: str = "y",
                        gravity: float = standard_gravity) -> OffsetCurve:
    """Static 1-g capacitance offset caused by a center-of-mass shift.

    The shift is eta * (plate length along axis) / 2. Gravity at the shifted
    center of mass loads the suspension; the rigid-body deflection u = K^-1 F
    tilts and sags the plate over the electrode. The offset is reported
    relative to the symmetric (eta = 0) plate.
    """
    from .geometry import SuspensionVariant, proofmass_mass
    from .suspension import assemble_suspension

    if isinstance(cases, AsymmetryCase):
        cases = [cases]
    variant = SuspensionVariant(variant)
    if axis not in ("x", "y"):
        raise SpecValidationError("asymmetry-axis", "asymmetry axis must be x or y")

    stiffness = assemble_suspension(spec.layout_for(variant), spec.material)
    weight = proofmass_mass(spec.plate, spec.material) * gravity
    half_len = (spec.plate.len_x if axis == "x" else spec.plate.len_y) / 2
    x0, y0 = spec.capacitor.electrode_center

    def signal(eta: float) -> Tuple[float, Dict[str, float]]:
        shift = eta * half_len
        dx, dy = (shift, 0.0) if axis == "x" else (0.0, shift)
        load = np.array([0.0, 0.0, -weight, -weight * dy, weight * dx, 0.0])
        u = np.linalg.solve(stiffness.matrix, load)
        uz, rx, ry = u[2], u[3], u[4]
        # plate point (x, y) moves by uz + rx*y - ry*x; the electrode sits below the plate
        z_local = -(uz + rx * y0 - ry * x0)
        return frame_delta_c(spec.capacitor, z_local, -rx, ry), {"eta": eta, "z": uz, "theta_x": rx, "theta_y": ry}

    reference, _ = signal(0.0)
    etas = sorted(c.asymmetry_fraction for c in cases)
    offsets, deflections = [], []
    for eta in etas:
        value, deflection = signal(eta)
        offsets.append(value - reference)
        deflections.append(deflection)

    logger.debug(f"offset curve {variant.value}: {len(etas)} points along {axis}")
    return OffsetCurve(variant.value, axis, np.array(etas), np.array(offsets), deflections)
