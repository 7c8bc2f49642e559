#!/usr/bin/env python3
"""
🪝 Gyroscope Toolkit - Suspension Stiffness

Guided-guided Euler-Bernoulli springs, crab-leg composition and assembly of
the 6-DOF rigid-body stiffness of one proofmass about its centroid.
"""

from dataclasses import dataclass, field, replace
from typing import List, Sequence, Tuple
import logging

import numpy as np

from .errors import RankDeficiencyError, SpecValidationError
from .geometry import BeamSpec, DualBeamPair, MaterialProps, SuspensionLayout, validate_beam

logger = logging.getLogger(__name__)

DOF_NAMES = ("x", "y", "z", "phi_x", "phi_y", "phi_z")
SLENDERNESS = 5.0
_RANK_TOL = 1.0e-10


@dataclass
class BeamStiffness:
    """Stiffness of one spring, resolved in the spring's own axes"""
    axial: float  # N/m
    bend_in_plane: float  # N/m
    bend_out_of_plane: float  # N/m
    torsion: float  # N*m/rad
    attach_point: Tuple[float, float, float]
    axis: Tuple[float, float, float]
    warnings: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class CrabLegSpec:
    """L-shaped spring: thigh leaves the proofmass, shin runs perpendicular to the anchor"""
    thigh: BeamSpec
    shin: BeamSpec


@dataclass
class Stiffness6:
    """6x6 stiffness over (x, y, z, phi_x, phi_y, phi_z) about the reference point"""
    matrix: np.ndarray
    warnings: List[str] = field(default_factory=list)

    def entry(self, row: str, col: str) -> float:
        return float(self.matrix[DOF_NAMES.index(row), DOF_NAMES.index(col)])


def torsion_constant(width: float, thickness: float) -> float:
    """Rectangular-section torsion constant (truncated series, ~1% accurate)"""
    p, q = max(width, thickness), min(width, thickness)
    return p * q**3 * (1.0 / 3.0 - 0.21 * (q / p) * (1.0 - q**4 / (12.0 * p**4)))


def beam_stiffness_guided(beam: BeamSpec, mat: MaterialProps) -> BeamStiffness:
    """Guided-guided beam: axial EA/L, bending 12EI/L^3 per direction, torsion GJ/L"""
    validate_beam(beam)
    e = mat.youngs_modulus
    length, w, t = beam.flex_length, beam.width, beam.thickness

    warnings = []
    if length < SLENDERNESS * max(w, t):
        msg = f"beam {length * 1e6:.1f} um is not slender (< {SLENDERNESS:g}x cross-section); Euler-Bernoulli stiffness is approximate"
        logger.warning(f"⚠️ {msg}")
        warnings.append(msg)

    return BeamStiffness(
        axial=e * w * t / length,
        bend_in_plane=12.0 * e * (t * w**3 / 12.0) / length**3,
        bend_out_of_plane=12.0 * e * (w * t**3 / 12.0) / length**3,
        torsion=mat.shear_modulus * torsion_constant(w, t) / length,
        attach_point=beam.attach_point,
        axis=beam.longitudinal_axis,
        warnings=warnings,
    )


def _check_crab_leg(leg: CrabLegSpec) -> None:
    if leg.thigh.length <= 0:
        raise SpecValidationError("crab-leg-thigh", "crab-leg thigh must have nonzero length")
    if abs(float(np.dot(leg.thigh.longitudinal_axis, leg.shin.longitudinal_axis))) > 1e-9:
        raise SpecValidationError("crab-leg-perpendicular", "crab-leg segments must be perpendicular")
    start = np.asarray(leg.thigh.attach_point)
    tip = [start + s * leg.thigh.length * np.asarray(leg.thigh.longitudinal_axis) for s in (1.0, -1.0)]
    if min(np.linalg.norm(np.asarray(leg.shin.attach_point) - j) for j in tip) > 1e-9:
        raise SpecValidationError("crab-leg-junction", "shin must start at the end of the thigh")


def crab_leg_stiffness(leg: CrabLegSpec, mat: MaterialProps) -> BeamStiffness:
    """Series composition of thigh and shin compliances per load direction (rigid knee)"""
    _check_crab_leg(leg)
    thigh = beam_stiffness_guided(leg.thigh, mat)
    if leg.shin.length <= 0:
        return thigh

    shin = beam_stiffness_guided(leg.shin, mat)
    shin_rot = mat.youngs_modulus * (leg.shin.width * leg.shin.thickness**3 / 12.0) / leg.shin.flex_length

    def series(*k: float) -> float:
        return 1.0 / sum(1.0 / v for v in k)

    return BeamStiffness(
        axial=series(thigh.axial, shin.bend_in_plane),
        bend_in_plane=series(thigh.bend_in_plane, shin.axial),
        bend_out_of_plane=series(thigh.bend_out_of_plane, shin.bend_out_of_plane),
        torsion=series(thigh.torsion, shin_rot),
        attach_point=thigh.attach_point,
        axis=thigh.axis,
        warnings=thigh.warnings + shin.warnings,
    )


def with_crab_legs(layout: SuspensionLayout, shin_length: float) -> SuspensionLayout:
    """Replace every straight beam by a crab leg of the same total length"""
    def bend(beam: BeamSpec) -> CrabLegSpec:
        axis = np.asarray(beam.longitudinal_axis)
        outward = np.sign(np.dot(beam.attach_point, axis)) or 1.0
        thigh_len = beam.length - shin_length
        thigh = replace(beam, length=thigh_len, longitudinal_axis=tuple(outward * axis))
        junction = np.asarray(beam.attach_point) + thigh_len * outward * axis
        shin = replace(beam, length=shin_length, longitudinal_axis=beam.in_plane_axis,
                       attach_point=tuple(junction))
        return CrabLegSpec(thigh, shin)

    members = []
    for member in layout.pairs:
        if isinstance(member, DualBeamPair):
            members.append(tuple(bend(b) for b in member.beams))
        else:
            members.append(bend(member))
    return replace(layout, pairs=tuple(members))


def _member_stiffnesses(member, mat: MaterialProps) -> List[BeamStiffness]:
    if isinstance(member, DualBeamPair):
        return [beam_stiffness_guided(b, mat) for b in member.beams]
    if isinstance(member, CrabLegSpec):
        return [crab_leg_stiffness(member, mat)]
    if isinstance(member, tuple):
        return [s for m in member for s in _member_stiffnesses(m, mat)]
    return [beam_stiffness_guided(member, mat)]


def _skew(r: np.ndarray) -> np.ndarray:
    return np.array([[0.0, -r[2], r[1]], [r[2], 0.0, -r[0]], [-r[1], r[0], 0.0]])


def placed_stiffness(spring: BeamStiffness, reference: Sequence[float] = (0.0, 0.0, 0.0)) -> np.ndarray:
    """T^T K T for one spring; T maps centroid coordinates to the attachment translation"""
    e_l = np.asarray(spring.axis, dtype=float)
    e_w = np.array([-e_l[1], e_l[0], 0.0])
    e_z = np.cross(e_l, e_w)
    k_local = (spring.axial * np.outer(e_l, e_l)
               + spring.bend_in_plane * np.outer(e_w, e_w)
               + spring.bend_out_of_plane * np.outer(e_z, e_z))

    r = np.asarray(spring.attach_point, dtype=float) - np.asarray(reference, dtype=float)
    t = np.hstack([np.eye(3), -_skew(r)])
    k6 = t.T @ k_local @ t
    k6[3:, 3:] += spring.torsion * np.outer(e_l, e_l)
    return k6


def free_dofs(matrix: np.ndarray) -> List[str]:
    """Names of the generalized coordinates left unconstrained (empty when K is PD)"""
    diag = np.diag(matrix).copy()
    free = [DOF_NAMES[i] for i in range(6) if diag[i] <= 0]
    if free:
        return free
    scale = 1.0 / np.sqrt(diag)
    normalized = matrix * np.outer(scale, scale)
    values, vectors = np.linalg.eigh(normalized)
    for value, vector in zip(values, vectors.T):
        if value <= _RANK_TOL * values[-1]:
            free.extend(DOF_NAMES[i] for i in np.flatnonzero(np.abs(vector) > 0.1) if DOF_NAMES[i] not in free)
    return free


def assemble_suspension(layout: SuspensionLayout, mat: MaterialProps,
                        reference: Sequence[float] = (0.0, 0.0, 0.0)) -> Stiffness6:
    """Sum of T_i^T K_i T_i over every spring of the layout"""
    springs: List[BeamStiffness] = []
    for member in layout.pairs:
        springs.extend(_member_stiffnesses(member, mat))

    matrix = np.zeros((6, 6))
    for spring in springs:
        matrix += placed_stiffness(spring, reference)
    matrix = 0.5 * (matrix + matrix.T)

    loose = free_dofs(matrix)
    if loose:
        raise RankDeficiencyError(loose)

    warnings = sorted({w for s in springs for w in s.warnings})
    logger.debug(f"assembled {len(springs)} springs for {layout.variant.value}")
    return Stiffness6(matrix, warnings)
