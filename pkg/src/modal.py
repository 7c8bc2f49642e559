#!/usr/bin/env python3
"""
🎵 Gyroscope Toolkit - Modal Analysis

Rigid-body 6-DOF generalized eigenproblem, mode labeling and the EightOne vs
FourOne comparison.
"""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple, Union
import logging

import numpy as np
import scipy.linalg

from .errors import ModeClassificationError, NotPositiveDefiniteError
from .geometry import DeviceSpec, MaterialProps, PlateSpec, SuspensionVariant, inertia_tensor, proofmass_mass
from .suspension import Stiffness6, assemble_suspension

logger = logging.getLogger(__name__)

MODE_TAGS = ("Tx", "Ty", "Tz", "Rx", "Ry", "Rz")
USABLE_TAG = "Tz"
TIE_THRESHOLD = 0.01


@dataclass
class MassMatrix6:
    """Block diagonal m*I3 (translations) and the inertia tensor (rotations)"""
    matrix: np.ndarray


@dataclass
class ModalResult:
    frequencies: np.ndarray  # Hz, ascending
    shapes: np.ndarray  # columns, M-normalized
    mass: np.ndarray
    labels: List[str] = field(default_factory=list)
    participation: Optional[np.ndarray] = None  # rows = modes, columns = DOF
    mixed: List[int] = field(default_factory=list)


@dataclass
class VariantModal:
    variant: str
    result: ModalResult
    usable_index: int
    gap_hz: float
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "variant": self.variant,
            "frequencies_hz": [float(f) for f in self.result.frequencies],
            "labels": list(self.result.labels),
            "usable_mode": self.usable_index + 1,
            "usable_frequency_hz": float(self.result.frequencies[self.usable_index]),
            "gap_hz": float(self.gap_hz),
            "mixed_modes": [i + 1 for i in self.result.mixed],
            "warnings": list(self.warnings),
        }


@dataclass
class ConfigComparison:
    eight_one: VariantModal
    four_one: VariantModal

    @property
    def eight_one_gap_larger(self) -> bool:
        return self.eight_one.gap_hz > self.four_one.gap_hz

    @property
    def gap_ratio(self) -> float:
        return self.eight_one.gap_hz / self.four_one.gap_hz

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eight_one": self.eight_one.to_dict(),
            "four_one": self.four_one.to_dict(),
            "eight_one_gap_larger": bool(self.eight_one_gap_larger),
            "gap_ratio": float(self.gap_ratio),
        }


def mass_matrix(plate: PlateSpec, material: MaterialProps) -> MassMatrix6:
    matrix = np.zeros((6, 6))
    matrix[:3, :3] = proofmass_mass(plate, material) * np.eye(3)
    matrix[3:, 3:] = inertia_tensor(plate, material)
    return MassMatrix6(matrix)


def _require_spd(matrix: np.ndarray, name: str) -> None:
    if matrix.shape != (6, 6) or not np.allclose(matrix, matrix.T, rtol=1e-12, atol=0.0):
        raise NotPositiveDefiniteError(name)
    try:
        scipy.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(name)


def modal_analysis(k: Union[Stiffness6, np.ndarray], m: Union[MassMatrix6, np.ndarray]) -> ModalResult:
    """Solve K phi = w^2 M phi and label the modes"""
    k_mat = np.asarray(k.matrix if isinstance(k, Stiffness6) else k, dtype=float)
    m_mat = np.asarray(m.matrix if isinstance(m, MassMatrix6) else m, dtype=float)
    _require_spd(k_mat, "stiffness matrix K")
    _require_spd(m_mat, "mass matrix M")

    omega_sq, shapes = scipy.linalg.eigh(k_mat, m_mat)
    order = np.argsort(omega_sq)
    frequencies = np.sqrt(np.clip(omega_sq[order], 0.0, None)) / (2.0 * np.pi)
    result = ModalResult(frequencies=frequencies, shapes=shapes[:, order], mass=m_mat)
    return classify_modes(result)


def classify_modes(r: ModalResult) -> ModalResult:
    """Label each mode by its largest mass-weighted participation; near-ties are mixed"""
    labels, mixed = [], []
    participation = np.zeros((r.shapes.shape[1], 6))
    for i, phi in enumerate(r.shapes.T):
        share = np.abs(phi * (r.mass @ phi))
        share = share / share.sum()
        participation[i] = share
        ranked = np.argsort(share)[::-1]
        first, second = ranked[0], ranked[1]
        if share[first] - share[second] <= TIE_THRESHOLD * share[first]:
            tags = sorted((first, second))
            labels.append("/".join(MODE_TAGS[t] for t in tags))
            mixed.append(i)
            logger.warning(f"⚠️ mode {i + 1} is mixed: {labels[-1]}")
        else:
            labels.append(MODE_TAGS[first])
    return replace(r, labels=labels, participation=participation, mixed=mixed)


def usable_mode_gap(r: ModalResult) -> Tuple[int, float]:
    """Index of the single Tz mode and its distance to the nearest adjacent mode"""
    hits = [i for i, label in enumerate(r.labels) if label == USABLE_TAG]
    if len(hits) != 1:
        raise ModeClassificationError(f"expected exactly one {USABLE_TAG} mode, found {len(hits)}")
    index = hits[0]
    neighbors = [j for j in (index - 1, index + 1) if 0 <= j < len(r.frequencies)]
    gap = min(abs(r.frequencies[index] - r.frequencies[j]) for j in neighbors)
    return index, float(gap)


def analyze_variant(spec: DeviceSpec, variant: SuspensionVariant) -> VariantModal:
    layout = spec.layout_for(variant)
    stiffness = assemble_suspension(layout, spec.material)
    result = modal_analysis(stiffness, mass_matrix(spec.plate, spec.material))
    index, gap = usable_mode_gap(result)
    logger.info(f"🎵 {variant.value}: f = {np.round(result.frequencies, 1).tolist()} Hz, "
                f"usable mode {index + 1}, gap {gap:.1f} Hz")
    return VariantModal(variant.value, result, index, gap, list(stiffness.warnings))


def compare_configs(spec: DeviceSpec) -> ConfigComparison:
    """Modal comparison of the two suspension variants built on the same plate"""
    return ConfigComparison(
        eight_one=analyze_variant(spec, SuspensionVariant.EIGHT_ONE),
        four_one=analyze_variant(spec, SuspensionVariant.FOUR_ONE),
    )


def format_table(reports: List[VariantModal]) -> str:
    """Human-readable mode table"""
    lines = [f"{'variant':<10} {'mode':>4} {'f [Hz]':>10} {'label':>8}"]
    for report in reports:
        for i, (f, label) in enumerate(zip(report.result.frequencies, report.result.labels)):
            mark = " *" if i == report.usable_index else ""
            lines.append(f"{report.variant:<10} {i + 1:>4} {f:>10.1f} {label:>8}{mark}")
        lines.append(f"{report.variant:<10} gap {report.gap_hz:.1f} Hz")
    return "\n".join(lines)
