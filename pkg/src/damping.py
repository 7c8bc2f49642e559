#!/usr/bin/env python3
"""
💨 Gyroscope Toolkit - Squeeze-Film Damping

Air damping of the perforated proofmass moving against the electrode, from the
modified Reynolds equation: an analytic annular-cell model with hole channel
resistance, and a finite-difference solver used as an independent check.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional
import logging

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .errors import SolverConvergenceError, SpecValidationError
from .geometry import DeviceSpec, PerforationSpec, proofmass_mass

logger = logging.getLogger(__name__)

SQUARE_CHANNEL_RESISTANCE = 28.45  # dimensionless factor of R = k*mu*T/s^4 for a square duct
SQUARE_CONFORMAL_RADIUS = 0.5902  # log-capacity radius of a unit square, Gamma(1/4)^2 / (4 pi^1.5)
SQUEEZE_NUMBER_LIMIT = 1.0
HOLE_COUPLING = 1.0e4
RESIDUAL_LIMIT = 1.0e-8
DEFAULT_GRID_RESOLUTION = 16  # FD cells per pitch
SERIES_TERMS = 201  # odd terms per direction for the unperforated plate


@dataclass(frozen=True)
class SqueezeFilmParams:
    gap: float
    len_x: float
    len_y: float
    perforation: PerforationSpec
    plate_thickness: float  # hole channel length
    air_viscosity: float
    ambient_pressure: float
    frequency: float = 4000.0  # Hz, for the squeeze-number check
    k_eff: Optional[float] = None
    m_eff: Optional[float] = None

    @property
    def perforated(self) -> bool:
        return self.perforation.hole_count > 0


@dataclass
class DampingResult:
    damping_coeff: float  # N*s/m
    quality_factor: Optional[float]
    method: str  # analytic_cell | fd_solver
    warnings: List[str] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)
    pressure: Optional[np.ndarray] = None  # Pa per (m/s), FD only
    grid_x: Optional[np.ndarray] = None
    grid_y: Optional[np.ndarray] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "damping_coeff_n_s_per_m": self.damping_coeff,
            "quality_factor": self.quality_factor,
            "q_convention": "Q = sqrt(k_eff * m_eff) / c",
            "warnings": list(self.warnings),
            "details": {k: v for k, v in self.details.items()},
        }


def squeeze_film_params(spec: DeviceSpec, gap: Optional[float] = None,
                        frequency: Optional[float] = None) -> SqueezeFilmParams:
    """Damping inputs for the configured device; k_eff is the vertical suspension stiffness"""
    from .suspension import assemble_suspension

    stiffness = assemble_suspension(spec.suspension, spec.material)
    return SqueezeFilmParams(
        gap=spec.capacitor.nominal_gap if gap is None else gap,
        len_x=spec.plate.len_x,
        len_y=spec.plate.len_y,
        perforation=spec.plate.perforation,
        plate_thickness=spec.plate.thickness_z,
        air_viscosity=spec.env.air_viscosity,
        ambient_pressure=spec.env.ambient_pressure,
        frequency=spec.drive.resonance_hz if frequency is None else frequency,
        k_eff=stiffness.entry("z", "z"),
        m_eff=proofmass_mass(spec.plate, spec.material),
    )


def _validate(p: SqueezeFilmParams) -> None:
    if p.gap <= 0:
        raise SpecValidationError("gap-positive", "squeeze-film gap must be > 0")
    if p.gap >= 0.1 * min(p.len_x, p.len_y):
        raise SpecValidationError("thin-film", "gap must be much smaller than the plate")
    if p.perforated and p.perforation.pitch <= p.perforation.hole_side:
        raise SpecValidationError("perforation-pitch", "pitch must be larger than hole_side")


def quality_factor(c: float, k_eff: float, m_eff: float) -> float:
    """Q = sqrt(k_eff * m_eff) / c"""
    if c <= 0 or k_eff <= 0 or m_eff <= 0:
        raise SpecValidationError("q-positive", "damping, stiffness and mass must be > 0")
    return float(np.sqrt(k_eff * m_eff) / c)


def squeeze_number(p: SqueezeFilmParams) -> float:
    length = p.perforation.pitch if p.perforated else min(p.len_x, p.len_y)
    omega = 2.0 * np.pi * p.frequency
    return 12.0 * p.air_viscosity * omega * length**2 / (p.ambient_pressure * p.gap**2)


def _regime_warnings(p: SqueezeFilmParams) -> List[str]:
    sigma = squeeze_number(p)
    if sigma < SQUEEZE_NUMBER_LIMIT:
        return []
    msg = f"squeeze number {sigma:.3g} >= {SQUEEZE_NUMBER_LIMIT:g}: gas compressibility not negligible"
    logger.warning(f"⚠️ {msg}")
    return [msg]


def hole_resistance(p: SqueezeFilmParams, side: Optional[float] = None) -> float:
    """Poiseuille flow resistance of one square through-hole (Pa*s/m^3)"""
    s = p.perforation.hole_side if side is None else side
    return SQUARE_CHANNEL_RESISTANCE * p.air_viscosity * p.plate_thickness / s**4


def rectangular_plate_damping(p: SqueezeFilmParams) -> float:
    """Unperforated rectangular plate with open edges (double series)"""
    odd = np.arange(1, 2 * SERIES_TERMS, 2, dtype=float)
    m, n = np.meshgrid(odd, odd, indexing="ij")
    a, b = p.len_x, p.len_y
    series = np.sum(1.0 / (m**2 * n**2 * (m**2 / a**2 + n**2 / b**2)))
    return float(768.0 * p.air_viscosity * a * b / (np.pi**6 * p.gap**3) * series)


def _finish(c: float, p: SqueezeFilmParams, method: str, warnings: List[str], details: Dict[str, Any]) -> DampingResult:
    q = quality_factor(c, p.k_eff, p.m_eff) if p.k_eff and p.m_eff else None
    if q is not None:
        details["k_eff_n_per_m"] = p.k_eff
        details["m_eff_kg"] = p.m_eff
    return DampingResult(c, q, method, warnings, details)


def _edge_row_factor(n: int, leak: float, lateral: float, to_edge: float, edge_share: float) -> float:
    """Hole-pressure force of a row of n cells relative to n interior cells.

    Each cell is one node: it vents through its hole (leak), trades flow with
    its neighbours (lateral) and, at the two ends, with the open plate edge.
    The end cells also hand edge_share of their film flow straight to the edge.
    """
    weight = np.ones(n)
    weight[[0, -1]] -= edge_share
    if n == 1:
        weight[0] = 1.0 - 2.0 * edge_share
    bands = np.zeros((3, n))
    bands[0, 1:] = -lateral
    bands[2, :-1] = -lateral
    bands[1, :] = leak + 2.0 * lateral
    bands[1, [0, -1]] = leak + lateral + to_edge
    if n == 1:
        bands[1, 0] = leak + 2.0 * to_edge
    pressure = scipy.linalg.solve_banded((1, 1), bands, weight)
    return float(leak * np.dot(weight, pressure) / n)


def cell_damping_modified_reynolds(p: SqueezeFilmParams) -> DampingResult:
    """Annular-cell damping summed over the hole array, with edge relief and hole resistance"""
    _validate(p)
    warnings = _regime_warnings(p)
    details: Dict[str, Any] = {"squeeze_number": squeeze_number(p)}

    if not p.perforated:
        c = rectangular_plate_damping(p)
        details["model"] = "unperforated_plate_series"
        logger.info(f"💨 unperforated plate: c = {c:.4e} N*s/m")
        return _finish(c, p, "analytic_cell", warnings, details)

    perf = p.perforation
    mu, h, s, pitch = p.air_viscosity, p.gap, perf.hole_side, perf.pitch
    g = h**3 / (12.0 * mu)
    film_area = pitch**2 - s**2
    web = (pitch - s) / 2

    # square cell -> annulus: inner radius from the hole's log capacity, outer radius keeps the film area
    r0 = SQUARE_CONFORMAL_RADIUS * s
    rc = np.sqrt(r0**2 + film_area / np.pi)
    beta = r0 / rc
    film = 3.0 * np.pi * mu * rc**4 / (2.0 * h**3) * (4.0 * beta**2 - beta**4 - 4.0 * np.log(beta) - 3.0)
    channel = hole_resistance(p) * film_area**2

    lateral = g * (s / (pitch - s) + (pitch - s) / pitch)
    film_cells = float(perf.hole_count)
    edge = 1.0
    for length, count, across in ((p.len_x, perf.count_x, perf.count_y), (p.len_y, perf.count_y, perf.count_x)):
        margin = max(0.0, (length - count * pitch) / 2)
        strip = web + margin
        # outer side strip vents to the open edge instead of ending at a symmetry line
        film_cells -= 2 * across * (1.0 - strip**3 / (4.0 * web**3)) / 4.0
        edge *= _edge_row_factor(
            count,
            leak=1.0 / hole_resistance(p),
            lateral=lateral,
            to_edge=g * (s / strip + (pitch - s) / (pitch / 2 + margin)),
            edge_share=pitch * (web - margin) / (2.0 * film_area),
        )

    c = float(film * film_cells + channel * perf.hole_count * edge)
    details.update({
        "model": "annular_cell",
        "cells": perf.hole_count,
        "film_term_per_cell": float(film),
        "hole_term_per_cell": float(channel),
        "film_cells": film_cells,
        "edge_factor": float(edge),
    })
    logger.info(f"💨 cell model: {perf.hole_count} cells, c = {c:.4e} N*s/m")
    return _finish(c, p, "analytic_cell", warnings, details)


def fd_reynolds_oracle(p: SqueezeFilmParams, grid_resolution: int) -> DampingResult:
    """Finite-difference Reynolds solve on the whole plate.

    grid_resolution is cells per pitch for a perforated plate, cells across
    the shorter side otherwise. Cell-centered grid; holes are nodes that share
    one pressure and vent through the channel resistance.
    """
    _validate(p)
    if grid_resolution < 8:
        raise SpecValidationError("grid-resolution", "grid must resolve the pitch with at least 8 cells")
    warnings = _regime_warnings(p)

    target = (p.perforation.pitch if p.perforated else min(p.len_x, p.len_y)) / grid_resolution
    nx, ny = max(1, int(round(p.len_x / target))), max(1, int(round(p.len_y / target)))
    dx, dy = p.len_x / nx, p.len_y / ny
    xs = -p.len_x / 2 + (np.arange(nx) + 0.5) * dx
    ys = -p.len_y / 2 + (np.arange(ny) + 0.5) * dy
    gx, gy = np.meshgrid(xs, ys, indexing="ij")

    hole_id = -np.ones((nx, ny), dtype=int)
    perf = p.perforation
    if p.perforated:
        half = perf.hole_side / 2
        cx = (np.arange(perf.count_x) - (perf.count_x - 1) / 2) * perf.pitch
        cy = (np.arange(perf.count_y) - (perf.count_y - 1) / 2) * perf.pitch
        ix = np.full(nx, -1)
        iy = np.full(ny, -1)
        for k, c in enumerate(cx):
            ix[np.abs(xs - c) < half] = k
        for k, c in enumerate(cy):
            iy[np.abs(ys - c) < half] = k
        inside = (ix[:, None] >= 0) & (iy[None, :] >= 0)
        hole_id = np.where(inside, ix[:, None] * perf.count_y + iy[None, :], -1)
    is_hole = hole_id >= 0

    g = p.gap**3 / (12.0 * p.air_viscosity)
    index = np.arange(nx * ny).reshape(nx, ny)
    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    vals: List[np.ndarray] = []
    diag_flat = np.zeros(nx * ny)
    diag = diag_flat.reshape(nx, ny)

    def couple(a_sl, b_sl, face: float, spacing: float):
        ha, hb = is_hole[a_sl], is_hole[b_sl]
        cond = np.where(ha & hb, HOLE_COUPLING * g, np.where(ha | hb, 2.0 * g, g)) * face / spacing
        ia, ib = index[a_sl].ravel(), index[b_sl].ravel()
        cond = cond.ravel()
        rows.extend([ia, ib])
        cols.extend([ib, ia])
        vals.extend([-cond, -cond])
        np.add.at(diag_flat, ia, cond)
        np.add.at(diag_flat, ib, cond)

    couple((slice(0, -1), slice(None)), (slice(1, None), slice(None)), dy, dx)
    couple((slice(None), slice(0, -1)), (slice(None), slice(1, None)), dx, dy)

    # open outer edges: p = 0 half a cell away
    diag[0, :] += np.where(is_hole[0, :], 0.0, 2.0 * g * dy / dx)
    diag[-1, :] += np.where(is_hole[-1, :], 0.0, 2.0 * g * dy / dx)
    diag[:, 0] += np.where(is_hole[:, 0], 0.0, 2.0 * g * dx / dy)
    diag[:, -1] += np.where(is_hole[:, -1], 0.0, 2.0 * g * dx / dy)

    effective_side = None
    if p.perforated:
        nodes_per_hole = np.count_nonzero(is_hole) / perf.hole_count
        effective_side = float(np.sqrt(nodes_per_hole * dx * dy))
        if nodes_per_hole == 0:
            raise SpecValidationError("grid-resolution", "grid too coarse to place any hole node")
        leak = dx * dy / (effective_side**2 * hole_resistance(p, effective_side))
        diag[is_hole] += leak

    rows.append(index.ravel())
    cols.append(index.ravel())
    vals.append(diag_flat)
    matrix = scipy.sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(nx * ny, nx * ny)
    ).tocsc()
    source = np.where(is_hole, 0.0, dx * dy).ravel()  # unit plate velocity

    pressure = scipy.sparse.linalg.spsolve(matrix, source, permc_spec="MMD_AT_PLUS_A")
    residual = float(np.linalg.norm(matrix @ pressure - source) / np.linalg.norm(source))
    if not np.all(np.isfinite(pressure)) or residual > RESIDUAL_LIMIT:
        raise SolverConvergenceError("Reynolds linear solve did not converge", residual)

    field_ = pressure.reshape(nx, ny)
    c = float(np.sum(field_[~is_hole]) * dx * dy)
    details = {
        "model": "finite_difference",
        "grid": [nx, ny],
        "cell_size_m": [dx, dy],
        "residual": residual,
        "squeeze_number": squeeze_number(p),
    }
    if effective_side is not None:
        details["effective_hole_side_m"] = effective_side
    logger.info(f"💨 FD Reynolds {nx}x{ny}: c = {c:.4e} N*s/m (residual {residual:.1e})")

    result = _finish(c, p, "fd_solver", warnings, details)
    result.pressure, result.grid_x, result.grid_y = field_, xs, ys
    return result
