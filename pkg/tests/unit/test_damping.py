"""
💨 Squeeze-film damping: cell model, FD Reynolds solver and their agreement
"""

import numpy as np
import pytest

from src.damping import (
    SqueezeFilmParams,
    _edge_row_factor,
    cell_damping_modified_reynolds,
    fd_reynolds_oracle,
    hole_resistance,
    quality_factor,
    rectangular_plate_damping,
    squeeze_film_params,
)
from src.errors import SpecValidationError
from src.geometry import UM, PerforationSpec

MU = 1.85e-5
NO_HOLES = PerforationSpec(50 * UM, 250 * UM, 0, 0)


def plate(len_x, len_y, gap, perforation=NO_HOLES, thickness=300 * UM):
    return SqueezeFilmParams(gap, len_x, len_y, perforation, thickness, MU, 101325.0, frequency=4000.0)


def square_series(side: float, gap: float, terms: int = 401) -> float:
    """Open-edge square plate, summed independently of the library"""
    total = 0.0
    for m in range(1, 2 * terms, 2):
        n = np.arange(1, 2 * terms, 2, dtype=float)
        total += np.sum(1.0 / (m**2 * n**2 * (m**2 + n**2)))
    return 768.0 * MU * side**4 / (np.pi**6 * gap**3) * total


def test_reference_quality_factor(reference_spec):
    result = cell_damping_modified_reynolds(squeeze_film_params(reference_spec))
    assert 47.0 <= result.quality_factor <= 87.0
    assert result.quality_factor == pytest.approx(67.0, rel=0.3)
    assert result.details["cells"] == 66 * 25
    assert 0 < result.details["edge_factor"] < 1


def test_quality_factor_convention():
    assert quality_factor(2.0, 8.0, 2.0) == pytest.approx(2.0)
    with pytest.raises(SpecValidationError):
        quality_factor(0.0, 1.0, 1.0)


def test_long_strip_limit():
    width, length, gap = 200 * UM, 20000 * UM, 3 * UM
    c = rectangular_plate_damping(plate(length, width, gap))
    assert c == pytest.approx(MU * length * width**3 / gap**3, rel=2e-2)


def test_unperforated_square_matches_series():
    p = plate(1000 * UM, 1000 * UM, 5 * UM)
    fd = fd_reynolds_oracle(p, 128)
    assert fd.damping_coeff == pytest.approx(square_series(1000 * UM, 5 * UM), rel=2e-2)
    assert rectangular_plate_damping(p) == pytest.approx(square_series(1000 * UM, 5 * UM), rel=1e-4)


def test_fd_refinement_converges():
    p = plate(1000 * UM, 1000 * UM, 5 * UM)
    c128 = fd_reynolds_oracle(p, 128).damping_coeff
    c256 = fd_reynolds_oracle(p, 256).damping_coeff
    assert abs(c256 - c128) / c256 < 1e-2


def test_unperforated_cell_model_uses_plate_series():
    p = plate(1000 * UM, 600 * UM, 5 * UM)
    result = cell_damping_modified_reynolds(p)
    assert result.details["model"] == "unperforated_plate_series"
    assert result.quality_factor is None


@pytest.mark.parametrize("pitch_um", [60.0, 80.0, 100.0])
@pytest.mark.parametrize("gap_um", [3.0, 5.0, 8.0])
def test_cell_model_agrees_with_fd(pitch_um, gap_um):
    perf = PerforationSpec(40 * UM, pitch_um * UM, 10, 10)
    p = plate(10 * pitch_um * UM, 10 * pitch_um * UM, gap_um * UM, perf)
    cell = cell_damping_modified_reynolds(p).damping_coeff
    fd = fd_reynolds_oracle(p, int(round(pitch_um / 2.5))).damping_coeff
    assert cell == pytest.approx(fd, rel=0.10)


def test_damping_falls_as_holes_widen():
    values = []
    for side_um in (20.0, 30.0, 40.0, 50.0, 60.0, 70.0):
        perf = PerforationSpec(side_um * UM, 80 * UM, 10, 10)
        values.append(cell_damping_modified_reynolds(plate(800 * UM, 800 * UM, 5 * UM, perf)).damping_coeff)
    assert all(a > b for a, b in zip(values, values[1:]))


def test_damping_vanishes_as_holes_fill_the_pitch():
    def damping(side_um):
        perf = PerforationSpec(side_um * UM, 80 * UM, 10, 10)
        return cell_damping_modified_reynolds(plate(800 * UM, 800 * UM, 5 * UM, perf)).damping_coeff

    assert 0 < damping(79.9) < 1e-4 * damping(40.0)


def test_unperforated_damping_scales_inverse_gap_cubed():
    c3 = cell_damping_modified_reynolds(plate(1000 * UM, 600 * UM, 3 * UM)).damping_coeff
    c6 = cell_damping_modified_reynolds(plate(1000 * UM, 600 * UM, 6 * UM)).damping_coeff
    assert c3 / c6 == pytest.approx(8.0, rel=1e-9)


def test_film_term_scales_inverse_gap_cubed_and_hole_term_does_not():
    perf = PerforationSpec(40 * UM, 80 * UM, 10, 10)
    thin = cell_damping_modified_reynolds(plate(800 * UM, 800 * UM, 3 * UM, perf)).details
    thick = cell_damping_modified_reynolds(plate(800 * UM, 800 * UM, 6 * UM, perf)).details
    assert thin["film_term_per_cell"] / thick["film_term_per_cell"] == pytest.approx(8.0, rel=1e-9)
    assert thin["hole_term_per_cell"] == pytest.approx(thick["hole_term_per_cell"], rel=1e-12)


def test_closed_edge_row_behaves_like_interior():
    assert _edge_row_factor(12, leak=2.0, lateral=0.5, to_edge=0.0, edge_share=0.0) == pytest.approx(1.0)
    vented = _edge_row_factor(12, leak=2.0, lateral=0.5, to_edge=1.0, edge_share=0.15)
    assert 0.0 < vented < 1.0


def test_fd_pressure_field_peaks_inside():
    perf = PerforationSpec(40 * UM, 80 * UM, 8, 6)
    result = fd_reynolds_oracle(plate(640 * UM, 480 * UM, 5 * UM, perf), 16)
    assert result.pressure.shape == (result.grid_x.size, result.grid_y.size)
    assert result.pressure.max() > 0
    assert result.details["effective_hole_side_m"] == pytest.approx(40 * UM)
    assert result.details["residual"] < 1e-8


def test_more_holes_means_less_damping():
    dense = PerforationSpec(40 * UM, 60 * UM, 10, 10)
    sparse = PerforationSpec(40 * UM, 120 * UM, 5, 5)
    a = cell_damping_modified_reynolds(plate(600 * UM, 600 * UM, 5 * UM, dense)).damping_coeff
    b = cell_damping_modified_reynolds(plate(600 * UM, 600 * UM, 5 * UM, sparse)).damping_coeff
    assert a < b


def test_hole_resistance_scales_with_side():
    perf = PerforationSpec(40 * UM, 80 * UM, 1, 1)
    p = plate(80 * UM * 20, 80 * UM * 20, 5 * UM, perf)
    assert hole_resistance(p, 20 * UM) / hole_resistance(p, 40 * UM) == pytest.approx(16.0)


def test_coarse_grid_rejected():
    with pytest.raises(SpecValidationError):
        fd_reynolds_oracle(plate(1000 * UM, 1000 * UM, 5 * UM), 4)


def test_gap_must_be_thin():
    with pytest.raises(SpecValidationError):
        cell_damping_modified_reynolds(plate(1000 * UM, 1000 * UM, 200 * UM))


def test_high_squeeze_number_warns():
    p = SqueezeFilmParams(1 * UM, 2000 * UM, 2000 * UM, NO_HOLES, 300 * UM, MU, 101325.0, frequency=50000.0)
    assert cell_damping_modified_reynolds(p).warnings
