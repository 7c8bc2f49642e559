"""
🎵 Modal analysis and the suspension-variant comparison
"""

import numpy as np
import pytest

from src.errors import ModeClassificationError, NotPositiveDefiniteError
from src.geometry import SuspensionVariant
from src.modal import (
    ModalResult,
    analyze_variant,
    classify_modes,
    compare_configs,
    format_table,
    modal_analysis,
    usable_mode_gap,
)
from src.suspension import assemble_suspension


def jacobi_eigenvalues(a: np.ndarray, sweeps: int = 100) -> np.ndarray:
    """Cyclic Jacobi rotations on a symmetric matrix"""
    a = a.copy()
    n = a.shape[0]
    for _ in range(sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off < 1e-15 * np.linalg.norm(a):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta**2 + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q], rot[q, p] = s, -s
                a = rot.T @ a @ rot
    return np.sort(np.diag(a))


def random_spd(rng, n=6, scale=1.0):
    x = rng.normal(size=(n, n))
    return scale * (x @ x.T + n * np.eye(n))


def test_eigenvalues_match_jacobi_oracle():
    rng = np.random.default_rng(3)
    k, m = random_spd(rng, scale=1e3), random_spd(rng)
    r = modal_analysis(k, m)
    l_inv = np.linalg.inv(np.linalg.cholesky(m))
    expected = jacobi_eigenvalues(l_inv @ k @ l_inv.T)
    omega_sq = (2 * np.pi * r.frequencies) ** 2
    assert np.allclose(omega_sq, expected, rtol=1e-8)


def test_shapes_are_mass_orthonormal(reference_spec):
    r = analyze_variant(reference_spec, SuspensionVariant.EIGHT_ONE).result
    assert np.allclose(r.shapes.T @ r.mass @ r.shapes, np.eye(6), atol=1e-8)
    assert np.all(np.diff(r.frequencies) >= 0)


def test_indefinite_stiffness_rejected():
    k = np.eye(6)
    k[0, 0] = -1.0
    with pytest.raises(NotPositiveDefiniteError):
        modal_analysis(k, np.eye(6))


def test_asymmetric_mass_rejected():
    m = np.eye(6)
    m[0, 1] = 0.1
    with pytest.raises(NotPositiveDefiniteError):
        modal_analysis(np.eye(6), m)


def test_diagonal_system_labels():
    k = np.diag([6.0, 5.0, 1.0, 2.0, 3.0, 4.0])
    r = modal_analysis(k, np.eye(6))
    assert r.labels == ["Tz", "Rx", "Ry", "Rz", "Ty", "Tx"]
    assert usable_mode_gap(r) == (0, pytest.approx((np.sqrt(2.0) - 1.0) / (2 * np.pi)))


def test_near_tie_is_reported_mixed():
    shapes = np.zeros((6, 6))
    shapes[:, 0] = [1.0, 0.0, 0.999, 0.0, 0.0, 0.0]
    for i in range(1, 6):
        shapes[i, i] = 1.0
    r = classify_modes(ModalResult(np.arange(1.0, 7.0), shapes, np.eye(6)))
    assert r.labels[0] == "Tx/Tz"
    assert r.mixed == [0]


def test_missing_usable_mode_raises():
    r = ModalResult(np.arange(1.0, 7.0), np.eye(6), np.eye(6), labels=["Tx", "Ty", "Rx", "Ry", "Rz", "Tx"])
    with pytest.raises(ModeClassificationError):
        usable_mode_gap(r)


def test_eight_one_usable_mode_is_fundamental(reference_spec):
    report = analyze_variant(reference_spec, SuspensionVariant.EIGHT_ONE)
    assert report.usable_index == 0
    assert report.result.frequencies[0] == pytest.approx(2386.0, rel=0.35)
    assert report.result.labels[1] == "Ry"


def test_four_one_usable_mode_is_second(reference_spec):
    report = analyze_variant(reference_spec, SuspensionVariant.FOUR_ONE)
    assert report.usable_index == 1
    assert report.result.labels[0] == "Tx"
    assert report.result.frequencies[1] == pytest.approx(4263.0, rel=0.35)


def test_eight_one_gap_is_larger(reference_spec):
    comparison = compare_configs(reference_spec)
    assert comparison.eight_one_gap_larger
    assert comparison.gap_ratio >= 2.0
    payload = comparison.to_dict()
    assert payload["eight_one"]["usable_mode"] == 1
    assert payload["four_one"]["usable_mode"] == 2


def test_table_marks_usable_mode(reference_spec):
    table = format_table([analyze_variant(reference_spec, SuspensionVariant.EIGHT_ONE)])
    assert "Tz *" in table
    assert "gap" in table


def test_stiffness_shift_moves_every_eigenvalue():
    rng = np.random.default_rng(5)
    k, m = random_spd(rng, scale=1e3), random_spd(rng)
    alpha = 250.0
    base = (2 * np.pi * modal_analysis(k, m).frequencies) ** 2
    shifted = (2 * np.pi * modal_analysis(k + alpha * m, m).frequencies) ** 2
    assert np.allclose(shifted, base + alpha, rtol=1e-9)


@pytest.mark.parametrize("factor", [0.25, 4.0])
def test_scaling_the_mass_scales_frequencies(reference_spec, factor):
    r = analyze_variant(reference_spec, SuspensionVariant.EIGHT_ONE).result
    k = assemble_suspension(reference_spec.layout_for(SuspensionVariant.EIGHT_ONE), reference_spec.material)
    heavier = modal_analysis(k, factor * r.mass)
    assert np.allclose(heavier.frequencies, r.frequencies / np.sqrt(factor), rtol=1e-9)
    assert heavier.labels == r.labels
