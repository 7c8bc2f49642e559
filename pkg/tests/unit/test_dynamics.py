"""
🌀 Lumped two-frame dynamics
"""

from dataclasses import replace

import numpy as np
import pytest

from src.dynamics import (
    DEG,
    AccelProfile,
    Calibration,
    DriveConfig,
    RateProfile,
    brownian_force_psd,
    build_lumped_model,
    check_energy_decay,
    common_mode_rejection,
    coriolis_amplitude,
    coriolis_phase,
    drive_for_amplitude,
    drive_phasor,
    frequency_response,
    rate_bandwidth,
    simulate,
    tone_amplitude,
)
from src.errors import CalibrationError, IntegrationError, SpecValidationError, UndersampledError
from src.geometry import SuspensionVariant
from src.modal import analyze_variant
from src.readout import NoiseBudget, ReadoutChain, amplitude_spectrum


def sense_amplitude(model, drive, rate_dps, dt=4.0e-6, horizon=0.01):
    trace = simulate(model, drive, RateProfile.constant_dps(rate_dps), dt=dt, horizon=horizon)
    return tone_amplitude(trace.z1, trace.t, drive.frequency)


def test_calibrated_resonances(calibrated_model):
    assert calibrated_model.f_drive == pytest.approx(3998.0, rel=1e-12)
    assert calibrated_model.f_sense == pytest.approx(4020.0, rel=1e-12)
    assert calibrated_model.mismatch_hz == pytest.approx(22.0, abs=1e-9)
    assert calibrated_model.q_sense == pytest.approx(67.0)
    assert calibrated_model.provenance["path"] == "calibrated"


def test_physics_model_uses_modal_frequency(reference_spec):
    model = build_lumped_model(reference_spec)
    usable = analyze_variant(reference_spec, SuspensionVariant.EIGHT_ONE)
    assert model.f_sense == pytest.approx(usable.result.frequencies[usable.usable_index], rel=1e-9)
    assert 47.0 <= model.q_sense <= 87.0
    assert model.provenance["path"] == "physics"


def test_bad_calibration_rejected(reference_spec, calibrated_model):
    with pytest.raises(CalibrationError):
        build_lumped_model(reference_spec, Calibration(3998.0, 4020.0, 500.0, 0.0))
    with pytest.raises(CalibrationError):
        replace(calibrated_model, c_s=float("inf"))


def test_drive_amplitude_reached(calibrated_model, reference_drive):
    assert abs(drive_phasor(calibrated_model, reference_drive)) == pytest.approx(5e-6, rel=1e-12)
    assert reference_drive.frequency == pytest.approx(3998.0)


def test_frequency_response_peaks(calibrated_model):
    bode = frequency_response(calibrated_model, 3900.0, 4150.0, 2501)
    assert bode.drive_peak_hz == pytest.approx(3998.0, abs=0.2)
    assert bode.sense_peak_hz == pytest.approx(4020.0, abs=0.5)
    peak = bode.sense_magnitude.max()
    band = bode.frequency[bode.sense_magnitude >= peak / np.sqrt(2.0)]
    assert band[-1] - band[0] == pytest.approx(4020.0 / 67.0, rel=2e-2)
    assert list(bode.to_frame().columns)[0] == "frequency_Hz"


def test_frequency_range_checked(calibrated_model):
    with pytest.raises(SpecValidationError):
        frequency_response(calibrated_model, 4100.0, 3900.0, 11)


def test_no_rate_no_sense_motion(calibrated_model, reference_drive):
    trace = simulate(calibrated_model, reference_drive, RateProfile(), horizon=0.005)
    assert np.max(np.abs(trace.z1)) == 0.0
    assert np.max(np.abs(trace.delta_c)) == 0.0
    assert np.max(np.abs(trace.y1)) == pytest.approx(5e-6, rel=1e-2)


def test_analysis_window_spans_whole_steps(calibrated_model, reference_drive):
    settle, horizon, dt = 0.01, 0.06, 4.0e-6
    trace = simulate(calibrated_model, reference_drive, RateProfile(), dt=dt, horizon=horizon)
    keep = trace.after(settle)
    assert np.count_nonzero(keep) == 12500
    assert trace.t[keep][0] == pytest.approx(settle)
    assert trace.t[keep][-1] == pytest.approx(horizon - dt)
    frequency, _ = amplitude_spectrum(trace.z1[keep], dt)
    assert frequency[2] == pytest.approx(40.0, abs=1e-9)


def test_coriolis_amplitude_matches_closed_form(calibrated_model, reference_drive):
    simulated = sense_amplitude(calibrated_model, reference_drive, 100.0)
    assert simulated == pytest.approx(coriolis_amplitude(calibrated_model, reference_drive, 100.0 * DEG), rel=2e-2)


def test_start_from_rest_settles_to_closed_form(calibrated_model, reference_drive):
    trace = simulate(calibrated_model, reference_drive, RateProfile.constant_dps(100.0),
                     dt=4.0e-6, horizon=0.4, initial_state=np.zeros(8))
    keep = trace.after(0.35)
    simulated = tone_amplitude(trace.z1[keep], trace.t[keep], reference_drive.frequency)
    assert simulated == pytest.approx(coriolis_amplitude(calibrated_model, reference_drive, 100.0 * DEG), rel=2e-3)


def test_sense_amplitude_per_rate(calibrated_model, reference_drive):
    assert coriolis_amplitude(calibrated_model, reference_drive, DEG) == pytest.approx(3.73e-10, rel=1e-2)


def test_response_is_linear_in_rate(calibrated_model, reference_drive):
    low = sense_amplitude(calibrated_model, reference_drive, 20.0)
    high = sense_amplitude(calibrated_model, reference_drive, 200.0)
    assert high / low == pytest.approx(10.0, rel=5e-3)


def test_rk4_step_halving(calibrated_model, reference_drive):
    coarse = sense_amplitude(calibrated_model, reference_drive, 100.0, dt=4.0e-6)
    fine = sense_amplitude(calibrated_model, reference_drive, 100.0, dt=2.0e-6)
    assert abs(coarse - fine) / fine < 1e-3


def test_undersampled_step_rejected(calibrated_model, reference_drive):
    with pytest.raises(UndersampledError):
        simulate(calibrated_model, reference_drive, RateProfile(), dt=1e-5, horizon=0.001)


def test_free_decay_loses_energy(calibrated_model):
    idle = DriveConfig(0.0, calibrated_model.f_drive)
    start = np.array([1e-6, 0.0, 1e-7, 0.0, -1e-6, 0.0, -1e-7, 0.0])
    trace = simulate(calibrated_model, idle, RateProfile(), dt=4e-6, horizon=0.005, initial_state=start)
    assert abs(trace.y1[-1]) < 1e-6


def test_energy_growth_detected(calibrated_model):
    states = np.zeros((3, 8))
    states[:, 0] = [1e-6, 2e-6, 3e-6]
    with pytest.raises(IntegrationError):
        check_energy_decay(calibrated_model, states)


def test_seeded_noise_is_reproducible(calibrated_model, reference_drive):
    noise = NoiseBudget(brownian_force_psd(calibrated_model), 0.0, 300.0)
    a = simulate(calibrated_model, reference_drive, RateProfile(), horizon=0.002, noise=noise, seed=11)
    b = simulate(calibrated_model, reference_drive, RateProfile(), horizon=0.002, noise=noise, seed=11)
    c = simulate(calibrated_model, reference_drive, RateProfile(), horizon=0.002, noise=noise, seed=12)
    assert np.array_equal(a.z1, b.z1)
    assert not np.array_equal(a.z1, c.z1)


def test_common_acceleration_rejected(calibrated_model, reference_drive):
    report = common_mode_rejection(calibrated_model, 9.81, 0.0, reference_drive, horizon=0.005)
    assert report.rejection_db >= 120.0
    assert report.doubling_ratio == pytest.approx(2.0, rel=1e-3)


def test_rejection_falls_with_mismatch(calibrated_model, reference_drive):
    small = common_mode_rejection(calibrated_model, 9.81, 0.001, reference_drive, horizon=0.005)
    large = common_mode_rejection(calibrated_model, 9.81, 0.01, reference_drive, horizon=0.005)
    assert np.isfinite(small.rejection_db)
    assert small.rejection_db > large.rejection_db
    assert large.rejection_db < 120.0


def test_single_frame_sees_acceleration(calibrated_model, reference_drive):
    trace = simulate(calibrated_model, reference_drive, RateProfile(), AccelProfile("constant", 9.81), horizon=0.002)
    assert np.all(trace.z1 > 0)
    assert np.allclose(trace.z1, trace.z2)


def test_matched_mode_bandwidth(reference_spec):
    model = build_lumped_model(reference_spec, Calibration(4020.0, 4020.0, 500.0, 67.0))
    drive = drive_for_amplitude(model)
    chain = ReadoutChain(1.0, coriolis_phase(model, drive), lpf_cutoff=1000.0)
    assert rate_bandwidth(model, chain, drive) == pytest.approx(4020.0 / (2 * 67.0), rel=0.1)


def test_mismatch_widens_bandwidth(calibrated_model, reference_drive):
    chain = ReadoutChain(1.0, coriolis_phase(calibrated_model, reference_drive), lpf_cutoff=1000.0)
    assert rate_bandwidth(calibrated_model, chain, reference_drive) > 4020.0 / (2 * 67.0)


@pytest.mark.parametrize(
    "text, kind, amplitude, frequency",
    [
        ("const:100dps", "constant", 100 * DEG, 0.0),
        ("const:0.5", "constant", 0.5, 0.0),
        ("sin:10dps@2hz", "sinusoid", 10 * DEG, 2.0),
    ],
)
def test_rate_profile_parsing(text, kind, amplitude, frequency):
    profile = RateProfile.parse(text)
    assert profile.kind == kind
    assert profile.amplitude == pytest.approx(amplitude)
    assert profile.frequency == frequency


def test_piecewise_rate_profile():
    profile = RateProfile.parse("pwl:0:0,0.1:50dps")
    assert profile(np.array([0.05]))[0] == pytest.approx(25 * DEG)
    assert profile.describe().startswith("pwl:")


def test_unknown_rate_profile():
    with pytest.raises(SpecValidationError):
        RateProfile.parse("square:10dps")
