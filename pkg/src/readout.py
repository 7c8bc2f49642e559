#!/usr/bin/env python3
"""
📟 Gyroscope Toolkit - Readout Chain

Capacitance-to-voltage conversion, synchronous demodulation, low-pass
filtering, scale factor, noise-equivalent rate and the calibration of the
(otherwise unspecified) electronics against sensitivity and noise targets.
"""

from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple
import logging

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid
from scipy.signal import lfilter

from .config import ReadoutSection
from .dynamics import (
    DEG,
    DriveConfig,
    LumpedGyroModel,
    RateProfile,
    SimTrace,
    brownian_force_psd,
    coriolis_phase,
    drive_for_amplitude,
    lowpass_response,
    rate_transfer,
    sense_transfer,
    simulate,
)
from .errors import CalibrationError, SpecValidationError, UndersampledError

logger = logging.getLogger(__name__)

MIN_SAMPLES_PER_CARRIER = 10
DEFAULT_RATES_DPS = (-200.0, -100.0, -50.0, 0.0, 50.0, 100.0, 200.0)


@dataclass(frozen=True)
class ReadoutChain:
    c2v_gain: float  # V/F
    demod_phase: float  # rad
    lpf_cutoff: float  # Hz
    lpf_order: int = 1
    electronic_noise_psd: float = 0.0  # V/sqrt(Hz)

    def __post_init__(self):
        if self.c2v_gain <= 0 or self.lpf_cutoff <= 0 or self.lpf_order < 1:
            raise SpecValidationError("readout-positive", "c2v gain, LPF cutoff and order must be > 0")
        if self.electronic_noise_psd < 0:
            raise SpecValidationError("readout-noise", "electronic noise PSD must be >= 0")


@dataclass(frozen=True)
class NoiseBudget:
    brownian_force_psd: float  # N/sqrt(Hz)
    electronic_noise_psd: float  # V/sqrt(Hz)
    temperature: float  # K

    def __post_init__(self):
        if min(self.brownian_force_psd, self.electronic_noise_psd, self.temperature) < 0:
            raise SpecValidationError("noise-nonnegative", "noise budget entries must be >= 0")


@dataclass
class ScaleFactorResult:
    rates_dps: np.ndarray
    outputs_v: np.ndarray
    slope_v_per_dps: float
    offset_v: float
    nonlinearity_pct_fs: float
    analytic_v_per_dps: float

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "rate_dps": self.rates_dps,
            "output_V": self.outputs_v,
            "fit_V": self.offset_v + self.slope_v_per_dps * self.rates_dps,
        })


@dataclass
class SpectralMargin:
    tone_hz: float
    peak: float  # V
    floor_rms: float  # V per bin
    margin_db: float


def noise_budget(model: LumpedGyroModel, chain: ReadoutChain) -> NoiseBudget:
    return NoiseBudget(brownian_force_psd(model), chain.electronic_noise_psd, model.temperature)


def cap_to_voltage(dc, chain: ReadoutChain):
    """v = c2v_gain * dC"""
    return chain.c2v_gain * dc


def lowpass(signal: np.ndarray, dt: float, cutoff: float, order: int = 1) -> np.ndarray:
    """Cascaded discrete single-pole low-pass with unit DC gain"""
    alpha = 1.0 - np.exp(-2.0 * np.pi * cutoff * dt)
    out = np.asarray(signal, dtype=float)
    for _ in range(order):
        out = lfilter([alpha], [1.0, alpha - 1.0], out)
    return out


def demodulate(signal: np.ndarray, carrier_freq: float, chain: ReadoutChain, dt: float,
               t0: float = 0.0) -> np.ndarray:
    """Multiply by 2 cos(2 pi f t + phase) and low-pass"""
    if 1.0 / dt < MIN_SAMPLES_PER_CARRIER * carrier_freq:
        raise UndersampledError(f"sample rate {1 / dt:.0f} Hz < {MIN_SAMPLES_PER_CARRIER}x carrier {carrier_freq:g} Hz")
    signal = np.asarray(signal, dtype=float)
    t = t0 + np.arange(signal.size) * dt
    mixed = 2.0 * signal * np.cos(2.0 * np.pi * carrier_freq * t + chain.demod_phase)
    return lowpass(mixed, dt, chain.lpf_cutoff, chain.lpf_order)


def apply_chain(trace: SimTrace, carrier_freq: float, chain: ReadoutChain, noise: Optional[NoiseBudget],
                rng: np.random.Generator) -> SimTrace:
    """Fill v_raw (with electronic noise) and v_out of a simulated trace"""
    v = cap_to_voltage(trace.delta_c, chain)
    psd = noise.electronic_noise_psd if noise is not None else 0.0
    if psd > 0:
        v = v + rng.normal(0.0, psd / np.sqrt(2.0 * trace.dt), size=v.size)
    trace.v_raw = v
    trace.v_out = demodulate(v, carrier_freq, chain, trace.dt, float(trace.t[0]))
    trace.metadata.update({"c2v_gain": chain.c2v_gain, "demod_phase": chain.demod_phase,
                           "lpf_cutoff": chain.lpf_cutoff, "lpf_order": chain.lpf_order})
    return trace


# ---------------------------------------------------------------------------
# Scale factor
# ---------------------------------------------------------------------------

def analytic_scale_factor(model: LumpedGyroModel, chain: ReadoutChain, drive: DriveConfig) -> float:
    """DC demodulated output per deg/s from the linearized response"""
    return float(np.real(rate_transfer(model, chain, drive, 0.0)) * DEG)


def calibrate_gain(model: LumpedGyroModel, chain: ReadoutChain, drive: DriveConfig,
                   target_v_per_dps: float) -> ReadoutChain:
    """Chain whose c2v gain produces the target sensitivity"""
    per_gain = analytic_scale_factor(model, chain, drive) / chain.c2v_gain
    if per_gain <= 0:
        raise CalibrationError("demodulated rate response is not positive; check the demodulation phase")
    return replace(chain, c2v_gain=target_v_per_dps / per_gain)


def scale_factor(model: LumpedGyroModel, chain: ReadoutChain, drive: DriveConfig,
                 rates_dps: Sequence[float] = DEFAULT_RATES_DPS, dt: float = 4.0e-6,
                 settle: float = 0.02, window: float = 0.04) -> ScaleFactorResult:
    """Least-squares slope of demodulated DC output over constant-rate simulations"""
    rates = np.array(sorted(rates_dps), dtype=float)
    outputs = []
    for rate in rates:
        trace = simulate(model, drive, RateProfile.constant_dps(rate), dt=dt, horizon=settle + window, chain=chain)
        outputs.append(float(np.mean(trace.v_out[trace.after(settle)])))
    outputs = np.array(outputs)

    slope, offset = np.polyfit(rates, outputs, 1)
    full_scale = abs(slope) * np.max(np.abs(rates))
    nonlinearity = 100.0 * np.max(np.abs(outputs - (offset + slope * rates))) / full_scale if full_scale else 0.0
    analytic = analytic_scale_factor(model, chain, drive)
    logger.info(f"📟 scale factor {slope * 1e3:.4f} mV/(deg/s) (analytic {analytic * 1e3:.4f}), "
                f"nonlinearity {nonlinearity:.3f}% FS")
    return ScaleFactorResult(rates, outputs, float(slope), float(offset), float(nonlinearity), analytic)


# ---------------------------------------------------------------------------
# Noise
# ---------------------------------------------------------------------------

def output_noise_psd(model: LumpedGyroModel, chain: ReadoutChain, noise: NoiseBudget, drive: DriveConfig,
                     frequency) -> np.ndarray:
    """One-sided PSD (V^2/Hz) of the demodulated output before the low-pass"""
    f = np.asarray(frequency, dtype=float)
    force_psd = noise.brownian_force_psd**2
    sense = np.abs(sense_transfer(model, drive.frequency + f)) ** 2 + np.abs(sense_transfer(model, drive.frequency - f)) ** 2
    frames = model.capacitor.count  # independent Brownian noise per electrode read
    mechanical = (chain.c2v_gain * model.capacitor.sensitivity) ** 2 * frames * force_psd * sense
    return mechanical + 2.0 * noise.electronic_noise_psd**2


def noise_equivalent_rate(model: LumpedGyroModel, chain: ReadoutChain, noise: NoiseBudget, bandwidth: float,
                          drive: Optional[DriveConfig] = None, points: int = 2001) -> float:
    """RMS output noise over [0, bandwidth] divided by the scale factor (deg/s)"""
    if bandwidth <= 0:
        raise SpecValidationError("bandwidth-positive", "bandwidth must be > 0")
    drive = drive or drive_for_amplitude(model)
    f = np.linspace(0.0, bandwidth, points)
    psd = output_noise_psd(model, chain, noise, drive, f) * np.abs(lowpass_response(chain, f)) ** 2
    rms = np.sqrt(trapezoid(psd, f))
    return float(rms / abs(analytic_scale_factor(model, chain, drive)))


def calibrate_electronic_noise(model: LumpedGyroModel, chain: ReadoutChain, drive: DriveConfig, margin_db: float,
                               tone_rate_dps: float, tone_hz: float, window_s: float) -> ReadoutChain:
    """Chain whose electronic noise puts a rate tone `margin_db` above the per-bin spectral floor"""
    tone = abs(rate_transfer(model, chain, drive, tone_hz)) * tone_rate_dps * DEG
    bin_width = 1.0 / window_s
    target = (tone / 10 ** (margin_db / 20.0)) ** 2 / (2.0 * bin_width)
    mechanical = output_noise_psd(model, chain, noise_budget(model, replace(chain, electronic_noise_psd=0.0)), drive, tone_hz)
    electronic_sq = (target / abs(lowpass_response(chain, tone_hz)) ** 2 - float(mechanical)) / 2.0
    if electronic_sq <= 0:
        raise CalibrationError("mechanical noise alone exceeds the requested floor")
    logger.info(f"📟 electronic noise calibrated to {np.sqrt(electronic_sq) * 1e9:.2f} nV/rtHz for {margin_db:g} dB margin")
    return replace(chain, electronic_noise_psd=float(np.sqrt(electronic_sq)))


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------

def amplitude_spectrum(signal: np.ndarray, dt: float) -> Tuple[np.ndarray, np.ndarray]:
    """One-sided amplitude spectrum, rectangular window (a tone of amplitude A reads A)"""
    signal = np.asarray(signal, dtype=float)
    n = signal.size
    amplitude = 2.0 * np.abs(np.fft.rfft(signal)) / n
    amplitude[0] /= 2.0
    return np.fft.rfftfreq(n, dt), amplitude


def spectrum_frame(frequency: np.ndarray, amplitude: np.ndarray) -> pd.DataFrame:
    floor = np.finfo(float).tiny
    return pd.DataFrame({"frequency_Hz": frequency, "amplitude_dBV": 20.0 * np.log10(np.maximum(amplitude, floor))})


def _floor_bins(frequency: np.ndarray, tone_hz: float, f_max: float) -> np.ndarray:
    tone_bin = int(np.argmin(np.abs(frequency - tone_hz)))
    bins = np.flatnonzero((frequency > 0) & (frequency <= f_max))
    return bins[np.abs(bins - tone_bin) > 1]


def spectral_margin(frequency: np.ndarray, amplitude: np.ndarray, tone_hz: float, f_max: float) -> SpectralMargin:
    """Tone peak over the median noise floor (median of Rayleigh bins converted to RMS)"""
    tone_bin = int(np.argmin(np.abs(frequency - tone_hz)))
    bins = _floor_bins(frequency, tone_hz, f_max)
    if bins.size == 0:
        raise SpecValidationError("spectrum-window", f"no noise bins below {f_max:g} Hz; lengthen the analysis window")
    floor = float(np.median(amplitude[bins]) / np.sqrt(np.log(2.0)))
    peak = float(amplitude[tone_bin])
    return SpectralMargin(float(frequency[tone_bin]), peak, floor, float(20 * np.log10(peak / floor)))


def predicted_margin(model: LumpedGyroModel, chain: ReadoutChain, noise: NoiseBudget, drive: DriveConfig,
                     tone_rate_dps: float, tone_hz: float, window_s: float, f_max: float) -> float:
    """Analytic tone-to-floor margin over the same bins spectral_margin uses"""
    bin_width = 1.0 / window_s
    frequency = np.arange(0.0, f_max + bin_width / 2, bin_width)
    bins = _floor_bins(frequency, tone_hz, f_max)
    if bins.size == 0:
        raise SpecValidationError("spectrum-window", f"no noise bins below {f_max:g} Hz; lengthen the analysis window")
    post = output_noise_psd(model, chain, noise, drive, frequency[bins]) * np.abs(lowpass_response(chain, frequency[bins])) ** 2
    tone = abs(rate_transfer(model, chain, drive, tone_hz)) * tone_rate_dps * DEG
    return float(20 * np.log10(tone / np.sqrt(2.0 * np.mean(post) * bin_width)))


def build_readout_chain(section: ReadoutSection, model: LumpedGyroModel, drive: DriveConfig,
                        window_s: float) -> ReadoutChain:
    """Resolve `auto` phase, gain calibration and electronic noise calibration from config"""
    phase = coriolis_phase(model, drive) if section.demod_phase_rad == "auto" else float(section.demod_phase_rad)
    chain = ReadoutChain(
        c2v_gain=section.c2v_gain_v_per_f or 1.0,
        demod_phase=phase,
        lpf_cutoff=section.lpf_cutoff_hz,
        lpf_order=section.lpf_order,
        electronic_noise_psd=section.electronic_noise_psd_v_rthz or 0.0,
    )
    if section.c2v_gain_v_per_f is None:
        if section.target_sensitivity_mv_per_dps is None:
            raise CalibrationError("readout needs either c2v_gain_v_per_f or target_sensitivity_mv_per_dps")
        chain = calibrate_gain(model, chain, drive, section.target_sensitivity_mv_per_dps * 1e-3)
    if section.electronic_noise_psd_v_rthz is None:
        chain = calibrate_electronic_noise(model, chain, drive, section.tone_margin_db,
                                           section.tone_rate_dps, section.tone_frequency_hz, window_s)
    return chain
