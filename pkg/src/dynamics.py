#!/usr/bin/env python3
"""
🌀 Gyroscope Toolkit - Tuning-Fork Dynamics

Lumped two-frame drive/sense model with Coriolis coupling: model building
(from physics or from measured resonances), fixed-step RK4 simulation,
analytic transfer functions, rate bandwidth and common-mode rejection.
"""

from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Any, Dict, Optional, Tuple
import logging
import re

import numpy as np
import pandas as pd
from scipy.constants import Boltzmann
from scipy.optimize import brentq

from .errors import CalibrationError, IntegrationError, SpecValidationError, UndersampledError
from .geometry import DeviceSpec, proofmass_mass
from .sensing import CapacitorSpec, delta_c_translation, pair_delta_c

if TYPE_CHECKING:
    from .readout import NoiseBudget, ReadoutChain

logger = logging.getLogger(__name__)

DEG = np.pi / 180.0
STEPS_PER_SENSE_PERIOD = 50
ENERGY_TOLERANCE = 1.0e-9
ANTI_PHASE = (1.0, -1.0)


@dataclass(frozen=True)
class Calibration:
    """Measured resonances and quality factors"""
    drive_hz: float
    sense_hz: float
    drive_q: float
    sense_q: float


@dataclass(frozen=True)
class LumpedGyroModel:
    """Per-frame drive (y) and sense (z) oscillators; frame 2 may carry mismatch"""
    m_d: float
    m_s: float
    k_d: float
    k_s: float
    c_d: float
    c_s: float
    capacitor: CapacitorSpec
    drive_mismatch: float = 0.0  # fractional k_d offset of frame 2
    sense_mismatch: float = 0.0  # fractional k_s offset of frame 2
    coupling: float = 0.0  # N/m, drive displacement -> sense force
    drive_amplitude: float = 5.0e-6  # m, target drive displacement
    temperature: float = 300.0
    provenance: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("m_d", "m_s", "k_d", "k_s", "c_d", "c_s"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise CalibrationError(f"{name} = {value!r}: lumped parameters must be finite and > 0 (Q = inf is rejected)")

    @property
    def f_drive(self) -> float:
        return float(np.sqrt(self.k_d / self.m_d) / (2 * np.pi))

    @property
    def f_sense(self) -> float:
        return float(np.sqrt(self.k_s / self.m_s) / (2 * np.pi))

    @property
    def q_drive(self) -> float:
        return float(np.sqrt(self.k_d * self.m_d) / self.c_d)

    @property
    def q_sense(self) -> float:
        return float(np.sqrt(self.k_s * self.m_s) / self.c_s)

    @property
    def mismatch_hz(self) -> float:
        return self.f_sense - self.f_drive

    def frame_stiffness(self, frame: int) -> Tuple[float, float]:
        """(k_d, k_s) of frame 0 or 1"""
        if frame == 0:
            return self.k_d, self.k_s
        return self.k_d * (1 + self.drive_mismatch), self.k_s * (1 + self.sense_mismatch)

    def summary(self) -> Dict[str, float]:
        return {
            "f_drive_hz": self.f_drive,
            "f_sense_hz": self.f_sense,
            "mismatch_hz": self.mismatch_hz,
            "q_drive": self.q_drive,
            "q_sense": self.q_sense,
            "m_drive_kg": self.m_d,
            "m_sense_kg": self.m_s,
        }


@dataclass(frozen=True)
class DriveConfig:
    force_amplitude: float  # N
    frequency: float  # Hz
    phases: Tuple[float, float] = ANTI_PHASE  # drive force sign on frame 1, frame 2

    def __post_init__(self):
        if self.force_amplitude < 0:
            raise SpecValidationError("drive-force", "drive force amplitude must be >= 0")
        if sorted(self.phases) != [-1.0, 1.0]:
            raise SpecValidationError("drive-mode", f"frames must be driven anti-phase, got phases {self.phases}")


@dataclass(frozen=True)
class Profile:
    """Time function: constant, sinusoid(amplitude, frequency) or piecewise-linear"""
    kind: str = "constant"
    amplitude: float = 0.0
    frequency: float = 0.0
    phase: float = 0.0
    times: Tuple[float, ...] = ()
    values: Tuple[float, ...] = ()

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return np.full_like(t, self.amplitude)
        if self.kind == "sinusoid":
            return self.amplitude * np.sin(2 * np.pi * self.frequency * t + self.phase)
        if self.kind == "piecewise":
            return np.interp(t, self.times, self.values)
        raise SpecValidationError("profile-kind", f"unknown profile kind '{self.kind}'")

    @property
    def is_zero(self) -> bool:
        if self.kind == "piecewise":
            return not any(self.values)
        return self.amplitude == 0.0

    def describe(self) -> str:
        if self.kind == "sinusoid":
            return f"sin:{self.amplitude:g}@{self.frequency:g}hz"
        if self.kind == "piecewise":
            return "pwl:" + ",".join(f"{t:g}:{v:g}" for t, v in zip(self.times, self.values))
        return f"const:{self.amplitude:g}"


@dataclass(frozen=True)
class RateProfile(Profile):
    """Angular rate about x (rad/s)"""

    @classmethod
    def constant_dps(cls, rate_dps: float) -> "RateProfile":
        return cls("constant", rate_dps * DEG)

    @classmethod
    def sinusoid_dps(cls, amplitude_dps: float, frequency: float) -> "RateProfile":
        return cls("sinusoid", amplitude_dps * DEG, frequency)

    @classmethod
    def parse(cls, text: str) -> "RateProfile":
        """`const:100dps`, `sin:10dps@2hz`, `pwl:0:0,0.1:50dps` (rad/s without the dps suffix)"""
        def value(token: str) -> float:
            token = token.strip().lower()
            if token.endswith("dps"):
                return float(token[:-3]) * DEG
            return float(token.replace("rad/s", "").replace("rads", ""))

        kind, _, body = text.partition(":")
        kind = kind.strip().lower()
        try:
            if kind in ("const", "constant"):
                return cls("constant", value(body))
            if kind in ("sin", "sine", "sinusoid"):
                amp, freq = re.split(r"@", body)
                return cls("sinusoid", value(amp), float(freq.lower().replace("hz", "")))
            if kind in ("pwl", "piecewise"):
                points = [p.split(":") for p in body.split(",")]
                return cls("piecewise", times=tuple(float(t) for t, _ in points),
                           values=tuple(value(v) for _, v in points))
        except ValueError as e:
            raise SpecValidationError("rate-spec", f"cannot parse rate '{text}': {e}")
        raise SpecValidationError("rate-spec", f"unknown rate kind in '{text}'")


@dataclass(frozen=True)
class AccelProfile(Profile):
    """Linear acceleration (m/s^2) along `axis`; only z reaches the sense mode"""
    axis: str = "z"

    def along(self, axis: str, t):
        return self(t) if axis == self.axis else np.zeros_like(np.asarray(t, dtype=float))


@dataclass
class SimTrace:
    t: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    z1: np.ndarray
    z2: np.ndarray
    delta_c: np.ndarray  # F, read-out pair signal (frame 1 minus frame 2 when differential)
    delta_c1: np.ndarray
    delta_c2: np.ndarray
    v_out: Optional[np.ndarray] = None
    v_raw: Optional[np.ndarray] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def dt(self) -> float:
        return float(self.metadata["dt"])

    def after(self, settle: float) -> np.ndarray:
        """Mask of the half-open window [settle, end): (horizon - settle) / dt samples"""
        half = 0.5 * self.dt
        return (self.t >= settle - half) & (self.t < self.t[-1] - half)

    def to_frame(self) -> pd.DataFrame:
        columns = {
            "t_s": self.t,
            "y1_m": self.y1,
            "y2_m": self.y2,
            "z1_m": self.z1,
            "z2_m": self.z2,
            "delta_c_diff_F": self.delta_c,
        }
        if self.v_out is not None:
            columns["v_out_V"] = self.v_out
        return pd.DataFrame(columns)


# ---------------------------------------------------------------------------
# Model building
# ---------------------------------------------------------------------------

def _from_resonance(mass: float, frequency: float, q: float) -> Tuple[float, float]:
    if frequency <= 0 or not np.isfinite(frequency):
        raise CalibrationError(f"resonance {frequency!r} Hz implies a nonpositive stiffness")
    if q <= 0 or not np.isfinite(q):
        raise CalibrationError(f"quality factor {q!r} implies zero or negative damping")
    k = mass * (2 * np.pi * frequency) ** 2
    return k, np.sqrt(k * mass) / q


def build_lumped_model(spec: DeviceSpec, calibration: Optional[Calibration] = None,
                       sense_damping: Optional[float] = None) -> LumpedGyroModel:
    """Lumped model from physics (modal + damping) or rescaled to measured resonances"""
    m_s = proofmass_mass(spec.plate, spec.material)
    m_d = m_s + spec.drive.frame_mass
    provenance: Dict[str, Any] = {"device": spec.name, "variant": spec.variant.value}

    if calibration is not None:
        k_d, c_d = _from_resonance(m_d, calibration.drive_hz, calibration.drive_q)
        k_s, c_s = _from_resonance(m_s, calibration.sense_hz, calibration.sense_q)
        provenance["path"] = "calibrated"
        provenance["calibration"] = {
            "drive_hz": calibration.drive_hz, "sense_hz": calibration.sense_hz,
            "drive_q": calibration.drive_q, "sense_q": calibration.sense_q,
        }
    else:
        from .damping import cell_damping_modified_reynolds, squeeze_film_params
        from .modal import analyze_variant

        usable = analyze_variant(spec, spec.variant)
        f_s = float(usable.result.frequencies[usable.usable_index])
        k_s = m_s * (2 * np.pi * f_s) ** 2
        c_s = sense_damping if sense_damping is not None else \
            cell_damping_modified_reynolds(squeeze_film_params(spec, frequency=f_s)).damping_coeff
        k_d, c_d = _from_resonance(m_d, spec.drive.resonance_hz, spec.drive.quality_factor)
        provenance["path"] = "physics"
        provenance["warnings"] = list(usable.warnings)

    model = LumpedGyroModel(
        m_d=m_d, m_s=m_s, k_d=k_d, k_s=k_s, c_d=c_d, c_s=c_s,
        capacitor=spec.capacitor,
        drive_amplitude=spec.drive.target_amplitude,
        temperature=spec.env.temperature,
        provenance=provenance,
    )
    logger.info(f"🌀 {provenance['path']} model: f_d = {model.f_drive:.1f} Hz, f_s = {model.f_sense:.1f} Hz, "
                f"Q_d = {model.q_drive:.0f}, Q_s = {model.q_sense:.1f}")
    return model


# ---------------------------------------------------------------------------
# Analytic response
# ---------------------------------------------------------------------------

def drive_transfer(model: LumpedGyroModel, frequency, frame: int = 0):
    """Drive displacement per unit force, complex"""
    w = 2 * np.pi * np.asarray(frequency, dtype=float)
    k_d, _ = model.frame_stiffness(frame)
    return 1.0 / (k_d - model.m_d * w**2 + 1j * model.c_d * w)


def sense_transfer(model: LumpedGyroModel, frequency, frame: int = 0):
    """Sense displacement per unit force, complex"""
    w = 2 * np.pi * np.asarray(frequency, dtype=float)
    _, k_s = model.frame_stiffness(frame)
    return 1.0 / (k_s - model.m_s * w**2 + 1j * model.c_s * w)


def drive_for_amplitude(model: LumpedGyroModel, amplitude: Optional[float] = None,
                        frequency: Optional[float] = None) -> DriveConfig:
    """Force amplitude that gives the requested drive displacement at `frequency` (default f_drive)"""
    amplitude = model.drive_amplitude if amplitude is None else amplitude
    frequency = model.f_drive if frequency is None else frequency
    return DriveConfig(float(amplitude / abs(drive_transfer(model, frequency))), float(frequency))


def drive_phasor(model: LumpedGyroModel, drive: DriveConfig, frame: int = 0) -> complex:
    """Complex drive displacement Y with y(t) = Re(Y exp(jwt))"""
    return complex(drive.phases[frame] * drive.force_amplitude * drive_transfer(model, drive.frequency, frame))


def coriolis_phasor(model: LumpedGyroModel, drive: DriveConfig, rate: float, frame: int = 0) -> complex:
    """Steady sense displacement Z under constant rate (rad/s), z(t) = Re(Z exp(jwt))"""
    w = 2 * np.pi * drive.frequency
    y = drive_phasor(model, drive, frame)
    force = -2.0 * model.m_s * rate * 1j * w * y - model.coupling * y
    return complex(force * sense_transfer(model, drive.frequency, frame))


def coriolis_amplitude(model: LumpedGyroModel, drive: DriveConfig, rate: float) -> float:
    """Closed form 2*m_s*Omega*w*Y*|H_s(w)|"""
    w = 2 * np.pi * drive.frequency
    y = abs(drive_phasor(model, drive))
    return float(2.0 * model.m_s * abs(rate) * w * y * abs(sense_transfer(model, drive.frequency)))


def coriolis_phase(model: LumpedGyroModel, drive: DriveConfig) -> float:
    """Phase of the differential Coriolis signal for a positive rate (demodulation reference)"""
    return float(np.angle(coriolis_phasor(model, drive, 1.0, 0)))


@dataclass
class BodeData:
    frequency: np.ndarray
    drive_magnitude: np.ndarray  # m/N
    drive_phase_deg: np.ndarray
    sense_magnitude: np.ndarray  # m/N
    sense_phase_deg: np.ndarray

    @property
    def drive_peak_hz(self) -> float:
        return float(self.frequency[np.argmax(self.drive_magnitude)])

    @property
    def sense_peak_hz(self) -> float:
        return float(self.frequency[np.argmax(self.sense_magnitude)])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "frequency_Hz": self.frequency,
            "drive_mag_m_per_N": self.drive_magnitude,
            "drive_phase_deg": self.drive_phase_deg,
            "sense_mag_m_per_N": self.sense_magnitude,
            "sense_phase_deg": self.sense_phase_deg,
        })


def frequency_response(model: LumpedGyroModel, f_lo: float, f_hi: float, n_points: int) -> BodeData:
    """Analytic single-DOF Bode data of the drive and sense modes"""
    if not f_lo < f_hi:
        raise SpecValidationError("frequency-range", "f_lo must be below f_hi")
    f = np.linspace(f_lo, f_hi, n_points)
    hd, hs = drive_transfer(model, f), sense_transfer(model, f)
    return BodeData(f, np.abs(hd), np.degrees(np.angle(hd)), np.abs(hs), np.degrees(np.angle(hs)))


def lowpass_response(chain: "ReadoutChain", frequency):
    """Complex response of the cascaded single-pole output filter"""
    f = np.asarray(frequency, dtype=float)
    return (1.0 / (1.0 + 1j * f / chain.lpf_cutoff)) ** chain.lpf_order


def rate_transfer(model: LumpedGyroModel, chain: "ReadoutChain", drive: DriveConfig, rate_frequency):
    """Demodulated output per unit rate amplitude at modulation frequency (V per rad/s), complex"""
    fm = np.asarray(rate_frequency, dtype=float)
    w = 2 * np.pi * drive.frequency
    velocity = 1j * w * drive_phasor(model, drive)
    upper = velocity * sense_transfer(model, drive.frequency + fm)
    lower = velocity * sense_transfer(model, drive.frequency - fm)
    phi = chain.demod_phase
    baseband = -model.m_s * (upper * np.exp(-1j * phi) + np.conj(lower) * np.exp(1j * phi))
    return chain.c2v_gain * model.capacitor.count * model.capacitor.sensitivity * baseband * lowpass_response(chain, fm)


def rate_bandwidth(model: LumpedGyroModel, chain: "ReadoutChain", drive: Optional[DriveConfig] = None,
                   f_max: Optional[float] = None, step: float = 0.05) -> float:
    """First -3 dB crossing of the rate-to-output response relative to DC (Hz)"""
    drive = drive or drive_for_amplitude(model)
    dc = abs(rate_transfer(model, chain, drive, 0.0))
    if dc == 0:
        raise CalibrationError("zero DC rate response: check the demodulation phase")
    f_max = f_max or max(4.0 * abs(model.mismatch_hz), 4.0 * model.f_sense / model.q_sense, 10 * chain.lpf_cutoff)

    def excess(fm: float) -> float:
        return abs(rate_transfer(model, chain, drive, fm)) / dc - 1.0 / np.sqrt(2.0)

    grid = np.arange(step, f_max + step, step)
    values = np.abs(rate_transfer(model, chain, drive, grid)) / dc - 1.0 / np.sqrt(2.0)
    below = np.flatnonzero(values < 0)
    if below.size == 0:
        return float(f_max)
    i = below[0]
    lo = grid[i - 1] if i > 0 else 0.0
    return float(brentq(excess, lo, grid[i], xtol=1e-6))


# ---------------------------------------------------------------------------
# Time-domain simulation
# ---------------------------------------------------------------------------

def _system_matrix(model: LumpedGyroModel) -> np.ndarray:
    """Unforced dynamics; state = [y, y', z, z'] per frame"""
    a = np.zeros((8, 8))
    for frame in (0, 1):
        k_d, k_s = model.frame_stiffness(frame)
        o = 4 * frame
        a[o, o + 1] = 1.0
        a[o + 1, o] = -k_d / model.m_d
        a[o + 1, o + 1] = -model.c_d / model.m_d
        a[o + 2, o + 3] = 1.0
        a[o + 3, o + 2] = -k_s / model.m_s
        a[o + 3, o + 3] = -model.c_s / model.m_s
        a[o + 3, o] = -model.coupling / model.m_s
    return a


def mechanical_energy(model: LumpedGyroModel, states: np.ndarray) -> np.ndarray:
    energy = np.zeros(states.shape[0])
    for frame in (0, 1):
        k_d, k_s = model.frame_stiffness(frame)
        y, vy, z, vz = (states[:, 4 * frame + i] for i in range(4))
        energy += 0.5 * (model.m_d * vy**2 + k_d * y**2 + model.m_s * vz**2 + k_s * z**2)
    return energy


def check_energy_decay(model: LumpedGyroModel, states: np.ndarray) -> None:
    """Raise when an unforced trajectory gains energy"""
    energy = mechanical_energy(model, states)
    growth = np.diff(energy) > ENERGY_TOLERANCE * np.maximum(energy[:-1], np.finfo(float).tiny)
    if np.any(growth):
        step = int(np.flatnonzero(growth)[0])
        raise IntegrationError(f"mechanical energy grows without input at step {step}")


def steady_state(model: LumpedGyroModel, drive: DriveConfig, rate0: float, accel0: float) -> np.ndarray:
    """Initial state on the periodic steady state for constant inputs"""
    w = 2 * np.pi * drive.frequency
    x0 = np.zeros(8)
    for frame in (0, 1):
        _, k_s = model.frame_stiffness(frame)
        y = drive_phasor(model, drive, frame)
        z = coriolis_phasor(model, drive, rate0, frame)
        o = 4 * frame
        x0[o:o + 4] = [y.real, (1j * w * y).real, z.real + model.m_s * accel0 / k_s, (1j * w * z).real]
    return x0


def simulate(model: LumpedGyroModel, drive: DriveConfig, rate: RateProfile, accel: Optional[AccelProfile] = None,
             dt: float = 4.0e-6, horizon: float = 0.1, noise: Optional["NoiseBudget"] = None, seed: int = 0,
             chain: Optional["ReadoutChain"] = None, initial_state: Optional[np.ndarray] = None) -> SimTrace:
    """Fixed-step RK4 integration of both frames.

    Per frame i with drive sign s_i:
      m_d y'' + c_d y' + k_d y = s_i F cos(wt)
      m_s z'' + c_s z' + k_s z = -2 m_s Omega y' + m_s a_z + w(t)
    """
    if dt > 1.0 / (STEPS_PER_SENSE_PERIOD * model.f_sense):
        raise UndersampledError(f"dt = {dt:.3e} s exceeds 1/({STEPS_PER_SENSE_PERIOD} f_sense)")
    accel = accel or AccelProfile()
    n = int(round(horizon / dt))
    t = np.arange(n + 1) * dt
    half = np.arange(2 * n + 1) * (dt / 2)

    w = 2 * np.pi * drive.frequency
    force = drive.force_amplitude * np.cos(w * half)
    omega = rate(half)
    acc = accel.along("z", half)

    rng = np.random.default_rng(seed)
    brownian = None
    if noise is not None and noise.brownian_force_psd > 0:
        sigma = noise.brownian_force_psd / np.sqrt(2.0 * dt)
        brownian = rng.normal(0.0, sigma, size=(n, 2)) / model.m_s

    if initial_state is None:
        x = steady_state(model, drive, float(omega[0]), float(acc[0]))
    else:
        x = np.asarray(initial_state, dtype=float).copy()

    a0 = _system_matrix(model)
    push = np.zeros(8)
    push[1], push[5] = drive.phases[0] / model.m_d, drive.phases[1] / model.m_d
    states = np.empty((n + 1, 8))
    states[0] = x

    def deriv(xv, j, w1, w2):
        d = a0 @ xv + push * force[j]
        d[3] += acc[j] + w1 - 2.0 * omega[j] * xv[1]
        d[7] += acc[j] + w2 - 2.0 * omega[j] * xv[5]
        return d

    h = dt
    for k in range(n):
        j = 2 * k
        w1, w2 = (brownian[k, 0], brownian[k, 1]) if brownian is not None else (0.0, 0.0)
        k1 = deriv(x, j, w1, w2)
        k2 = deriv(x + 0.5 * h * k1, j + 1, w1, w2)
        k3 = deriv(x + 0.5 * h * k2, j + 1, w1, w2)
        k4 = deriv(x + h * k3, j + 2, w1, w2)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        states[k + 1] = x

    if not np.all(np.isfinite(states)):
        raise IntegrationError("non-finite state during integration")
    if drive.force_amplitude == 0 and rate.is_zero and accel.is_zero and brownian is None:
        check_energy_decay(model, states)

    dc1 = delta_c_translation(model.capacitor, states[:, 2])
    dc2 = delta_c_translation(model.capacitor, states[:, 6])
    trace = SimTrace(
        t=t, y1=states[:, 0], y2=states[:, 4], z1=states[:, 2], z2=states[:, 6],
        delta_c=pair_delta_c(model.capacitor, dc1, dc2), delta_c1=dc1, delta_c2=dc2,
        metadata={
            "dt": dt, "horizon": horizon, "integrator": "rk4", "seed": seed,
            "drive_hz": drive.frequency, "drive_force_n": drive.force_amplitude,
            "rate": rate.describe(), "accel": accel.describe(),
        },
    )
    if chain is not None:
        from .readout import apply_chain

        apply_chain(trace, drive.frequency, chain, noise, rng)
    logger.debug(f"simulated {n} steps of {dt:.2e} s")
    return trace


def tone_amplitude(signal: np.ndarray, t: np.ndarray, frequency: float) -> float:
    """Amplitude of the component at `frequency` by I/Q projection over whole periods"""
    period = 1.0 / frequency
    dt = t[1] - t[0]
    span = t[-1] - t[0]
    count = int(np.floor(span / period) * period / dt)
    s, tt = signal[-count:], t[-count:]
    phasor = 2.0 * np.mean(s * np.exp(-2j * np.pi * frequency * tt))
    return float(abs(phasor))


@dataclass
class CommonModeReport:
    frame_mismatch: float
    accel_amplitude: float
    differential_peak: float  # F
    single_frame_peak: float  # F
    rejection_db: float
    doubling_ratio: float

    def to_dict(self) -> Dict[str, float]:
        return dict(self.__dict__)


REJECTION_CAP_DB = 300.0


def common_mode_rejection(model: LumpedGyroModel, accel_amplitude: float, frame_mismatch: float,
                          drive: Optional[DriveConfig] = None, dt: float = 4.0e-6,
                          horizon: float = 0.02) -> CommonModeReport:
    """Differential vs single-frame output under pure axial acceleration, plus Coriolis doubling"""
    model = replace(model, sense_mismatch=frame_mismatch)
    drive = drive or drive_for_amplitude(model)

    accel = AccelProfile("constant", accel_amplitude, axis="z")
    trace = simulate(model, drive, RateProfile(), accel, dt=dt, horizon=horizon)
    diff = float(np.max(np.abs(trace.delta_c)))
    single = float(np.max(np.abs(trace.delta_c1)))
    floor = single * 10 ** (-REJECTION_CAP_DB / 20)
    rejection = float(20 * np.log10(single / max(diff, floor))) if single > 0 else 0.0

    symmetric = replace(model, sense_mismatch=0.0)
    coriolis = simulate(symmetric, drive, RateProfile.constant_dps(1.0), dt=dt, horizon=horizon)
    ratio = tone_amplitude(coriolis.delta_c, coriolis.t, drive.frequency) / \
        tone_amplitude(coriolis.delta_c1, coriolis.t, drive.frequency)

    logger.info(f"🌀 common-mode rejection {rejection:.1f} dB at mismatch {frame_mismatch:g}, doubling {ratio:.5f}")
    return CommonModeReport(frame_mismatch, accel_amplitude, diff, single, rejection, float(ratio))


def brownian_force_psd(model: LumpedGyroModel) -> float:
    """sqrt(4 k_B T c_s) in N/sqrt(Hz)"""
    return float(np.sqrt(4.0 * Boltzmann * model.temperature * model.c_s))
