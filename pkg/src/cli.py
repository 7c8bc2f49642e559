#!/usr/bin/env python3
"""
🔧 Gyroscope Toolkit - Command Line Interface

Analysis commands for the tuning-fork gyroscope: modal comparison, damping,
asymmetry offsets, signal-chain simulation, parameter sweeps and the
measurement-style report bundle.
"""

import asyncio
import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np
import pandas as pd
import yaml

from . import __version__
from .config import DEFAULT_CONFIG_PATH, DeviceConfig, config_hash, parse_device_config, read_config_file
from .damping import (
    DEFAULT_GRID_RESOLUTION,
    cell_damping_modified_reynolds,
    fd_reynolds_oracle,
    squeeze_film_params,
)
from .dynamics import (
    Calibration,
    LumpedGyroModel,
    RateProfile,
    build_lumped_model,
    drive_for_amplitude,
    frequency_response,
    rate_bandwidth,
    simulate,
    tone_amplitude,
)
from .errors import ConfigError, GyroToolkitError, SpecValidationError
from .geometry import DeviceSpec, SuspensionVariant, device_from_config
from .modal import analyze_variant, compare_configs, format_table
from .readout import (
    ReadoutChain,
    amplitude_spectrum,
    build_readout_chain,
    noise_budget,
    noise_equivalent_rate,
    predicted_margin,
    scale_factor,
    spectral_margin,
    spectrum_frame,
)
from .reports import RunManifest, pressure_frame, write_csv, write_json, write_text
from .sensing import AsymmetryCase, offset_vs_asymmetry

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
EXIT_OK, EXIT_COMPUTE, EXIT_USAGE = 0, 1, 2
SWEEP_METRICS = ("damping", "modal")


@dataclass
class SignalChain:
    model: LumpedGyroModel
    drive: Any
    chain: ReadoutChain


def load_run(config_text: str, overrides: Sequence[str]) -> Tuple[DeviceConfig, DeviceSpec]:
    """Parse and build the device; any failure here is a configuration error"""
    cfg = parse_device_config(config_text, overrides)
    try:
        return cfg, device_from_config(cfg)
    except SpecValidationError as e:
        raise ConfigError(str(e)) from e


def damping_row(config_text: str, overrides: Sequence[str]) -> Dict[str, Any]:
    _, spec = load_run(config_text, overrides)
    result = cell_damping_modified_reynolds(squeeze_film_params(spec))
    return {"damping_coeff_N_s_per_m": result.damping_coeff, "quality_factor": result.quality_factor}


def modal_row(config_text: str, overrides: Sequence[str]) -> Dict[str, Any]:
    _, spec = load_run(config_text, overrides)
    report = analyze_variant(spec, spec.variant)
    row = {f"f{i + 1}_Hz": float(f) for i, f in enumerate(report.result.frequencies)}
    row.update({"usable_mode": report.usable_index + 1, "gap_Hz": report.gap_hz})
    return row


def run_sweep(config_text: str, overrides: Sequence[str], parameter: str, values: Sequence[str],
              metric: str = "damping", jobs: int = 4) -> pd.DataFrame:
    """Evaluate `metric` for each value of a dotted config parameter; rows keep input order"""
    if not values:
        raise ConfigError("sweep range is empty", field=parameter)
    if metric not in SWEEP_METRICS:
        raise ConfigError(f"unknown sweep metric '{metric}'")
    evaluate = damping_row if metric == "damping" else modal_row

    def one(value: str) -> Dict[str, Any]:
        row = {parameter: yaml.safe_load(str(value))}
        row.update(evaluate(config_text, list(overrides) + [f"{parameter}={value}"]))
        return row

    async def fan_out() -> List[Dict[str, Any]]:
        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
            return await asyncio.gather(*(loop.run_in_executor(pool, one, v) for v in values))

    rows = [one(v) for v in values] if jobs <= 1 else asyncio.run(fan_out())
    return pd.DataFrame(rows)


def build_signal_chain(cfg: DeviceConfig, spec: DeviceSpec, window_s: float) -> SignalChain:
    """Lumped model (calibrated when the config carries measured resonances) plus readout chain"""
    calibration = None
    if cfg.calibration is not None:
        c = cfg.calibration
        calibration = Calibration(c.drive_hz, c.sense_hz, c.drive_q, c.sense_q)
    model = build_lumped_model(spec, calibration)
    drive = drive_for_amplitude(model)
    chain = build_readout_chain(cfg.readout, model, drive, window_s)
    return SignalChain(model, drive, chain)


def parse_eta_list(text: Optional[str], default: Sequence[float]) -> List[float]:
    if not text:
        return list(default)
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse eta list '{text}'", field="--eta")


def parse_argument(flag: str, build):
    """Build a value from a command-line flag; invariant violations there are usage errors"""
    try:
        return build()
    except SpecValidationError as e:
        raise ConfigError(str(e), field=flag) from e


class GyroToolkitCLI:
    """Command-line interface for gyroscope design analysis"""

    def __init__(self, config_path: Path, overrides: Sequence[str] = (), seed: Optional[int] = None,
                 out_dir: Path = Path("results")):
        self.config_path = Path(config_path)
        self.overrides = list(overrides)
        self.out_dir = Path(out_dir)
        self.config_text = read_config_file(self.config_path)
        self.cfg, self.spec = load_run(self.config_text, self.overrides)
        self.seed = self.cfg.simulation.seed if seed is None else seed

    def manifest(self, command: str) -> RunManifest:
        return RunManifest(
            config_path=str(self.config_path),
            command=command,
            overrides=self.overrides,
            seed=self.seed,
            output_dir=str(self.out_dir),
            tool_version=__version__,
            config_hash=config_hash(self.config_text, self.overrides),
        )

    async def _run(self, fn, *args):
        loop = asyncio.get_running_loop()
        return await loop.run_in_executor(None, fn, *args)

    async def modal_command(self, variant: str = "both") -> Dict[str, Any]:
        """Modal analysis; both variants gives the comparison report"""
        manifest = self.manifest("modal")
        if variant == "both":
            comparison = await self._run(compare_configs, self.spec)
            payload = comparison.to_dict()
            reports = [comparison.eight_one, comparison.four_one]
        else:
            report = await self._run(analyze_variant, self.spec, SuspensionVariant(variant.replace("-", "_")))
            payload = {report.variant: report.to_dict()}
            reports = [report]

        write_json(self.out_dir / "modal_report.json", payload, manifest)
        write_text(self.out_dir / "modal_table.txt", format_table(reports), manifest)

        print("🎵 MODAL ANALYSIS:")
        for report in reports:
            usable = report.usable_index
            print(f"   {report.variant}: mode {usable + 1} is {report.result.labels[usable]} "
                  f"at {report.result.frequencies[usable]:.1f} Hz, gap {report.gap_hz:.1f} Hz")
            for warning in report.warnings:
                print(f"   ⚠️  {warning}")
        if variant == "both":
            mark = "✅" if payload["eight_one_gap_larger"] else "❌"
            print(f"   {mark} EightOne gap larger (ratio {payload['gap_ratio']:.2f})")
        return payload

    async def damping_command(self, method: str = "cell", grid_resolution: int = DEFAULT_GRID_RESOLUTION,
                              export_pressure: bool = False) -> Dict[str, Any]:
        """Squeeze-film damping and sense-mode Q"""
        params = squeeze_film_params(self.spec)
        if method == "fd":
            result = await self._run(fd_reynolds_oracle, params, grid_resolution)
        else:
            result = await self._run(cell_damping_modified_reynolds, params)
        payload = result.to_dict()
        manifest = self.manifest("damping")
        write_json(self.out_dir / "damping_report.json", payload, manifest)
        if export_pressure and result.pressure is not None:
            write_csv(self.out_dir / "damping_pressure.csv",
                      pressure_frame(result.grid_x, result.grid_y, result.pressure), manifest)

        print("💨 DAMPING:")
        print(f"   method: {result.method}")
        print(f"   c = {result.damping_coeff:.4e} N*s/m, Q = {result.quality_factor:.1f}")
        for warning in result.warnings:
            print(f"   ⚠️  {warning}")
        return payload

    async def offset_command(self, eta_text: Optional[str] = None) -> pd.DataFrame:
        """Capacitance offset versus mass asymmetry for both variants"""
        etas = parse_eta_list(eta_text, self.cfg.asymmetry.eta)
        cases = parse_argument("--eta", lambda: [AsymmetryCase(e) for e in etas])
        axis = self.cfg.asymmetry.axis
        eight = offset_vs_asymmetry(self.spec, cases, SuspensionVariant.EIGHT_ONE, axis)
        four = offset_vs_asymmetry(self.spec, cases, SuspensionVariant.FOUR_ONE, axis)
        frame = pd.DataFrame({"eta": eight.eta, "dC_8_1_F": eight.offset, "dC_4_1_F": four.offset})
        write_csv(self.out_dir / "offset.csv", frame, self.manifest("offset"), {"asymmetry_axis": axis})

        print("🔋 ASYMMETRY OFFSET:")
        for row in frame.itertuples(index=False):
            print(f"   eta {row.eta:.4f}: 8-1 {row.dC_8_1_F:.3e} F, 4-1 {row.dC_4_1_F:.3e} F")
        return frame

    async def simulate_command(self, rate_text: str = "sin:10dps@2hz", horizon: Optional[float] = None,
                               settle: Optional[float] = None, noise: bool = True) -> Dict[str, Any]:
        """Time-domain simulation through the readout chain"""
        sim = self.cfg.simulation
        horizon = sim.horizon_s if horizon is None else horizon
        settle = sim.settle_s if settle is None else settle
        rate = parse_argument("--rate", lambda: RateProfile.parse(rate_text))
        signal = build_signal_chain(self.cfg, self.spec, horizon - settle)
        budget = noise_budget(signal.model, signal.chain) if noise else None

        trace = await self._run(lambda: simulate(signal.model, signal.drive, rate, dt=sim.dt_s, horizon=horizon,
                                                 noise=budget, seed=self.seed, chain=signal.chain))
        keep = trace.after(settle)
        v = trace.v_out[keep]
        frequency, amplitude = amplitude_spectrum(v, trace.dt)

        summary: Dict[str, Any] = {
            "rate": rate.describe(),
            "noise": noise,
            "mean_output_V": float(np.mean(v)),
            "rms_output_V": float(np.sqrt(np.mean(v**2))),
            "model": signal.model.summary(),
            "chain": {"c2v_gain_V_per_F": signal.chain.c2v_gain, "demod_phase_rad": signal.chain.demod_phase,
                      "lpf_cutoff_Hz": signal.chain.lpf_cutoff,
                      "electronic_noise_V_per_rtHz": signal.chain.electronic_noise_psd},
        }
        if rate.kind == "sinusoid" and (horizon - settle) * rate.frequency < 1.0:
            logger.warning(f"⚠️ analysis window {horizon - settle:g} s is shorter than one {rate.frequency:g} Hz period; "
                           f"tone margin skipped")
        elif rate.kind == "sinusoid":
            summary["tone_amplitude_V"] = tone_amplitude(v, trace.t[keep], rate.frequency)
            margin = spectral_margin(frequency, amplitude, rate.frequency, 0.25 * signal.chain.lpf_cutoff)
            summary["spectral_margin_dB"] = margin.margin_db

        manifest = self.manifest("simulate")
        write_csv(self.out_dir / "trace.csv", trace.to_frame(), manifest, trace.metadata)
        write_csv(self.out_dir / "spectrum.csv", spectrum_frame(frequency, amplitude), manifest)
        write_json(self.out_dir / "simulate_summary.json", {"metadata": trace.metadata, "summary": summary}, manifest)

        print("🌀 SIMULATION:")
        print(f"   rate {summary['rate']}, {len(trace.t)} samples, seed {self.seed}")
        print(f"   mean output {summary['mean_output_V'] * 1e3:.4f} mV")
        if "spectral_margin_dB" in summary:
            print(f"   tone {summary['tone_amplitude_V'] * 1e3:.4f} mV, {summary['spectral_margin_dB']:.1f} dB above floor")
        return summary

    async def sweep_command(self, parameter: str, values: Sequence[str], metric: str = "damping",
                            jobs: int = 4) -> pd.DataFrame:
        """Concurrent parameter sweep into one aggregated CSV"""
        frame = await self._run(run_sweep, self.config_text, self.overrides, parameter, list(values), metric, jobs)
        write_csv(self.out_dir / f"sweep_{metric}.csv", frame, self.manifest("sweep"), {"parameter": parameter})
        print(f"📈 SWEEP {parameter} ({len(frame)} runs, metric {metric})")
        print(frame.to_string(index=False))
        return frame

    async def report_command(self) -> Dict[str, Any]:
        """Frequency response, time trace, scale-factor sweep and noise spectrum files"""
        sim = self.cfg.simulation
        window = sim.horizon_s - sim.settle_s
        signal = build_signal_chain(self.cfg, self.spec, window)
        model, drive, chain = signal.model, signal.drive, signal.chain
        manifest = self.manifest("report")

        lo = min(model.f_drive, model.f_sense) - 100.0
        hi = max(model.f_drive, model.f_sense) + 100.0
        bode = frequency_response(model, lo, hi, 2001)
        write_csv(self.out_dir / "frequency_response.csv", bode.to_frame(), manifest)

        step_rate = RateProfile.sinusoid_dps(300.0, 5.0)
        trace_horizon = min(sim.horizon_s, sim.settle_s + 2.0 / step_rate.frequency)
        trace = await self._run(lambda: simulate(model, drive, step_rate, dt=sim.dt_s, horizon=trace_horizon,
                                                 seed=self.seed, chain=chain))
        time_frame = pd.DataFrame({"t_s": trace.t, "rate_dps": np.degrees(step_rate(trace.t)), "v_out_V": trace.v_out})
        write_csv(self.out_dir / "time_response.csv", time_frame.iloc[::10], manifest)

        sf = await self._run(scale_factor, model, chain, drive)
        write_csv(self.out_dir / "scale_factor.csv", sf.to_frame(), manifest,
                  {"slope_V_per_dps": sf.slope_v_per_dps, "nonlinearity_pct_fs": sf.nonlinearity_pct_fs})

        budget = noise_budget(model, chain)
        tone = RateProfile.sinusoid_dps(self.cfg.readout.tone_rate_dps, self.cfg.readout.tone_frequency_hz)
        noisy = await self._run(lambda: simulate(model, drive, tone, dt=sim.dt_s, horizon=sim.horizon_s,
                                                 noise=budget, seed=self.seed, chain=chain))
        keep = noisy.after(sim.settle_s)
        frequency, amplitude = amplitude_spectrum(noisy.v_out[keep], noisy.dt)
        write_csv(self.out_dir / "noise_spectrum.csv", spectrum_frame(frequency, amplitude), manifest)

        f_max = 0.25 * chain.lpf_cutoff
        margin = spectral_margin(frequency, amplitude, tone.frequency, f_max)
        summary = {
            "model": model.summary(),
            "drive_peak_Hz": bode.drive_peak_hz,
            "sense_peak_Hz": bode.sense_peak_hz,
            "sensitivity_mV_per_dps": sf.slope_v_per_dps * 1e3,
            "nonlinearity_pct_fs": sf.nonlinearity_pct_fs,
            "rate_bandwidth_Hz": rate_bandwidth(model, chain, drive),
            "noise_equivalent_rate_dps": noise_equivalent_rate(model, chain, budget, 1.0 / window, drive),
            "spectral_margin_dB": margin.margin_db,
            "predicted_margin_dB": predicted_margin(model, chain, budget, drive, self.cfg.readout.tone_rate_dps,
                                                    tone.frequency, window, f_max),
        }
        write_json(self.out_dir / "report_summary.json", summary, manifest)

        print("📊 MEASUREMENT REPORT:")
        print(f"   resonances {model.f_drive:.1f} / {model.f_sense:.1f} Hz (mismatch {model.mismatch_hz:.1f} Hz)")
        print(f"   sensitivity {summary['sensitivity_mV_per_dps']:.4f} mV/(deg/s)")
        print(f"   bandwidth {summary['rate_bandwidth_Hz']:.1f} Hz")
        print(f"   tone margin {summary['spectral_margin_dB']:.1f} dB, resolution {summary['noise_equivalent_rate_dps']:.3f} deg/s")
        return summary

    @staticmethod
    def create_parser() -> argparse.ArgumentParser:
        """Create command-line argument parser"""
        parser = argparse.ArgumentParser(
            prog="gyro",
            description="🔧 Tuning-fork gyroscope design and simulation toolkit",
        )
        parser.add_argument("--config", default=str(DEFAULT_CONFIG_PATH), help="Device config (YAML)")
        parser.add_argument("--seed", type=int, default=None, help="Random seed (default: from config)")
        parser.add_argument("--out", default="results", help="Output directory (default: results)")
        parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                            help="Override a config value, e.g. plate.perforation.pitch_um=100")
        parser.add_argument("--verbose", action="store_true", help="Debug logging")

        subparsers = parser.add_subparsers(dest="command", help="Available commands")

        modal_parser = subparsers.add_parser("modal", help="Rigid-body modal comparison")
        modal_parser.add_argument("--variant", choices=["both", "eight-one", "four-one"], default="both")

        damping_parser = subparsers.add_parser("damping", help="Squeeze-film damping and Q")
        damping_parser.add_argument("--method", choices=["cell", "fd"], default="cell")
        damping_parser.add_argument("--grid-resolution", type=int, default=DEFAULT_GRID_RESOLUTION, help="FD cells per pitch")
        damping_parser.add_argument("--export-pressure", action="store_true", help="Write the FD pressure field")

        offset_parser = subparsers.add_parser("offset", help="Offset versus mass asymmetry")
        offset_parser.add_argument("--eta", default=None, help="Comma-separated asymmetry fractions")

        simulate_parser = subparsers.add_parser("simulate", help="Time-domain signal-chain simulation")
        simulate_parser.add_argument("--rate", default="sin:10dps@2hz", help="const:X | sin:Xdps@Fhz | pwl:t:v,...")
        simulate_parser.add_argument("--horizon", type=float, default=None, help="Seconds (default: from config)")
        simulate_parser.add_argument("--settle", type=float, default=None, help="Seconds discarded before analysis")
        simulate_parser.add_argument("--no-noise", action="store_true", help="Disable Brownian and electronic noise")

        sweep_parser = subparsers.add_parser("sweep", help="Parameter sweep")
        sweep_parser.add_argument("parameter", help="Dotted config key, e.g. plate.perforation.pitch_um")
        sweep_parser.add_argument("--values", default="", help="Comma-separated values")
        sweep_parser.add_argument("--metric", choices=list(SWEEP_METRICS), default="damping")
        sweep_parser.add_argument("--jobs", type=int, default=4, help="Concurrent runs (default: 4)")

        subparsers.add_parser("report", help="Frequency response, time trace, scale factor and noise files")
        return parser


async def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI entry point; returns the process exit code"""
    parser = GyroToolkitCLI.create_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format=LOG_FORMAT)
    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    print("🔧 GYRO TOOLKIT - tuning-fork gyroscope design analysis")
    print("═" * 60)

    try:
        cli = GyroToolkitCLI(Path(args.config), args.overrides, args.seed, Path(args.out))
    except ConfigError as e:
        print(f"❌ Configuration error: {e}")
        return EXIT_USAGE

    try:
        if args.command == "modal":
            await cli.modal_command(args.variant)
        elif args.command == "damping":
            await cli.damping_command(args.method, args.grid_resolution, args.export_pressure)
        elif args.command == "offset":
            await cli.offset_command(args.eta)
        elif args.command == "simulate":
            await cli.simulate_command(args.rate, args.horizon, args.settle, not args.no_noise)
        elif args.command == "sweep":
            values = [v.strip() for v in args.values.split(",") if v.strip()]
            await cli.sweep_command(args.parameter, values, args.metric, args.jobs)
        elif args.command == "report":
            await cli.report_command()
    except ConfigError as e:
        print(f"❌ Configuration error: {e}")
        return EXIT_USAGE
    except GyroToolkitError as e:
        print(f"❌ Computation failed: {e}")
        return EXIT_COMPUTE
    except KeyboardInterrupt:
        print("\n🛑 Operation cancelled by user")
        return EXIT_COMPUTE

    print(f"✅ Done, outputs in {args.out}")
    return EXIT_OK


def run(argv: Optional[Sequence[str]] = None) -> int:
    return asyncio.run(main(argv))


if __name__ == "__main__":
    sys.exit(run())
