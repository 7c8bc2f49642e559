#!/usr/bin/env python3
"""
🔧 Gyro Design Toolkit - Implementation Test

Quick end-to-end pass over the reference device: modes, damping,
asymmetry offset, Coriolis response and scale factor.
"""

import sys
from pathlib import Path
import logging

# Add repo root to path so `src` imports as a package
sys.path.insert(0, str(Path(__file__).parent))

from src.cli import build_signal_chain
from src.config import DEFAULT_CONFIG_PATH, parse_device_config, read_config_file
from src.damping import cell_damping_modified_reynolds, squeeze_film_params
from src.dynamics import coriolis_amplitude, DEG
from src.errors import GyroToolkitError
from src.geometry import SuspensionVariant, device_from_config
from src.modal import compare_configs
from src.readout import noise_budget, noise_equivalent_rate, scale_factor
from src.sensing import AsymmetryCase, offset_vs_asymmetry

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def test_gyro_toolkit():
    """Run the reference device through every stage"""
    print("🔧 GYRO DESIGN TOOLKIT IMPLEMENTATION TEST")
    print("=" * 60)

    # 1. Load the device
    print(f"\n📂 Step 1: Loading {DEFAULT_CONFIG_PATH}...")
    cfg = parse_device_config(read_config_file(DEFAULT_CONFIG_PATH))
    spec = device_from_config(cfg)
    print(f"✅ Device '{cfg.name}' loaded")

    # 2. Modes
    print("\n🎵 Step 2: Modal comparison...")
    comparison = compare_configs(spec)
    for report in (comparison.eight_one, comparison.four_one):
        print(f"   {report.variant}: usable mode gap {report.gap_hz:.0f} Hz")
    if not comparison.eight_one_gap_larger:
        print("❌ 8-1 layout does not isolate the sense mode better than 4-1")
        return False

    # 3. Damping
    print("\n💨 Step 3: Squeeze-film damping...")
    damping = cell_damping_modified_reynolds(squeeze_film_params(spec))
    print(f"   c = {damping.damping_coeff:.4e} N·s/m, Q = {damping.quality_factor:.1f}")

    # 4. Asymmetry offset
    print("\n🔋 Step 4: Offset at 2% mass asymmetry...")
    case = AsymmetryCase(0.02)
    for variant in (SuspensionVariant.EIGHT_ONE, SuspensionVariant.FOUR_ONE):
        curve = offset_vs_asymmetry(spec, case, variant)
        print(f"   {variant.value}: {curve.offset[-1] * 1e15:.3f} fF")

    # 5. Signal chain
    print("\n🌀 Step 5: Coriolis response and scale factor...")
    window = cfg.simulation.horizon_s - cfg.simulation.settle_s
    signal = build_signal_chain(cfg, spec, window)
    z = coriolis_amplitude(signal.model, signal.drive, 1.0 * DEG)
    print(f"   sense amplitude {z:.3e} m per deg/s")
    result = scale_factor(signal.model, signal.chain, signal.drive)
    print(f"   scale factor {result.slope_v_per_dps * 1e3:.4f} mV/(deg/s), "
          f"nonlinearity {result.nonlinearity_pct_fs:.3f}% FS")
    ner = noise_equivalent_rate(signal.model, signal.chain, noise_budget(signal.model, signal.chain),
                                1.0 / window, signal.drive)
    print(f"   noise-equivalent rate {ner:.4f} deg/s")

    print("\n🎉 IMPLEMENTATION TEST COMPLETE!")
    print("\n💡 Next steps:")
    print("   • python -m src.cli report --out results/")
    print("   • python -m src.cli sweep capacitor.gap_um --values 3,4,5,6")
    return True


if __name__ == "__main__":
    try:
        success = test_gyro_toolkit()
    except GyroToolkitError as e:
        logger.error(f"❌ {e}")
        success = False
    if success:
        print("\n✅ All checks passed!")
        sys.exit(0)
    else:
        print("\n❌ Checks failed!")
        sys.exit(1)
