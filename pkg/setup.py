#!/usr/bin/env python3
"""
🔧 Gyro Design Toolkit Setup Script

Prepare a working tree for the x-axis tuning-fork gyroscope toolkit:
output folders, the numerical stack and a parse of the reference device.
"""

import importlib
import subprocess
import sys
from pathlib import Path
import logging

logging.basicConfig(level=logging.INFO, format="%(levelname)s - %(message)s")
logger = logging.getLogger("gyro_setup")

REFERENCE_CONFIG = Path("config/device_paper.cfg")
OUTPUT_DIRS = ("results", "logs")
STACK = ("numpy", "scipy", "pandas", "pydantic", "yaml", "pytest")


def create_output_dirs():
    """Folders the CLI writes into by default"""
    for name in OUTPUT_DIRS:
        Path(name).mkdir(parents=True, exist_ok=True)
        logger.info(f"✓ {name}/ ready")


def install_requirements() -> bool:
    logger.info("🔄 pip install -r requirements.txt")
    try:
        subprocess.check_call([sys.executable, "-m", "pip", "install", "-r", "requirements.txt"])
    except subprocess.CalledProcessError as e:
        logger.error(f"❌ pip exited with {e.returncode}")
        return False
    logger.info("✅ Requirements installed")
    return True


def check_stack() -> bool:
    """Every numerical package imports"""
    missing = []
    for module in STACK:
        try:
            importlib.import_module(module)
        except ImportError:
            missing.append(module)
    if missing:
        logger.error(f"❌ Cannot import: {', '.join(missing)}")
        return False
    logger.info(f"✅ Imported {len(STACK)} packages")
    return True


def check_reference_device() -> bool:
    """The shipped device file parses and builds a valid DeviceSpec"""
    if not REFERENCE_CONFIG.exists():
        logger.error(f"❌ Missing {REFERENCE_CONFIG}; restore it from version control")
        return False

    from src.errors import GyroToolkitError
    from src.geometry import load_device_spec

    try:
        spec = load_device_spec(REFERENCE_CONFIG.read_text())
    except GyroToolkitError as e:
        logger.error(f"❌ {REFERENCE_CONFIG} is invalid: {e}")
        return False
    logger.info(f"✓ Reference device '{spec.name}' builds ({spec.variant.value} layout)")
    return True


def main():
    logger.info("🔧 Gyro Design Toolkit setup")
    create_output_dirs()

    for step, label in ((install_requirements, "installing requirements"),
                        (check_stack, "checking imports"),
                        (check_reference_device, "loading the reference device")):
        if not step():
            logger.error(f"❌ Setup stopped while {label}")
            sys.exit(1)

    logger.info("🎉 Ready. Try:")
    logger.info("   python -m src.cli modal")
    logger.info("   python -m src.cli --out results/ report")
    logger.info("   pytest tests/unit")


if __name__ == "__main__":
    if len(sys.argv) > 1:
        # Invoked by a build backend (egg_info, bdist_wheel, ...): package metadata lives in pyproject.toml
        from setuptools import setup
        setup()
    else:
        main()
