#!/usr/bin/env python3
"""
📊 Gyroscope Toolkit - Output Files

Every file starts with the run manifest so a result can be traced back to the
exact config, overrides, seed and tool version that produced it.
"""

from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional
import json
import logging

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.8e"  # 9 significant digits


@dataclass
class RunManifest:
    config_path: str
    command: str
    overrides: List[str] = field(default_factory=list)
    seed: int = 0
    output_dir: str = "results"
    tool_version: str = ""
    config_hash: str = ""

    def header_lines(self) -> List[str]:
        return [f"# {key}: {json.dumps(value)}" for key, value in asdict(self).items()]


def _plain(value: Any) -> Any:
    """JSON-safe copy of numpy scalars/arrays"""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return _plain(value.item())
    if isinstance(value, float) and not np.isfinite(value):
        return str(value)
    return value


def write_csv(path: Path, frame: pd.DataFrame, manifest: RunManifest,
              metadata: Optional[Dict[str, Any]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = manifest.header_lines()
    for key, value in (metadata or {}).items():
        lines.append(f"# {key}: {json.dumps(_plain(value))}")
    with open(path, "w", newline="") as f:
        f.write("\n".join(lines) + "\n")
        frame.to_csv(f, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"📄 wrote {path}")
    return path


def write_json(path: Path, payload: Dict[str, Any], manifest: RunManifest) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {"manifest": asdict(manifest), "data": _plain(payload)}
    with open(path, "w") as f:
        json.dump(document, f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info(f"📄 wrote {path}")
    return path


def write_text(path: Path, text: str, manifest: RunManifest) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(manifest.header_lines()) + "\n" + text + "\n")
    return path


def read_csv(path: Path) -> pd.DataFrame:
    """Read a CSV written by write_csv (manifest lines skipped)"""
    return pd.read_csv(path, comment="#")


def pressure_frame(grid_x: np.ndarray, grid_y: np.ndarray, pressure: np.ndarray) -> pd.DataFrame:
    """Long-format pressure field (Pa per m/s of plate velocity)"""
    gx, gy = np.meshgrid(grid_x, grid_y, indexing="ij")
    return pd.DataFrame({"x_m": gx.ravel(), "y_m": gy.ravel(), "pressure_Pa_per_m_s": pressure.ravel()})
