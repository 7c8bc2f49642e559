"""
📊 Output files and run manifests
"""

import json

import numpy as np
import pandas as pd

from src.reports import RunManifest, pressure_frame, read_csv, write_csv, write_json, write_text


def manifest(tmp_path):
    return RunManifest("config/device_paper.cfg", "damping", ["capacitor.gap_um=4"], 7, str(tmp_path), "0.2.0", "abc123")


def test_csv_starts_with_manifest(tmp_path):
    path = write_csv(tmp_path / "out" / "table.csv", pd.DataFrame({"a": [1.0, 2.5]}), manifest(tmp_path),
                     {"note": np.float64(3.0)})
    lines = path.read_text().splitlines()
    assert lines[0] == '# config_path: "config/device_paper.cfg"'
    assert '# overrides: ["capacitor.gap_um=4"]' in lines
    assert "# note: 3.0" in lines
    assert "2.50000000e+00" in lines[-1]
    frame = read_csv(path)
    assert list(frame["a"]) == [1.0, 2.5]


def test_json_wraps_manifest_and_data(tmp_path):
    path = write_json(tmp_path / "report.json", {"values": np.arange(3), "q": np.float64(55.4), "bad": float("nan")},
                      manifest(tmp_path))
    document = json.loads(path.read_text())
    assert document["manifest"]["seed"] == 7
    assert document["data"]["values"] == [0, 1, 2]
    assert document["data"]["q"] == 55.4
    assert document["data"]["bad"] == "nan"


def test_identical_inputs_give_identical_files(tmp_path):
    frame = pd.DataFrame({"x": np.linspace(0, 1, 5)})
    a = write_csv(tmp_path / "a.csv", frame, manifest(tmp_path))
    b = write_csv(tmp_path / "b.csv", frame, manifest(tmp_path))
    assert a.read_bytes() == b.read_bytes()


def test_text_report(tmp_path):
    path = write_text(tmp_path / "table.txt", "mode table", manifest(tmp_path))
    assert path.read_text().rstrip().endswith("mode table")


def test_pressure_frame_is_long_format():
    frame = pressure_frame(np.array([0.0, 1.0]), np.array([0.0, 2.0, 4.0]), np.arange(6.0).reshape(2, 3))
    assert len(frame) == 6
    assert frame.loc[5, "x_m"] == 1.0
    assert frame.loc[5, "y_m"] == 4.0
    assert frame.loc[5, "pressure_Pa_per_m_s"] == 5.0
