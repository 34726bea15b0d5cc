# -*- coding: utf-8 -*-
import json

import numpy as np
import pytest

from lefton.disk.file import FileManager
from lefton.disk.private import _templates
from lefton.disk.private._utils import Csv, Json, LoadByType, Npy, plain
from lefton.errors import ConfigError


def test_missing_config_writes_defaults(tmp_path):
    path = tmp_path / "config.json"
    config = LoadByType.config(path)
    assert path.is_file()
    assert config == _templates.config()
    assert json.loads(path.read_text(encoding="utf-8"))["b"] == -3.0


def test_partial_config_is_completed(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"b": -2, "count": 1024, "positivity_guard": None}), encoding="utf-8")
    config = LoadByType.config(path)
    assert config["b"] == -2.0
    assert isinstance(config["b"], float)
    assert config["count"] == 1024
    assert config["positivity_guard"] is None
    assert config["window"] == 12.0


@pytest.mark.parametrize(
    "content",
    [{"bogus": 1}, {"count": 1.5}, {"b": "minus three"}, {"plots": 1}, {"x0_values": [6.0, "far"]}, [1, 2]],
)
def test_invalid_config(content):
    with pytest.raises(ConfigError):
        LoadByType.validate(content)


def test_malformed_config_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        LoadByType.config(path)


def test_plain_values():
    value = plain({"a": np.float64(1.5), "b": [np.int64(2), float("nan")], "c": np.array([1.0, np.inf])})
    assert value == {"a": 1.5, "b": [2, None], "c": [1.0, None]}


def test_json_is_canonical(tmp_path):
    obj = tmp_path / "report.json"
    Json.save_dict(obj, {"z": 1, "a": float("nan")})
    text = obj.read_text(encoding="utf-8")
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"z"')
    assert Json.load_dict(obj) == {"a": None, "z": 1}


def test_csv_cells(tmp_path):
    assert Csv.cell(True) == "true"
    assert Csv.cell(np.int32(3)) == "3"
    assert Csv.cell(0.1) == "0.10000000000000001"
    assert Csv.cell(None) == ""
    obj = tmp_path / "series.csv"
    Csv.save_rows(obj, ["t", "value"], [[0.0, 1.0], [0.5, np.nan]])
    assert obj.read_text(encoding="utf-8").splitlines() == ["t,value", "0,1", "0.5,nan"]
    with pytest.raises(ValueError):
        Csv.save_rows(obj, ["t", "value"], [[0.0]])


def test_npy_roundtrip_is_float64(tmp_path):
    obj = tmp_path / "states.npy"
    Npy.save_array(obj, np.arange(6, dtype=np.int32).reshape(2, 3))
    r = Npy.load_array(obj)
    assert r.dtype == np.float64
    assert r.flags["C_CONTIGUOUS"]


def test_file_manager_records_outputs(tmp_path):
    f = FileManager(dir_out=str(tmp_path / "run"))
    assert f.config["count"] == 4096
    f.save_json("report.json", {"passed": True})
    f.save_csv("sub/series.csv", ["t"], [[0.0]])
    f.save_state("states", np.zeros((2, 4)), {"shape": [2, 4], "times": [0.0, 1.0]})
    manifest = json.loads(f.save_manifest({"command": "evolve", "seed": 0}).read_text(encoding="utf-8"))
    assert manifest["files"] == ["report.json", "sub/series.csv", "states.npy", "states.json"]
    assert manifest["command"] == "evolve"
    sidecar = json.loads((tmp_path / "run" / "states.json").read_text(encoding="utf-8"))
    assert sidecar["dtype"] == "float64"
    assert sidecar["order"] == "C"


def test_manifest_refuses_missing_file(tmp_path):
    f = FileManager(dir_out=str(tmp_path / "run"))
    f.save_json("report.json", {})
    (tmp_path / "run" / "report.json").unlink()
    with pytest.raises(FileNotFoundError):
        f.save_manifest({})


def test_reset_clears_directory(tmp_path):
    (tmp_path / "run").mkdir()
    (tmp_path / "run" / "old.txt").write_text("x", encoding="utf-8")
    FileManager(dir_out=str(tmp_path / "run"), reset=True)
    assert (tmp_path / "run").is_dir()
    assert not (tmp_path / "run" / "old.txt").exists()


def test_config_setter_validates(tmp_path):
    f = FileManager(dir_out=str(tmp_path))
    f.config = {**f.config, "b": -5}
    assert f.config["b"] == -5.0
    with pytest.raises(ConfigError):
        f.config = {"nope": 1}


def test_plots_are_deterministic(tmp_path):
    f = FileManager(dir_out=str(tmp_path))
    x = np.linspace(0.0, 1.0, 11)
    a = f.save_plot("a.svg", x, {"E": x**2, "F2": x}, xlabel="t")
    b = f.save_plot("b.svg", x, {"F2": x, "E": x**2}, xlabel="t")
    assert a.read_bytes() == b.read_bytes()
