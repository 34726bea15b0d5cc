# -*- coding: utf-8 -*-
import json

import pytest

from lefton.cli import build_parser, dispatch

SMALL_RUN = ["--length", "40", "--n", "512", "--dt", "0.01"]


def test_no_arguments_is_usage_error():
    assert dispatch([]) == (2, None)


def test_unknown_subcommand():
    assert dispatch(["bogus"]) == (2, None)


def test_help_exits_cleanly():
    assert dispatch(["--help"]) == (0, None)


def test_flag_overrides():
    args = build_parser().parse_args(["stability", "--T", "5", "--xstar", "1.5", "--n", "256"])
    assert args.command == "stability"
    assert args.T == 5.0
    assert args.xstar == 1.5


@pytest.mark.parametrize("text", ['{"bogus": 1}', "{not json", '{"count": "many"}'])
def test_bad_config_is_usage_error(tmp_path, text):
    path = tmp_path / "config.json"
    path.write_text(text, encoding="utf-8")
    assert dispatch(["verify", "--config", str(path), "--out", str(tmp_path / "out")]) == (2, None)


def test_bad_override_is_usage_error(tmp_path):
    code, manifest = dispatch(["evolve", "--b", "nan-ish", "--out", str(tmp_path)])
    assert code == 2
    assert manifest is None


def test_missing_config_is_created(tmp_path):
    path = tmp_path / "config.json"
    code, manifest = dispatch(["linearized", *SMALL_RUN, "--T", "0.5", "--config", str(path), "--out", str(tmp_path)])
    assert code == 0
    assert path.is_file()
    assert manifest.config_path == str(path.resolve())


def test_verify_writes_manifest(tmp_path):
    code, manifest = dispatch(["verify", "--n", "1024", "--out", str(tmp_path)])
    assert code == 0
    assert manifest.passed is True
    assert "verify.json" in manifest.files
    out = tmp_path / "verify"
    for name in manifest.files:
        assert (out / name).is_file()
    stored = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert stored["files"] == manifest.files
    assert stored["grid"]["count"] == 1024
    report = json.loads((out / "verify.json").read_text(encoding="utf-8"))
    assert report["seed"] == 0
    assert report["passed"] is True


def test_verify_is_reproducible(tmp_path):
    for name in ("a", "b"):
        code, _ = dispatch(["verify", "--n", "1024", "--seed", "3", "--out", str(tmp_path / name)])
        assert code == 0
    first = (tmp_path / "a" / "verify" / "verify.json").read_bytes()
    second = (tmp_path / "b" / "verify" / "verify.json").read_bytes()
    assert first == second


def test_evolve_then_modulate(tmp_path):
    code, manifest = dispatch(["evolve", *SMALL_RUN, "--T", "0.2", "--out", str(tmp_path)])
    assert code == 0
    assert set(manifest.files) >= {"trajectory.csv", "invariants.csv", "states.npy", "states.json", "evolve.json"}
    evolved = json.loads((tmp_path / "evolve" / "evolve.json").read_text(encoding="utf-8"))
    assert evolved["snapshots"] == 3
    assert evolved["max_drift_E"] < 1e-9
    state = tmp_path / "evolve" / "states.npy"
    code, manifest = dispatch(["modulate", "--state", str(state), "--out", str(tmp_path)])
    assert code == 0
    result = json.loads((tmp_path / "modulate" / "modulation.json").read_text(encoding="utf-8"))
    assert result["frames"] == 3
    assert abs(result["a"]) < 0.05
    assert "modulation.csv" in manifest.files


def test_output_root_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("LEFTON_OUTPUT_ROOT", str(tmp_path))
    code, manifest = dispatch(["linearized", *SMALL_RUN, "--T", "0.5"])
    assert code == 0
    assert (tmp_path / "linearized" / "linearized.json").is_file()
    assert (tmp_path / "linearized" / "manifest.json").is_file()


def test_numerical_failure_exits_one(tmp_path):
    # dt far above the Courant limit
    code, manifest = dispatch(["evolve", "--length", "40", "--n", "512", "--dt", "0.5", "--T", "1", "--out", str(tmp_path)])
    assert code == 1
    assert manifest.passed is False


def test_stability_writes_report(tmp_path):
    code, manifest = dispatch(["stability", "--length", "80", "--n", "1024", "--dt", "0.01", "--T", "1", "--out", str(tmp_path)])
    assert code == (0 if manifest.passed else 1)
    expected = {"trajectory.csv", "stability.json", "stability_invariants.csv", "stability_modulation.csv"}
    assert expected <= set(manifest.files)
    report = json.loads((tmp_path / "stability" / "stability.json").read_text(encoding="utf-8"))
    assert report["passed"] == manifest.passed
    assert [c["name"] for c in report["criteria"]][-1] == "rate_identity"
