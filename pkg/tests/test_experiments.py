# -*- coding: utf-8 -*-
from dataclasses import replace

import numpy as np
import pytest

from lefton.errors import ParameterError
from lefton.numerics.evolution import SimConfig, Trajectory, evolve
from lefton.numerics.experiments import (
    Criterion,
    ExperimentReport,
    _census,
    _lefton_fit,
    _ramp_fit,
    experiment_linearized,
    experiment_regimes,
    experiment_stability,
)
from lefton.numerics.profiles import LeftonParams


def snapshots(grid, states, times) -> Trajectory:
    return Trajectory(grid=grid, form="velocity", times=np.array(times), states=np.array(states), config={})


def test_report_verdict_ignores_informative():
    report = ExperimentReport(name="demo", config={})
    report.add(Criterion("kept", 0.1, 0.2, True))
    report.add(Criterion("extra", 1.0, 0.2, False, required=False))
    assert report.passed
    report.add(Criterion("broken", 1.0, 0.2, False))
    assert not report.passed
    assert [c["name"] for c in report.to_dict()["criteria"]] == ["kept", "extra", "broken"]


def test_census_counts_moving_peaks(grid_short):
    x = grid_short.points
    states = [
        np.exp(-((x - 0.5 * k) ** 2)) + 0.6 * np.exp(-((x + 8.0 - 0.3 * k) ** 2)) for k in range(4)
    ]
    census = _census(snapshots(grid_short, states, [0.0, 1.0, 2.0, 3.0]))
    assert census["counts"] == [2, 2, 2, 2]
    assert census["persistent"] == 2
    assert census["leader_displacement"] == pytest.approx(1.5, abs=2 * grid_short.spacing)


def test_ramp_fit(grid_short):
    x = grid_short.points
    u = np.where((x > 0) & (x < 8.0), x / 5.0, 0.0)
    fit = _ramp_fit(snapshots(grid_short, [u, u], [0.0, 5.0]))
    assert fit["slope"] == pytest.approx(0.2)
    assert fit["r2"] == pytest.approx(1.0)
    assert fit["expected_slope"] == pytest.approx(0.2)


def test_lefton_fit(grid_short):
    u = 1.0 / np.cosh(grid_short.points - 1.0)
    fit = _lefton_fit(snapshots(grid_short, [u], [0.0]), -3.0)
    assert fit["correlation"] > 0.999
    assert fit["center"] == pytest.approx(1.0, abs=1e-3)
    assert fit["nu"] == pytest.approx(1.0, abs=1e-3)


def test_linearized_experiment(p3):
    config = SimConfig(params=p3, length=40.0, count=512, dt=1e-2, T=1.0, stride=10)
    report = experiment_linearized(config)
    assert report.passed
    assert report.criteria[0].name == "span stationary"
    header, rows = report.series["linearized"]
    assert header == ["t", "I_v", "J_v"]
    assert len(rows) == 2


def test_stability_report_layout(p3):
    config = SimConfig(params=p3, length=80.0, count=1024, dt=1e-2, T=1.0, stride=10)
    report = experiment_stability(config, trajectory=evolve(config))
    names = [c.name for c in report.criteria]
    assert names == ["orbital", "rho_rate_trend", "tail_trend", "monotonicity", "rate_identity"]
    assert report.criteria[-1].required
    assert "coarse" in report.fits["rate_identity"]
    assert report.criteria[0].passed
    assert {"modulation", "functionals", "invariants", "rate_identity"} <= set(report.series)
    assert len(report.fits["monotonicity"]["defects"]) == 4


def test_stability_reports_lost_modulation(p3):
    config = SimConfig(params=p3, length=80.0, count=1024, dt=1e-2, T=1.0, stride=10)
    traj = evolve(config)
    states = np.array(traj.states)
    states[-1] = 0.0
    report = experiment_stability(config, trajectory=replace(traj, states=states))
    assert not report.passed
    assert report.criteria[-1].name == "modulation"
    assert report.fits["modulation_failure"]["t"] == pytest.approx(traj.times[-1])
    header, rows = report.series["modulation"]
    assert len(rows) == len(traj.times) - 1
    assert "invariants" in report.series


def test_stability_needs_momentum_form(p3):
    config = SimConfig(params=p3, length=40.0, count=512, dt=1e-2, T=0.1, form="velocity")
    with pytest.raises(ParameterError):
        experiment_stability(config)


def test_regime_scan_records_each_run():
    config = SimConfig(params=LeftonParams(b=-3.0), length=40.0, count=512, dt=1e-2, T=0.5, stride=10)
    report = experiment_regimes(config, b_values=(2.0, 0.0), T=0.5)
    assert set(report.series) == {"b=2.0", "b=0.0"}
    assert "b=2.0" in report.census
    assert "b=0.0" in report.fits
    assert report.config["b_values"] == [2.0, 0.0]
