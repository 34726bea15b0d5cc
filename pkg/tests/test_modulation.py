# -*- coding: utf-8 -*-
from dataclasses import replace

import numpy as np
import pytest

from lefton.errors import ConvergenceError, ParameterError
from lefton.numerics.conservation import ALPHA_CEILING, h1_norm
from lefton.numerics.evolution import SimConfig, evolve, initial_condition
from lefton.numerics.modulation import (
    MODULATION_CORE,
    critical_constant,
    decompose,
    initial_guess,
    modulation_series,
    modulation_weight,
)
from lefton.numerics.profiles import WINDOW, Q_derivatives, Q_profile, alpha_half_width, lefton_Q


def test_critical_constant(p3, grid_wide):
    assert critical_constant(grid_wide, p3) == pytest.approx(2 ** (-2 / 3), rel=1e-6)


def test_initial_guess_finds_shift(p3, grid_wide):
    m = 1.1 * Q_profile(grid_wide.points - 2.0, p3)
    rho, a = initial_guess(grid_wide, m, p3)
    assert abs(rho - 2.0) <= grid_wide.spacing
    assert a == pytest.approx(0.1, abs=1e-2)


@pytest.mark.parametrize("rho, a", [(0.3, 0.05), (-1.2, -0.1), (0.0, 0.0)])
def test_exact_family_is_recovered(p3, grid_wide, rho, a):
    m = (1.0 + a) * Q_profile(grid_wide.points - rho, p3)
    frame = decompose(grid_wide, m, p3)
    assert frame.rho == pytest.approx(rho, abs=1e-8)
    assert frame.a == pytest.approx(a, abs=1e-8)
    assert frame.gamma == pytest.approx(1.0 + a, abs=1e-8)
    assert frame.eps_h1 < 1e-7


def test_perturbed_input_is_orthogonal(p3, grid_wide):
    x = grid_wide.points
    m = Q_profile(x - 0.2, p3) + 0.01 * np.exp(-((x - 1.0) ** 2))
    frame = decompose(grid_wide, m, p3, t=1.5)
    assert frame.t == 1.5
    assert max(frame.orthogonality) < 1e-6
    assert frame.eps_h1 > 0
    assert frame.eps_kz > 0


def test_default_perturbation_stays_small(p3):
    # the velocity bump leaves a momentum tail decaying like Q itself
    config = SimConfig(params=p3, length=80.0, count=1024)
    grid = config.grid
    m0 = initial_condition(config)
    frame = decompose(grid, m0, p3)
    assert abs(frame.a) < 0.02
    assert abs(frame.rho) < 0.02
    assert frame.eps_h1 <= 3.0 * h1_norm(grid, m0 - lefton_Q(grid, p3))


def test_small_perturbation_matches_first_order(p3, grid_wide):
    x = grid_wide.points
    delta = 1e-4
    bump = np.exp(-((x - 0.5) ** 2))
    Q = Q_profile(x, p3)
    dQ, _ = Q_derivatives(x, p3)
    half_width = min(WINDOW, alpha_half_width(p3, ALPHA_CEILING), MODULATION_CORE / p3.nu)
    w = modulation_weight(x, p3, half_width)
    rho = -delta * np.sum(bump * dQ * w) / np.sum(dQ * dQ * w)
    a = delta * np.sum(bump * w) / np.sum(Q * w)
    frame = decompose(grid_wide, Q + delta * bump, p3)
    assert frame.rho == pytest.approx(rho, abs=100 * delta**2)
    assert frame.a == pytest.approx(a, abs=100 * delta**2)
    assert abs(rho) > 10 * delta**2


def test_far_input_is_refused(p3, grid_wide):
    x = grid_wide.points
    m = Q_profile(x, p3) + Q_profile(x - 10.0, p3)
    with pytest.raises(ConvergenceError):
        decompose(grid_wide, m, p3)


def test_decompose_rejects(p3, grid_wide):
    m = Q_profile(grid_wide.points, p3)
    with pytest.raises(ParameterError):
        decompose(grid_wide, m, p3, max_iter=0)
    with pytest.raises(ParameterError):
        decompose(grid_wide, np.zeros(5), p3)


def test_series_of_stationary_lefton(p3):
    config = SimConfig(params=p3, length=80.0, count=1024, dt=1e-2, T=0.5, stride=10, initial="lefton")
    series = modulation_series(evolve(config), p3)
    assert len(series.frames) == 6
    assert max(abs(f.rho) for f in series.frames) < 1e-6
    assert max(abs(f.a) for f in series.frames) < 1e-6
    assert series.header()[0] == "t"
    assert len(series.rows()) == 6


def test_series_of_perturbed_lefton(p3):
    config = SimConfig(params=p3, length=80.0, count=1024, dt=1e-2, T=0.5, stride=10)
    series = modulation_series(evolve(config), p3)
    assert series.failure is None
    assert len(series.frames) == 6
    assert max(abs(f.a) for f in series.frames) < 0.02
    assert max(abs(f.rho) for f in series.frames) < 0.05


def test_partial_series_stops_at_failure(p3):
    config = SimConfig(params=p3, length=80.0, count=1024, dt=1e-2, T=0.5, stride=10, initial="lefton")
    traj = evolve(config)
    states = np.array(traj.states)
    states[3:] = 0.0
    broken = replace(traj, states=states)
    with pytest.raises(ConvergenceError):
        modulation_series(broken, p3)
    series = modulation_series(broken, p3, partial=True)
    assert len(series.frames) == 3
    assert len(series.rows()) == 3
    assert series.failure["t"] == pytest.approx(traj.times[3])
    assert series.failure["reason"] == "input outside the stability neighborhood"


def test_series_needs_nonlinear_trajectory(p3):
    config = SimConfig(params=p3, length=40.0, count=512, dt=1e-2, T=0.1, form="linearized", initial="span")
    with pytest.raises(ParameterError):
        modulation_series(evolve(config), p3)
