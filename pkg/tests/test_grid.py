# -*- coding: utf-8 -*-
import logging

import numpy as np
import pytest

from lefton.errors import ParameterError
from lefton.numerics.grid import (
    check_field,
    decay_warning,
    derivative,
    helmholtz_inverse,
    integrate,
    log_derivatives,
    make_grid,
    shift,
    window,
)


def test_make_grid_layout():
    grid = make_grid(2 * np.pi, 16)
    assert grid.spacing == pytest.approx(2 * np.pi / 16)
    assert grid.points[0] == pytest.approx(-np.pi)
    assert grid.points.size == 16
    assert grid.describe()["count"] == 16


@pytest.mark.parametrize("length, count", [(0.0, 16), (-1.0, 16), (10.0, 7), (10.0, 4), (10.0, 15)])
def test_make_grid_rejects(length, count):
    with pytest.raises(ParameterError):
        make_grid(length, count)


def test_points_are_read_only(grid_short):
    with pytest.raises(ValueError):
        grid_short.points[0] = 1.0


def test_check_field_rejects_shape_and_nan(grid_short):
    with pytest.raises(ParameterError):
        check_field(grid_short, np.zeros(3))
    f = np.zeros(grid_short.count)
    f[3] = np.nan
    with pytest.raises(ParameterError):
        check_field(grid_short, f)


def test_derivative_of_sine_is_exact():
    grid = make_grid(2 * np.pi, 32)
    x = grid.points
    assert np.max(np.abs(derivative(grid, np.sin(3 * x), 1) - 3 * np.cos(3 * x))) < 1e-12
    assert np.max(np.abs(derivative(grid, np.sin(3 * x), 2) + 9 * np.sin(3 * x))) < 1e-11


def test_derivative_order_must_be_positive(grid_short):
    with pytest.raises(ParameterError):
        derivative(grid_short, np.zeros(grid_short.count), 0)


def test_helmholtz_inverse_of_sech():
    # (1 - d^2)(sech) = 2 sech^3
    grid = make_grid(60.0, 1024)
    x = grid.points
    u = 1.0 / np.cosh(x)
    m = 2.0 / np.cosh(x) ** 3
    assert np.max(np.abs(helmholtz_inverse(grid, m) - u)) < 1e-12
    assert np.max(np.abs(helmholtz_inverse(grid, m, method="kernel") - u)) < 1e-7


def test_helmholtz_inverse_unknown_method(grid_short):
    with pytest.raises(ParameterError):
        helmholtz_inverse(grid_short, np.zeros(grid_short.count), method="nope")


def test_integrate_gaussian(grid_short):
    x = grid_short.points
    assert integrate(grid_short, np.exp(-(x**2))) == pytest.approx(np.sqrt(np.pi), rel=1e-13)


def test_shift_moves_profile(grid_short):
    x = grid_short.points
    f = np.exp(-(x**2))
    assert np.max(np.abs(shift(grid_short, f, 0.37) - np.exp(-((x + 0.37) ** 2)))) < 1e-12


def test_decay_warning(grid_short):
    x = grid_short.points
    assert decay_warning(grid_short, np.exp(-(x**2))) is None
    assert decay_warning(grid_short, 1.0 / np.cosh(0.1 * x)) is not None
    assert decay_warning(grid_short, np.zeros(grid_short.count)) is None


def test_derivative_reports_open_boundary(grid_short, caplog):
    x = grid_short.points
    with caplog.at_level(logging.WARNING):
        derivative(grid_short, np.exp(-(x**2)))
    assert not caplog.records
    with caplog.at_level(logging.WARNING):
        slope = derivative(grid_short, np.tanh(x))
    assert "decay floor" in caplog.text
    assert np.all(np.isfinite(slope))
    caplog.clear()
    derivative(grid_short, np.tanh(x), floor=None)
    assert not caplog.records


def test_log_derivatives_follow_tails():
    grid = make_grid(80.0, 1024)
    x = grid.points
    m = 2.0 / np.cosh(x) ** 3
    wx, wxx = log_derivatives(grid, m)
    # the periodic wrap sees a kink of log m at the domain ends
    inner = np.abs(x) <= 30.0
    assert np.max(np.abs(wx + 3.0 * np.tanh(x))[inner]) < 1e-6
    assert np.max(np.abs(wxx + 3.0 / np.cosh(x) ** 2)[inner]) < 1e-5


def test_log_derivatives_need_positive(grid_short):
    with pytest.raises(ParameterError):
        log_derivatives(grid_short, np.zeros(grid_short.count))


def test_window_subgrid(grid_wide):
    sub, sl = window(grid_wide, 0.0, 5.0)
    assert sub.count % 2 == 0
    assert sub.spacing == pytest.approx(grid_wide.spacing)
    assert np.allclose(sub.points, grid_wide.points[sl])
    assert np.all(np.abs(sub.points) <= 5.0)


def test_window_too_small(grid_wide):
    with pytest.raises(ParameterError):
        window(grid_wide, 0.0, 0.01)
