# -*- coding: utf-8 -*-
import numpy as np
import pytest

from lefton.errors import ParameterError
from lefton.numerics.conservation import (
    InvariantSeries,
    h1_norm,
    invariant_E,
    invariant_F1,
    invariant_F2,
    invariant_series,
    norms,
    positive_part,
    variation_F2,
)
from lefton.numerics.grid import integrate
from lefton.numerics.profiles import Q_profile, lefton_Q


def test_E_and_F2_of_lefton(p3, grid_wide):
    Q = lefton_Q(grid_wide, p3)
    # E = 2 * integral sech^3 = pi, F2 = 2^(1/3) * (3/2) pi
    assert invariant_E(grid_wide, Q) == pytest.approx(np.pi, rel=1e-12)
    assert invariant_F2(grid_wide, Q, p3.b) == pytest.approx(2 ** (1 / 3) * 1.5 * np.pi, rel=1e-9)


def test_F1_flags_divergence(p3, grid_wide):
    Q = lefton_Q(grid_wide, p3)
    value = invariant_F1(grid_wide, Q, p3.b)
    assert value.diverges
    assert value.value > 0
    positive = invariant_F1(grid_wide, Q, 2.0)
    assert not positive.diverges


def test_F_undefined_for_b_zero(p3, grid_wide):
    Q = lefton_Q(grid_wide, p3)
    for f in (invariant_F1, invariant_F2, variation_F2):
        with pytest.raises(ParameterError):
            f(grid_wide, Q, 0.0)


def test_positive_part(grid_short):
    m = np.exp(-(grid_short.points**2))
    m[0] = -1e-14
    with pytest.raises(ParameterError):
        positive_part(grid_short, m)
    clipped = positive_part(grid_short, m, floor=1e-8)
    assert float(np.min(clipped)) == pytest.approx(1e-8)
    with pytest.raises(ParameterError):
        positive_part(grid_short, -np.ones(grid_short.count), floor=1e-8)


def test_variation_of_F2_is_constant_at_lefton(p3, grid_wide):
    Q = lefton_Q(grid_wide, p3)
    core = np.abs(grid_wide.points) <= 4.0
    values = variation_F2(grid_wide, Q, p3.b)
    assert np.max(np.abs(values[core] - 2 ** (-2 / 3))) < 1e-6
    # Q^(-2/3) amplifies derivative roundoff away from the peak
    inner = np.abs(grid_wide.points) <= 2.0
    assert np.max(np.abs(values[inner] - 2 ** (-2 / 3))) < 1e-8


def positive_field(grid, rng) -> np.ndarray:
    x = 2.0 * np.pi * grid.points / grid.length
    m = np.full(grid.count, 2.0)
    for n in range(1, 4):
        a, c = rng.uniform(-0.2, 0.2, size=2)
        m += a * np.cos(n * x) + c * np.sin(n * x)
    return m


@pytest.mark.parametrize("b", [-3.0, -1.5, 2.5])
def test_variation_of_F2_matches_directional_difference(grid_short, rng, b):
    m = positive_field(grid_short, rng)
    h = positive_field(grid_short, rng) - 1.5
    step = 1e-5
    difference = (invariant_F2(grid_short, m + step * h, b) - invariant_F2(grid_short, m - step * h, b)) / (2 * step)
    exact = integrate(grid_short, variation_F2(grid_short, m, b) * h)
    assert difference == pytest.approx(exact, rel=1e-7)


def test_F2_is_translation_invariant(p3, grid_wide, rng):
    x = grid_wide.points
    base = invariant_F2(grid_wide, lefton_Q(grid_wide, p3), p3.b)
    assert invariant_F2(grid_wide, Q_profile(x - 1.3, p3), p3.b) == pytest.approx(base, rel=1e-9)
    m = positive_field(grid_wide, rng)
    rolled = np.roll(m, 37)
    assert invariant_F2(grid_wide, rolled, p3.b) == pytest.approx(invariant_F2(grid_wide, m, p3.b), rel=1e-12)


def test_norms_of_lefton(p3, grid_wide):
    Q = lefton_Q(grid_wide, p3)
    n = norms(grid_wide, Q, p3, window=12.0, ceiling=1e16)
    assert n.k_Z == pytest.approx(1.0)
    assert n.half_width < 12.0
    assert n.h1_alpha > 0


def test_h1_norm_of_gaussian(grid_short):
    x = grid_short.points
    f = np.exp(-(x**2) / 2)
    # integral of f^2 + f_x^2 = sqrt(pi) (1 + 1/2)
    assert h1_norm(grid_short, f) == pytest.approx(np.sqrt(1.5 * np.sqrt(np.pi)), rel=1e-12)


def test_invariant_series_drifts(p3, grid_wide):
    Q = lefton_Q(grid_wide, p3)
    series = invariant_series(grid_wide, [0.0, 1.0], [Q, 1.01 * Q], p3.b)
    assert series.drift_E[0] == 0.0
    assert series.drift_E[1] == pytest.approx(0.01, rel=1e-10)
    assert series.drift_F2[1] == pytest.approx(1.01 ** (1 / 3) - 1, rel=1e-8)
    assert series.header() == ["t", "E", "F1", "F1_flag", "F2", "drift_E", "drift_F2"]
    assert len(series.rows()) == 2
    assert series.rows()[0][3] == 1


def test_empty_series():
    assert InvariantSeries().drift_E == []
