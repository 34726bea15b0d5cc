# -*- coding: utf-8 -*-
import numpy as np
import pytest

from lefton.errors import ParameterError
from lefton.numerics.conservation import invariant_F2
from lefton.numerics.diagnostics import (
    functional_E_eps,
    functional_I,
    linearized_functionals,
    localized_h1_tail,
    monotonicity_defect,
    monotonicity_fit,
    rate_identity_residual,
    rate_identity_terms,
    trend_criterion,
)
from lefton.numerics.evolution import Trajectory
from lefton.numerics.grid import make_grid
from lefton.numerics.profiles import lefton_Q


def frozen(grid, state, times) -> Trajectory:
    states = np.array([state for _ in times])
    return Trajectory(grid=grid, form="momentum", times=np.array(times), states=states, config={})


def test_unweighted_functional_is_F2(p3, grid_wide):
    Q = lefton_Q(grid_wide, p3)
    value = functional_I(grid_wide, Q, 0.0, 0.0, 0.0, 0.0, p3, unweighted=True)
    assert value.I == pytest.approx(invariant_F2(grid_wide, Q, p3.b), rel=1e-12)
    assert 0 < value.J_part < value.I


def test_functional_weight_limits(p3, grid_wide):
    Q = lefton_Q(grid_wide, p3)
    F2 = invariant_F2(grid_wide, Q, p3.b)
    assert functional_I(grid_wide, Q, 0.0, 0.0, 0.0, -1e3, p3).I == pytest.approx(F2, rel=1e-10)
    assert functional_I(grid_wide, Q, 0.0, 0.0, 0.0, 1e3, p3).I < 1e-30


def test_functional_E_eps(p3, grid_wide):
    x = grid_wide.points
    assert functional_E_eps(grid_wide, np.zeros(grid_wide.count), 0.0, 0.0, 0.0, p3) == 0.0
    eps = np.exp(-(x**2))
    assert functional_E_eps(grid_wide, eps, 0.0, 0.0, -1e3, p3) == pytest.approx(np.sqrt(np.pi / 2), rel=1e-10)


def test_linearized_functionals(p3, grid_wide):
    v = np.exp(-(grid_wide.points**2))
    I_v, J_v = linearized_functionals(grid_wide, v, 0.0, 0.0, -1e3, p3)
    # both integrals equal sqrt(pi/2) for exp(-x^2)
    assert I_v == pytest.approx(np.sqrt(np.pi / 2), rel=1e-10)
    assert J_v == pytest.approx(np.sqrt(np.pi / 2), rel=1e-10)


def test_rate_terms_vanish_on_lefton_flux(p3, grid_wide):
    terms = rate_identity_terms(grid_wide, lefton_Q(grid_wide, p3), 0.0, 0.0, 0.0, 0.0, p3)
    flow = terms["transport"] + terms["gradient_transport"] + terms["source"]
    assert abs(flow) < 1e-8 * abs(terms["drift"])
    assert terms["rate"] == pytest.approx(terms["drift"] + terms["gradient_drift"] + flow)


def test_rate_identity_on_stationary_lefton(p3, grid_wide):
    traj = frozen(grid_wide, lefton_Q(grid_wide, p3), [k * 2.5e-4 for k in range(5)])
    result = rate_identity_residual(grid_wide, traj, p3, x0=0.0)
    assert len(result.times) == 3
    assert result.max_residual < 1e-6
    assert not any(result.coarse)


def test_rate_identity_on_constant_field(p3):
    # the weight transition sits well inside the domain
    grid = make_grid(400.0, 1024)
    traj = frozen(grid, np.ones(grid.count), [k * 1e-2 for k in range(5)])
    result = rate_identity_residual(grid, traj, p3, x0=0.0, drift_only=True)
    assert result.max_residual < 1e-9
    assert len(result.rows()) == 3


def test_rate_identity_needs_three_snapshots(p3, grid_wide):
    traj = frozen(grid_wide, lefton_Q(grid_wide, p3), [0.0, 0.1])
    with pytest.raises(ParameterError):
        rate_identity_residual(grid_wide, traj, p3, x0=0.0)


def test_tail_norm(p3, grid_wide):
    Q = lefton_Q(grid_wide, p3)
    assert localized_h1_tail(grid_wide, Q, 0.0, 1.0, 1.0, 0.0, p3).value < 1e-12
    empty = localized_h1_tail(grid_wide, Q, 0.0, 1.0, 1.0, 1e3, p3)
    assert empty.empty
    assert empty.value == 0.0
    bumped = localized_h1_tail(grid_wide, Q + np.exp(-((grid_wide.points - 10.0) ** 2)), 0.0, 1.0, 1.0, 5.0, p3)
    assert bumped.value > 0.5
    with pytest.raises(ParameterError):
        localized_h1_tail(grid_wide, Q, 0.0, 1.0, 0.0, 1.0, p3)


def test_trend_criterion():
    assert trend_criterion(np.exp(-np.linspace(0, 5, 40))).passed
    assert not trend_criterion(np.ones(40)).passed
    assert trend_criterion(np.zeros(8)).passed
    with pytest.raises(ParameterError):
        trend_criterion([])


def test_monotonicity_defect():
    assert monotonicity_defect([3.0, 2.0, 2.5, 1.0]) == pytest.approx(0.5)
    assert monotonicity_defect([3.0, 2.0, 1.0]) < 0
    assert monotonicity_defect([1.0]) == 0.0


def test_monotonicity_fit_recovers_slope():
    x0 = np.array([6.0, 9.0, 12.0, 15.0])
    fit = monotonicity_fit(x0, 2.0 * np.exp(-x0 / 6.0), L=6.0)
    assert fit.passed
    assert fit.slope == pytest.approx(-1.0 / 6.0)
    assert fit.C_hat == pytest.approx(2.0)
    assert fit.C_bound == pytest.approx(2.0)
    steep = monotonicity_fit(x0, np.exp(-x0), L=6.0)
    assert not steep.passed


def test_monotonicity_fit_unresolved_does_not_pass():
    fit = monotonicity_fit([6.0, 9.0, 12.0], [0.0, -1.0, 1e-3], L=6.0)
    assert fit.trivial
    assert not fit.passed
    assert np.isnan(fit.slope)
    assert np.isnan(fit.relative_error)
