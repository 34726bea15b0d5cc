# -*- coding: utf-8 -*-
import numpy as np
import pytest

from lefton.errors import ConfigError, GuardBreachError, InstabilityError, ParameterError
from lefton.numerics.evolution import (
    SimConfig,
    evolve,
    initial_condition,
    rhs_linearized,
    rhs_momentum,
    rhs_momentum_conservative,
    rhs_velocity,
)
from lefton.numerics.grid import derivative, helmholtz_inverse
from lefton.numerics.profiles import LeftonParams, lefton_derivatives, lefton_q, lefton_Q


def short(p, **kwargs) -> SimConfig:
    base = {"length": 40.0, "count": 512, "dt": 1e-2, "T": 1.0, "stride": 10}
    base.update(kwargs)
    return SimConfig(params=p, **base)


def test_lefton_is_stationary(p3):
    config = short(p3, initial="lefton")
    traj = evolve(config)
    Q = lefton_Q(traj.grid, p3)
    assert np.max(np.abs(traj.states[-1] - Q)) / p3.peak_Q < 1e-5
    assert traj.times[-1] == pytest.approx(1.0)
    assert len(traj.times) == 11


def test_velocity_lefton_is_stationary(p3):
    traj = evolve(short(p3, initial="lefton", form="velocity"))
    assert np.max(np.abs(traj.states[-1] - lefton_q(traj.grid, p3))) < 1e-5


def test_perturbed_run_conserves(p3):
    traj = evolve(short(p3))
    assert max(traj.invariants.drift_E) < 1e-9
    # F2 sees the clipped far field, the coarse grid widens its drift
    assert max(traj.invariants.drift_F2) < 1e-4
    assert all(traj.invariants.F1_flag)


def test_rk4_is_fourth_order(p3):
    finals = [
        evolve(short(p3, dt=dt, T=0.4, stride=1000, perturbation_amplitude=0.1)).states[-1]
        for dt in (0.02, 0.01, 0.005)
    ]
    coarse = np.max(np.abs(finals[0] - finals[1]))
    fine = np.max(np.abs(finals[1] - finals[2]))
    assert 10.0 < coarse / fine < 24.0


def test_states_are_read_only(p3):
    traj = evolve(short(p3, T=0.1))
    with pytest.raises(ValueError):
        traj.states[0, 0] = 1.0


def test_reverse_run_returns(p3):
    config = short(p3, T=0.5)
    forward = evolve(config)
    backward = evolve(config, initial=forward.states[-1], reverse=True)
    assert backward.config["direction"] == "backward"
    assert np.max(np.abs(backward.states[-1] - forward.states[0])) < 1e-6


def test_rhs_forms_agree(p3, grid_short):
    m = lefton_Q(grid_short, p3) + 0.05 * np.exp(-((grid_short.points - 1.0) ** 2))
    a = rhs_momentum(grid_short, m, p3.b)
    b = rhs_momentum_conservative(grid_short, m, p3.b)
    assert np.max(np.abs(a - b)) < 1e-8


def test_rhs_of_lefton_vanishes(p3, grid_short):
    assert np.max(np.abs(rhs_momentum(grid_short, lefton_Q(grid_short, p3), p3.b))) < 1e-10
    assert np.max(np.abs(rhs_velocity(grid_short, lefton_q(grid_short, p3), p3.b))) < 1e-10


def test_linearized_kernel(p3, grid_short):
    dQ, _ = lefton_derivatives(grid_short, p3)
    assert np.max(np.abs(rhs_linearized(grid_short, dQ, p3))) < 1e-9
    assert np.max(np.abs(rhs_linearized(grid_short, lefton_Q(grid_short, p3), p3))) < 1e-9


def test_linearized_span_run(p3):
    config = short(p3, form="linearized", initial="span", span=(0.5, 0.2))
    traj = evolve(config)
    v0 = initial_condition(config)
    assert traj.invariants is None
    assert np.max(np.abs(traj.states[-1] - v0)) < 1e-8


def test_initial_perturbation_is_applied_to_velocity(p3):
    config = short(p3)
    m0 = initial_condition(config)
    u0 = initial_condition(short(p3, form="velocity"))
    # sech is not periodic on the short box; its edge values bound the inversion error
    edge = abs(u0[0]) + abs(u0[-1])
    assert np.max(np.abs(helmholtz_inverse(config.grid, m0) - u0)) < 1e-10 + 2.0 * edge
    assert np.max(np.abs(m0 - initial_condition(short(p3, initial="lefton")))) > 1e-3


def test_gaussian_momentum_image(p3):
    config = short(p3, initial="gaussian", form="momentum")
    u0 = initial_condition(short(p3, initial="gaussian", form="velocity"))
    m0 = initial_condition(config)
    assert np.max(np.abs(m0 - (u0 - derivative(config.grid, u0, 2)))) < 1e-12


def test_custom_initial(p3, grid_short):
    samples = tuple(lefton_Q(grid_short, p3))
    config = short(p3, initial="custom", samples=samples)
    assert np.allclose(initial_condition(config), samples)


def test_positivity_guard_trips(p3, grid_short):
    m = lefton_Q(grid_short, p3) - 0.1 * np.exp(-((grid_short.points - 6.0) ** 2))
    with pytest.raises(GuardBreachError) as e:
        evolve(short(p3), initial=m)
    assert e.value.reason == "positivity"
    assert e.value.minimum < 0


def test_guard_defaults():
    assert short(LeftonParams(b=-3.0)).guard_enabled
    assert not short(LeftonParams(b=2.0), initial="gaussian").guard_enabled
    assert not short(LeftonParams(b=-3.0), form="velocity", positivity_guard=True).guard_enabled


def test_cfl_guard(p3):
    with pytest.raises(InstabilityError) as e:
        evolve(short(p3, dt=0.2, T=0.4))
    assert e.value.reason == "cfl"


def test_blowup_guard():
    # no guard on the Courant number: the step is unstable and the norm explodes
    p = LeftonParams(b=2.0)
    config = SimConfig(
        params=p, length=40.0, count=512, dt=0.5, T=50.0, initial="gaussian", form="velocity", cfl_guard=False
    )
    with pytest.raises((InstabilityError, GuardBreachError)):
        evolve(config)


@pytest.mark.parametrize(
    "kwargs",
    [{"dt": 0.0}, {"T": -1.0}, {"stride": 0}, {"form": "weird"}, {"initial": "weird"}, {"initial": "custom"}],
)
def test_config_validation(p3, kwargs):
    with pytest.raises(ParameterError):
        short(p3, **kwargs)


def test_linearized_needs_lefton_regime():
    with pytest.raises(ParameterError):
        short(LeftonParams(b=0.5), form="linearized")


def test_from_config_and_echo():
    config = SimConfig.from_config({"b": -3.0, "A": 1.0, "x_star": 0.0, "count": 512, "window": 12.0, "span": [1.0, 0.0]})
    assert config.count == 512
    assert config.span == (1.0, 0.0)
    echo = config.echo()
    assert echo["b"] == -3.0
    assert echo["positivity_guard"] is True
    assert "scheme" in echo
    with pytest.raises(ConfigError):
        SimConfig.from_config({"A": 1.0, "x_star": 0.0})


def test_diagnostic_rows_and_sidecar(p3):
    traj = evolve(short(p3, T=0.1))
    rows = traj.diagnostic_rows()
    assert len(rows) == 4 * len(traj.times)
    assert {r[1] for r in rows} == {"E", "F2", "min", "l2"}
    sidecar = traj.sidecar()
    assert sidecar["shape"] == [len(traj.times), 512]
    assert sidecar["dtype"] == "float64"
