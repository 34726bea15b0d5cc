# -*- coding: utf-8 -*-
"""
Pseudospectral time integration of the b-family flow (momentum and velocity form) and of
the flow linearized around the lefton. Fixed-step classical RK4.
Example usage:
>>> config = SimConfig(params=LeftonParams(b=-3.0), T=1.0)
>>> traj = evolve(config)
"""
import logging
from dataclasses import dataclass, field, fields

import numpy as np

from ..errors import ConfigError, GuardBreachError, InstabilityError, ParameterError
from .conservation import FlaggedValue, InvariantSeries, invariant_E, invariant_F1, invariant_F2
from .grid import (
    DECAY_FLOOR,
    Grid,
    check_field,
    decay_warning,
    derivative,
    helmholtz_inverse,
    make_grid,
    product,
)
from .profiles import LeftonParams, lefton_derivatives, lefton_dq, lefton_q, lefton_Q, peakon_u
from .private._logcosh import sech

# setup per-module logger
log = logging.getLogger(__name__).addHandler(logging.NullHandler())

FORMS: tuple = ("momentum", "velocity", "linearized")
INITIALS: tuple = ("lefton", "lefton+perturbation", "peakon", "gaussian", "span", "custom")


@dataclass(frozen=True)
class SimConfig:
    """
    Everything needed to reproduce a run.

    The positivity guard only applies to momentum-form runs; None resolves to ON when b < -1.
    """

    params: LeftonParams
    length: float = 80.0
    count: int = 4096
    dt: float = 1e-3
    T: float = 10.0
    stride: int = 10
    cfl: float = 0.5
    cfl_guard: bool = True
    dealias: bool = True
    positivity_guard: bool | None = None
    blowup_ceiling: float = 1e3
    decay_floor: float = DECAY_FLOOR
    density_floor: float = 1e-8
    form: str = "momentum"
    initial: str = "lefton+perturbation"
    perturbation_amplitude: float = 0.01
    perturbation_center: float = 2.0
    perturbation_width: float = 1.0
    gaussian_amplitude: float = 1.0
    gaussian_width: float = 5.0
    peakon_speed: float = 1.0
    span: tuple = (1.0, 0.0)
    samples: tuple | None = None

    def __post_init__(self) -> None:
        if not self.dt > 0 or not self.T > 0:
            raise ParameterError(f"dt and T must be positive, got dt='{self.dt}', T='{self.T}'")
        if int(self.stride) != self.stride or self.stride < 1:
            raise ParameterError(f"stride must be a positive integer, got '{self.stride}'")
        if self.form not in FORMS:
            raise ParameterError(f"unknown form '{self.form}', expected one of {FORMS}")
        if self.initial not in INITIALS:
            raise ParameterError(f"unknown initial condition '{self.initial}', expected one of {INITIALS}")
        if self.initial == "custom" and self.samples is None:
            raise ParameterError("custom initial condition needs samples")
        if self.form == "linearized":
            self.params.require_lefton()
        if not self.cfl > 0 or not self.blowup_ceiling > 0:
            raise ParameterError("cfl and blowup_ceiling must be positive")
        return None

    @property
    def grid(self) -> Grid:
        return make_grid(self.length, self.count)

    @property
    def guard_enabled(self) -> bool:
        if self.form != "momentum":
            return False
        if self.positivity_guard is not None:
            return bool(self.positivity_guard)
        return self.params.b < -1.0

    @property
    def steps(self) -> int:
        return max(1, int(round(self.T / self.dt)))

    @classmethod
    def from_config(cls, config: dict, **overrides):
        """
        Build from a flat config dictionary; keys that are not run settings are ignored.

        Args:
            config (dict): Flat config (see the config template).
            **overrides: Values replacing config entries (e.g., form="velocity").

        Returns:
            SimConfig: The run configuration.
        """
        merged = {**config, **overrides}
        try:
            params = LeftonParams(b=float(merged["b"]), A=float(merged["A"]), x_star=float(merged["x_star"]))
        except KeyError as e:
            raise ConfigError(f"missing key {e} for the run configuration")
        names = {f.name for f in fields(cls)} - {"params"}
        kwargs = {key: merged[key] for key in names if key in merged}
        if "span" in kwargs:
            kwargs["span"] = tuple(kwargs["span"])
        if kwargs.get("samples") is not None:
            kwargs["samples"] = tuple(kwargs["samples"])
        return cls(params=params, **kwargs)

    def echo(self) -> dict:
        """
        Return the configuration as a flat, JSON-ready dictionary.
        """
        r = {f.name: getattr(self, f.name) for f in fields(self) if f.name not in ("params", "samples")}
        r["span"] = list(self.span)
        r.update({"b": self.params.b, "A": self.params.A, "x_star": self.params.x_star})
        r["positivity_guard"] = self.guard_enabled
        r["scheme"] = "fourier collocation, 2/3 dealiasing, classical RK4" if self.dealias else "fourier collocation, classical RK4"
        return r


@dataclass(frozen=True)
class Trajectory:
    """
    Snapshots of a run and the series recorded along it.
    """

    grid: Grid
    form: str
    times: np.ndarray
    states: np.ndarray
    config: dict
    invariants: InvariantSeries | None = None
    minima: list = field(default_factory=list)
    l2: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def diagnostic_rows(self) -> list:
        """
        Return long-format rows (t, diagnostic, value): one row per snapshot per diagnostic.

        Returns:
            list: Rows.
        """
        rows = []
        for i, t in enumerate(self.times):
            if self.invariants is not None:
                rows.append([t, "E", self.invariants.E[i]])
                rows.append([t, "F2", self.invariants.F2[i]])
            rows.append([t, "min", self.minima[i]])
            rows.append([t, "l2", self.l2[i]])
        return rows

    def sidecar(self) -> dict:
        """
        Return the JSON sidecar describing the binary state dump.
        """
        return {
            "dtype": "float64",
            "order": "C",
            "shape": list(self.states.shape),
            "form": self.form,
            "times": [float(t) for t in self.times],
            "grid": self.grid.describe(),
            "config": self.config,
        }


def rhs_momentum(grid: Grid, m, b: float, dealias: bool = True) -> np.ndarray:
    """
    m_t = -(u m_x + b u_x m), u = (1 - d^2/dx^2)^(-1) m.

    Args:
        grid (Grid): Grid.
        m (array-like): Momentum density.
        b (float): Regime parameter.
        dealias (bool, optional): 2/3-rule on the products. Defaults to True.

    Returns:
        np.ndarray: Time derivative of m.
    """
    m = check_field(grid, m, "m")
    u = helmholtz_inverse(grid, m)
    ux = derivative(grid, u, 1, floor=None)
    mx = derivative(grid, m, 1, floor=None)
    return -(product(grid, u, mx, dealias) + b * product(grid, ux, m, dealias))


def rhs_momentum_conservative(grid: Grid, m, b: float, dealias: bool = True) -> np.ndarray:
    """
    m_t = -d/dx((b-1)/2 (u^2 - u_x^2) + u m), the conservative form of rhs_momentum.
    """
    m = check_field(grid, m, "m")
    u = helmholtz_inverse(grid, m)
    ux = derivative(grid, u, 1, floor=None)
    flux = 0.5 * (b - 1.0) * (product(grid, u, u, dealias) - product(grid, ux, ux, dealias)) + product(
        grid, u, m, dealias
    )
    return -derivative(grid, flux, 1, floor=None)


def rhs_velocity(grid: Grid, u, b: float, dealias: bool = True) -> np.ndarray:
    """
    u_t = -u u_x - d/dx (1 - d^2/dx^2)^(-1) ((b/2) u^2 + ((3-b)/2) u_x^2).

    Args:
        grid (Grid): Grid.
        u (array-like): Velocity.
        b (float): Regime parameter.
        dealias (bool, optional): 2/3-rule on the products. Defaults to True.

    Returns:
        np.ndarray: Time derivative of u.
    """
    u = check_field(grid, u, "u")
    ux = derivative(grid, u, 1, floor=None)
    source = 0.5 * b * product(grid, u, u, dealias) + 0.5 * (3.0 - b) * product(grid, ux, ux, dealias)
    return -product(grid, u, ux, dealias) - derivative(grid, helmholtz_inverse(grid, source), 1, floor=None)


def _linearized_coefficients(grid: Grid, p: LeftonParams) -> tuple:
    p.require_lefton()
    dQ, _ = lefton_derivatives(grid, p)
    return lefton_q(grid, p), lefton_dq(grid, p), lefton_Q(grid, p), dQ


def _linearized(grid: Grid, v: np.ndarray, b: float, coefficients: tuple) -> np.ndarray:
    q, dq, Q, dQ = coefficients
    h = helmholtz_inverse(grid, v)
    vx = derivative(grid, v, 1, floor=None)
    hx = derivative(grid, h, 1, floor=None)
    return -b * dq * v - q * vx - b * Q * hx - dQ * h


def rhs_linearized(grid: Grid, v, p: LeftonParams) -> np.ndarray:
    """
    v_t = (1/(1-b)) B(Q) L v in closed form: -b q' v - q v_x - b Q h_x - Q' h, h = (1 - d^2/dx^2)^(-1) v.

    Args:
        grid (Grid): Grid.
        v (array-like): Perturbation of the momentum density.
        p (LeftonParams): Parameters (b < -1).

    Returns:
        np.ndarray: Time derivative of v.
    """
    v = check_field(grid, v, "v")
    return _linearized(grid, v, p.b, _linearized_coefficients(grid, p))


def initial_condition(config: SimConfig) -> np.ndarray:
    """
    Build the initial state for the configured form.

    The lefton perturbation delta*sech((x - c)/w) is applied to the velocity; its momentum
    image delta*(sech(y)(1 - 1/w^2) + 2 sech^3(y)/w^2) is added in closed form.

    Args:
        config (SimConfig): Run configuration.

    Returns:
        np.ndarray: Initial state (m, u or v depending on the form).
    """
    grid = config.grid
    x = grid.points
    p = config.params
    kind = config.initial
    if kind == "custom":
        return check_field(grid, np.array(config.samples, dtype=np.float64), "samples")
    if kind in ("lefton", "lefton+perturbation"):
        if config.form == "linearized":
            base = lefton_Q(grid, p)
            return base if kind == "lefton" else config.perturbation_amplitude * base
        base = lefton_q(grid, p) if config.form == "velocity" else lefton_Q(grid, p)
        if kind == "lefton":
            return base
        delta, w = config.perturbation_amplitude, config.perturbation_width
        s = sech((x - config.perturbation_center) / w)
        if config.form == "velocity":
            return base + delta * s
        return base + delta * (s * (1.0 - 1.0 / w**2) + 2.0 * s**3 / w**2)
    if kind == "span":
        p.require_lefton()
        dQ, _ = lefton_derivatives(grid, p)
        a0, b0 = config.span
        return a0 * dQ + b0 * lefton_Q(grid, p)
    if kind == "gaussian":
        u0 = config.gaussian_amplitude * np.exp(-(x**2) / config.gaussian_width**2)
    else:
        u0 = peakon_u(x - p.x_star, 0.0, config.peakon_speed)
    if config.form == "momentum":
        return u0 - derivative(grid, u0, 2)
    return u0


def _momentum_of(grid: Grid, state: np.ndarray, form: str) -> np.ndarray:
    if form == "velocity":
        return state - derivative(grid, state, 2)
    return state


def evolve(config: SimConfig, initial=None, reverse: bool = False) -> Trajectory:
    """
    Integrate the configured flow with fixed-step RK4.

    Snapshots are taken every `stride` steps (and at the final step); each snapshot records
    E, F1, F2 (nonlinear forms), the minimum of the momentum and the L2 norm.
    If a guard trips, raise.

    Args:
        config (SimConfig): Run configuration.
        initial (array-like, optional): Initial state; built from the config if None. Defaults to None.
        reverse (bool, optional): Integrate the time-reversed flow (dt -> -dt). Defaults to False.

    Returns:
        Trajectory: Snapshots and series.
    """
    grid = config.grid
    p = config.params
    b = p.b
    state = check_field(grid, initial_condition(config) if initial is None else initial, "initial")
    if config.form == "momentum":
        def rhs(f):
            return rhs_momentum(grid, f, b, config.dealias)
    elif config.form == "velocity":
        def rhs(f):
            return rhs_velocity(grid, f, b, config.dealias)
    else:
        coefficients = _linearized_coefficients(grid, p)

        def rhs(f):
            return _linearized(grid, f, b, coefficients)
    h = -config.dt if reverse else config.dt
    steps = config.steps
    scale0 = max(float(np.max(np.abs(state))), np.finfo(float).tiny)
    nonlinear = config.form != "linearized"
    guard = config.guard_enabled
    floor = config.density_floor if config.form == "momentum" else 0.0
    times, states, minima, l2, warnings = [], [], [], [], []
    invariants = InvariantSeries() if nonlinear else None

    def record(step: int, f: np.ndarray) -> None:
        t = step * config.dt
        times.append(t)
        states.append(f.copy())
        m = _momentum_of(grid, f, config.form)
        minima.append(float(np.min(m)))
        l2.append(float(np.sqrt(grid.spacing * np.sum(f**2))))
        if invariants is not None:
            try:
                F1 = invariant_F1(grid, m, b, floor) if b != 0 else FlaggedValue(np.nan, False, "undefined for b = 0")
                F2 = invariant_F2(grid, m, b, floor) if b != 0 else np.nan
            except ParameterError:
                # sign-changing momentum (velocity-form regime runs)
                F1, F2 = FlaggedValue(np.nan, False, "non-positive momentum"), np.nan
            invariants.append(t, invariant_E(grid, m), F1, F2)
        msg = decay_warning(grid, f, config.decay_floor)
        if msg is not None and msg not in warnings and not warnings:
            warnings.append(f"t={t!r}: {msg}")
        return None

    logging.info(
        f"evolving form='{config.form}' b='{b}' over {steps} steps of dt='{h}' on N='{grid.count}'"
    )
    record(0, state)
    for step in range(1, steps + 1):
        k1 = rhs(state)
        k2 = rhs(state + 0.5 * h * k1)
        k3 = rhs(state + 0.5 * h * k2)
        k4 = rhs(state + h * k3)
        state = state + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = step * config.dt
        if not np.all(np.isfinite(state)):
            logging.error(f"non-finite state at t='{t}'")
            raise GuardBreachError("finiteness", t, float(np.nanmin(state)))
        peak = float(np.max(np.abs(state)))
        if peak > config.blowup_ceiling * scale0:
            logging.error(f"norm blow-up at t='{t}' (max '{peak}')")
            raise InstabilityError("blow-up", t, peak)
        if guard:
            minimum = float(np.min(state))
            if minimum < -config.decay_floor * peak:
                logging.error(f"positivity guard breached at t='{t}' (min '{minimum}')")
                raise GuardBreachError("positivity", t, minimum)
        if nonlinear and config.cfl_guard:
            u = helmholtz_inverse(grid, state) if config.form == "momentum" else state
            courant = config.dt * float(np.max(np.abs(u))) / grid.spacing
            if courant > config.cfl:
                logging.error(f"courant number '{courant}' exceeds '{config.cfl}' at t='{t}'")
                raise InstabilityError("cfl", t, courant)
        if step % config.stride == 0 or step == steps:
            record(step, state)
    logging.info(f"ok: evolved to t='{steps * config.dt}', recorded {len(times)} snapshots")
    states_arr = np.array(states)
    states_arr.flags.writeable = False
    times_arr = np.array(times)
    times_arr.flags.writeable = False
    echo = config.echo()
    echo["direction"] = "backward" if reverse else "forward"
    return Trajectory(
        grid=grid,
        form=config.form,
        times=times_arr,
        states=states_arr,
        config=echo,
        invariants=invariants,
        minima=minima,
        l2=l2,
        warnings=warnings,
    )
