# -*- coding: utf-8 -*-
"""
Monotonicity functionals, the closed-form rate of the momentum functional, localized tail
norms, and the trend and exponential-fit criteria used by the experiments.
Example usage:
>>> functional_I(grid, lefton_Q(grid, p), 0.0, 0.0, 0.0, -1e3, p).I
5.93778...
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import ParameterError
from .conservation import F2_density, positive_part
from .evolution import Trajectory
from .grid import Grid, check_field, derivative, helmholtz_inverse, integrate, log_derivatives
from .profiles import LeftonParams, Q_profile, weight_psi_L

# setup per-module logger
log = logging.getLogger(__name__).addHandler(logging.NullHandler())

# relative change between stride and double-stride rates flagged as "stride too coarse"
STRIDE_FLAG: float = 0.1


@dataclass(frozen=True)
class FunctionalValue:
    I: float
    J_part: float


@dataclass
class DiagnosticSeries:
    """
    Functional values along a run with the parameters they were evaluated with.
    """

    params: dict
    times: list = field(default_factory=list)
    I: list = field(default_factory=list)
    J: list = field(default_factory=list)
    E_eps: list = field(default_factory=list)
    tail: list = field(default_factory=list)

    def header(self) -> list:
        return ["t", "I", "J", "E_eps", "tail_h1"]

    def rows(self) -> list:
        return [list(r) for r in zip(self.times, self.I, self.J, self.E_eps, self.tail)]


@dataclass(frozen=True)
class RateIdentity:
    times: list
    finite_difference: list
    closed_form: list
    residual: list
    coarse: list

    @property
    def max_residual(self) -> float:
        return float(max(self.residual)) if self.residual else 0.0

    def header(self) -> list:
        return ["t", "dI_dt_fd", "dI_dt_closed", "residual", "stride_coarse"]

    def rows(self) -> list:
        return [
            [t, fd, cf, r, int(c)]
            for t, fd, cf, r, c in zip(self.times, self.finite_difference, self.closed_form, self.residual, self.coarse)
        ]


@dataclass(frozen=True)
class TailNorm:
    value: float
    cutoff: float
    empty: bool


@dataclass(frozen=True)
class Trend:
    first: float
    last: float
    ratio: float
    passed: bool


@dataclass(frozen=True)
class MonotonicityFit:
    """
    Fit of defect ~ C exp(slope * x0) against the expected slope -1/L.

    trivial marks a series with fewer than two defects above noise; such a fit never passes.
    """

    slope: float
    C_hat: float
    C_bound: float
    expected: float
    relative_error: float
    trivial: bool
    passed: bool


def _psi(grid: Grid, p: LeftonParams, offset: float, derivative_order: int = 0) -> np.ndarray:
    return weight_psi_L(grid.points - p.x_star + offset, p, derivative_order)


def functional_I(
    grid: Grid,
    m,
    rho_t0: float,
    t: float,
    t0: float,
    x0: float,
    p: LeftonParams,
    floor: float = 0.0,
    unweighted: bool = False,
) -> FunctionalValue:
    """
    I = integral of m^(-1/b) psi_L(x1) + (1/b^2) integral of m^(-1/b-2) m_x^2 psi_L(x1),
    x1 = x - x* - rho(t0) + 4b(t - t0) - x0.

    The integrand is the F2 density times psi_L, so unweighted=True reproduces F2 exactly.

    Args:
        grid (Grid): Grid.
        m (array-like): Positive momentum samples.
        rho_t0 (float): Shift at the reference time.
        t (float): Time.
        t0 (float): Reference time, t0 <= t.
        x0 (float): Offset.
        p (LeftonParams): Parameters (b < -1).
        floor (float, optional): Relative clipping level for negative powers. Defaults to 0.0.
        unweighted (bool, optional): Replace psi_L by 1. Defaults to False.

    Returns:
        FunctionalValue: I and its gradient part.
    """
    b = p.b
    m = positive_part(grid, m, floor)
    density = F2_density(grid, m, b)
    wx, _ = log_derivatives(grid, m)
    gradient = m ** (-1.0 / b) * wx**2 / b**2
    if unweighted:
        psi = np.ones(grid.count)
    else:
        psi = _psi(grid, p, -rho_t0 + 4.0 * b * (t - t0) - x0)
    return FunctionalValue(I=integrate(grid, density * psi), J_part=integrate(grid, gradient * psi))


def functional_E_eps(grid: Grid, eps, t: float, t0: float, x0: float, p: LeftonParams) -> float:
    """
    E = integral of eps^2 psi_L(x - x* + 4b(t - t0) - x0).
    """
    eps = check_field(grid, eps, "eps")
    return integrate(grid, eps**2 * _psi(grid, p, 4.0 * p.b * (t - t0) - x0))


def linearized_functionals(grid: Grid, v, t: float, t0: float, x0: float, p: LeftonParams) -> tuple[float, float]:
    """
    I_v = integral of v^2 psi_L(x~), J_v = integral of v_x^2 psi_L(x~), x~ = x - x* + 8b(t - t0) - x0.

    Args:
        grid (Grid): Grid.
        v (array-like): Perturbation samples.
        t (float): Time.
        t0 (float): Reference time.
        x0 (float): Offset.
        p (LeftonParams): Parameters (b < -1).

    Returns:
        tuple[float, float]: (I_v, J_v).
    """
    v = check_field(grid, v, "v")
    psi = _psi(grid, p, 8.0 * p.b * (t - t0) - x0)
    return integrate(grid, v**2 * psi), integrate(grid, derivative(grid, v, 1) ** 2 * psi)


def rate_identity_terms(
    grid: Grid,
    m,
    rho_t0: float,
    t: float,
    t0: float,
    x0: float,
    p: LeftonParams,
    floor: float = 0.0,
) -> dict:
    """
    The five terms of the closed-form dI/dt along the flow.

    * transport: -integral of m^(-1/b) u psi'
    * gradient_transport: (1/b^2) integral of m^(-1/b-2) m_x^2 u psi'
    * source: (2/(1-b)) integral of m^(1-1/b) psi'
    * drift: 4b integral of m^(-1/b) psi'
    * gradient_drift: (4/b) integral of m^(-1/b-2) m_x^2 psi'

    Args:
        grid (Grid): Grid.
        m (array-like): Positive momentum samples.
        rho_t0 (float): Shift at the reference time.
        t (float): Time.
        t0 (float): Reference time.
        x0 (float): Offset.
        p (LeftonParams): Parameters (b < -1).
        floor (float, optional): Relative clipping level. Defaults to 0.0.

    Returns:
        dict: The named terms and their sum under "rate".
    """
    b = p.b
    raw = check_field(grid, m, "m")
    m = positive_part(grid, raw, floor)
    u = helmholtz_inverse(grid, raw)
    wx, _ = log_derivatives(grid, m)
    power = m ** (-1.0 / b)
    dpsi = _psi(grid, p, -rho_t0 + 4.0 * b * (t - t0) - x0, 1)
    terms = {
        "transport": -integrate(grid, power * u * dpsi),
        "gradient_transport": integrate(grid, power * wx**2 * u * dpsi) / b**2,
        "source": 2.0 / (1.0 - b) * integrate(grid, m * power * dpsi),
        "drift": 4.0 * b * integrate(grid, power * dpsi),
        "gradient_drift": 4.0 / b * integrate(grid, power * wx**2 * dpsi),
    }
    terms["rate"] = sum(terms.values())
    return terms


def _momentum(traj: Trajectory, state: np.ndarray) -> np.ndarray:
    if traj.form == "velocity":
        return state - derivative(traj.grid, state, 2)
    if traj.form != "momentum":
        raise ParameterError(f"functional needs a nonlinear trajectory, got '{traj.form}'")
    return state


def rate_identity_residual(
    grid: Grid,
    traj: Trajectory,
    p: LeftonParams,
    x0: float,
    t0: float | None = None,
    rho_t0: float = 0.0,
    floor: float = 0.0,
    drift_only: bool = False,
) -> RateIdentity:
    """
    Compare the centered difference of I along the snapshots with its closed-form rate.

    The residual is |D_s - rate| / max(|rate|, 1e-12 max|I|) at interior snapshots. Where the
    double-stride difference D_2s departs from D_s by more than STRIDE_FLAG, the snapshot is
    flagged as stride too coarse. drift_only=True compares with the two drift terms, which is
    the right reference for spatially constant data.

    Args:
        grid (Grid): Grid of the trajectory.
        traj (Trajectory): Trajectory of positive momentum.
        p (LeftonParams): Parameters (b < -1).
        x0 (float): Offset.
        t0 (float | None, optional): Reference time; first snapshot if None. Defaults to None.
        rho_t0 (float, optional): Shift at the reference time. Defaults to 0.0.
        floor (float, optional): Relative clipping level. Defaults to 0.0.
        drift_only (bool, optional): Compare with the drift terms only. Defaults to False.

    Returns:
        RateIdentity: Per-snapshot comparison.
    """
    times = np.asarray(traj.times, dtype=np.float64)
    if times.size < 3:
        raise ParameterError("rate identity needs at least 3 snapshots")
    if t0 is None:
        t0 = float(times[0])
    states = [_momentum(traj, s) for s in traj.states]
    values = np.array([functional_I(grid, m, rho_t0, t, t0, x0, p, floor).I for t, m in zip(times, states)])
    noise = 1e-12 * float(np.max(np.abs(values)))
    out = RateIdentity([], [], [], [], [])
    coarse_seen = False
    for i in range(1, times.size - 1):
        d_s = (values[i + 1] - values[i - 1]) / (times[i + 1] - times[i - 1])
        terms = rate_identity_terms(grid, states[i], rho_t0, times[i], t0, x0, p, floor)
        rate = terms["drift"] + terms["gradient_drift"] if drift_only else terms["rate"]
        coarse = False
        if 2 <= i < times.size - 2:
            d_2s = (values[i + 2] - values[i - 2]) / (times[i + 2] - times[i - 2])
            coarse = abs(d_s - d_2s) > STRIDE_FLAG * max(abs(d_s), noise)
        coarse_seen = coarse_seen or coarse
        out.times.append(float(times[i]))
        out.finite_difference.append(float(d_s))
        out.closed_form.append(float(rate))
        out.residual.append(abs(d_s - rate) / max(abs(rate), noise))
        out.coarse.append(bool(coarse))
    if coarse_seen:
        logging.warning("snapshot stride too coarse for the rate identity at some snapshots")
    logging.info(f"rate identity: max residual '{out.max_residual}' over {len(out.times)} snapshots")
    return out


def localized_h1_tail(
    grid: Grid,
    m,
    rho: float,
    gamma: float,
    beta: float,
    t: float,
    p: LeftonParams,
) -> TailNorm:
    """
    H1 norm of m - gamma Q(x - rho) restricted to x > beta t.

    The restriction uses the smooth cutoff (1 + tanh((x - beta t)/dx))/2. A cutoff beyond the
    domain yields an empty, zero-valued tail.

    Args:
        grid (Grid): Grid.
        m (array-like): Momentum samples.
        rho (float): Shift of the profile.
        gamma (float): Amplitude factor of the profile.
        beta (float): Cutoff speed, > 0.
        t (float): Time.
        p (LeftonParams): Parameters (b < -1).

    Returns:
        TailNorm: Value, cutoff position and emptiness flag.
    """
    if not beta > 0:
        raise ParameterError(f"beta must be positive, got '{beta}'")
    m = check_field(grid, m, "m")
    cutoff = beta * t
    x = grid.points
    if cutoff >= float(x[-1]):
        logging.debug(f"tail window x > {cutoff} is empty")
        return TailNorm(value=0.0, cutoff=cutoff, empty=True)
    d = m - gamma * Q_profile(x - rho, p)
    chi = 0.5 * (1.0 + np.tanh((x - cutoff) / grid.spacing))
    value = float(np.sqrt(integrate(grid, (d**2 + derivative(grid, d, 1) ** 2) * chi)))
    return TailNorm(value=value, cutoff=cutoff, empty=False)


def trend_criterion(values, ratio: float = 0.25, floor: float = 1e-14) -> Trend:
    """
    "Tends to zero" surrogate: mean of the last quartile below ratio times the first.

    Series whose first-quartile mean is at most floor pass trivially.

    Args:
        values (array-like): Series (absolute values are used).
        ratio (float, optional): Required reduction. Defaults to 0.25.
        floor (float, optional): Level below which the series counts as zero. Defaults to 1e-14.

    Returns:
        Trend: Quartile means and verdict.
    """
    values = np.abs(np.asarray(values, dtype=np.float64))
    if values.size == 0:
        raise ParameterError("trend criterion needs a non-empty series")
    q = max(1, values.size // 4)
    first = float(np.mean(values[:q]))
    last = float(np.mean(values[-q:]))
    passed = first <= floor or last < ratio * first
    return Trend(first=first, last=last, ratio=last / first if first > 0 else 0.0, passed=bool(passed))


def monotonicity_defect(values) -> float:
    """
    max over t1 > t0 of I(t1) - I(t0) for a series sampled in time order.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        return 0.0
    running_min = np.minimum.accumulate(values[:-1])
    return float(np.max(values[1:] - running_min))


def monotonicity_fit(
    x0_values, defects, L: float, tolerance: float = 0.25, noise: float = 1e-13
) -> MonotonicityFit:
    """
    Fit log(defect) = log C + slope x0 and compare the slope with -1/L.

    With fewer than two defects above the noise level no exponent can be fitted: the fit
    is marked trivial and does not pass.

    Args:
        x0_values (array-like): Offsets.
        defects (array-like): Monotonicity defects per offset.
        L (float): Weight scale.
        tolerance (float, optional): Allowed relative error of the slope. Defaults to 0.25.
        noise (float, optional): Defects at or below this count as zero. Defaults to 1e-13.

    Returns:
        MonotonicityFit: Fit and verdict.
    """
    x0 = np.asarray(x0_values, dtype=np.float64)
    d = np.asarray(defects, dtype=np.float64)
    expected = -1.0 / L
    bound = float(np.max(np.maximum(d, 0.0) * np.exp(x0 / L)))
    resolved = d > noise
    if np.count_nonzero(resolved) < 2:
        logging.warning("monotonicity defects below noise, decay exponent cannot be fitted")
        return MonotonicityFit(
            slope=float("nan"),
            C_hat=0.0,
            C_bound=bound,
            expected=expected,
            relative_error=float("nan"),
            trivial=True,
            passed=False,
        )
    slope, intercept = np.polyfit(x0[resolved], np.log(d[resolved]), 1)
    error = abs(slope - expected) / abs(expected)
    return MonotonicityFit(
        slope=float(slope),
        C_hat=float(np.exp(intercept)),
        C_bound=bound,
        expected=expected,
        relative_error=float(error),
        trivial=False,
        passed=bool(error <= tolerance),
    )
