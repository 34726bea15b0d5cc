# -*- coding: utf-8 -*-
"""
Modulated decomposition m(x + rho) = (1 + a) Q(x) + eps with eps orthogonal (alpha-weighted)
to Q' and to the variation of F2 at Q.
Example usage:
>>> frame = decompose(grid, 1.05 * Q_profile(grid.points - 0.3, p), p)
>>> frame.rho, frame.a
(0.3..., 0.05...)
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConvergenceError, ParameterError
from .conservation import ALPHA_CEILING, h1_norm, norms, variation_F2
from .evolution import Trajectory
from .grid import Grid, check_field, derivative, shift
from .profiles import WINDOW, LeftonParams, Q_derivatives, Q_profile, alpha_half_width, lefton_Q, log_alpha

# setup per-module logger
log = logging.getLogger(__name__).addHandler(logging.NullHandler())

# half-width of the weighted modulation products, in lefton widths 1/nu
MODULATION_CORE: float = 1.0
# relative H1 distance from the modulated family beyond which decompose refuses
NEIGHBORHOOD: float = 0.5
# core half-width on which the variation of F2 at Q is averaged
CORE: float = 4.0
# allowed relative spread of the variation of F2 at Q over the core
CRITICAL_POINT_TOL: float = 1e-4


@dataclass(frozen=True)
class ModulationFrame:
    """
    Decomposition of one snapshot.
    """

    t: float
    rho: float
    a: float
    eps: np.ndarray
    eps_h1alpha: float
    eps_kz: float
    eps_h1: float
    orthogonality: tuple
    iterations: int

    @property
    def gamma(self) -> float:
        return 1.0 + self.a


@dataclass
class ModulationSeries:
    frames: list = field(default_factory=list)
    rho_rate: list = field(default_factory=list)
    K1: float = 0.0
    # first frame that failed to decompose, when the series was cut short
    failure: dict | None = None

    @property
    def times(self) -> list:
        return [f.t for f in self.frames]

    def header(self) -> list:
        return ["t", "rho", "a", "eps_h1alpha", "eps_kz", "rho_rate"]

    def rows(self) -> list:
        return [
            [f.t, f.rho, f.a, f.eps_h1alpha, f.eps_kz, r] for f, r in zip(self.frames, self.rho_rate)
        ]


def critical_constant(grid: Grid, p: LeftonParams) -> float:
    """
    Core mean of the variation of F2 at Q, which is constant at a critical point.

    A relative spread above CRITICAL_POINT_TOL over |x - x*| <= CORE is logged as a warning.

    Args:
        grid (Grid): Grid.
        p (LeftonParams): Parameters (b < -1).

    Returns:
        float: The constant.
    """
    values = variation_F2(grid, lefton_Q(grid, p), p.b)
    core = np.abs(grid.points - p.x_star) <= CORE
    mean = float(np.mean(values[core]))
    spread = float(np.max(np.abs(values[core] - mean))) / abs(mean)
    if spread > CRITICAL_POINT_TOL:
        logging.warning(f"variation of F2 at Q is not constant: relative spread '{spread}'")
    return mean


def modulation_weight(x, p: LeftonParams, half_width: float, width: float = 0.25) -> np.ndarray:
    """
    Weight alpha * chi of the modulation products, chi the tanh taper of the window.

    Args:
        x (array-like): Points, in the frame of the profile.
        p (LeftonParams): Parameters (b < -1).
        half_width (float): Window half-width around x*.
        width (float, optional): Taper width. Defaults to 0.25.

    Returns:
        np.ndarray: Weight samples.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.abs(x - p.x_star)
    # log(alpha * taper) stays finite where alpha alone would overflow
    log_weight = log_alpha(x, p) - np.logaddexp(0.0, 2.0 * (y - half_width) / width)
    return np.exp(np.minimum(log_weight, 700.0))


class _Conditions:
    """
    Lab-frame orthogonality conditions as functions of (rho, a).

    G1 = integral of (m - (1+a)Q(x - rho)) Q'(x - rho) w(x - rho),
    G2 = c_F * integral of (m - (1+a)Q(x - rho)) w(x - rho),
    w = alpha chi from modulation_weight.
    """

    def __init__(self, grid: Grid, m: np.ndarray, p: LeftonParams, half_width: float, c_F: float, width: float):
        self.grid = grid
        self.m = m
        self.p = p
        self.half_width = half_width
        self.c_F = c_F
        self.width = width

    def _profiles(self, rho: float) -> tuple:
        x = self.grid.points - rho
        weight = modulation_weight(x, self.p, self.half_width, self.width)
        dQ, _ = Q_derivatives(x, self.p)
        return Q_profile(x, self.p), dQ, weight

    def __call__(self, rho: float, a: float) -> np.ndarray:
        Q, dQ, weight = self._profiles(rho)
        r = (self.m - (1.0 + a) * Q) * weight
        h = self.grid.spacing
        return np.array([h * np.sum(r * dQ), self.c_F * h * np.sum(r)])

    def scale(self, rho: float) -> np.ndarray:
        Q, dQ, weight = self._profiles(rho)
        h = self.grid.spacing
        mw = np.abs(self.m) * weight
        return np.array([h * np.sum(mw * np.abs(dQ)), abs(self.c_F) * h * np.sum(mw)])


def initial_guess(grid: Grid, m: np.ndarray, p: LeftonParams) -> tuple[float, float]:
    """
    Shift from the cross-correlation peak of m with Q, amplitude from least squares.

    Args:
        grid (Grid): Grid.
        m (np.ndarray): Samples.
        p (LeftonParams): Parameters.

    Returns:
        tuple[float, float]: (rho0, a0).
    """
    Q = lefton_Q(grid, p)
    corr = np.fft.irfft(np.fft.rfft(m) * np.conj(np.fft.rfft(Q)), n=grid.count)
    j = int(np.argmax(corr))
    if j > grid.count // 2:
        j -= grid.count
    rho0 = j * grid.spacing
    shifted = Q_profile(grid.points - rho0, p)
    a0 = float(m @ shifted / (shifted @ shifted)) - 1.0
    return rho0, a0


def decompose(
    grid: Grid,
    m,
    p: LeftonParams,
    t: float = 0.0,
    half_width: float = WINDOW,
    ceiling: float = ALPHA_CEILING,
    tol: float = 1e-12,
    max_iter: int = 50,
    guess: tuple | None = None,
    taper_width: float = 0.25,
    c_F: float | None = None,
    core: float = MODULATION_CORE,
) -> ModulationFrame:
    """
    Find (rho, a) with (eps, Q')_alpha = (eps, F2'(Q))_alpha = 0 by damped Newton iteration.

    The weighted products run over min(half_width, alpha window, core / nu) around x*.
    alpha grows like 1/Q, so a perturbation decaying no faster than Q makes the wide
    window products dominated by the tails; the core keeps them on the lefton itself.
    The Jacobian is taken by central differences; a step is halved until the residual
    decreases. The input must lie near the modulated family: if the initial guess is
    farther than NEIGHBORHOOD in relative H1 distance, or Newton does not converge, raise.

    Args:
        grid (Grid): Grid.
        m (array-like): Momentum samples.
        p (LeftonParams): Parameters (b < -1).
        t (float, optional): Time stamp of the snapshot. Defaults to 0.0.
        half_width (float, optional): Window W of the weighted products. Defaults to WINDOW.
        ceiling (float, optional): Alpha ceiling of the effective window. Defaults to ALPHA_CEILING.
        tol (float, optional): Convergence tolerance relative to the residual scale. Defaults to 1e-12.
        max_iter (int, optional): Iteration cap. Defaults to 50.
        guess (tuple | None, optional): Starting (rho, a); cross-correlation if None. Defaults to None.
        taper_width (float, optional): Width of the window taper. Defaults to 0.25.
        c_F (float | None, optional): Variation of F2 at Q; computed if None. Defaults to None.
        core (float, optional): Half-width cap in lefton widths 1/nu. Defaults to MODULATION_CORE.

    Returns:
        ModulationFrame: The frame.
    """
    p.require_lefton()
    m = check_field(grid, m, "m")
    if max_iter < 1:
        raise ParameterError(f"max_iter must be positive, got '{max_iter}'")
    if core <= 0:
        raise ParameterError(f"core must be positive, got '{core}'")
    effective = min(half_width, alpha_half_width(p, ceiling), core / p.nu)
    if c_F is None:
        c_F = critical_constant(grid, p)
    conditions = _Conditions(grid, m, p, effective, c_F, taper_width)
    rho, a = initial_guess(grid, m, p) if guess is None else (float(guess[0]), float(guess[1]))
    base = (1.0 + a) * Q_profile(grid.points - rho, p)
    distance = h1_norm(grid, m - base) / max(h1_norm(grid, base), np.finfo(float).tiny)
    if distance > NEIGHBORHOOD:
        logging.error(f"snapshot at t='{t}' is outside the stability neighborhood ('{distance}')")
        raise ConvergenceError("input outside the stability neighborhood", 0, distance)

    target = tol * np.maximum(conditions.scale(rho), np.finfo(float).tiny)
    g = conditions(rho, a)
    iterations = 0
    converged = bool(np.all(np.abs(g) <= target))
    polished = False
    while iterations < max_iter and not polished:
        step = 1e-6
        jac = np.empty((2, 2))
        jac[:, 0] = (conditions(rho + step, a) - conditions(rho - step, a)) / (2.0 * step)
        jac[:, 1] = (conditions(rho, a + step) - conditions(rho, a - step)) / (2.0 * step)
        try:
            delta = np.linalg.solve(jac, -g)
        except np.linalg.LinAlgError:
            logging.error(f"singular modulation Jacobian at t='{t}'")
            raise ConvergenceError("singular Jacobian", iterations, float(np.max(np.abs(g))))
        damping = 1.0
        accepted = False
        for _ in range(30):
            trial = conditions(rho + damping * delta[0], a + damping * delta[1])
            if np.linalg.norm(trial / target) < np.linalg.norm(g / target):
                accepted = True
                break
            damping *= 0.5
        iterations += 1
        if not accepted:
            # roundoff floor reached
            break
        rho, a, g = rho + damping * delta[0], a + damping * delta[1], trial
        # one extra step after the tolerance is met drives the residual to roundoff
        polished = converged
        converged = bool(np.all(np.abs(g) <= target))
    if not converged:
        logging.error(f"modulation Newton did not converge at t='{t}'")
        raise ConvergenceError("modulation Newton did not converge", iterations, float(np.max(np.abs(g))))

    eps = shift(grid, m, rho) - (1.0 + a) * lefton_Q(grid, p)
    n = norms(grid, eps, p, half_width, ceiling)
    logging.debug(f"ok: decomposed t='{t}': rho='{rho}', a='{a}' in {iterations} iterations")
    return ModulationFrame(
        t=float(t),
        rho=float(rho),
        a=float(a),
        eps=eps,
        eps_h1alpha=n.h1_alpha,
        eps_kz=n.k_Z,
        eps_h1=h1_norm(grid, eps),
        orthogonality=(float(abs(g[0])), float(abs(g[1]))),
        iterations=iterations,
    )


def modulation_series(
    traj: Trajectory,
    p: LeftonParams,
    half_width: float = WINDOW,
    ceiling: float = ALPHA_CEILING,
    tol: float = 1e-12,
    max_iter: int = 50,
    partial: bool = False,
) -> ModulationSeries:
    """
    Decompose every snapshot of a trajectory and estimate rho'(t).

    Each frame starts Newton from the previous one. With partial=True a frame that fails
    to decompose ends the series: the frames before it are kept and the failure (time,
    reason, iterations, residual) is recorded instead of raised. rho' uses centered differences on the
    snapshot times (one-sided at the ends); K1 is max |rho'| / |eps|_H1 over snapshots where
    |eps|_H1 is above roundoff.

    Args:
        traj (Trajectory): Momentum- or velocity-form trajectory.
        p (LeftonParams): Parameters (b < -1).
        half_width (float, optional): Window W. Defaults to WINDOW.
        ceiling (float, optional): Alpha ceiling. Defaults to ALPHA_CEILING.
        tol (float, optional): Newton tolerance. Defaults to 1e-12.
        max_iter (int, optional): Newton iteration cap. Defaults to 50.
        partial (bool, optional): Keep the frames before a failure. Defaults to False.

    Returns:
        ModulationSeries: Frames, rho' and K1.

    Raises:
        ConvergenceError: A frame failed and partial is False.
    """
    if traj.form == "linearized":
        raise ParameterError("modulation needs a nonlinear trajectory")
    grid = traj.grid
    c_F = critical_constant(grid, p)
    series = ModulationSeries()
    guess = None
    for t, state in zip(traj.times, traj.states):
        m = state - derivative(grid, state, 2) if traj.form == "velocity" else state
        try:
            frame = decompose(grid, m, p, t, half_width, ceiling, tol, max_iter, guess, c_F=c_F)
        except ConvergenceError as e:
            if not partial:
                raise
            logging.warning(f"modulation stopped at t='{t}': {e}")
            series.failure = {
                "t": float(t),
                "reason": e.reason,
                "iterations": e.iterations,
                "residual": float(e.residual),
            }
            break
        series.frames.append(frame)
        guess = (frame.rho, frame.a)
    rhos = np.array([f.rho for f in series.frames])
    if len(rhos) > 1:
        rates = np.gradient(rhos, np.asarray(series.times, dtype=np.float64))
    else:
        rates = np.zeros_like(rhos)
    series.rho_rate = [float(r) for r in rates]
    eps_h1 = np.array([f.eps_h1 for f in series.frames])
    resolved = eps_h1 > 1e-12
    series.K1 = float(np.max(np.abs(rates[resolved]) / eps_h1[resolved])) if np.any(resolved) else 0.0
    logging.info(f"modulation: {len(series.frames)} frames, K1 = '{series.K1}'")
    return series
