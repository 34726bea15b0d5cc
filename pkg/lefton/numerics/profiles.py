# -*- coding: utf-8 -*-
"""
Closed-form lefton and peakon profiles and the weights built from them.

All lefton profiles are generated from log-cosh, so tails far below the double range
stay finite and relatively accurate.
Example usage:
>>> p = LeftonParams(b=-3.0, A=1.0)
>>> Q = lefton_Q(grid, p)
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ..errors import ParameterError, WindowError
from .grid import Grid
from .private._logcosh import LOG_CEILING, exp_clamped, log_cosh, sech

# setup per-module logger
log = logging.getLogger(__name__).addHandler(logging.NullHandler())

# default half-width of the representable alpha window
WINDOW: float = 12.0


@dataclass(frozen=True)
class LeftonParams:
    """
    Lefton parameters (b, A, x*) with derived nu, k and L.
    """

    b: float
    A: float = 1.0
    x_star: float = 0.0

    def __post_init__(self) -> None:
        if not np.isfinite(self.b):
            raise ParameterError(f"b must be finite, got '{self.b}'")
        if not np.isfinite(self.A) or self.A <= 0:
            raise ParameterError(f"A must be positive, got '{self.A}'")
        return None

    @property
    def nu(self) -> float:
        return -(self.b + 1.0) / 2.0

    @property
    def k(self) -> float:
        return lagrange_multiplier_k(self.b, self.A)

    @property
    def L_weight(self) -> float:
        return -self.b + 3.0

    @property
    def peak_Q(self) -> float:
        """Q(x*) = A(1-b)/2."""
        return self.A * (1.0 - self.b) / 2.0

    def require_lefton(self) -> None:
        """
        Raise unless b < -1 (the lefton regime).
        """
        if not self.b < -1.0:
            raise ParameterError(f"lefton operations require b < -1, got b='{self.b}'")
        return None

    def describe(self) -> dict:
        r = {"b": self.b, "A": self.A, "x_star": self.x_star}
        if self.b < -1.0:
            r.update({"nu": self.nu, "k": self.k, "L": self.L_weight})
        return r


@dataclass(frozen=True)
class Weight:
    """
    Sampled weight alpha with its window.

    inside marks samples with |x - x*| <= half_width, the window on which weighted
    quantities are evaluated. clamped reports whether any sample hit the overflow clamp.
    """

    values: np.ndarray
    inside: np.ndarray
    half_width: float
    clamped: bool


def lagrange_multiplier_k(b: float, A: float) -> float:
    """
    Return k = (A(1-b)/2)^(1/b + 1).

    Args:
        b (float): Regime parameter, non-zero.
        A (float): Amplitude, > 0.

    Returns:
        float: The multiplier k.
    """
    if A <= 0:
        raise ParameterError(f"A must be positive, got '{A}'")
    if b == 0:
        raise ParameterError("k is undefined for b = 0")
    return float((A * (1.0 - b) / 2.0) ** (1.0 / b + 1.0))


def log_Q(x, p: LeftonParams) -> np.ndarray:
    """
    Return log Q at arbitrary points.

    Args:
        x (array-like): Points.
        p (LeftonParams): Parameters (b < -1).

    Returns:
        np.ndarray: log Q(x).
    """
    p.require_lefton()
    y = np.asarray(x, dtype=np.float64) - p.x_star
    return np.log(p.peak_Q) + (p.b / p.nu) * log_cosh(p.nu * y)


def q_profile(x, p: LeftonParams) -> np.ndarray:
    """
    Lefton velocity q = A cosh(nu(x - x*))^(-1/nu) at arbitrary points.
    """
    p.require_lefton()
    y = np.asarray(x, dtype=np.float64) - p.x_star
    return p.A * np.exp(-log_cosh(p.nu * y) / p.nu)


def Q_profile(x, p: LeftonParams) -> np.ndarray:
    """
    Lefton momentum Q = A(1-b)/2 cosh(nu(x - x*))^(b/nu) at arbitrary points.
    """
    return np.exp(log_Q(x, p))


def Q_power(x, p: LeftonParams, exponent: float) -> np.ndarray:
    """
    Return Q^exponent, clamped (with a warning) where it would overflow.

    Args:
        x (array-like): Points.
        p (LeftonParams): Parameters.
        exponent (float): Power.

    Returns:
        np.ndarray: Q(x)^exponent.
    """
    values, _ = exp_clamped(exponent * log_Q(x, p))
    return values


def lefton_q(grid: Grid, p: LeftonParams) -> np.ndarray:
    """
    Sample the lefton velocity q on the grid.

    Args:
        grid (Grid): Grid.
        p (LeftonParams): Parameters (b < -1).

    Returns:
        np.ndarray: q samples.
    """
    return q_profile(grid.points, p)


def lefton_Q(grid: Grid, p: LeftonParams) -> np.ndarray:
    """
    Sample the lefton momentum Q on the grid.

    Args:
        grid (Grid): Grid.
        p (LeftonParams): Parameters (b < -1).

    Returns:
        np.ndarray: Q samples.
    """
    return Q_profile(grid.points, p)


def lefton_dq(grid: Grid, p: LeftonParams) -> np.ndarray:
    """
    Closed-form q' = -q tanh(nu(x - x*)).
    """
    y = grid.points - p.x_star
    return -lefton_q(grid, p) * np.tanh(p.nu * y)


def Q_derivatives(x, p: LeftonParams) -> tuple[np.ndarray, np.ndarray]:
    """
    Closed-form Q' and Q'' at arbitrary points.

    Q' = b Q tanh(nu y), Q'' = b^2 Q - (b(3b+1)/(2k)) Q^(1/b+2).

    Args:
        x (array-like): Points.
        p (LeftonParams): Parameters (b < -1).

    Returns:
        tuple[np.ndarray, np.ndarray]: (Q', Q'').
    """
    b = p.b
    y = np.asarray(x, dtype=np.float64) - p.x_star
    Q = Q_profile(x, p)
    dQ = b * Q * np.tanh(p.nu * y)
    # Q^(1/b+1) = k sech^2, so the second term never overflows
    d2Q = b**2 * Q - b * (3.0 * b + 1.0) / 2.0 * Q * sech(p.nu * y) ** 2
    return dQ, d2Q


def lefton_derivatives(grid: Grid, p: LeftonParams) -> tuple[np.ndarray, np.ndarray]:
    """
    Closed-form Q' and Q'' sampled on the grid.
    """
    return Q_derivatives(grid.points, p)


def log_alpha(x, p: LeftonParams) -> np.ndarray:
    """
    Return log alpha = (-1/b - 2) log Q.
    """
    return (-1.0 / p.b - 2.0) * log_Q(x, p)


def alpha_half_width(p: LeftonParams, ceiling: float) -> float:
    """
    Distance from x* at which alpha reaches the given ceiling.

    Args:
        p (LeftonParams): Parameters (b < -1).
        ceiling (float): Largest admissible alpha.

    Returns:
        float: Half-width (0.0 if alpha(x*) already exceeds the ceiling).
    """
    target = np.log(ceiling)

    def _excess(d: float) -> float:
        return float(log_alpha(p.x_star + d, p)) - target

    if _excess(0.0) >= 0.0:
        return 0.0
    hi = 1.0
    while _excess(hi) < 0.0:
        hi *= 2.0
    return float(brentq(_excess, 0.0, hi, xtol=1e-12))


def weight_alpha(
    grid: Grid,
    p: LeftonParams,
    window: float = WINDOW,
    ceiling: float | None = None,
) -> Weight:
    """
    Sample the weight alpha = Q^(-1/b - 2) with its evaluation window.

    Samples whose logarithm exceeds the floating-point range are clamped and flagged.
    With a ceiling, the window shrinks to where alpha stays below it, which bounds the
    amplification of sampling noise in weighted norms.

    If the window itself overflows, raise.

    Args:
        grid (Grid): Grid.
        p (LeftonParams): Parameters (b < -1).
        window (float, optional): Half-width W around x*. Defaults to WINDOW.
        ceiling (float | None, optional): Largest admissible alpha inside the window. Defaults to None.

    Returns:
        Weight: Values, window mask, effective half-width, clamp flag.
    """
    p.require_lefton()
    if window <= 0:
        raise ParameterError(f"window must be positive, got '{window}'")
    la = log_alpha(grid.points, p)
    if float(np.max(log_alpha(p.x_star + np.array([-window, window]), p))) > LOG_CEILING:
        raise WindowError(f"alpha overflows within the window W='{window}' for b='{p.b}'")
    half_width = window
    if ceiling is not None:
        half_width = min(window, alpha_half_width(p, ceiling))
    values, clamped = exp_clamped(la)
    inside = np.abs(grid.points - p.x_star) <= half_width
    if clamped:
        logging.warning(f"alpha clamped outside the window for b='{p.b}'")
    return Weight(values=values, inside=inside, half_width=half_width, clamped=clamped)


def taper(x, center: float, half_width: float, width: float = 0.25) -> np.ndarray:
    """
    Smooth window indicator 0.5(1 - tanh((|x - center| - half_width)/width)).

    Args:
        x (array-like): Points.
        center (float): Window center.
        half_width (float): Half-width where the taper equals 1/2.
        width (float, optional): Transition width. Defaults to 0.25.

    Returns:
        np.ndarray: Values in (0, 1).
    """
    d = np.abs(np.asarray(x, dtype=np.float64) - center) - half_width
    return 0.5 * (1.0 - np.tanh(d / width))


def weight_psi_L(x, p: LeftonParams, derivative: int = 0):
    """
    Monotonicity weight psi_L(x) = (2/pi) arctan(exp(nu x / L)) and its derivatives.

    Derivatives:
    * 1: (nu/(pi L)) sech(z)
    * 2: -(nu/(pi L)) (nu/L) sech(z) tanh(z)
    * 3: (nu/(pi L)) (nu/L)^2 sech(z) (1 - 2 sech^2(z))
    with z = nu x / L.

    Args:
        x (array-like or float): Points.
        p (LeftonParams): Parameters (b < -1).
        derivative (int, optional): 0, 1, 2 or 3. Defaults to 0.

    Returns:
        np.ndarray or float: Values (float for scalar input).
    """
    p.require_lefton()
    scale = p.nu / p.L_weight
    z = scale * np.asarray(x, dtype=np.float64)
    amplitude = scale / np.pi
    if derivative == 0:
        # arctan(e^z) = pi/2 - arctan(e^-z) keeps exp from overflowing
        a = np.arctan(np.exp(-np.abs(z)))
        r = np.where(z > 0, 1.0 - 2.0 / np.pi * a, 2.0 / np.pi * a)
    elif derivative == 1:
        r = amplitude * sech(z)
    elif derivative == 2:
        r = -amplitude * scale * sech(z) * np.tanh(z)
    elif derivative == 3:
        s = sech(z)
        r = amplitude * scale**2 * s * (1.0 - 2.0 * s**2)
    else:
        raise ParameterError(f"psi_L derivative must be 0..3, got '{derivative}'")
    if np.ndim(r) == 0:
        return float(r)
    return r


def profile_SQ(grid: Grid, p: LeftonParams) -> np.ndarray:
    """
    Sample SQ = (2k(1-b)/b) Q^(-1/b) + (2(b-1)/b) Q.

    Args:
        grid (Grid): Grid.
        p (LeftonParams): Parameters (b < -1).

    Returns:
        np.ndarray: SQ samples.
    """
    b, k = p.b, p.k
    x = grid.points
    return 2.0 * k * (1.0 - b) / b * Q_power(x, p, -1.0 / b) + 2.0 * (b - 1.0) / b * Q_profile(x, p)


def localizer_Phi_M(x, t: float, M: float, p: LeftonParams):
    """
    Localizer Phi_M(x) = b^2 Q(x / (M + t^2)).

    Args:
        x (array-like or float): Points.
        t (float): Time.
        M (float): Scale, > 1.
        p (LeftonParams): Parameters (b < -1).

    Returns:
        np.ndarray or float: Values (float for scalar input).
    """
    if not M > 1.0:
        raise ParameterError(f"M must exceed 1, got '{M}'")
    r = p.b**2 * Q_profile(np.asarray(x, dtype=np.float64) / (M + t**2), p)
    if np.ndim(r) == 0:
        return float(r)
    return r


def default_M(p: LeftonParams, lambda1: float) -> float:
    """
    Return M = max{1, 32A(1-b)/(lambda1 (b+1)^2), 32A(1-b)/lambda1}.

    Args:
        p (LeftonParams): Parameters (b < -1).
        lambda1 (float): Coercivity constant, > 0.

    Returns:
        float: The localizer scale.
    """
    if not lambda1 > 0:
        raise ParameterError(f"coercivity constant must be positive, got '{lambda1}'")
    c = 32.0 * p.A * (1.0 - p.b) / lambda1
    return float(max(1.0, c / (p.b + 1.0) ** 2, c))


def peakon_u(x, t: float, c: float):
    """
    Peakon u = c exp(-|x - ct|).

    Args:
        x (array-like or float): Points.
        t (float): Time.
        c (float): Speed (and peak height).

    Returns:
        np.ndarray or float: Values (float for scalar input).
    """
    r = c * np.exp(-np.abs(np.asarray(x, dtype=np.float64) - c * t))
    if np.ndim(r) == 0:
        return float(r)
    return r
