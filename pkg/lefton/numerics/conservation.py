# -*- coding: utf-8 -*-
"""
Conserved functionals E, F1, F2, the variation of F2, and the weighted norms.
Example usage:
>>> invariant_F2(grid, lefton_Q(grid, p), p.b)
5.93778...
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import ParameterError
from .grid import Grid, check_field, derivative, integrate, log_derivatives
from .profiles import WINDOW, LeftonParams, Q_profile, weight_alpha

# setup per-module logger
log = logging.getLogger(__name__).addHandler(logging.NullHandler())

# denominator floor of relative drifts
DRIFT_FLOOR: float = 1e-30
# alpha ceiling for norms of sampled fields
ALPHA_CEILING: float = 1e16


@dataclass(frozen=True)
class FlaggedValue:
    """
    A quadrature value that may carry a divergence flag.
    """

    value: float
    diverges: bool
    note: str = ""


@dataclass(frozen=True)
class Norms:
    h1_alpha: float
    k_Z: float
    half_width: float


@dataclass
class InvariantSeries:
    """
    E, F1 and F2 per snapshot, with relative drifts from the first snapshot.
    """

    times: list = field(default_factory=list)
    E: list = field(default_factory=list)
    F1: list = field(default_factory=list)
    F1_flag: list = field(default_factory=list)
    F2: list = field(default_factory=list)

    @staticmethod
    def _drift(values: list) -> list:
        if not values:
            return []
        v0 = values[0]
        denom = max(abs(v0), DRIFT_FLOOR)
        return [abs(v - v0) / denom for v in values]

    @property
    def drift_E(self) -> list:
        return self._drift(self.E)

    @property
    def drift_F2(self) -> list:
        return self._drift(self.F2)

    def append(self, t: float, E: float, F1: FlaggedValue, F2: float) -> None:
        self.times.append(float(t))
        self.E.append(float(E))
        self.F1.append(float(F1.value))
        self.F1_flag.append(bool(F1.diverges))
        self.F2.append(float(F2))
        return None

    def header(self) -> list:
        return ["t", "E", "F1", "F1_flag", "F2", "drift_E", "drift_F2"]

    def rows(self) -> list:
        """
        Return CSV rows matching header().

        Returns:
            list: One row per snapshot.
        """
        return [
            [t, e, f1, int(flag), f2, de, df2]
            for t, e, f1, flag, f2, de, df2 in zip(
                self.times, self.E, self.F1, self.F1_flag, self.F2, self.drift_E, self.drift_F2
            )
        ]


def positive_part(grid: Grid, m, floor: float = 0.0) -> np.ndarray:
    """
    Validate positivity, optionally clipping from below at floor * max(m).

    With floor = 0 every sample must be strictly positive. With floor > 0, samples below
    the floor (typically far-field roundoff of an evolved field) are replaced by it.

    Args:
        grid (Grid): Grid.
        m (array-like): Samples.
        floor (float, optional): Relative clipping level. Defaults to 0.0.

    Returns:
        np.ndarray: Positive samples.
    """
    m = check_field(grid, m, "m")
    if floor > 0:
        scale = float(np.max(m))
        if scale <= 0:
            raise ParameterError("field has no positive samples")
        return np.maximum(m, floor * scale)
    if np.any(m <= 0):
        raise ParameterError(f"field must be positive, minimum is '{float(np.min(m))}'")
    return m


def invariant_E(grid: Grid, m) -> float:
    """
    E = integral of m.
    """
    return integrate(grid, m)


def invariant_F1(grid: Grid, m, b: float, floor: float = 0.0) -> FlaggedValue:
    """
    F1 = integral of m^(1/b).

    For b < 0 the functional diverges on the real line; the truncated-domain value is
    returned with a divergence flag.

    Args:
        grid (Grid): Grid.
        m (array-like): Positive samples.
        b (float): Regime parameter, non-zero.
        floor (float, optional): Relative clipping level, see positive_part. Defaults to 0.0.

    Returns:
        FlaggedValue: Value and flag.
    """
    if b == 0:
        raise ParameterError("F1 is undefined for b = 0")
    m = positive_part(grid, m, floor)
    value = integrate(grid, m ** (1.0 / b))
    if b < 0:
        note = "F1 diverges for b < 0, value is truncated to the periodic domain"
        logging.debug(note)
        return FlaggedValue(value=value, diverges=True, note=note)
    return FlaggedValue(value=value, diverges=False)


def F2_density(grid: Grid, m, b: float, floor: float = 0.0) -> np.ndarray:
    """
    F2 density m^(-1/b) (m_x^2/(b^2 m^2) + 1), with m_x/m from log_derivatives.
    """
    if b == 0:
        raise ParameterError("F2 is undefined for b = 0")
    m = positive_part(grid, m, floor)
    wx, _ = log_derivatives(grid, m)
    return m ** (-1.0 / b) * (wx**2 / b**2 + 1.0)


def invariant_F2(grid: Grid, m, b: float, floor: float = 0.0) -> float:
    """
    F2 = integral of m^(-1/b) (m_x^2/(b^2 m^2) + 1).

    Args:
        grid (Grid): Grid.
        m (array-like): Positive samples.
        b (float): Regime parameter, non-zero.
        floor (float, optional): Relative clipping level, see positive_part. Defaults to 0.0.

    Returns:
        float: F2.
    """
    return integrate(grid, F2_density(grid, m, b, floor))


def variation_F2(grid: Grid, m, b: float, floor: float = 0.0) -> np.ndarray:
    """
    Variational derivative of F2.

    The Euler-Lagrange derivative
    (-1/b-2) m^(-1/b-3) m_x^2/b^2 - (1/b) m^(-1/b-1) - (2/b^2) (m^(-1/b-2) m_x)_x
    is evaluated as m^(-1/b-1) (w_x^2/b^3 - 2 w_xx/b^2 - 1/b) with w = log m, which avoids
    differentiating the growing product. Far tails of rapidly decaying m are not resolved.

    Args:
        grid (Grid): Grid.
        m (array-like): Positive samples.
        b (float): Regime parameter, non-zero.
        floor (float, optional): Relative clipping level, see positive_part. Defaults to 0.0.

    Returns:
        np.ndarray: dF2/dm samples.
    """
    if b == 0:
        raise ParameterError("F2 is undefined for b = 0")
    m = positive_part(grid, m, floor)
    wx, wxx = log_derivatives(grid, m)
    return m ** (-1.0 / b - 1.0) * (wx**2 / b**3 - 2.0 * wxx / b**2 - 1.0 / b)


def norms(
    grid: Grid,
    f,
    p: LeftonParams,
    window: float = WINDOW,
    ceiling: float | None = ALPHA_CEILING,
    f_x=None,
) -> Norms:
    """
    Windowed H1_alpha norm and Z-norm of a field.

    h1_alpha = (integral over |x - x*| <= W of (f^2 + f_x^2) alpha)^(1/2),
    k_Z = max over the same window of |f|/Q. The effective W is reduced to where alpha
    stays below the ceiling.

    Args:
        grid (Grid): Grid.
        f (array-like): Samples.
        p (LeftonParams): Parameters (b < -1).
        window (float, optional): Half-width W. Defaults to WINDOW.
        ceiling (float | None, optional): Alpha ceiling. Defaults to ALPHA_CEILING.
        f_x (array-like, optional): Derivative of f if known in closed form. Defaults to None.

    Returns:
        Norms: h1_alpha, k_Z and the effective half-width.
    """
    f = check_field(grid, f)
    weight = weight_alpha(grid, p, window, ceiling)
    fx = derivative(grid, f, 1) if f_x is None else check_field(grid, f_x, "f_x")
    inside = weight.inside
    density = (f**2 + fx**2) * weight.values
    h1 = float(np.sqrt(grid.spacing * np.sum(density[inside])))
    kz = float(np.max(np.abs(f[inside]) / Q_profile(grid.points[inside], p)))
    return Norms(h1_alpha=h1, k_Z=kz, half_width=weight.half_width)


def h1_norm(grid: Grid, f) -> float:
    """
    Plain H1 norm (integral of f^2 + f_x^2)^(1/2).
    """
    f = check_field(grid, f)
    fx = derivative(grid, f, 1)
    return float(np.sqrt(integrate(grid, f**2 + fx**2)))


def invariant_series(
    grid: Grid, times, states, b: float, floor: float = 0.0
) -> InvariantSeries:
    """
    Evaluate E, F1 and F2 on every snapshot.

    Args:
        grid (Grid): Grid.
        times (array-like): Snapshot times.
        states (array-like): Snapshots (momentum density), one row per time.
        b (float): Regime parameter.
        floor (float, optional): Relative clipping level for the negative powers. Defaults to 0.0.

    Returns:
        InvariantSeries: The series.
    """
    series = InvariantSeries()
    for t, m in zip(times, states):
        series.append(t, invariant_E(grid, m), invariant_F1(grid, m, b, floor), invariant_F2(grid, m, b, floor))
    return series
