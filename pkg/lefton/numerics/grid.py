# -*- coding: utf-8 -*-
"""
Periodic grid: Fourier differentiation, Helmholtz inversion, quadrature, windows.
Example usage:
>>> grid = make_grid(80.0, 4096)
>>> u = helmholtz_inverse(grid, m)
"""
import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..errors import ParameterError
from .private._spectral import dealias_mask, derivative_symbol, wavenumbers
from .private._stencils import fd6_periodic

# setup per-module logger
log = logging.getLogger(__name__).addHandler(logging.NullHandler())

# boundary magnitude relative to max|f| above which a field is not "effectively periodic"
DECAY_FLOOR: float = 1e-10


@dataclass(frozen=True)
class Grid:
    """
    Uniform periodic grid on [center - length/2, center + length/2).
    """

    length: float
    count: int
    center: float = 0.0

    @property
    def spacing(self) -> float:
        return self.length / self.count

    @cached_property
    def points(self) -> np.ndarray:
        x = self.center - 0.5 * self.length + self.spacing * np.arange(self.count)
        x.flags.writeable = False
        return x

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Non-negative real-FFT wavenumbers 2*pi*j/length."""
        xi = wavenumbers(self.count, self.spacing)
        xi.flags.writeable = False
        return xi

    @cached_property
    def dealias(self) -> np.ndarray:
        mask = dealias_mask(self.count)
        mask.flags.writeable = False
        return mask

    def describe(self) -> dict:
        """
        Return grid metadata for reports.

        Returns:
            dict: length, count, spacing, center.
        """
        return {
            "length": self.length,
            "count": self.count,
            "spacing": self.spacing,
            "center": self.center,
        }


def make_grid(length: float, count: int, center: float = 0.0) -> Grid:
    """
    Create a periodic grid.

    If failed, raise.

    Args:
        length (float): Domain span, > 0.
        count (int): Number of samples, even and >= 8.
        center (float, optional): Domain midpoint. Defaults to 0.0.

    Returns:
        Grid: The grid.
    """
    if not np.isfinite(length) or length <= 0:
        raise ParameterError(f"grid length must be positive, got '{length}'")
    if int(count) != count or count < 8 or count % 2 != 0:
        raise ParameterError(f"grid count must be an even integer >= 8, got '{count}'")
    grid = Grid(length=float(length), count=int(count), center=float(center))
    logging.debug(f"ok: created grid {grid.describe()}")
    return grid


def check_field(grid: Grid, f, name: str = "field") -> np.ndarray:
    """
    Return f as a float64 array after validating it against the grid.

    If failed, raise.

    Args:
        grid (Grid): Owning grid.
        f (array-like): Samples.
        name (str, optional): Name used in error messages. Defaults to "field".

    Returns:
        np.ndarray: Validated samples.
    """
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (grid.count,):
        raise ParameterError(f"{name} has shape {f.shape}, expected ({grid.count},)")
    if not np.all(np.isfinite(f)):
        raise ParameterError(f"{name} contains non-finite samples")
    return f


def derivative(grid: Grid, f, order: int = 1, floor: float | None = DECAY_FLOOR) -> np.ndarray:
    """
    Fourier-collocation derivative of the given order.

    Input that is not effectively periodic is reported through decay_warning; the
    derivative is still returned.

    Args:
        grid (Grid): Grid.
        f (array-like): Periodic samples.
        order (int, optional): Derivative order >= 1. Defaults to 1.
        floor (float | None, optional): Decay floor of the input check; None skips it. Defaults to DECAY_FLOOR.

    Returns:
        np.ndarray: Derivative samples.
    """
    if int(order) != order or order < 1:
        raise ParameterError(f"derivative order must be a positive integer, got '{order}'")
    f = check_field(grid, f)
    if floor is not None:
        decay_warning(grid, f, floor)
    symbol = derivative_symbol(grid.wavenumbers, int(order))
    return np.fft.irfft(symbol * np.fft.rfft(f), n=grid.count)


def product(grid: Grid, f: np.ndarray, g: np.ndarray, dealias: bool = True) -> np.ndarray:
    """
    Quadratic product with optional 2/3-rule dealiasing.

    Both factors are filtered before multiplication and the product is filtered after.

    Args:
        grid (Grid): Grid.
        f (np.ndarray): First factor.
        g (np.ndarray): Second factor.
        dealias (bool, optional): Apply the 2/3 rule. Defaults to True.

    Returns:
        np.ndarray: Product samples.
    """
    if not dealias:
        return f * g
    mask = grid.dealias
    n = grid.count
    ff = np.fft.irfft(mask * np.fft.rfft(f), n=n)
    gf = np.fft.irfft(mask * np.fft.rfft(g), n=n)
    return np.fft.irfft(mask * np.fft.rfft(ff * gf), n=n)


def _periodized_kernel(grid: Grid) -> np.ndarray:
    # sum over images of exp(-|s|)/2 on period length, at offsets s = k*dx
    length = grid.length
    s = grid.spacing * np.arange(grid.count)
    s = np.abs(np.mod(s + 0.5 * length, length) - 0.5 * length)
    return (np.exp(s - length) + np.exp(-s)) / (2.0 * (1.0 - np.exp(-length)))


def helmholtz_inverse(grid: Grid, m, method: str = "fourier") -> np.ndarray:
    """
    Solve (1 - d^2/dx^2) u = m on the periodic grid.

    method="fourier" divides by (1 + xi^2) in Fourier space.
    method="kernel" convolves with the periodized Green's function exp(-|x|)/2 and
    corrects the rectangle rule for the kernel's derivative jump at the origin
    (Euler-Maclaurin terms up to h^6).

    Args:
        grid (Grid): Grid.
        m (array-like): Right-hand side.
        method (str, optional): "fourier" or "kernel". Defaults to "fourier".

    Returns:
        np.ndarray: u samples.
    """
    m = check_field(grid, m, "m")
    n = grid.count
    if method == "fourier":
        return np.fft.irfft(np.fft.rfft(m) / (1.0 + grid.wavenumbers**2), n=n)
    if method != "kernel":
        raise ParameterError(f"unknown Helmholtz inversion method '{method}'")
    h = grid.spacing
    kernel = _periodized_kernel(grid)
    raw = h * np.fft.irfft(np.fft.rfft(kernel) * np.fft.rfft(m), n=n)
    m2 = derivative(grid, m, 2)
    m4 = derivative(grid, m, 4)
    return (
        raw
        - h**2 / 12.0 * m
        + h**4 / 720.0 * (3.0 * m2 + m)
        - h**6 / 30240.0 * (m + 10.0 * m2 + 5.0 * m4)
    )


def integrate(grid: Grid, f) -> float:
    """
    Rectangle-rule quadrature dx * sum(f).

    Args:
        grid (Grid): Grid.
        f (array-like): Samples.

    Returns:
        float: Integral over the periodic domain.
    """
    f = check_field(grid, f)
    return float(grid.spacing * np.sum(f))


def shift(grid: Grid, f, s: float) -> np.ndarray:
    """
    Return samples of f(x + s) by Fourier interpolation.

    Args:
        grid (Grid): Grid.
        f (array-like): Periodic samples.
        s (float): Shift.

    Returns:
        np.ndarray: Shifted samples.
    """
    f = check_field(grid, f)
    phase = np.exp(1j * grid.wavenumbers * s)
    # Nyquist mode must stay real
    phase[-1] = np.cos(grid.wavenumbers[-1] * s)
    return np.fft.irfft(phase * np.fft.rfft(f), n=grid.count)


def decay_warning(grid: Grid, f, floor: float = DECAY_FLOOR) -> str | None:
    """
    Check whether a field is effectively periodic (small at both ends).

    Args:
        grid (Grid): Grid.
        f (array-like): Samples.
        floor (float, optional): Relative boundary magnitude allowed. Defaults to DECAY_FLOOR.

    Returns:
        str | None: Warning text if the boundary magnitude exceeds the floor, else None.
    """
    f = np.asarray(f, dtype=np.float64)
    scale = float(np.max(np.abs(f)))
    if scale == 0.0:
        return None
    edge = max(abs(float(f[0])), abs(float(f[-1])))
    if edge <= floor * scale:
        return None
    msg = f"boundary magnitude {edge!r} exceeds decay floor {floor!r} x max {scale!r}"
    logging.warning(msg)
    return msg


def log_derivatives(
    grid: Grid, m: np.ndarray, split: float = 1e-6
) -> tuple[np.ndarray, np.ndarray]:
    """
    First and second derivatives of log(m) for positive m.

    Where m > split * max(m), use spectral derivatives of m (m_x/m, m_xx/m - (m_x/m)^2).
    In the tails, use 6th-order differences of log(m), which stay accurate in relative
    terms where m itself is tiny.

    Args:
        grid (Grid): Grid.
        m (np.ndarray): Positive samples.
        split (float, optional): Relative level separating the two regimes. Defaults to 1e-6.

    Returns:
        tuple[np.ndarray, np.ndarray]: (d/dx log m, d^2/dx^2 log m).
    """
    m = check_field(grid, m, "m")
    if np.any(m <= 0):
        raise ParameterError("log derivatives need strictly positive samples")
    core = m > split * np.max(m)
    mx = derivative(grid, m, 1)
    mxx = derivative(grid, m, 2)
    wx = mx / m
    wxx = mxx / m - wx**2
    if not np.all(core):
        w = np.log(m)
        tail = ~core
        wx[tail] = fd6_periodic(w, grid.spacing, 1)[tail]
        wxx[tail] = fd6_periodic(w, grid.spacing, 2)[tail]
    return wx, wxx


def window(grid: Grid, center: float, half_width: float) -> tuple[Grid, slice]:
    """
    Return the sub-grid of contiguous points within half_width of center.

    The sub-grid keeps the parent's spacing and has an even number of points.

    Args:
        grid (Grid): Parent grid.
        center (float): Window center.
        half_width (float): Window half-width.

    Returns:
        tuple[Grid, slice]: Sub-grid and the slice selecting its samples from the parent.
    """
    x = grid.points
    inside = np.nonzero(np.abs(x - center) <= half_width)[0]
    if inside.size < 8:
        raise ParameterError(f"window of half-width '{half_width}' holds fewer than 8 points")
    start, stop = int(inside[0]), int(inside[-1]) + 1
    if (stop - start) % 2 == 1:
        stop -= 1
    count = stop - start
    length = count * grid.spacing
    sub = Grid(length=length, count=count, center=float(x[start]) + 0.5 * length)
    return sub, slice(start, stop)
