# -*- coding: utf-8 -*-
"""
Fourier helpers on real periodic samples: wavenumbers, derivative symbols, 2/3-rule mask,
dense derivative matrices.
"""
import numpy as np


def wavenumbers(count: int, spacing: float) -> np.ndarray:
    """
    Return the non-negative wavenumbers of the real FFT.

    Args:
        count (int): Number of samples.
        spacing (float): Sample spacing.

    Returns:
        np.ndarray: 2*pi*j/(count*spacing) for j = 0..count/2.
    """
    return 2.0 * np.pi * np.fft.rfftfreq(count, d=spacing)


def derivative_symbol(xi: np.ndarray, order: int) -> np.ndarray:
    """
    Return (i*xi)**order with the Nyquist mode removed for odd orders.

    The Nyquist mode of a real signal has no odd derivative on the grid.

    Args:
        xi (np.ndarray): Real-FFT wavenumbers (even sample count).
        order (int): Derivative order.

    Returns:
        np.ndarray: Complex multipliers.
    """
    symbol = (1j * xi) ** order
    if order % 2 == 1:
        symbol[-1] = 0.0
    return symbol


def dealias_mask(count: int) -> np.ndarray:
    """
    Return the 2/3-rule mask over real-FFT modes.

    Args:
        count (int): Number of samples.

    Returns:
        np.ndarray: 1.0 for kept modes (|j| <= count/3), 0.0 otherwise.
    """
    j = np.arange(count // 2 + 1)
    return (j <= count // 3).astype(np.float64)


def derivative_matrix(count: int, spacing: float, order: int) -> np.ndarray:
    """
    Return the dense Fourier-collocation derivative matrix.

    Odd orders are antisymmetric, even orders symmetric (up to rounding).

    Args:
        count (int): Number of samples.
        spacing (float): Sample spacing.
        order (int): Derivative order.

    Returns:
        np.ndarray: (count, count) matrix D with D @ f the derivative of f.
    """
    symbol = derivative_symbol(wavenumbers(count, spacing), order)
    identity = np.eye(count)
    d = np.fft.irfft(symbol[:, None] * np.fft.rfft(identity, axis=0), n=count, axis=0)
    if order % 2 == 1:
        return 0.5 * (d - d.T)
    return 0.5 * (d + d.T)
