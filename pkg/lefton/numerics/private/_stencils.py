# -*- coding: utf-8 -*-
"""
Finite-difference stencils: clamped 4th-order matrices and periodic 6th-order derivatives.
"""
import numpy as np
from scipy.sparse import diags

# central weights, offsets -2..2
_FD4 = {
    1: np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0,
    2: np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0,
}
# central weights, offsets -3..3
_FD6 = {
    1: np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0,
    2: np.array([2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0]) / 180.0,
}


def fd4_matrix(count: int, spacing: float, order: int) -> np.ndarray:
    """
    Return the dense 4th-order central-difference matrix with clamped ends.

    Values beyond the ends are taken as zero, so the first-order matrix is exactly
    antisymmetric and the second-order matrix exactly symmetric.

    Args:
        count (int): Number of samples.
        spacing (float): Sample spacing.
        order (int): 1 or 2.

    Returns:
        np.ndarray: (count, count) matrix.
    """
    weights = _FD4[order]
    offsets = list(range(-2, 3))
    m = diags(list(weights), offsets, shape=(count, count)).toarray()
    return m / spacing**order


def fd6_periodic(f: np.ndarray, spacing: float, order: int) -> np.ndarray:
    """
    Apply the periodic 6th-order central difference of the given order.

    Args:
        f (np.ndarray): Periodic samples.
        spacing (float): Sample spacing.
        order (int): 1 or 2.

    Returns:
        np.ndarray: Derivative samples.
    """
    weights = _FD6[order]
    r = np.zeros_like(f)
    for offset, w in zip(range(-3, 4), weights):
        if w != 0.0:
            r += w * np.roll(f, -offset)
    return r / spacing**order
