# -*- coding: utf-8 -*-
"""
Overflow-safe evaluation of cosh powers through their logarithms.
"""
import logging

import numpy as np

# setup per-module logger
log = logging.getLogger(__name__).addHandler(logging.NullHandler())

# largest exponent passed to np.exp before clamping (exp(700) ~ 1e304)
LOG_CEILING: float = 700.0


def log_cosh(z) -> np.ndarray:
    """
    Return log(cosh(z)) without overflow.

    Uses log cosh z = |z| + log(1 + exp(-2|z|)) - log 2.

    Args:
        z (array-like): Arguments.

    Returns:
        np.ndarray: log(cosh(z)).
    """
    a = np.abs(np.asarray(z, dtype=np.float64))
    return a + np.log1p(np.exp(-2.0 * a)) - np.log(2.0)


def sech(z) -> np.ndarray:
    """
    Return sech(z), underflowing gracefully to 0 for large |z|.

    Args:
        z (array-like): Arguments.

    Returns:
        np.ndarray: sech(z).
    """
    return np.exp(-log_cosh(z))


def exp_clamped(log_values, ceiling: float = LOG_CEILING) -> tuple[np.ndarray, bool]:
    """
    Exponentiate, clamping logarithms above the ceiling.

    Args:
        log_values (array-like): Logarithms of the wanted values.
        ceiling (float, optional): Largest admissible logarithm. Defaults to LOG_CEILING.

    Returns:
        tuple[np.ndarray, bool]: Values, and whether any sample was clamped.
    """
    log_values = np.asarray(log_values, dtype=np.float64)
    clamped = bool(np.any(log_values > ceiling))
    if clamped:
        logging.warning(
            f"clamped {int(np.sum(log_values > ceiling))} samples whose logarithm exceeds '{ceiling}'"
        )
    return np.exp(np.minimum(log_values, ceiling)), clamped
