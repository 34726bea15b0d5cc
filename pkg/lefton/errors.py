# -*- coding: utf-8 -*-
"""
Exceptions raised by the toolkit.

Every error derives from LeftonError, so the app can tell numerical failures (exit code 1)
apart from usage and config failures (exit code 2).
"""


class LeftonError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(LeftonError, ValueError):
    """Malformed config file, unknown key or wrongly typed value."""


class ParameterError(LeftonError, ValueError):
    """Invalid physical or numerical parameter."""


class WindowError(LeftonError, ValueError):
    """Weighted window exceeds the representable range of the weight."""


class GuardBreachError(LeftonError, RuntimeError):
    def __init__(self, reason: str, time: float, minimum: float) -> None:
        """
        Positivity or finiteness guard tripped during a run.

        Args:
            reason (str): Which guard tripped (e.g., "positivity").
            time (float): Simulation time of the breach.
            minimum (float): Minimum sample value at the breach.
        """
        self.reason = reason
        self.time = time
        self.minimum = minimum
        super().__init__(f"{reason} guard breached at t={time!r} (minimum={minimum!r})")


class InstabilityError(LeftonError, RuntimeError):
    def __init__(self, reason: str, time: float, value: float) -> None:
        """
        Norm blow-up or CFL violation during a run.

        Args:
            reason (str): What was detected (e.g., "blow-up", "cfl").
            time (float): Simulation time of the detection.
            value (float): The offending norm or Courant number.
        """
        self.reason = reason
        self.time = time
        self.value = value
        super().__init__(f"{reason} detected at t={time!r} (value={value!r})")


class ConvergenceError(LeftonError, RuntimeError):
    def __init__(self, reason: str, iterations: int, residual: float) -> None:
        """
        Iteration failed to converge, or the input lies outside the neighborhood.

        Args:
            reason (str): Human-readable cause.
            iterations (int): Iterations performed.
            residual (float): Last residual norm.
        """
        self.reason = reason
        self.iterations = iterations
        self.residual = residual
        super().__init__(f"{reason} (iterations={iterations}, residual={residual!r})")


class SpectrumError(LeftonError, RuntimeError):
    """Eigensolver failure or indefinite Gram matrix."""
