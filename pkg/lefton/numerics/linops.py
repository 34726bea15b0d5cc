# -*- coding: utf-8 -*-
"""
Linearized operators around the lefton: H, L = sqrt(alpha) H sqrt(alpha), the skew-symmetric
B(Q), the closed-form compositions B(Q)L and LB(Q), spectra, and coercivity constants.

Weighted quantities are handled in the transformed frame g = sqrt(alpha) f, where every
operator entry stays bounded.
Example usage:
>>> p = LeftonParams(b=-3.0)
>>> report = spectrum_H(assemble_H(make_grid(80.0, 1024), p), p, count=8)
>>> report.lowest
-0.70551...
"""
import logging
from dataclasses import asdict, dataclass, field

import numpy as np
from numpy.linalg import LinAlgError
from scipy.linalg import eigh, null_space
from scipy.optimize import brentq

from ..errors import ParameterError, SpectrumError, WindowError
from .grid import Grid, check_field, derivative, helmholtz_inverse, integrate, make_grid, window
from .profiles import (
    WINDOW,
    LeftonParams,
    Q_power,
    Q_profile,
    lefton_derivatives,
    lefton_dq,
    lefton_q,
    lefton_Q,
    log_alpha,
    profile_SQ,
)
from .private._logcosh import LOG_CEILING, sech
from .private._spectral import derivative_matrix, derivative_symbol
from .private._stencils import fd4_matrix

# setup per-module logger
log = logging.getLogger(__name__).addHandler(logging.NullHandler())

SCHEMES: tuple = ("spectral", "fd4")
KINDS: tuple = ("H", "L", "B", "BL", "LB")
# default relative tolerance of the identity suite
IDENTITY_TOL: float = 1e-7
COMPOSITION_TOL: float = 1e-6
# relative mean above which (d/dx - d^3/dx^3)^(-1) is ambiguous
ZERO_MODE_TOL: float = 1e-10
# center/edge amplitude ratio of a discrete eigenvector
DISCRETE_RATIO: float = 1e3


@dataclass(frozen=True)
class OperatorMatrix:
    """
    Dense operator on a grid, immutable after assembly.
    """

    values: np.ndarray
    kind: str
    symmetric: bool
    grid: Grid
    scheme: str

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ParameterError(f"unknown operator kind '{self.kind}'")
        self.values.flags.writeable = False
        return None

    @property
    def asymmetry(self) -> float:
        """max|M - M^T| / max|M|."""
        scale = float(np.max(np.abs(self.values)))
        if scale == 0.0:
            return 0.0
        return float(np.max(np.abs(self.values - self.values.T))) / scale

    def apply(self, f) -> np.ndarray:
        return self.values @ check_field(self.grid, f)


@dataclass(frozen=True)
class EigenReport:
    """
    Lowest eigenpairs of H against the closed-form spectral facts.
    """

    scheme: str
    eigenvalues: list
    discrete: list
    residuals: list
    lowest: float
    lowest_expected: float
    kernel: float
    continuum_edge: float
    continuum_expected: float
    overlap_ground: float
    overlap_kernel: float
    grid: dict

    @property
    def lowest_error(self) -> float:
        return abs(self.lowest - self.lowest_expected) / abs(self.lowest_expected)

    def to_dict(self) -> dict:
        r = asdict(self)
        r["lowest_error"] = self.lowest_error
        return r


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float
    passed: bool
    value: float | None = None


@dataclass
class VerificationReport:
    """
    Pass/fail table of the operator identities.
    """

    params: dict
    grid: dict
    window: float
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, residual: float, tolerance: float, value: float | None = None) -> None:
        passed = bool(np.isfinite(residual) and residual <= tolerance)
        self.checks.append(Check(name, float(residual), tolerance, passed, value))
        if passed:
            logging.debug(f"ok: identity '{name}' residual '{residual}'")
        else:
            logging.warning(f"identity '{name}' failed: residual '{residual}' > '{tolerance}'")
        return None

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "params": self.params,
            "grid": self.grid,
            "window": self.window,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
        }


@dataclass(frozen=True)
class BResult:
    """
    B(Q)v with the zero-mode diagnosis of the middle inversion.
    """

    values: np.ndarray
    zero_mode: bool
    mean: float


@dataclass(frozen=True)
class DualVariable:
    eta: np.ndarray
    beta: float


@dataclass(frozen=True)
class GeneralizedEigen:
    """
    Eigenpairs of L f = lambda alpha f and their H-frame counterparts.
    """

    eigenvalues: np.ndarray
    h_eigenvalues: np.ndarray
    vectors: np.ndarray
    overlaps: np.ndarray


@dataclass(frozen=True)
class RelaxedCoercivity:
    theta: float
    value: float
    lambda1: float
    threshold: float
    mu: float

    @property
    def passed(self) -> bool:
        return self.value >= self.threshold


def _check_scheme(scheme: str) -> None:
    if scheme not in SCHEMES:
        raise ParameterError(f"unknown scheme '{scheme}', expected one of {SCHEMES}")
    return None


def _relative(residual: np.ndarray, reference: np.ndarray) -> float:
    scale = float(np.max(np.abs(reference)))
    return float(np.max(np.abs(residual))) / max(scale, np.finfo(float).tiny)


def _overlap(f: np.ndarray, g: np.ndarray) -> float:
    return float(abs(f @ g) / (np.linalg.norm(f) * np.linalg.norm(g)))


def potential(x, p: LeftonParams) -> np.ndarray:
    """
    Potential 1/4 - (b(1+2b)/4) sech^2(nu(x - x*)) of H, without the prefactor 2k/b^2.
    """
    b = p.b
    y = np.asarray(x, dtype=np.float64) - p.x_star
    return 0.25 - b * (1.0 + 2.0 * b) / 4.0 * sech(p.nu * y) ** 2


def _prefactor(p: LeftonParams) -> float:
    return 2.0 * p.k / p.b**2


def window_grid(grid: Grid, p: LeftonParams, half_width: float = WINDOW) -> Grid:
    """
    Sub-grid of the samples with |x - x*| <= half_width.

    Args:
        grid (Grid): Parent grid.
        p (LeftonParams): Parameters.
        half_width (float, optional): Window half-width W. Defaults to WINDOW.

    Returns:
        Grid: The window grid.
    """
    sub, _ = window(grid, p.x_star, half_width)
    return sub


def _sqrt_alpha(x, p: LeftonParams) -> np.ndarray:
    la = log_alpha(x, p)
    if float(np.max(la)) > LOG_CEILING:
        raise WindowError(f"alpha overflows on the grid for b='{p.b}', use a narrower window")
    return np.exp(0.5 * la)


def assemble_H(grid: Grid, p: LeftonParams, scheme: str = "spectral") -> OperatorMatrix:
    """
    Assemble H = (2k/b^2)(-d^2/dx^2 + 1/4 - (b(1+2b)/4) sech^2(nu(x - x*))).

    scheme="spectral" uses the Fourier-collocation second derivative (periodic);
    scheme="fd4" uses 4th-order central differences with clamped ends.

    Args:
        grid (Grid): Grid.
        p (LeftonParams): Parameters (b < -1).
        scheme (str, optional): "spectral" or "fd4". Defaults to "spectral".

    Returns:
        OperatorMatrix: The symmetric matrix.
    """
    p.require_lefton()
    _check_scheme(scheme)
    if scheme == "spectral":
        d2 = derivative_matrix(grid.count, grid.spacing, 2)
    else:
        d2 = fd4_matrix(grid.count, grid.spacing, 2)
    values = _prefactor(p) * (-d2 + np.diag(potential(grid.points, p)))
    values = 0.5 * (values + values.T)
    logging.debug(f"ok: assembled H ({scheme}) of size {grid.count}")
    return OperatorMatrix(values=values, kind="H", symmetric=True, grid=grid, scheme=scheme)


def assemble_L(grid: Grid, p: LeftonParams, scheme: str = "spectral") -> OperatorMatrix:
    """
    Assemble L = k(-d/dx(T0 d/dx) + H0) as sqrt(alpha) H sqrt(alpha).

    Meant for a window grid: alpha must stay representable on every sample.
    If alpha overflows, raise.

    Args:
        grid (Grid): Window grid.
        p (LeftonParams): Parameters (b < -1).
        scheme (str, optional): "spectral" or "fd4". Defaults to "spectral".

    Returns:
        OperatorMatrix: The symmetric matrix.
    """
    h = assemble_H(grid, p, scheme)
    s = _sqrt_alpha(grid.points, p)
    values = s[:, None] * h.values * s[None, :]
    values = 0.5 * (values + values.T)
    return OperatorMatrix(values=values, kind="L", symmetric=True, grid=grid, scheme=scheme)


def apply_H(grid: Grid, f, p: LeftonParams) -> np.ndarray:
    """
    Matrix-free spectral action of H.
    """
    p.require_lefton()
    f = check_field(grid, f)
    return _prefactor(p) * (-derivative(grid, f, 2) + potential(grid.points, p) * f)


def apply_L(grid: Grid, v, p: LeftonParams, frame: str = "hframe") -> np.ndarray:
    """
    Matrix-free action of L.

    frame="hframe" evaluates sqrt(alpha) H (sqrt(alpha) v); frame="divergence" evaluates
    k(-d/dx((2 alpha/b^2) v_x) - (2(b+1)/b) alpha v) pointwise, with alpha'/alpha =
    -(1+2b) tanh(nu y) in closed form. Both need v to decay faster than alpha grows, and
    the values are meaningful only where alpha stays below the ceiling: on a grid wider than
    alpha_half_width the roundoff of v times alpha dominates at the edges.

    Args:
        grid (Grid): Grid.
        v (array-like): Samples.
        p (LeftonParams): Parameters (b < -1).
        frame (str, optional): "hframe" or "divergence". Defaults to "hframe".

    Returns:
        np.ndarray: Lv samples.
    """
    p.require_lefton()
    v = check_field(grid, v, "v")
    s = _sqrt_alpha(grid.points, p)
    if frame == "hframe":
        return s * apply_H(grid, s * v, p)
    if frame != "divergence":
        raise ParameterError(f"unknown frame '{frame}'")
    b, k = p.b, p.k
    alpha = s**2
    # pointwise product rule; a spectral derivative of the flux would spread edge roundoff
    dlog = -(1.0 + 2.0 * b) * np.tanh(p.nu * (grid.points - p.x_star))
    dv = derivative(grid, v, 1)
    d2v = derivative(grid, v, 2)
    return k * (-2.0 / b**2 * alpha * (dlog * dv + d2v) - 2.0 * (b + 1.0) / b * alpha * v)


def _first_factor(grid: Grid, v: np.ndarray, p: LeftonParams) -> np.ndarray:
    # (bQ d/dx + (b-1)Q') v
    dQ, _ = lefton_derivatives(grid, p)
    return p.b * lefton_Q(grid, p) * derivative(grid, v, 1) + (p.b - 1.0) * dQ * v


def _invert_middle(grid: Grid, g: np.ndarray, x_star: float) -> tuple[np.ndarray, bool, float]:
    # (d/dx - d^3/dx^3)^(-1) on the zero-mean part of g, pinned to vanish opposite x*
    g_hat = np.fft.rfft(g)
    mean = float(g_hat[0].real) / grid.count
    zero_mode = abs(mean) > ZERO_MODE_TOL * max(float(np.max(np.abs(g))), np.finfo(float).tiny)
    if zero_mode:
        logging.warning(f"zero-mode ambiguity in B(Q): mean '{mean}' dropped")
    symbol = derivative_symbol(grid.wavenumbers, 1) * (1.0 + grid.wavenumbers**2)
    z_hat = np.zeros_like(g_hat)
    nonzero = symbol != 0
    z_hat[nonzero] = g_hat[nonzero] / symbol[nonzero]
    z = np.fft.irfft(z_hat, n=grid.count)
    # the line solution decays away from the lefton; fix the free constant there
    y = np.mod(grid.points - x_star + 0.5 * grid.length, grid.length) - 0.5 * grid.length
    z -= z[np.argmax(np.abs(y))]
    return z, zero_mode, mean


def _B_from_factor(grid: Grid, g: np.ndarray, p: LeftonParams) -> BResult:
    z, zero_mode, mean = _invert_middle(grid, g, p.x_star)
    dQ, _ = lefton_derivatives(grid, p)
    values = -(p.b * lefton_Q(grid, p) * derivative(grid, z, 1) + dQ * z)
    return BResult(values=values, zero_mode=zero_mode, mean=mean)


def apply_B_of_Q(grid: Grid, v, p: LeftonParams) -> BResult:
    """
    B(Q)v = -(bQ d/dx + Q')(d/dx - d^3/dx^3)^(-1)(bQ d/dx + (b-1)Q')v.

    The middle inversion acts on the zero-mean part; a mean above ZERO_MODE_TOL * max|.|
    sets the zero_mode flag.
    The inverse is fixed up to a constant, chosen so that it vanishes at the grid point
    farthest from x*.

    Args:
        grid (Grid): Grid.
        v (array-like): Samples.
        p (LeftonParams): Parameters (b < -1).

    Returns:
        BResult: Values and zero-mode diagnosis.
    """
    p.require_lefton()
    v = check_field(grid, v, "v")
    return _B_from_factor(grid, _first_factor(grid, v, p), p)


def apply_BL_closed(grid: Grid, v, p: LeftonParams) -> np.ndarray:
    """
    Closed form of B(Q)Lv:
    2k Q^(-1/b-1) Q' v - 2k Q^(-1/b) v_x + b(b-1) Q h_x + (b-1) Q' h, h = (1 - d^2/dx^2)^(-1) v.

    Args:
        grid (Grid): Grid.
        v (array-like): Samples.
        p (LeftonParams): Parameters (b < -1).

    Returns:
        np.ndarray: B(Q)Lv samples.
    """
    p.require_lefton()
    v = check_field(grid, v, "v")
    b, k = p.b, p.k
    y = grid.points - p.x_star
    Q = lefton_Q(grid, p)
    dQ, _ = lefton_derivatives(grid, p)
    Qp = Q_power(grid.points, p, -1.0 / b)
    h = helmholtz_inverse(grid, v)
    # Q^(-1/b-1) Q' = b Q^(-1/b) tanh
    return (
        2.0 * k * b * Qp * np.tanh(p.nu * y) * v
        - 2.0 * k * Qp * derivative(grid, v, 1)
        + b * (b - 1.0) * Q * derivative(grid, h, 1)
        + (b - 1.0) * dQ * h
    )


def apply_LB_closed(grid: Grid, v, p: LeftonParams) -> np.ndarray:
    """
    Closed form of LB(Q)v:
    -2k Q^(-1/b) v_x + (2k(1-b)/b) Q^(-1/b-1) Q' v + (b-1)(1 - d^2/dx^2)^(-1)(bQ v_x + (b-1)Q' v).

    Args:
        grid (Grid): Grid.
        v (array-like): Samples.
        p (LeftonParams): Parameters (b < -1).

    Returns:
        np.ndarray: LB(Q)v samples.
    """
    p.require_lefton()
    v = check_field(grid, v, "v")
    b, k = p.b, p.k
    y = grid.points - p.x_star
    Qp = Q_power(grid.points, p, -1.0 / b)
    return (
        -2.0 * k * Qp * derivative(grid, v, 1)
        + 2.0 * k * (1.0 - b) * Qp * np.tanh(p.nu * y) * v
        + (b - 1.0) * helmholtz_inverse(grid, _first_factor(grid, v, p))
    )


def compose_BL(grid: Grid, v, p: LeftonParams) -> BResult:
    """
    B(Q) applied to Lv, composed factor by factor.

    With Lv = sqrt(alpha) f, f = H(sqrt(alpha) v), the first factor of B(Q) becomes
    b Q^(-1/(2b)) (f_x - (3/2) tanh(nu y) f), which avoids forming Lv itself.

    Args:
        grid (Grid): Grid.
        v (array-like): Samples decaying faster than sqrt(alpha) grows.
        p (LeftonParams): Parameters (b < -1).

    Returns:
        BResult: B(Q)Lv.
    """
    p.require_lefton()
    v = check_field(grid, v, "v")
    b = p.b
    x = grid.points
    f = apply_H(grid, _sqrt_alpha(x, p) * v, p)
    g = b * Q_power(x, p, -0.5 / b) * (derivative(grid, f, 1) - 1.5 * np.tanh(p.nu * (x - p.x_star)) * f)
    return _B_from_factor(grid, g, p)


def compose_LB_hframe(grid: Grid, v, p: LeftonParams) -> tuple[np.ndarray, bool]:
    """
    L applied to B(Q)v in the transformed frame: H(sqrt(alpha) B(Q)v).

    B(Q)v = -bQ(z_x + tanh(nu y) z), so sqrt(alpha) B(Q)v = -b Q^(-1/(2b)) (z_x + tanh(nu y) z)
    is formed without sampling alpha.

    Args:
        grid (Grid): Grid.
        v (array-like): Samples.
        p (LeftonParams): Parameters (b < -1).

    Returns:
        tuple[np.ndarray, bool]: (LB(Q)v / sqrt(alpha), zero-mode flag).
    """
    p.require_lefton()
    v = check_field(grid, v, "v")
    x = grid.points
    z, zero_mode, _ = _invert_middle(grid, _first_factor(grid, v, p), p.x_star)
    lifted = -p.b * Q_power(x, p, -0.5 / p.b) * (derivative(grid, z, 1) + np.tanh(p.nu * (x - p.x_star)) * z)
    return apply_H(grid, lifted, p), zero_mode


def _discrete_mask(grid: Grid, vectors: np.ndarray, p: LeftonParams) -> np.ndarray:
    y = np.abs(grid.points - p.x_star)
    core = y <= 2.0
    edge = y >= np.max(y) - 0.05 * grid.length
    center = np.max(np.abs(vectors[core]), axis=0)
    tail = np.max(np.abs(vectors[edge]), axis=0)
    return center >= DISCRETE_RATIO * np.maximum(tail, np.finfo(float).tiny)


def spectrum_H(op: OperatorMatrix, p: LeftonParams, count: int = 8) -> EigenReport:
    """
    Lowest eigenpairs of H compared with the closed-form spectral facts.

    The lowest eigenvalue is compared with -k(1/2 - 1/(2b^2)), the second with 0 and the
    first non-discrete eigenvalue (continuum onset on the finite domain) with k/(2b^2).
    Ground state and kernel vectors are compared with Q^(1/2) and sqrt(alpha) Q'.
    If the eigensolver fails, raise.

    Args:
        op (OperatorMatrix): Assembled H.
        p (LeftonParams): Parameters (b < -1).
        count (int, optional): Number of eigenpairs. Defaults to 8.

    Returns:
        EigenReport: The report.
    """
    p.require_lefton()
    if op.kind != "H" or not op.symmetric:
        raise ParameterError(f"spectrum_H needs a symmetric H, got kind '{op.kind}'")
    grid = op.grid
    count = int(min(max(count, 3), grid.count))
    try:
        values, vectors = eigh(op.values, subset_by_index=[0, count - 1])
    except (LinAlgError, ValueError) as e:
        logging.error(f"eigensolver failed: {e}")
        raise SpectrumError(f"eigensolver failed: {e}")
    residuals = [
        float(np.linalg.norm(op.values @ vectors[:, i] - values[i] * vectors[:, i])) for i in range(count)
    ]
    discrete = _discrete_mask(grid, vectors, p)
    continuous = np.nonzero(~discrete)[0]
    if continuous.size == 0:
        logging.warning(f"no continuum state among the lowest {count} eigenpairs")
        edge = float("nan")
    else:
        edge = float(values[continuous[0]])
    x = grid.points
    y = x - p.x_star
    ground = Q_power(x, p, 0.5)
    kernel = Q_power(x, p, -0.5 / p.b) * np.tanh(p.nu * y)
    report = EigenReport(
        scheme=op.scheme,
        eigenvalues=[float(v) for v in values],
        discrete=[bool(d) for d in discrete],
        residuals=residuals,
        lowest=float(values[0]),
        lowest_expected=-p.k * (0.5 - 0.5 / p.b**2),
        kernel=float(values[1]),
        continuum_edge=edge,
        continuum_expected=p.k / (2.0 * p.b**2),
        overlap_ground=_overlap(vectors[:, 0], ground),
        overlap_kernel=_overlap(vectors[:, 1], kernel),
        grid=grid.describe(),
    )
    logging.info(
        f"spectrum of H: lowest '{report.lowest}' (expected '{report.lowest_expected}'), "
        f"kernel '{report.kernel}', continuum onset '{edge}'"
    )
    return report


def generalized_eigen_L(
    grid: Grid, p: LeftonParams, half_width: float = WINDOW, scheme: str = "fd4", count: int = 4
) -> GeneralizedEigen:
    """
    Solve L f = lambda alpha f on the window and compare with the eigenvectors of H.

    Since L = sqrt(alpha) H sqrt(alpha), f = g / sqrt(alpha) for every eigenvector g of H,
    with the same eigenvalue.

    Args:
        grid (Grid): Parent grid.
        p (LeftonParams): Parameters (b < -1).
        half_width (float, optional): Window half-width. Defaults to WINDOW.
        scheme (str, optional): "spectral" or "fd4". Defaults to "fd4".
        count (int, optional): Number of eigenpairs. Defaults to 4.

    Returns:
        GeneralizedEigen: Eigenvalues of both problems and vector overlaps.
    """
    sub = window_grid(grid, p, half_width)
    h = assemble_H(sub, p, scheme)
    l_op = assemble_L(sub, p, scheme)
    s = _sqrt_alpha(sub.points, p)
    try:
        lam, f = eigh(l_op.values, np.diag(s**2), subset_by_index=[0, count - 1])
        mu, g = eigh(h.values, subset_by_index=[0, count - 1])
    except (LinAlgError, ValueError) as e:
        logging.error(f"generalized eigensolver failed: {e}")
        raise SpectrumError(f"generalized eigensolver failed: {e}")
    overlaps = np.array([_overlap(f[:, i], g[:, i] / s) for i in range(count)])
    return GeneralizedEigen(eigenvalues=lam, h_eigenvalues=mu, vectors=f, overlaps=overlaps)


def _constrained_pencil(
    grid: Grid, p: LeftonParams, half_width: float, scheme: str, constraints: str
) -> tuple[np.ndarray, np.ndarray, np.ndarray, Grid]:
    # (L eta, eta) and |eta|^2_{H1_alpha} in the frame g = sqrt(alpha) eta, projected on the
    # plain-product complement of the chosen constraints
    if constraints not in ("both", "kernel", "none"):
        raise ParameterError(f"unknown constraint set '{constraints}'")
    sub = window_grid(grid, p, half_width)
    _sqrt_alpha(sub.points, p)
    a = assemble_H(sub, p, scheme).values
    if scheme == "spectral":
        d1 = derivative_matrix(sub.count, sub.spacing, 1)
    else:
        d1 = fd4_matrix(sub.count, sub.spacing, 1)
    x = sub.points
    sigma = -0.5 * (1.0 + 2.0 * p.b) * np.tanh(p.nu * (x - p.x_star))
    g = d1 - np.diag(sigma)
    gram = np.eye(sub.count) + g.T @ g
    inv_sqrt_alpha = Q_power(x, p, 0.5 / p.b + 1.0)
    dQ, _ = lefton_derivatives(sub, p)
    sq = profile_SQ(sub, p) * inv_sqrt_alpha
    rows = []
    if constraints in ("both",):
        rows.append(sq)
    if constraints in ("both", "kernel"):
        rows.append(dQ * inv_sqrt_alpha)
    if rows:
        z = null_space(np.array(rows))
    else:
        z = np.eye(sub.count)
    return z.T @ a @ z, z.T @ gram @ z, z.T @ sq, sub


def coercivity_estimate(
    grid: Grid,
    p: LeftonParams,
    half_width: float = WINDOW,
    scheme: str = "spectral",
    constraints: str = "both",
) -> float:
    """
    Minimum of (L eta, eta) / |eta|^2_{H1_alpha} under (eta, SQ) = (eta, Q') = 0.

    Both quadratic forms are projected on the constraint complement and the lowest
    eigenvalue of the generalized symmetric problem is returned. constraints="kernel"
    drops the SQ condition, "none" drops both.
    If the Gram matrix is indefinite, raise.

    Args:
        grid (Grid): Parent grid.
        p (LeftonParams): Parameters (b < -1).
        half_width (float, optional): Window half-width W. Defaults to WINDOW.
        scheme (str, optional): "spectral" or "fd4". Defaults to "spectral".
        constraints (str, optional): "both", "kernel" or "none". Defaults to "both".

    Returns:
        float: The constrained minimum.
    """
    p.require_lefton()
    _check_scheme(scheme)
    a, gram, _, sub = _constrained_pencil(grid, p, half_width, scheme, constraints)
    try:
        value = eigh(a, gram, eigvals_only=True, subset_by_index=[0, 0])
    except (LinAlgError, ValueError) as e:
        logging.error(f"indefinite Gram matrix on window W='{half_width}': {e}")
        raise SpectrumError(f"indefinite Gram matrix on window W='{half_width}': {e}")
    lam = float(value[0])
    logging.info(f"coercivity ({constraints}, {scheme}, N_w={sub.count}): '{lam}'")
    return lam


def _secular_root(lam: np.ndarray, s2: np.ndarray, mu: float | None) -> float:
    # smallest root of 1/mu + sum s2/(lam - x) = 0 (mu=None: the constrained limit)
    weighted = s2 > 1e-30 * float(np.sum(s2))
    lw, sw = lam[weighted], s2[weighted]
    inv_mu = 0.0 if mu is None else 1.0 / mu
    if lw.size == 1:
        if mu is None:
            raise SpectrumError("constraint vector has a single spectral component")
        root = float(lw[0] + mu * sw[0])
    else:
        lo, hi = float(lw[0]), float(lw[1])
        span = hi - lo
        delta = 1e-14 * max(1.0, abs(lo), abs(hi))

        def secular(x: float) -> float:
            return inv_mu + float(np.sum(sw / (lw - x)))

        a, b = lo + delta, hi - delta
        if secular(a) >= 0:
            root = lo
        elif secular(b) <= 0:
            root = hi
        else:
            root = brentq(secular, a, b, xtol=1e-15 * max(1.0, span), maxiter=200)
    if np.any(~weighted):
        root = min(root, float(np.min(lam[~weighted])))
    return root


def relaxed_coercivity(
    grid: Grid,
    p: LeftonParams,
    theta: float,
    half_width: float = WINDOW,
    scheme: str = "spectral",
) -> RelaxedCoercivity:
    """
    Minimum of (L eta, eta) / |eta|^2 under (eta, Q') = 0 and |(eta, SQ/|SQ|)| <= theta |eta|.

    In the eigenbasis of the kernel-constrained pencil the problem is a trust-region
    quadratic with one rank-one constraint. Its value is max over mu >= 0 of x(mu) - mu theta^2,
    where x(mu) is the smallest root of the secular equation 1/mu + sum s_i^2/(lambda_i - x) = 0.
    The result is compared with 3/4 of the fully constrained minimum.

    Args:
        grid (Grid): Parent grid.
        p (LeftonParams): Parameters (b < -1).
        theta (float): Relaxation, in [0, 1].
        half_width (float, optional): Window half-width W. Defaults to WINDOW.
        scheme (str, optional): "spectral" or "fd4". Defaults to "spectral".

    Returns:
        RelaxedCoercivity: Value, reference constant and threshold.
    """
    p.require_lefton()
    _check_scheme(scheme)
    if not 0.0 <= theta <= 1.0:
        raise ParameterError(f"theta must lie in [0, 1], got '{theta}'")
    a, gram, s_z, _ = _constrained_pencil(grid, p, half_width, scheme, "kernel")
    try:
        lam, phi = eigh(a, gram)
    except (LinAlgError, ValueError) as e:
        logging.error(f"indefinite Gram matrix: {e}")
        raise SpectrumError(f"indefinite Gram matrix: {e}")
    s = phi.T @ s_z
    s2 = (s / np.linalg.norm(s)) ** 2
    lambda1 = _secular_root(lam, s2, None)
    threshold = 0.75 * lambda1

    def slope(mu: float) -> float:
        x = _secular_root(lam, s2, mu)
        gaps = np.maximum((lam - x) ** 2, np.finfo(float).tiny)
        return 1.0 / (mu**2 * float(np.sum(s2 / gaps)))

    if theta**2 >= s2[0]:
        value, mu = float(lam[0]), 0.0
    elif theta == 0.0:
        value, mu = lambda1, float("inf")
    else:
        scale = max(1.0, float(np.max(np.abs(lam[:2]))))
        lo, hi = 1e-12 * scale, 1e3 * scale
        while slope(hi) > theta**2 and hi < 1e300:
            hi *= 1e3
        while slope(lo) < theta**2 and lo > 1e-300:
            lo *= 1e-3
        t = brentq(lambda t: slope(np.exp(t)) - theta**2, np.log(lo), np.log(hi), xtol=1e-14)
        mu = float(np.exp(t))
        value = _secular_root(lam, s2, mu) - mu * theta**2
    logging.info(f"relaxed coercivity theta='{theta}': '{value}' against '{threshold}'")
    return RelaxedCoercivity(theta=float(theta), value=float(value), lambda1=lambda1, threshold=threshold, mu=mu)


def dual_variable(grid: Grid, v, p: LeftonParams) -> DualVariable:
    """
    eta = Lv - ((b+1)/b) beta, with beta chosen so that (eta, SQ) = 0.

    Args:
        grid (Grid): Grid.
        v (array-like): Samples decaying faster than alpha grows.
        p (LeftonParams): Parameters (b < -1).

    Returns:
        DualVariable: eta and beta.
    """
    lv = apply_L(grid, v, p, frame="divergence")
    sq = profile_SQ(grid, p)
    shift = integrate(grid, sq * lv) / integrate(grid, sq)
    beta = shift * p.b / (p.b + 1.0)
    return DualVariable(eta=lv - shift, beta=float(beta))


def sc_inverse(grid: Grid, p: LeftonParams, count: int = 1024) -> float:
    """
    (L^(-1) SQ, SQ) = (H^(-1) r, r) with r = SQ / sqrt(alpha), inverted off the kernel.

    Args:
        grid (Grid): Grid; resampled to at most `count` points.
        p (LeftonParams): Parameters (b < -1).
        count (int, optional): Largest matrix size. Defaults to 1024.

    Returns:
        float: The quadratic form.
    """
    coarse = grid if grid.count <= count else make_grid(grid.length, count, grid.center)
    h = assemble_H(coarse, p)
    r = profile_SQ(coarse, p) * Q_power(coarse.points, p, 0.5 / p.b + 1.0)
    try:
        lam, phi = eigh(h.values)
    except (LinAlgError, ValueError) as e:
        raise SpectrumError(f"eigensolver failed: {e}")
    keep = np.abs(lam) > 1e-6 * float(np.max(np.abs(lam)))
    c = phi.T @ r
    return float(coarse.spacing * np.sum(c[keep] ** 2 / lam[keep]))


def _random_bumps(grid: Grid, p: LeftonParams, rng: np.random.Generator, count: int) -> list:
    y = grid.points - p.x_star
    r = []
    for _ in range(count):
        a = rng.uniform(0.5, 1.5)
        c = rng.uniform(-1.5, 1.5)
        w = rng.uniform(0.5, 1.0)
        r.append(a * np.exp(-((y - c) ** 2) / w**2))
    return r


def orthogonalize_kernel(grid: Grid, v, p: LeftonParams) -> np.ndarray:
    """
    Remove the Q' component of v with the odd bump y exp(-y^2), so that (v, Q') = 0.
    """
    v = check_field(grid, v, "v")
    y = grid.points - p.x_star
    bump = y * np.exp(-(y**2))
    dQ, _ = lefton_derivatives(grid, p)
    return v - integrate(grid, dQ * v) / integrate(grid, dQ * bump) * bump


def verify_operator_identities(
    grid: Grid,
    p: LeftonParams,
    half_width: float = WINDOW,
    tolerance: float = IDENTITY_TOL,
    seed: int = 0,
    fields: int = 10,
) -> VerificationReport:
    """
    Run the operator identity suite.

    Identities involving alpha are checked in the transformed frame (both sides divided by
    sqrt(alpha)) as relative sup norms on |x - x*| <= half_width.
    The dilation eigenfunction (2b/(b+1)) sqrt(alpha) Q + x sqrt(alpha) Q' maps to
    (2k/b) sqrt(alpha) Q, which is (2/b) sqrt(alpha) Q when k = 1.

    Args:
        grid (Grid): Grid.
        p (LeftonParams): Parameters (b < -1).
        half_width (float, optional): Window half-width W. Defaults to WINDOW.
        tolerance (float, optional): Relative tolerance of the identities. Defaults to IDENTITY_TOL.
        seed (int, optional): Seed of the random composition fields. Defaults to 0.
        fields (int, optional): Number of random composition fields. Defaults to 10.

    Returns:
        VerificationReport: The table; failures are entries, never exceptions.
    """
    p.require_lefton()
    b, k = p.b, p.k
    x = grid.points
    y = x - p.x_star
    inside = np.abs(y) <= half_width
    report = VerificationReport(params=p.describe(), grid=grid.describe(), window=half_width)
    t = np.tanh(p.nu * y)
    # sqrt(alpha) Q^e = Q^(e - 1/(2b) - 1)
    root_q = Q_power(x, p, -0.5 / b)

    def hframe(name: str, f: np.ndarray, rhs: np.ndarray) -> None:
        lhs = apply_H(grid, f, p)
        report.add(name, _relative((lhs - rhs)[inside], rhs[inside]), tolerance)
        return None

    hframe("H(sqrt(alpha) Q)", root_q, -(1.0 + b) / b * Q_power(x, p, 0.5 / b + 1.0))
    hframe(
        "H(sqrt(alpha) Q^2)",
        Q_power(x, p, 1.0 - 0.5 / b),
        2.0 * k * (1.0 - b) / b * Q_power(x, p, 1.0 - 0.5 / b) + 2.0 * (b - 1.0) / b * Q_power(x, p, 0.5 / b + 2.0),
    )
    ef3 = 2.0 * b / (b + 1.0) * root_q + y * b * root_q * t
    hframe("H((2b/(b+1)) sqrt(alpha) Q + x sqrt(alpha) Q')", ef3, 2.0 * k / b * root_q)
    ground = Q_power(x, p, 0.5)
    hframe("H(Q^(1/2)) ground state", ground, -k * (0.5 - 0.5 / b**2) * ground)

    kernel = b * root_q * t
    hk = apply_H(grid, kernel, p)
    reference = _prefactor(p) * (np.abs(derivative(grid, kernel, 2)) + np.abs(potential(x, p) * kernel))
    report.add("H(sqrt(alpha) Q') kernel", _relative(hk[inside], reference[inside]), tolerance)

    lq = apply_H(grid, Q_power(x, p, 1.0 - 0.5 / b), p)
    sq_frame = profile_SQ(grid, p) * Q_power(x, p, 0.5 / b + 1.0)
    report.add("L(Q^2) = SQ", _relative((lq - sq_frame)[inside], sq_frame[inside]), tolerance)

    q, dq, Q = lefton_q(grid, p), lefton_dq(grid, p), lefton_Q(grid, p)
    dQ, _ = lefton_derivatives(grid, p)
    report.add("bQq' + qQ' = 0", _relative(b * Q * dq + q * dQ, b * Q * dq), 1e-10)

    lb_const = apply_LB_closed(grid, np.ones(grid.count), p)
    report.add(
        "LB(Q)(1) = 0",
        _relative(lb_const, 2.0 * k * (1.0 - b) * Q_power(x, p, -1.0 / b) * t),
        tolerance,
    )
    bl_q = apply_BL_closed(grid, Q, p)
    report.add("B(Q)L(Q) = 0", _relative(bl_q, 2.0 * k * b * Q_power(x, p, 1.0 - 1.0 / b) * t), tolerance)

    closed = integrate(grid, Q**2 * profile_SQ(grid, p))
    report.add("(Q^2, SQ) < 0", 0.0 if closed < 0 else abs(closed), 0.0, value=closed)
    inverse = sc_inverse(grid, p)
    report.add("(L^-1 SQ, SQ) = (Q^2, SQ)", abs(inverse - closed) / abs(closed), 1e-6, value=inverse)

    rng = np.random.default_rng(seed)
    bl_worst, lb_worst = 0.0, 0.0
    inv_root = Q_power(x, p, 0.5 / b + 1.0)
    for v in _random_bumps(grid, p, rng, fields):
        composed = compose_BL(grid, v, p).values
        direct = apply_BL_closed(grid, v, p)
        bl_worst = max(bl_worst, _relative(composed - direct, direct))
        w = orthogonalize_kernel(grid, v, p)
        lifted, _ = compose_LB_hframe(grid, w, p)
        direct = apply_LB_closed(grid, w, p) * inv_root
        lb_worst = max(lb_worst, _relative(lifted - direct, direct))
    report.add("B(Q)L composition", bl_worst, COMPOSITION_TOL)
    report.add("LB(Q) composition", lb_worst, COMPOSITION_TOL)
    logging.info(f"identity suite: {sum(c.passed for c in report.checks)}/{len(report.checks)} passed")
    return report
