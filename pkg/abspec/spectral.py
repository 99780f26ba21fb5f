"""Pole-centered Fourier structure of eigenfunctions.

Traces of a P1 field on circles around the pole are expanded in the
modes e^{ijt}; the coefficients v_j(r) determine the invariants beta_j
through the R-independent integral formula and the vanishing order
|alpha - k| of the field at the pole.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline
from scipy.stats import linregress

from abspec.gauge import SQRT_2PI, TWO_PI
from abspec.geometry import NodalField
from abspec.quadrature import circle_points
from abspec.utils.common import LOG_FMT, LOG_LEVEL_NUMERICS, Logger
from abspec.utils.errors import (BetaSpreadError, ConfigurationError,
                                 DegenerateFieldError, OutOfDomainError,
                                 UnderResolvedError, WindowError)

logger = Logger().getLogger('ABSPEC_SPECTRAL', LOG_LEVEL_NUMERICS, LOG_FMT)

# Circles must be at least this many local element diameters in radius.
RESOLUTION_FACTOR = 2.0
# Inner end of the trace window, in local element diameters.
WINDOW_FACTOR = 5.0
MAX_BETA_SPREAD = 0.10
CORE_FIT_POINTS = 6


def _as_field(mesh, values):
    if isinstance(values, NodalField):
        return values
    return NodalField(mesh, values)


def _check_Q(Q):
    if Q < 64 or Q & (Q - 1):
        raise ConfigurationError('Q must be a power of two >= 64, got %r' % Q)


@dataclass(frozen=True, eq=False)
class CircleTrace:
    """Samples at t_q = start_angle + 2 pi q / Q on a circle."""
    center: Tuple[float, float]
    radius: float
    samples: np.ndarray
    start_angle: float = 0.0

    @property
    def Q(self):
        return len(self.samples)

    @property
    def angles(self):
        return self.start_angle + TWO_PI * np.arange(self.Q) / self.Q

    def boundary_mass(self):
        """(1/r) int_{dD_r} |u|^2 ds = int_0^{2 pi} |u|^2 dt."""
        return float(TWO_PI * np.mean(np.abs(self.samples) ** 2))


def trace_circle(mesh, values, center, radius, Q=256, start_angle=0.0,
                 check_resolution=True):
    """P1 interpolation of a field at Q equispaced points of a circle.

    Raises:
        ConfigurationError: Q not a power of two >= 64.
        OutOfDomainError: Circle leaves the meshed domain.
        UnderResolvedError: Radius below two local element diameters.
    """
    _check_Q(Q)
    if radius <= 0.0:
        raise UnderResolvedError('trace radius must be positive')
    points, _ = circle_points(center, radius, Q, start_angle)
    u = _as_field(mesh, values)
    owners = mesh.locate(points)
    if np.any(owners < 0):
        raise OutOfDomainError('circle of radius %g around (%g, %g) leaves '
                               'the domain' % (radius, center[0], center[1]))
    if check_resolution:
        local = float(mesh.diameters[owners].max())
        if radius < RESOLUTION_FACTOR * local:
            raise UnderResolvedError(
                'radius %.3g is below %g local element diameters (%.3g)'
                % (radius, RESOLUTION_FACTOR, local))
    samples = u.at(owners, mesh.barycentric(owners, points))
    return CircleTrace((float(center[0]), float(center[1])), float(radius),
                       samples, float(start_angle))


def fourier_modes(trace):
    """Modes j in [-Q/2, Q/2) and v_j = sqrt(2 pi)/Q e^{-ij start} FFT_j."""
    Q = trace.Q
    j = np.fft.fftshift(np.fft.fftfreq(Q, d=1.0 / Q)).astype(int)
    fft = np.fft.fftshift(np.fft.fft(trace.samples))
    v = SQRT_2PI / Q * np.exp(-1j * j * trace.start_angle) * fft
    return j, v


def parseval_defect(trace):
    """Relative gap between sum |v_j|^2 and int_0^{2 pi} |u|^2 dt."""
    _, v = fourier_modes(trace)
    lhs = float(np.sum(np.abs(v) ** 2))
    rhs = trace.boundary_mass()
    if rhs == 0.0:
        return 0.0 if lhs == 0.0 else math.inf
    return abs(lhs - rhs) / rhs


@dataclass(frozen=True, eq=False)
class FourierTrace:
    """Table of v_j(r) on a radius grid.

    Args:
        center (tuple): Circle center (the pole).
        radii (np.ndarray): Increasing radii.
        modes (np.ndarray): All modes j in [-Q/2, Q/2).
        v (np.ndarray): (len(radii), Q) complex coefficients.
        alpha (float): Circulation.
        J (int): Mode window |j| <= J used by the beta diagnostics.
        start_angle (float): Angle of the first sample.
        boundary_mass (np.ndarray): int |u|^2 dt on each circle.
    """
    center: Tuple[float, float]
    radii: np.ndarray
    modes: np.ndarray
    v: np.ndarray
    alpha: float
    J: int
    start_angle: float
    boundary_mass: np.ndarray

    @property
    def Q(self):
        return len(self.modes)

    @property
    def window_modes(self):
        return np.arange(-self.J, self.J + 1)

    def mode(self, j):
        idx = np.flatnonzero(self.modes == j)
        if len(idx) == 0:
            raise ConfigurationError('mode %d outside [-Q/2, Q/2)' % j)
        return self.v[:, idx[0]]

    def H(self):
        """H(u, r) = (1/r) int_{dD_r} |u|^2 at every grid radius."""
        return self.boundary_mass


def resolved_radius(mesh, center, r_max, factor=WINDOW_FACTOR, Q=64):
    """Smallest radius on a geometric grid with r >= factor * local diameter."""
    for r in np.geomspace(1e-7, r_max, 240):
        points, _ = circle_points(center, r, Q)
        local = mesh.local_diameter(points).max()
        if r >= factor * local:
            return float(r)
    raise WindowError('no resolved circle below r = %g' % r_max)


def trace_radii(mesh, center, r_max, R_grid=(), count=160):
    """Radius grid of the trace window [5 h_local, r_max] containing R_grid."""
    r_lo = resolved_radius(mesh, center, r_max)
    if r_lo >= r_max:
        raise WindowError('trace window [%g, %g] is empty' % (r_lo, r_max))
    grid = np.concatenate([np.linspace(r_lo, r_max, count),
                           [r for r in R_grid if r_lo < r <= r_max]])
    return np.unique(grid)


def fourier_trace(mesh, values, center, radii, alpha, Q=256, J=8,
                  start_angle=0.0):
    """Fourier coefficients v_j(r) of the field on every radius."""
    _check_Q(Q)
    if J > Q // 2 - 1:
        raise ConfigurationError('J must stay below Q/2')
    radii = np.asarray(radii, dtype=float)
    if np.any(np.diff(radii) <= 0):
        raise ConfigurationError('radii must be increasing')
    u = _as_field(mesh, values)
    traces = [trace_circle(mesh, u, center, r, Q, start_angle) for r in radii]
    return _table(traces, center, radii, alpha, J, start_angle)


def fourier_trace_from_callable(func, center, radii, alpha, Q=256, J=8,
                                start_angle=0.0):
    """Same table for a field given in closed form (func of (n, 2) points)."""
    _check_Q(Q)
    radii = np.asarray(radii, dtype=float)
    traces = []
    for r in radii:
        points, _ = circle_points(center, r, Q, start_angle)
        traces.append(CircleTrace((float(center[0]), float(center[1])),
                                  float(r), np.asarray(func(points),
                                                       dtype=complex),
                                  float(start_angle)))
    return _table(traces, center, radii, alpha, J, start_angle)


def _table(traces, center, radii, alpha, J, start_angle):
    rows, masses = [], []
    modes = None
    for trace in traces:
        modes, v = fourier_modes(trace)
        rows.append(v)
        masses.append(trace.boundary_mass())
    return FourierTrace(center=(float(center[0]), float(center[1])),
                        radii=radii, modes=modes, v=np.array(rows),
                        alpha=float(alpha), J=int(J),
                        start_angle=float(start_angle),
                        boundary_mass=np.array(masses))


# ---------------------------------------------------------------------------- #
#                                  Beta table                                  #
# ---------------------------------------------------------------------------- #

@dataclass(frozen=True)
class BetaEstimate:
    j: int
    beta: complex
    spread: float
    per_radius: Tuple[complex, ...] = ()
    negligible: bool = False
    resolved: bool = True


@dataclass(frozen=True, eq=False)
class BetaTable:
    alpha: float
    lam: float
    R_grid: Tuple[float, ...]
    estimates: Dict[int, BetaEstimate] = field(default_factory=dict)

    def __getitem__(self, j):
        return self.estimates[j]

    def beta(self, j):
        return self.estimates[j].beta if j in self.estimates else 0j

    @property
    def modes(self):
        return sorted(self.estimates)


def _core_fit(s, v, nu):
    """Least squares v(s)/s^nu = b + c s^2 on the innermost radii."""
    n = min(CORE_FIT_POINTS, len(s))
    A = np.stack([np.ones(n), s[:n] ** 2], axis=1)
    coef, *_ = np.linalg.lstsq(A, v[:n] / s[:n] ** nu, rcond=None)
    return coef[0], coef[1]


def _beta_at(ft, v, nu, lam, R, b, c):
    s = ft.radii
    r_lo = s[0]
    R2nu = R ** (2.0 * nu)
    core = (b * (r_lo ** 2 / 2.0 - r_lo ** (2.0 + 2.0 * nu) / ((2.0 + 2.0 * nu) * R2nu))
            + c * (r_lo ** 4 / 4.0 - r_lo ** (4.0 + 2.0 * nu) / ((4.0 + 2.0 * nu) * R2nu)))
    mask = s <= R * (1.0 + 1e-12)
    xs, ys = s[mask], v[mask]
    if not np.isclose(xs[-1], R, rtol=1e-12, atol=0.0):
        vR = CubicSpline(s, v.real)(R) + 1j * CubicSpline(s, v.imag)(R)
        xs, ys = np.append(xs, R), np.append(ys, vR)
    else:
        vR = ys[-1]
    kernel = xs ** (1.0 - nu) - xs ** (1.0 + nu) / R2nu
    outer = simpson(kernel * ys.real, x=xs) + 1j * simpson(kernel * ys.imag,
                                                          x=xs)
    return vR / R ** nu + lam / (2.0 * nu) * (core + outer)


def beta_coefficient(ft, j, lam, R_grid, max_spread=MAX_BETA_SPREAD,
                     negligible=False):
    """beta_j from the integral formula, averaged over R_grid.

    The unresolved core [0, r_lo] uses the fitted local law
    v_j(s) = s^nu (b + c s^2).

    Raises:
        WindowError: Some R outside the trace window.
        BetaSpreadError: Relative spread above max_spread (not raised for
            modes flagged negligible).

    Returns:
        BetaEstimate: Mean beta, spread and per-radius values.
    """
    nu = abs(ft.alpha - j)
    R_grid = np.asarray(R_grid, dtype=float)
    if np.any(R_grid <= ft.radii[0]) or np.any(R_grid > ft.radii[-1] * (1 + 1e-12)):
        raise WindowError('R grid %s outside the trace window [%g, %g]'
                          % (list(R_grid), ft.radii[0], ft.radii[-1]))
    v = ft.mode(j)
    b, c = _core_fit(ft.radii, v, nu)
    values = np.array([_beta_at(ft, v, nu, lam, R, b, c) for R in R_grid])
    mean = complex(values.mean())
    spread = (float(np.max(np.abs(values - mean)) / abs(mean))
              if mean != 0 else math.inf)
    if spread > max_spread and not negligible:
        raise BetaSpreadError('beta_%d varies by %.1f%% over R: under '
                              'resolution or wrong eigenvalue'
                              % (j, 100.0 * spread))
    return BetaEstimate(int(j), mean, spread, tuple(values), negligible,
                        spread <= max_spread)


def estimate_betas(ft, lam, R_grid, zero_tol=1e-3, max_spread=MAX_BETA_SPREAD):
    """BetaTable for every |j| <= J.

    Modes whose coefficients stay below zero_tol times the largest one
    are flagged negligible; resolved modes failing the spread test are
    kept with resolved=False and logged.
    """
    window = ft.window_modes
    peaks = {j: float(np.max(np.abs(ft.mode(j)))) for j in window}
    top = max(peaks.values())
    if top == 0.0:
        raise DegenerateFieldError('field vanishes on every trace circle')
    estimates = {}
    for j in window:
        small = peaks[j] < zero_tol * top
        try:
            est = beta_coefficient(ft, j, lam, R_grid, max_spread, small)
        except BetaSpreadError as err:
            logger.warning('%s', err)
            est = beta_coefficient(ft, j, lam, R_grid, math.inf, True)
            est = BetaEstimate(est.j, est.beta, est.spread, est.per_radius,
                               False, False)
        if small:
            est = BetaEstimate(est.j, est.beta, est.spread, est.per_radius,
                               True, est.spread <= max_spread)
        estimates[int(j)] = est
    return BetaTable(ft.alpha, float(lam), tuple(float(r) for r in R_grid),
                     estimates)


@dataclass(frozen=True)
class VanishingOrder:
    k: int
    order: float
    beta_k: complex
    slope: float
    slope_consistent: bool


def power_law_fit(ft, j, window=None):
    """Slope of log|v_j| against log r, with r^2 and remainder exponent.

    Returns:
        tuple: (slope, r_squared, remainder_exponent); the remainder
            exponent is the slope of log|v_j/(b r^nu) - 1| with b from the
            core fit, nan when the remainder is at rounding level.
    """
    r = ft.radii
    lo, hi = window if window is not None else (r[0], r[-1])
    mask = (r >= lo) & (r <= hi)
    if np.count_nonzero(mask) < 3:
        raise WindowError('power law window [%g, %g] holds fewer than 3 radii'
                          % (lo, hi))
    v = ft.mode(j)
    fit = linregress(np.log(r[mask]), np.log(np.abs(v[mask])))
    nu = abs(ft.alpha - j)
    b, _ = _core_fit(r, v, nu)
    remainder = np.abs(v[mask] / (b * r[mask] ** nu) - 1.0)
    ok = remainder > 1e-13
    exponent = math.nan
    if np.count_nonzero(ok) >= 3:
        exponent = float(linregress(np.log(r[mask][ok]),
                                    np.log(remainder[ok])).slope)
    return float(fit.slope), float(fit.rvalue ** 2), exponent


def vanishing_order(ft, betas, threshold=0.05, slope_window=None,
                    slope_tol=0.05):
    """Dominant mode k at the pole and the vanishing order |alpha - k|.

    Raises:
        DegenerateFieldError: No mode above threshold * max |beta_j|.
    """
    mags = {j: abs(est.beta) for j, est in betas.estimates.items()
            if not est.negligible}
    if not mags or max(mags.values()) == 0.0:
        raise DegenerateFieldError('no Fourier mode above the noise floor')
    top = max(mags.values())
    strong = [j for j, m in mags.items() if m > threshold * top]
    if not strong:
        raise DegenerateFieldError('no mode above threshold %g' % threshold)
    k = min(strong, key=lambda j: (abs(ft.alpha - j), j))
    order = abs(ft.alpha - k)
    if slope_window is None:
        slope_window = (ft.radii[0], ft.radii[0] + 0.5 * (ft.radii[-1]
                                                         - ft.radii[0]))
    slope, _, _ = power_law_fit(ft, k, slope_window)
    consistent = abs(slope - order) <= slope_tol
    if not consistent:
        logger.warning('log-log slope %.3f of mode %d differs from order %.3f',
                       slope, k, order)
    return VanishingOrder(int(k), float(order), betas.beta(k), float(slope),
                          bool(consistent))


def _interp_modes(ft, r, J_trunc):
    if not ft.radii[0] <= r <= ft.radii[-1]:
        raise WindowError('radius %g outside the trace window' % r)
    keep = np.abs(ft.modes) <= J_trunc
    idx = np.flatnonzero(np.isclose(ft.radii, r, rtol=1e-14, atol=0.0))
    if len(idx):
        return ft.modes[keep], ft.v[idx[0], keep]
    v = ft.v[:, keep]
    re = CubicSpline(ft.radii, v.real, axis=0)(r)
    im = CubicSpline(ft.radii, v.imag, axis=0)(r)
    return ft.modes[keep], re + 1j * im


def reconstruct_expansion(ft, r, t, J_trunc):
    """(1/sqrt(2 pi)) sum_{|j| <= J_trunc} v_j(r) e^{ijt}."""
    modes, v = _interp_modes(ft, r, J_trunc)
    t = np.asarray(t, dtype=float)
    return np.exp(1j * np.multiply.outer(t, modes)) @ v / SQRT_2PI


def truncation_error(ft, J_trunc):
    """L2(dt) norm of the modes |j| > J_trunc on every radius (Parseval)."""
    tail = np.abs(ft.modes) > J_trunc
    return np.sqrt(np.sum(np.abs(ft.v[:, tail]) ** 2, axis=1))


def leading_modes_error(ft, betas, modes=(0, 1), Q=None):
    """Max over t of |u(a + r e^{it}) - sum over modes beta_j r^nu e^{ijt}/sqrt(2 pi)|.

    Computed per radius from the Fourier coefficients, it measures the
    remainder of the two-term expansion at the pole.
    """
    Q = Q or ft.Q
    t = ft.start_angle + TWO_PI * np.arange(Q) / Q
    out = np.empty(len(ft.radii))
    for i, r in enumerate(ft.radii):
        full = np.exp(1j * np.multiply.outer(t, ft.modes)) @ ft.v[i] / SQRT_2PI
        lead = sum(betas.beta(j) * r ** abs(ft.alpha - j)
                   * np.exp(1j * j * t) for j in modes) / SQRT_2PI
        out[i] = float(np.max(np.abs(full - lead)))
    return out
