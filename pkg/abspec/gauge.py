"""Aharonov-Bohm vector potential, branch-cut angle functions, gauge phase
factors and the homogeneous magnetic-harmonic profiles psi_k.

All functions are vectorized: points are arrays whose last axis has
length 2, and results keep the leading shape.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from abspec.utils.config import check_alpha
from abspec.utils.errors import ConfigurationError, CutError, SingularityError

TWO_PI = 2.0 * math.pi
# Angles within a few ulps of 2 pi below the cut are rounding of points on
# the cut ray itself and take the lower end of the branch.
BRANCH_TOL = 4.0 * np.spacing(TWO_PI)
SQRT_2PI = math.sqrt(TWO_PI)


def _as_points(x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 2:
        raise ValueError('points must have a trailing axis of length 2')
    return x


@dataclass(frozen=True)
class CutSegment:
    """The segment between the origin and the pole, where the gauge phase
    jumps."""
    end: tuple

    @property
    def degenerate(self):
        return self.end[0] == 0.0 and self.end[1] == 0.0

    def contains(self, x, tol=1e-14):
        """Boolean mask of points lying on the open segment (0, a)."""
        x = _as_points(x)
        a = np.asarray(self.end)
        if self.degenerate:
            return np.zeros(x.shape[:-1], dtype=bool)
        a2 = float(a @ a)
        cross = x[..., 0] * a[1] - x[..., 1] * a[0]
        dot = x @ a
        scale = math.sqrt(a2) * np.maximum(np.linalg.norm(x, axis=-1), 1e-300)
        return (np.abs(cross) <= tol * scale) & (dot > 0.0) & (dot < a2)


@dataclass(frozen=True)
class PoleConfig:
    """Circulation and pole position of an Aharonov-Bohm potential.

    Args:
        alpha (float): Circulation in (0,1) minus {1/2}.
        pole (tuple): Pole position a.
        direction_angle (float, optional): Polar angle of a. Derived from
            the pole when |a| > 0; for a = 0 it is the given value (0 by
            default) and only fixes the branch of the angle functions.
    """
    alpha: float
    pole: tuple = (0.0, 0.0)
    direction_angle: float = None
    cut: CutSegment = field(init=False, repr=False)

    def __post_init__(self):
        check_alpha(self.alpha)
        pole = (float(self.pole[0]), float(self.pole[1]))
        object.__setattr__(self, 'pole', pole)
        norm = math.hypot(*pole)
        if norm > 0.0:
            derived = math.atan2(pole[1], pole[0]) % TWO_PI
            if self.direction_angle is None:
                angle = derived
            else:
                angle = float(self.direction_angle) % TWO_PI
                gap = abs((angle - derived + math.pi) % TWO_PI - math.pi)
                if gap > 1e-9:
                    raise ConfigurationError(
                        'direction angle %g inconsistent with pole %r'
                        % (self.direction_angle, pole))
        else:
            angle = 0.0 if self.direction_angle is None else float(
                self.direction_angle) % TWO_PI
        object.__setattr__(self, 'direction_angle', angle)
        object.__setattr__(self, 'cut', CutSegment(pole))

    @classmethod
    def from_polar(cls, alpha, radius, angle):
        """Pole at radius*(cos angle, sin angle) with the exact angle kept."""
        pole = (radius * math.cos(angle), radius * math.sin(angle))
        return cls(alpha, pole, angle % TWO_PI if radius > 0 else angle)

    @property
    def abs_pole(self):
        return math.hypot(*self.pole)

    @property
    def at_origin(self):
        return self.pole == (0.0, 0.0)

    def moved(self, pole):
        """Same circulation with a new pole (direction re-derived)."""
        return PoleConfig(self.alpha, pole)


def mu1(alpha):
    """Lowest eigenvalue of the angular operator: min(alpha^2, (1-alpha)^2)."""
    return min(alpha, 1.0 - alpha) ** 2


def hardy_constant(alpha):
    """Constant (min_j |j - alpha|)^2 of the magnetic Hardy inequality."""
    return mu1(alpha)


def _radial(x, center):
    d = _as_points(x) - np.asarray(center, dtype=float)
    r2 = np.einsum('...i,...i->...', d, d)
    return d, r2


def vector_potential(cfg, x):
    """A_a(x) = alpha*(-(x2-a2), x1-a1)/|x-a|^2.

    Raises:
        SingularityError: If some x coincides with the pole.
    """
    d, r2 = _radial(x, cfg.pole)
    if np.any(r2 == 0.0):
        raise SingularityError('vector potential evaluated at the pole')
    out = np.empty_like(d)
    out[..., 0] = -cfg.alpha * d[..., 1] / r2
    out[..., 1] = cfg.alpha * d[..., 0] / r2
    return out


def _branch(d, start):
    t = np.arctan2(d[..., 1], d[..., 0])
    rem = np.mod(t - start, TWO_PI)
    rem = np.where(rem > TWO_PI - BRANCH_TOL, 0.0, rem)
    return start + rem


def theta_pole(cfg, x):
    """Polar angle centered at the pole, valued in [theta, theta + 2pi)."""
    d, r2 = _radial(x, cfg.pole)
    if np.any(r2 == 0.0):
        raise SingularityError('pole-centered angle undefined at the pole')
    return _branch(d, cfg.direction_angle)


def theta_origin_cut(cfg, x):
    """Polar angle centered at the origin, valued in [theta, theta + 2pi)."""
    d, r2 = _radial(x, (0.0, 0.0))
    if np.any(r2 == 0.0):
        raise SingularityError('origin-centered angle undefined at 0')
    return _branch(d, cfg.direction_angle)


def gauge_phase(cfg, x):
    """e^{i alpha (theta_0^a - theta_a)}, continuous off the cut [0, a].

    For a = 0 the phase is identically one.

    Raises:
        CutError: For points on the open cut segment.
        SingularityError: At the origin or the pole.
    """
    x = _as_points(x)
    if cfg.at_origin:
        return np.ones(x.shape[:-1], dtype=complex)
    if np.any(cfg.cut.contains(x)):
        raise CutError('gauge phase evaluated on the cut segment')
    diff = theta_origin_cut(cfg, x) - theta_pole(cfg, x)
    return np.exp(1j * cfg.alpha * diff)


def psi_profile(alpha, k, x):
    """psi_k(x) = r^{|alpha-k|} e^{ikt}/sqrt(2pi), zero at the origin."""
    x = _as_points(x)
    nu = abs(alpha - k)
    r = np.hypot(x[..., 0], x[..., 1])
    t = np.arctan2(x[..., 1], x[..., 0])
    return np.power(r, nu) * np.exp(1j * k * t) / SQRT_2PI


def magnetic_gradient_psi(alpha, k, x):
    """(i grad + A_0) psi_k in closed form, shape (..., 2) complex.

    Equals psi_k/r * (i nu e_r + (alpha - k) e_t) with nu = |alpha - k|.

    Raises:
        SingularityError: At the origin.
    """
    x = _as_points(x)
    r = np.hypot(x[..., 0], x[..., 1])
    if np.any(r == 0.0):
        raise SingularityError('magnetic gradient of psi_k undefined at 0')
    nu = abs(alpha - k)
    psi = psi_profile(alpha, k, x)
    er = x / r[..., None]
    et = np.stack([-er[..., 1], er[..., 0]], axis=-1)
    coeff = (psi / r)[..., None]
    return coeff * (1j * nu * er + (alpha - k) * et)


def circulation(cfg, radius, n=512):
    """Line integral of A_a on the circle of given radius around the pole.

    Uses the periodic trapezoidal rule, exact up to rounding here.
    """
    t = TWO_PI * np.arange(n) / n
    unit = np.stack([np.cos(t), np.sin(t)], axis=-1)
    pts = np.asarray(cfg.pole) + radius * unit
    tangent = radius * np.stack([-np.sin(t), np.cos(t)], axis=-1)
    values = np.einsum('ij,ij->i', vector_potential(cfg, pts), tangent)
    return float(values.sum() * TWO_PI / n)


def curl(cfg, x, h=1e-4):
    """Centered finite-difference curl d1 A2 - d2 A1 at x."""
    x = _as_points(x)
    ex = np.array([h, 0.0])
    ey = np.array([0.0, h])
    d1A2 = (vector_potential(cfg, x + ex)[..., 1]
            - vector_potential(cfg, x - ex)[..., 1]) / (2 * h)
    d2A1 = (vector_potential(cfg, x + ey)[..., 0]
            - vector_potential(cfg, x - ey)[..., 0]) / (2 * h)
    return d1A2 - d2A1
