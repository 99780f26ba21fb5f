"""Almgren frequency H, E, N = E/H of eigenfunctions on disks centered at
the origin, the pole term M and the numerical checks of the identities
and bounds they satisfy."""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from abspec.assembly import hardy_check, local_integrals, magnetic_gradient
from abspec.geometry import NodalField
from abspec.quadrature import circle_points, region_quadrature
from abspec.spectral import trace_circle
from abspec.utils.common import LOG_FMT, LOG_LEVEL_NUMERICS, Logger
from abspec.utils.errors import (ConfigurationError, PositivityError,
                                 WindowError)

logger = Logger().getLogger('ABSPEC_ALMGREN', LOG_LEVEL_NUMERICS, LOG_FMT)

POSITIVITY_FLOOR = 1e-12
# Radii of the inequality suite run on every computed eigenfunction.
HARDY_RADII = (0.25, 0.5)
POINCARE_RADIUS = 0.5


@dataclass(frozen=True, eq=False)
class AlmgrenCurve:
    """H, E and N on a radius grid, with the auxiliary integrals.

    Args:
        radii (np.ndarray): Increasing radii.
        H (np.ndarray): (1/r) int_{dD_r} |u|^2.
        E (np.ndarray): int_{D_r} |(i grad + A) u|^2 - lam |u|^2.
        N (np.ndarray): E / H.
        center (tuple): Disk center.
        lam (float): Eigenvalue used in E.
        energy (np.ndarray): int_{D_r} |(i grad + A) u|^2.
        mass (np.ndarray): int_{D_r} |u|^2.
        normal_flux (np.ndarray): int_{dD_r} |(i grad + A) u . nu|^2 ds.
    """
    radii: np.ndarray
    H: np.ndarray
    E: np.ndarray
    N: np.ndarray
    center: Tuple[float, float]
    lam: float
    energy: np.ndarray = None
    mass: np.ndarray = None
    normal_flux: np.ndarray = None

    @classmethod
    def from_arrays(cls, radii, H, E, lam=0.0, center=(0.0, 0.0)):
        radii = np.asarray(radii, dtype=float)
        H = np.asarray(H, dtype=float)
        E = np.asarray(E, dtype=float)
        return cls(radii, H, E, E / H, center, float(lam))


@dataclass(frozen=True)
class PoleTerm:
    value: float
    beta0: complex
    beta1: complex
    a: Tuple[float, float]
    alpha: float

    @property
    def bound(self):
        """2 alpha (1 - alpha) |a| |beta_0| |beta_1|."""
        return (2.0 * self.alpha * (1.0 - self.alpha) * math.hypot(*self.a)
                * abs(self.beta0) * abs(self.beta1))


def pole_term(beta0, beta1, a, alpha):
    """M = 2 alpha (1 - alpha) Re(beta_0 conj(beta_1) (a_1 - i a_2))."""
    a = (float(a[0]), float(a[1]))
    value = 2.0 * alpha * (1.0 - alpha) * (
        complex(beta0) * np.conj(complex(beta1)) * complex(a[0], -a[1])).real
    return PoleTerm(float(value), complex(beta0), complex(beta1), a,
                    float(alpha))


def disk_integrals(mesh, cfg, u_full, center, radius, order=4):
    """Energy, mass and Hardy weighted mass of u on mesh ∩ D_radius(center)."""
    qset = region_quadrature(mesh, order, disk=(center, radius))
    return local_integrals(mesh, cfg, u_full, qset)


def normal_flux(mesh, cfg, u_full, center, radius, Q=256):
    """int_{dD_r} |(i grad + A) u . nu|^2 ds by the trapezoidal rule."""
    points, t = circle_points(center, radius, Q)
    owners = mesh.locate(points)
    if np.any(owners < 0):
        raise WindowError('circle of radius %g leaves the domain' % radius)
    bary = mesh.barycentric(owners, points)
    g = magnetic_gradient(mesh, cfg, u_full, owners, bary, points)
    nu = np.stack([np.cos(t), np.sin(t)], axis=1)
    flux = np.abs(np.sum(g * nu, axis=1)) ** 2
    return float(np.sum(flux) * 2.0 * math.pi * radius / Q)


def frequency_curve(mesh, values, lam, cfg, radii, center=(0.0, 0.0), Q=256,
                    order=4, positivity_floor=POSITIVITY_FLOOR):
    """Almgren curve of a P1 field on disks D_r(center), r in radii.

    Args:
        mesh (Mesh): Mesh of the field.
        values (np.ndarray): Nodal values (all vertices).
        lam (float): Eigenvalue.
        cfg (PoleConfig): Pole of the potential A in the energy.
        radii (array-like): Increasing radii, each above |a - center|.
        center (tuple, optional): Disk center. Defaults to the origin.

    Raises:
        WindowError: Radii not increasing, not enclosing the pole, or
            leaving the domain.
        PositivityError: H below positivity_floor * max H.

    Returns:
        AlmgrenCurve: The curve.
    """
    radii = np.asarray(radii, dtype=float)
    if len(radii) == 0 or np.any(np.diff(radii) <= 0):
        raise WindowError('radii must be increasing')
    offset = math.hypot(cfg.pole[0] - center[0], cfg.pole[1] - center[1])
    if radii[0] <= offset:
        raise WindowError('radius %g does not enclose the pole at distance %g'
                          % (radii[0], offset))
    if mesh.domain is not None:
        room = mesh.domain.distance_to_boundary(np.asarray(center, dtype=float))
        if radii[-1] >= room:
            raise WindowError('radius %g leaves the domain (room %g)'
                              % (radii[-1], room))
    u_full = np.asarray(values)
    field = NodalField(mesh, u_full)
    H, energy, mass, flux = [], [], [], []
    for r in radii:
        H.append(trace_circle(mesh, field, center, r, Q).boundary_mass())
        e, m, _ = disk_integrals(mesh, cfg, u_full, center, r, order)
        energy.append(e)
        mass.append(m)
        flux.append(normal_flux(mesh, cfg, u_full, center, r, Q))
    H = np.array(H)
    if np.any(H <= positivity_floor * H.max()):
        bad = radii[np.argmax(H <= positivity_floor * H.max())]
        raise PositivityError('H vanishes at r = %g' % bad)
    energy = np.array(energy)
    mass = np.array(mass)
    E = energy - lam * mass
    logger.debug('frequency curve on %d radii: N in [%.4f, %.4f]',
                 len(radii), (E / H).min(), (E / H).max())
    return AlmgrenCurve(radii=radii, H=H, E=E, N=E / H,
                        center=(float(center[0]), float(center[1])),
                        lam=float(lam), energy=energy, mass=mass,
                        normal_flux=np.array(flux))


def _interior(curve):
    if len(curve.radii) < 5:
        raise WindowError('identity checks need at least 5 radii')
    return slice(1, len(curve.radii) - 1)


def dH_identity_check(curve):
    """Max relative defect of dH/dr = (2/r) E over interior grid points."""
    inner = _interior(curve)
    dH = np.gradient(curve.H, curve.radii)[inner]
    rhs = (2.0 * curve.E / curve.radii)[inner]
    scale = np.maximum(np.abs(rhs), np.abs(dH))
    scale = np.where(scale == 0.0, 1.0, scale)
    return float(np.max(np.abs(dH - rhs) / scale))


def dE_identity_check(curve, pole_term_value=0.0):
    """Max relative defect of
    dE/dr = 2 int_{dD_r} |(i grad + A) u . nu|^2 - (2/r)(M + lam int_{D_r} |u|^2)."""
    if curve.normal_flux is None:
        raise ConfigurationError('curve carries no boundary flux')
    inner = _interior(curve)
    dE = np.gradient(curve.E, curve.radii)[inner]
    rhs = (2.0 * curve.normal_flux - 2.0 / curve.radii
           * (pole_term_value + curve.lam * curve.mass))[inner]
    scale = np.max(np.abs(rhs))
    scale = scale if scale > 0 else 1.0
    return float(np.max(np.abs(dE - rhs)) / scale)


def frequency_bound_check(curve, order, delta, window):
    """True iff N <= order + delta for every grid radius in the window."""
    lo, hi = window
    r = curve.radii
    if lo < r[0] * (1 - 1e-12) or hi > r[-1] * (1 + 1e-12) or lo > hi:
        raise WindowError('window [%g, %g] outside the curve [%g, %g]'
                          % (lo, hi, r[0], r[-1]))
    mask = (r >= lo) & (r <= hi)
    return bool(np.all(curve.N[mask] <= order + delta))


def lower_growth_check(curve, mu1, Lam, r0, delta=0.1, window=None):
    """H(r2)/H(r1) >= e^{-Lam (2 + sqrt(mu1)) r0^2} (r2/r1)^{2 (sqrt(mu1) - delta)}.

    Returns:
        tuple: (passed, worst ratio of the two sides).
    """
    r = curve.radii
    lo, hi = window if window is not None else (r[0], r[-1])
    mask = (r >= lo) & (r <= min(hi, r0))
    rr, HH = r[mask], curve.H[mask]
    if len(rr) < 2:
        raise WindowError('lower growth check needs two radii below r0')
    i, j = np.triu_indices(len(rr), k=1)
    lhs = HH[j] / HH[i]
    rhs = (math.exp(-Lam * (2.0 + math.sqrt(mu1)) * r0 ** 2)
           * (rr[j] / rr[i]) ** (2.0 * (math.sqrt(mu1) - delta)))
    worst = float(np.min(lhs / rhs))
    return worst >= 1.0, worst


def perturbed_frequency(curve, Lam, r0):
    """e^{Lam r^2 / (1 - Lam r0^2)} (N + 1)."""
    if Lam * r0 ** 2 >= 1.0:
        raise ConfigurationError('need Lam r0^2 < 1')
    return np.exp(Lam * curve.radii ** 2 / (1.0 - Lam * r0 ** 2)) * (curve.N + 1.0)


def perturbed_monotonicity_check(curve, Lam, r0, slack=0.05):
    """Approximate monotonicity of the perturbed frequency (up to slack)."""
    values = perturbed_frequency(curve, Lam, r0)[curve.radii <= r0]
    running = np.maximum.accumulate(values)
    return bool(np.all(values >= (1.0 - slack) * running))


@dataclass(frozen=True)
class PoincareResult:
    lhs: float
    rhs: float
    slack: float

    @property
    def passed(self):
        return self.lhs <= (1.0 + self.slack) * self.rhs


def poincare_check(mesh, values, cfg, radius, center=(0.0, 0.0), slack=0.05,
                   Q=256, order=4):
    """(1/r^2) int_{D_r} |u|^2 <= (1/r) int_{dD_r} |u|^2 + int_{D_r} |(i grad + A) u|^2."""
    if math.hypot(cfg.pole[0] - center[0], cfg.pole[1] - center[1]) >= radius:
        raise WindowError('the pole must lie in D_r')
    u_full = np.asarray(values)
    energy, mass, _ = disk_integrals(mesh, cfg, u_full, center, radius, order)
    H = trace_circle(mesh, u_full, center, radius, Q).boundary_mass()
    return PoincareResult(mass / radius ** 2, H + energy, slack)

@dataclass(frozen=True)
class InequalityChecks:
    """Hardy checks on D_r(a) for r in HARDY_RADII and the Poincare check
    on D_r(0), for one eigenfunction. Radii that do not fit in the
    domain are skipped."""
    hardy: Tuple[Tuple[float, object], ...]
    poincare: Optional[PoincareResult]
    poincare_radius: float

    @property
    def hardy_ratio(self):
        if not self.hardy:
            return math.nan
        return max(result.ratio for _, result in self.hardy)

    @property
    def hardy_passed(self):
        return all(result.passed for _, result in self.hardy)

    @property
    def poincare_passed(self):
        return self.poincare is None or self.poincare.passed

    @property
    def passed(self):
        return self.hardy_passed and self.poincare_passed


def inequality_checks(system, u, Q=256, order=4, hardy_radii=HARDY_RADII,
                      poincare_radius=POINCARE_RADIUS, slack=0.05):
    """Hardy and Poincare inequalities of a free dof vector u.

    Args:
        system (AssembledSystem): System u was computed on.
        u (np.ndarray): Free degrees of freedom.
        hardy_radii (tuple, optional): Radii around the pole.
        poincare_radius (float, optional): Radius around the origin,
            clipped to the room left by the boundary.

    Returns:
        InequalityChecks: The verdicts.
    """
    mesh, cfg = system.mesh, system.cfg
    domain = mesh.domain
    room = domain.distance_to_boundary(np.asarray(cfg.pole, dtype=float))
    hardy = []
    for r in hardy_radii:
        if r >= room:
            logger.info('hardy radius %g skipped: %g to the boundary', r, room)
            continue
        hardy.append((float(r), hardy_check(system, u, r, slack)))

    poincare, radius = None, math.nan
    if domain.contains_origin:
        radius = min(poincare_radius,
                     0.9 * domain.distance_to_boundary(np.zeros(2)))
        if cfg.abs_pole < radius:
            poincare = poincare_check(mesh, system.expand(u), cfg, radius,
                                      slack=slack, Q=Q, order=order)
        else:
            logger.info('poincare skipped: pole outside D_%g', radius)
    return InequalityChecks(tuple(hardy), poincare, float(radius))



def local_scalings(mesh, values, cfg, R, H_K, Q=256, order=4):
    """Local energy, boundary mass and mass on D_{R|a|} over H(u, K|a|).

    Returns:
        dict: ``energy`` = int_{D_{R|a|}} |(i grad + A) u|^2 / H,
            ``boundary`` = int_{dD_{R|a|}} |u|^2 / (|a| H) and
            ``mass`` = int_{D_{R|a|}} |u|^2 / (|a|^2 H).
    """
    a = cfg.abs_pole
    if a == 0.0:
        raise ConfigurationError('local scalings need a pole off the origin')
    radius = R * a
    u_full = np.asarray(values)
    energy, mass, _ = disk_integrals(mesh, cfg, u_full, (0.0, 0.0), radius,
                                     order)
    boundary = radius * trace_circle(mesh, u_full, (0.0, 0.0), radius, Q,
                                     check_resolution=False).boundary_mass()
    return {'energy': energy / H_K, 'boundary': boundary / (a * H_K),
            'mass': mass / (a * a * H_K)}
