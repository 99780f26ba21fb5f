"""Pole sweeps along a fixed direction and the asymptotic quantities they
feed: eigenvalue variation rates, blow-up limits, the limit profile and
the eigenfunction convergence constant.

A sweep solves the eigenproblem once with the pole at the origin (the
reference) and then for every |a| in a decreasing list, with the pole at
|a| p. Each sample is phase aligned against the reference so that the
gauge-corrected differences of fields make sense.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import curve_fit
from scipy.stats import linregress
from skfem import condense, solve

from abspec.almgren import (frequency_bound_check, frequency_curve,
                            inequality_checks, local_scalings, pole_term)
from abspec.assembly import assemble, magnetic_gradient
from abspec.eigensolve import align_phase, check_simplicity, solve_lowest
from abspec.gauge import (TWO_PI, PoleConfig, gauge_phase,
                          magnetic_gradient_psi, psi_profile)
from abspec.geometry import (NodalField, make_disk_domain, mesh_domain,
                             remesh_for_pole)
from abspec.quadrature import element_quadrature, region_quadrature
from abspec.spectral import (estimate_betas, fourier_trace, trace_circle,
                             trace_radii, vanishing_order)
from abspec.utils.common import LOG_FMT, LOG_LEVEL_MAIN, Logger, format_float
from abspec.utils.config import default_grading
from abspec.utils.errors import (ConfigurationError, OutOfDomainError,
                                 ProfileTruncationError, QuadratureError,
                                 RateFitError, SimplicityError, WindowError)

logger = Logger().getLogger('ABSPEC_ASYMPTOTICS', LOG_LEVEL_MAIN, LOG_FMT)

# Fraction of the pole to boundary distance usable by trace circles.
TRACE_ROOM = 0.8
# R in the local scalings and in the pole term ratio.
LOCAL_RADIUS = 2.0
FREQUENCY_DELTA = 0.1
FREQUENCY_WINDOW_FACTOR = 4.0
FREQUENCY_WINDOW_TOP = 0.3
FREQUENCY_RADII = 10
MIN_FIT_SAMPLES = 4
MIN_FIT_SPAN = 4.0
MIN_PROFILE_RADIUS = 8.0
# Relative spread over R allowed for the two leading beta coefficients.
LEADING_BETA_SPREAD = 0.05


# ---------------------------------------------------------------------------- #
#                               Single pole solves                             #
# ---------------------------------------------------------------------------- #

@dataclass(frozen=True, eq=False)
class PoleState:
    """Eigenpair lambda_n0 for one pole position and its Fourier
    diagnostics at the pole."""
    cfg: PoleConfig
    mesh: object
    system: object
    spectrum: object
    pair: object
    trace: object
    betas: object
    vanishing: object
    inequalities: object

    @property
    def lam(self):
        return self.pair.lam

    @property
    def k(self):
        return self.vanishing.k

    @property
    def order(self):
        return self.vanishing.order

    @property
    def values(self):
        return self.pair.nodal()


def pole_diagnostics(mesh, values, cfg, lam, run):
    """Fourier trace, beta table and vanishing order around the pole."""
    room = TRACE_ROOM * mesh.domain.distance_to_boundary(np.asarray(cfg.pole))
    r_max = min(max(run.beta_radii), room)
    radii = trace_radii(mesh, cfg.pole, r_max, run.beta_radii)
    R_grid = [R for R in run.beta_radii if radii[0] < R <= r_max]
    if len(R_grid) < 2:
        raise WindowError('fewer than two beta radii fit in [%g, %g]'
                          % (radii[0], r_max))
    ft = fourier_trace(mesh, values, cfg.pole, radii, cfg.alpha, run.Q, run.J,
                       start_angle=cfg.direction_angle)
    betas = estimate_betas(ft, lam, R_grid)
    return ft, betas, vanishing_order(ft, betas)


def solve_pole_state(mesh, cfg, run, reference=None):
    """Assemble, solve and phase align lambda_n0 for the pole of cfg.

    Raises:
        SimplicityError: lambda_n0 not simple (carries |a|).
        PhaseAmbiguityError: Overlap with the reference too small.
    """
    system = assemble(mesh, cfg, run.quadrature_order)
    spectrum = solve_lowest(system, run.n0 + 1, tol=run.tol, seed=run.seed,
                            preconditioner=run.preconditioner,
                            dense_limit=run.dense_limit)
    if not check_simplicity(spectrum, run.n0):
        below, above = spectrum.gaps(run.n0)
        raise SimplicityError('lambda_%d is not simple at |a| = %g (gaps %g, '
                              '%g)' % (run.n0, cfg.abs_pole, below, above),
                              cfg.abs_pole)
    pair = spectrum[run.n0]
    if reference is not None:
        pair = align_phase(pair, reference.pair, cfg, mesh,
                           reference_mesh=reference.mesh, label='a=0')
    ft, betas, vanishing = pole_diagnostics(mesh, pair.nodal(), cfg, pair.lam,
                                            run)
    inequalities = inequality_checks(system, pair.vector, run.Q,
                                     run.quadrature_order)
    return PoleState(cfg, mesh, system, spectrum, pair, ft, betas, vanishing,
                     inequalities)


def reference_state(domain, run):
    """Solve with the pole at the origin (branch along the sweep direction)."""
    mesh = mesh_domain(domain, (0.0, 0.0), run.h_max, run.grading_exponent,
                       run.h_min_floor)
    cfg = PoleConfig(run.alpha, (0.0, 0.0), run.direction)
    state = solve_pole_state(mesh, cfg, run)
    logger.info('reference: lambda_%d = %.10g, k = %d, order %.4f',
                run.n0, state.lam, state.k, state.order)
    return state


# ---------------------------------------------------------------------------- #
#                                   Blow-ups                                   #
# ---------------------------------------------------------------------------- #

class BlowUpField(object):
    """Sampler of x -> u(|a| R x)/|a|^order.

    R rotates (1, 0) onto the sweep direction, so that x is expressed in
    the frame where the scaled pole sits at (1, 0).

        :param mesh: Mesh of u.
        :param values: Nodal values of u.
        :param abs_a: Scale |a| > 0.
        :param order: Vanishing order used in the normalization.
        :param angle: Sweep direction angle.
    """

    def __init__(self, mesh, values, abs_a, order, angle=0.0):
        if abs_a <= 0.0:
            raise ConfigurationError('blow-up needs |a| > 0')
        self.field = NodalField(mesh, values)
        self.abs_a = float(abs_a)
        self.order = float(order)
        self.angle = float(angle)
        c, s = math.cos(angle), math.sin(angle)
        self._rotation = np.array([[c, -s], [s, c]])

    def physical(self, x):
        return self.abs_a * np.asarray(x, dtype=float) @ self._rotation.T

    def __call__(self, x):
        return self.field(self.physical(x)) / self.abs_a ** self.order


def blow_up_field(mesh, values, a, order):
    """phi(|a| x)/|a|^order with x in the frame of the direction of a."""
    abs_a = math.hypot(a[0], a[1])
    return BlowUpField(mesh, values, abs_a, order, math.atan2(a[1], a[0]))


def annulus_rule(r_in, r_out, n_r=24, Q=256):
    """Gauss-Legendre in r times trapezoid in t on r_in < |x| < r_out."""
    if not 0.0 <= r_in < r_out:
        raise ConfigurationError('annulus needs 0 <= r_in < r_out')
    s, w = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * (r_out - r_in) * (s + 1.0) + r_in
    wr = 0.5 * (r_out - r_in) * w * r
    t = TWO_PI * (np.arange(Q) + 0.5) / Q
    R, T = np.meshgrid(r, t, indexing='ij')
    points = np.stack([R * np.cos(T), R * np.sin(T)], axis=-1).reshape(-1, 2)
    weights = np.repeat(wr, Q) * TWO_PI / Q
    return points, weights


@dataclass(frozen=True)
class BlowUpDistance:
    distance: float
    c: complex


def best_multiple_distance(f, g, weights):
    """min_c |f - c g| / |c g| in the weighted L2 norm, with the optimal c."""
    gg = float(np.sum(weights * np.abs(g) ** 2))
    if gg == 0.0:
        raise QuadratureError('reference field vanishes on the annulus')
    c = complex(np.sum(weights * f * np.conj(g)) / gg)
    if c == 0:
        return BlowUpDistance(math.inf, c)
    rest = float(np.sum(weights * np.abs(f - c * g) ** 2))
    return BlowUpDistance(math.sqrt(rest / (abs(c) ** 2 * gg)), c)


def blowup_distance(blow, profile, annulus, n_r=24, Q=256):
    """Relative L2 distance on the annulus between a blow-up and the best
    multiple of the limit profile."""
    points, weights = annulus_rule(annulus[0], annulus[1], n_r, Q)
    if annulus[1] > 0.5 * profile.S:
        raise WindowError('annulus outside the trusted profile region')
    return best_multiple_distance(blow(points), profile.field(points), weights)


def origin_blow_up_distance(mesh, values, abs_a, order, k, alpha, angle=0.0,
                            annulus=(1.0, 2.0), n_r=24, Q=256):
    """Distance of W_a(x) = phi_0(|a| x)/|a|^order to the best multiple of
    psi_k on the annulus."""
    blow = BlowUpField(mesh, values, abs_a, order, angle)
    points, weights = annulus_rule(annulus[0], annulus[1], n_r, Q)
    phys = blow.physical(points) / abs_a
    return best_multiple_distance(blow(points), psi_profile(alpha, k, phys),
                                  weights)


# ---------------------------------------------------------------------------- #
#                                 Limit profile                                #
# ---------------------------------------------------------------------------- #

@dataclass(frozen=True, eq=False)
class LimitProfile:
    """A_p-harmonic field on D_S with far field e^{i alpha (theta_p - theta_0^p)} psi_k.

    Args:
        alpha (float): Circulation.
        k (int): Mode of the far field.
        S (float): Truncation radius.
        cfg (PoleConfig): Pole p = (1, 0).
        mesh (Mesh): Mesh of D_S with a vertex at p.
        values (np.ndarray): Nodal values (zero at p).
        boundary_data (np.ndarray): Dirichlet values on the boundary
            vertices.
        tail (float): int_{D_S minus D_{S/2}} |(i grad + A_p)(Psi - far field)|^2.
        doubling_defect (float, optional): Relative energy difference on
            D_2 against the solve on D_{2S}.
    """
    alpha: float
    k: int
    S: float
    cfg: PoleConfig
    mesh: object
    values: np.ndarray
    boundary_data: np.ndarray
    tail: float
    doubling_defect: Optional[float] = None

    @property
    def field(self):
        return NodalField(self.mesh, self.values)

    def far_field(self, points):
        """e^{i alpha (theta_p - theta_0^p)} psi_k."""
        return np.conj(gauge_phase(self.cfg, points)) * psi_profile(
            self.alpha, self.k, points)

    def far_field_error(self, radius, Q=256):
        """Relative L2 distance to the far field on the circle of given radius."""
        t = TWO_PI * np.arange(Q) / Q
        points = radius * np.stack([np.cos(t), np.sin(t)], axis=1)
        exact = self.far_field(points)
        diff = self.field(points) - exact
        return float(np.linalg.norm(diff) / np.linalg.norm(exact))


def _profile_density(profile, qset):
    g = magnetic_gradient(profile.mesh, profile.cfg, profile.values,
                          qset.owners, qset.bary, qset.points)
    phase = np.conj(gauge_phase(profile.cfg, qset.points))
    exact = phase[:, None] * magnetic_gradient_psi(profile.alpha, profile.k,
                                                   qset.points)
    return np.sum(np.abs(g - exact) ** 2, axis=1)


def profile_energy(profile, R, order=4):
    """F(R) = int_{D_R} |(i grad + A_p) Psi - e^{i alpha (theta_p - theta_0^p)} (i grad + A_0) psi_k|^2."""
    qset = region_quadrature(profile.mesh, order, disk=((0.0, 0.0), R),
                             cut=profile.cfg.pole,
                             singular=[(0.0, 0.0), profile.cfg.pole])
    return float(qset.integrate(_profile_density(profile, qset)))


def _solve_profile(alpha, k, S, h_max, n_boundary, grading, h_min_floor,
                   order):
    domain = make_disk_domain(S, n_boundary)
    cfg = PoleConfig(alpha, (1.0, 0.0))
    mesh = mesh_domain(domain, cfg.pole, h_max, grading, h_min_floor)
    system = assemble(mesh, cfg, order)
    K = system.full_stiffness
    boundary = mesh.boundary_vertices
    data = np.conj(gauge_phase(cfg, mesh.vertices[boundary])) * psi_profile(
        alpha, k, mesh.vertices[boundary])
    x = np.zeros(mesh.n_vertices, dtype=complex)
    x[boundary] = data
    D = np.concatenate([boundary, [mesh.pole_vertex]])
    b = np.zeros(mesh.n_vertices, dtype=complex)
    values = solve(*condense(K, b, x=x, D=D))
    profile = LimitProfile(alpha=float(alpha), k=int(k), S=float(S), cfg=cfg,
                           mesh=mesh, values=np.asarray(values),
                           boundary_data=data, tail=0.0)
    tail = profile_energy(profile, S, order) - profile_energy(profile,
                                                               0.5 * S, order)
    logger.info('limit profile S=%g: %d vertices, tail %.3e', S,
                mesh.n_vertices, tail)
    return replace(profile, tail=max(tail, 0.0))


def _energy_difference(coarse, fine, radius=2.0, order=4):
    qset = region_quadrature(coarse.mesh, order, disk=((0.0, 0.0), radius),
                             singular=[coarse.cfg.pole])
    cfg = coarse.cfg
    g_coarse = magnetic_gradient(coarse.mesh, cfg, coarse.values, qset.owners,
                                 qset.bary, qset.points)
    owners = fine.mesh.locate(qset.points)
    if np.any(owners < 0):
        raise OutOfDomainError('doubled profile does not cover D_%g' % radius)
    bary = fine.mesh.barycentric(owners, qset.points)
    g_fine = magnetic_gradient(fine.mesh, cfg, fine.values, owners, bary,
                               qset.points)
    num = qset.integrate(np.sum(np.abs(g_coarse - g_fine) ** 2, axis=1))
    den = qset.integrate(np.sum(np.abs(g_coarse) ** 2, axis=1))
    return float(math.sqrt(num / den))


def solve_limit_profile(alpha, k, S=16.0, h_max=0.5, n_boundary=256,
                        grading=None, h_min_floor=1e-5, order=4,
                        verify_doubling=False):
    """Solve (i grad + A_p)^2 Psi = 0 on D_S, Psi = far field on the
    boundary circle and Psi(p) = 0, with p = (1, 0).

    Args:
        alpha (float): Circulation.
        k (int): Far-field mode.
        S (float, optional): Truncation radius (>= 8). Defaults to 16.
        h_max (float, optional): Coarse mesh size. Defaults to 0.5.
        n_boundary (int, optional): Boundary vertices. Defaults to 256.
        grading (float, optional): Grading exponent toward p; derived from
            alpha when None.
        verify_doubling (bool, optional): Also solve on D_{2S}, require the
            tail to decrease and record the D_2 energy difference.

    Raises:
        ConfigurationError: S < 8.
        ProfileTruncationError: Tail not decreasing under doubling.

    Returns:
        LimitProfile: The profile.
    """
    if S < MIN_PROFILE_RADIUS:
        raise ConfigurationError('profile truncation radius must be >= %g'
                                 % MIN_PROFILE_RADIUS)
    grading = default_grading(alpha) if grading is None else grading
    profile = _solve_profile(alpha, k, S, h_max, n_boundary, grading,
                             h_min_floor, order)
    if not verify_doubling:
        return profile
    doubled = _solve_profile(alpha, k, 2.0 * S, h_max, 2 * n_boundary,
                             grading, h_min_floor, order)
    if doubled.tail >= profile.tail:
        raise ProfileTruncationError(
            'profile tail %.3e at S=%g does not decrease at S=%g (%.3e)'
            % (profile.tail, S, 2.0 * S, doubled.tail))
    defect = _energy_difference(profile, doubled, order=order)
    logger.info('profile doubling: energy difference on D_2 %.3e', defect)
    return replace(profile, doubling_defect=defect)


@dataclass(frozen=True, eq=False)
class LimitConstant:
    """F(R) on a radius list and its extrapolated limit L = F(R) + c R^-gamma."""
    radii: np.ndarray
    F: np.ndarray
    L: float
    c: float
    gamma: float

    @property
    def tail_increment(self):
        """F(R_max) - F(R_max/2), interpolated on the radius list."""
        R = self.radii[-1]
        return float(self.F[-1] - np.interp(0.5 * R, self.radii, self.F))


def _tail_model(R, L, c, gamma):
    return L - c * R ** (-gamma)


def limit_constant(profile, R_list, order=4):
    """F(R) for R in R_list and its limit as R grows.

    Raises:
        WindowError: Some R above S/2.
        QuadratureError: F decreasing somewhere.
    """
    R = np.asarray(sorted(R_list), dtype=float)
    if R[-1] > 0.5 * profile.S * (1 + 1e-12):
        raise WindowError('R = %g outside the trusted region D_%g'
                          % (R[-1], 0.5 * profile.S))
    F = np.array([profile_energy(profile, r, order) for r in R])
    if np.any(np.diff(F) < -1e-10 * F.max()):
        raise QuadratureError('F(R) is not monotone: %s'
                              % ', '.join(format_float(f) for f in F))
    L, c, gamma = F[-1], 0.0, math.nan
    if len(R) >= 4:
        try:
            guess = (F[-1], max(F[-1] - F[0], 1e-12) * R[0], 1.0)
            popt, _ = curve_fit(_tail_model, R, F, p0=guess,
                                bounds=([0.0, 0.0, 1e-3], [np.inf, np.inf, 20.0]),
                                maxfev=20000)
            L, c, gamma = (float(v) for v in popt)
        except (RuntimeError, ValueError) as err:
            logger.warning('tail fit of F(R) failed (%s), using F(R_max)', err)
    logger.info('limit constant L = %.6g (F(R_max) = %.6g)', L, F[-1])
    return LimitConstant(R, F, float(L), float(c), float(gamma))


def h_ratio_limit(profile, K, beta):
    """(1/|beta|) (K / int_{dD_K} |Psi|^2 ds)^{1/2}."""
    if K > 0.5 * profile.S:
        raise WindowError('K = %g outside the trusted profile region' % K)
    H = trace_circle(profile.mesh, profile.values, (0.0, 0.0), K,
                     check_resolution=False).boundary_mass()
    return float(1.0 / (abs(beta) * math.sqrt(H)))


@dataclass(frozen=True, eq=False)
class HarmonicExtension:
    R: float
    mesh: object
    values: np.ndarray
    energy: float


def solve_harmonic_extension(profile, R, h_max=0.1, n_boundary=128,
                             order=4):
    """A_0-harmonic z in D_R with boundary data e^{i alpha (theta_0^p - theta_p)} Psi.

    Returns the field and int_{D_R} |(i grad + A_0)(z - psi_k)|^2, which
    tends to zero as R grows.
    """
    if R > 0.5 * profile.S or R <= 1.0:
        raise WindowError('need 1 < R <= S/2 for the harmonic extension')
    cfg = PoleConfig(profile.alpha, (0.0, 0.0))
    mesh = mesh_domain(make_disk_domain(R, n_boundary), cfg.pole, h_max,
                       default_grading(profile.alpha), profile.mesh.h_min_floor)
    system = assemble(mesh, cfg, order)
    boundary = mesh.boundary_vertices
    points = mesh.vertices[boundary]
    x = np.zeros(mesh.n_vertices, dtype=complex)
    x[boundary] = gauge_phase(profile.cfg, points) * profile.field(points)
    D = np.concatenate([boundary, [mesh.pole_vertex]])
    z = solve(*condense(system.full_stiffness,
                        np.zeros(mesh.n_vertices, dtype=complex), x=x, D=D))
    qset = element_quadrature(mesh, order)
    g = magnetic_gradient(mesh, cfg, z, qset.owners, qset.bary, qset.points)
    exact = magnetic_gradient_psi(profile.alpha, profile.k, qset.points)
    energy = float(qset.integrate(np.sum(np.abs(g - exact) ** 2, axis=1)))
    return HarmonicExtension(float(R), mesh, np.asarray(z), energy)


# ---------------------------------------------------------------------------- #
#                             Eigenfunction gap                                #
# ---------------------------------------------------------------------------- #

def eigenfunction_gap(mesh_a, values_a, cfg_a, mesh_0, values_0, order,
                      quadrature_order=4):
    """|a|^{-2 order} int |(i grad + A_a) phi_a - e^{i alpha (theta_a - theta_0^a)} (i grad + A_0) phi_0|^2.

    Both fields must be phase aligned. Elements crossed by [0, a] are
    integrated per side; the origin and the pole are sub-triangle corners.
    """
    cfg_0 = PoleConfig(cfg_a.alpha, (0.0, 0.0), cfg_a.direction_angle)
    if cfg_a.at_origin:
        qset = element_quadrature(mesh_a, quadrature_order)
        scale = 1.0
    else:
        qset = region_quadrature(mesh_a, quadrature_order, cut=cfg_a.pole,
                                 singular=[(0.0, 0.0), cfg_a.pole])
        scale = cfg_a.abs_pole ** (-2.0 * order)
    g_a = magnetic_gradient(mesh_a, cfg_a, np.asarray(values_a), qset.owners,
                            qset.bary, qset.points)
    owners = mesh_0.locate(qset.points)
    if np.any(owners < 0):
        raise OutOfDomainError('reference mesh does not cover the sample mesh')
    bary = mesh_0.barycentric(owners, qset.points)
    g_0 = magnetic_gradient(mesh_0, cfg_0, np.asarray(values_0), owners, bary,
                            qset.points)
    phase = np.conj(gauge_phase(cfg_a, qset.points))
    density = np.sum(np.abs(g_a - phase[:, None] * g_0) ** 2, axis=1)
    return float(scale * qset.integrate(density))


# ---------------------------------------------------------------------------- #
#                                  Rate fits                                   #
# ---------------------------------------------------------------------------- #

def usable_samples(samples, noise_floor=0.0):
    """Split (|a|, |lambda_0 - lambda_a|) pairs at the noise floor.

    Raises:
        RateFitError: Fewer than 4 usable samples or |a| spanning less
            than a factor 4.
    """
    kept = [(a, abs(d)) for a, d in samples if abs(d) > noise_floor and a > 0]
    dropped = [(a, d) for a, d in samples if not (abs(d) > noise_floor
                                                 and a > 0)]
    for a, d in dropped:
        logger.warning('sample |a| = %g dropped: |diff| %.3e below the noise '
                       'floor %.3e', a, abs(d), noise_floor)
    if len(kept) < MIN_FIT_SAMPLES:
        raise RateFitError('rate fit needs %d samples above the noise floor, '
                           'got %d' % (MIN_FIT_SAMPLES, len(kept)))
    a = np.array([s[0] for s in kept])
    if a.max() < MIN_FIT_SPAN * a.min() * (1.0 - 1e-9):
        raise RateFitError('|a| must span a factor %g, got %.3g'
                           % (MIN_FIT_SPAN, a.max() / a.min()))
    return kept, dropped


def fit_rate(samples, noise_floor=0.0):
    """Least squares slope of log|lambda_0 - lambda_a| against log|a|.

    Returns:
        tuple: (slope, r_squared).
    """
    kept, _ = usable_samples(samples, noise_floor)
    fit = linregress(np.log([s[0] for s in kept]), np.log([s[1] for s in kept]))
    return float(fit.slope), float(fit.rvalue ** 2)


def quotient_boundedness(samples, order, noise_floor=0.0):
    """max q / min q of q(|a|) = |lambda_0 - lambda_a| / |a|^{2 order}."""
    kept, _ = usable_samples(samples, noise_floor)
    q = np.array([d / a ** (2.0 * order) for a, d in kept])
    return float(q.max() / q.min())


def pole_term_ratio(report, R=LOCAL_RADIUS):
    """|M|/H(phi_a, R|a|) per sample and the empirical c_0 in
    |M|/H <= 2 alpha (1 - alpha)/(R - c_0)."""
    alpha = report.alpha
    ratios, c0 = [], -math.inf
    for s in report.samples:
        ratio = abs(s.pole_term.value) / s.H_local
        ratios.append(ratio)
        if ratio > 0:
            c0 = max(c0, R - 2.0 * alpha * (1.0 - alpha) / ratio)
    return np.array(ratios), float(c0)


# ---------------------------------------------------------------------------- #
#                                    Sweeps                                    #
# ---------------------------------------------------------------------------- #

@dataclass(frozen=True, eq=False)
class SweepSample:
    """Diagnostics of one pole position |a| p."""
    abs_a: float
    state: PoleState
    diff: float
    H_K: float
    H_local: float
    pole_term: object
    scalings: Dict[str, float]
    N_max: float
    frequency_bound: Optional[bool]
    h_ratio: float
    blowup: Optional[BlowUpDistance]
    origin_blowup: BlowUpDistance
    gap: float

    @property
    def lam(self):
        return self.state.lam

    @property
    def order(self):
        return self.state.order

    @property
    def betas(self):
        return self.state.betas

    @property
    def hardy_ratio(self):
        return self.state.inequalities.hardy_ratio

    @property
    def poincare_passed(self):
        return self.state.inequalities.poincare_passed


@dataclass(frozen=True, eq=False)
class SweepReport:
    """Samples sorted by decreasing |a| with the fitted rate."""
    alpha: float
    direction: Tuple[float, float]
    K: float
    reference: PoleState
    samples: Tuple[SweepSample, ...]
    noise_floor: float
    fitted_slope: float = math.nan
    r_squared: float = math.nan
    profile: Optional[LimitProfile] = None

    @property
    def order(self):
        return self.reference.order

    @property
    def lam0(self):
        return self.reference.lam

    def rate_samples(self):
        return [(s.abs_a, s.diff) for s in self.samples]

    def running_slopes(self):
        """Local slope of log|diff| against log|a| between neighbours."""
        out = [math.nan]
        for prev, cur in zip(self.samples[:-1], self.samples[1:]):
            if prev.diff == 0.0 or cur.diff == 0.0:
                out.append(math.nan)
                continue
            out.append(math.log(abs(cur.diff) / abs(prev.diff))
                       / math.log(cur.abs_a / prev.abs_a))
        return out

    def to_frame(self):
        def dist(s):
            return s.blowup.distance if s.blowup is not None else math.nan
        return pd.DataFrame({
            'abs_a': [s.abs_a for s in self.samples],
            'lambda_a': [s.lam for s in self.samples],
            'diff': [s.diff for s in self.samples],
            'H': [s.H_K for s in self.samples],
            'slope_running': self.running_slopes(),
            'blowup_dist': [dist(s) for s in self.samples],
            'gap': [s.gap for s in self.samples]})

    def diagnostics_frame(self):
        rows = []
        for s in self.samples:
            rows.append({
                'abs_a': s.abs_a, 'k': s.state.k, 'order': s.order,
                'beta0_abs': abs(s.betas.beta(0)),
                'beta1_abs': abs(s.betas.beta(1)),
                'pole_term': s.pole_term.value,
                'pole_term_bound': s.pole_term.bound,
                'N_max': s.N_max, 'h_ratio': s.h_ratio,
                'origin_blowup': s.origin_blowup.distance,
                'local_energy': s.scalings['energy'],
                'local_boundary': s.scalings['boundary'],
                'local_mass': s.scalings['mass'],
                'hardy_ratio': s.hardy_ratio,
                'poincare': int(s.poincare_passed)})
        return pd.DataFrame(rows)


def _frequency_window(abs_a, room):
    lo = FREQUENCY_WINDOW_FACTOR * abs_a
    hi = min(FREQUENCY_WINDOW_TOP, 0.9 * room)
    if lo >= hi:
        return None
    return np.geomspace(lo, hi, FREQUENCY_RADII)


def sweep_sample(abs_a, run, reference, profile=None):
    """Solve and diagnose the pole |a| p."""
    cfg = PoleConfig.from_polar(run.alpha, abs_a, run.direction)
    mesh = remesh_for_pole(reference.mesh, cfg.pole)
    state = solve_pole_state(mesh, cfg, run, reference)
    values = state.values
    order = reference.order
    logger.info('|a| = %g: lambda = %.10g', abs_a, state.lam)

    H_K = trace_circle(mesh, values, (0.0, 0.0), run.K * abs_a,
                       run.Q, check_resolution=False).boundary_mass()
    H_local = trace_circle(mesh, values, (0.0, 0.0), LOCAL_RADIUS * abs_a,
                           run.Q, check_resolution=False).boundary_mass()
    M = pole_term(state.betas.beta(0), state.betas.beta(1), cfg.pole,
                  run.alpha)
    scalings = local_scalings(mesh, values, cfg, LOCAL_RADIUS, H_K, run.Q,
                              run.quadrature_order)

    room = mesh.domain.distance_to_boundary(np.zeros(2))
    radii = _frequency_window(abs_a, room)
    N_max, bound = math.nan, None
    if radii is not None:
        curve = frequency_curve(mesh, values, state.lam, cfg, radii, Q=run.Q,
                                order=run.quadrature_order)
        N_max = float(curve.N.max())
        bound = frequency_bound_check(curve, order, FREQUENCY_DELTA,
                                      (radii[0], radii[-1]))

    blowup = None
    if profile is not None:
        blowup = blowup_distance(BlowUpField(mesh, values, abs_a, order,
                                             cfg.direction_angle),
                                 profile, run.annulus, Q=run.Q)
    origin = origin_blow_up_distance(reference.mesh, reference.values, abs_a,
                                     order, reference.k, run.alpha,
                                     cfg.direction_angle, Q=run.Q)
    gap = eigenfunction_gap(mesh, values, cfg, reference.mesh,
                            reference.values, order, run.quadrature_order)
    return SweepSample(abs_a=float(abs_a), state=state,
                       diff=float(reference.lam - state.lam), H_K=H_K,
                       H_local=H_local, pole_term=M, scalings=scalings,
                       N_max=N_max, frequency_bound=bound,
                       h_ratio=abs_a ** order / math.sqrt(H_K),
                       blowup=blowup, origin_blowup=origin, gap=gap)


def pole_sweep(domain, run, reference=None, profile=None):
    """Sweep the pole along the direction of run over run.a_list.

    Samples run as independent jobs (run.jobs threads); the report keeps
    the order of a_list.

    Args:
        domain (Domain): Domain containing every pole.
        run (RunConfig): Validated configuration.
        reference (PoleState, optional): Solved a = 0 state; solved here
            when None.
        profile (LimitProfile, optional): Limit profile for the blow-up
            distances.

    Raises:
        SimplicityError: lambda_n0 not simple at some sample.
        PhaseAmbiguityError: Some sample cannot be aligned.

    Returns:
        SweepReport: The report, with the fitted rate when at least four
            samples clear the noise floor.
    """
    run.validate()
    if reference is None:
        reference = reference_state(domain, run)
    # shared caches are filled before the threads read them
    _ = reference.mesh.trifinder, reference.mesh.barycentric_gradients

    a_list = list(run.a_list)
    if run.jobs > 1:
        with ThreadPoolExecutor(max_workers=run.jobs) as pool:
            samples = list(pool.map(
                lambda a: sweep_sample(a, run, reference, profile), a_list))
    else:
        samples = [sweep_sample(a, run, reference, profile) for a in a_list]

    noise_floor = 10.0 * run.tol * reference.lam
    slope, r2 = math.nan, math.nan
    try:
        slope, r2 = fit_rate([(s.abs_a, s.diff) for s in samples], noise_floor)
        logger.info('fitted rate %.4f (r^2 %.4f) over %d samples', slope, r2,
                    len(samples))
    except RateFitError as err:
        logger.warning('no rate fit: %s', err)
    return SweepReport(alpha=float(run.alpha), direction=run.direction_vector,
                       K=float(run.K), reference=reference,
                       samples=tuple(samples), noise_floor=noise_floor,
                       fitted_slope=slope, r_squared=r2, profile=profile)


# ---------------------------------------------------------------------------- #
#                                  Invariants                                  #
# ---------------------------------------------------------------------------- #

@dataclass(frozen=True)
class InvariantResult:
    name: str
    passed: bool
    measured: float
    detail: str = ''

    def __str__(self):
        line = '%s %s measured=%s' % ('PASS' if self.passed else 'FAIL',
                                      self.name, format_float(self.measured))
        return line + (' ' + self.detail if self.detail else '')


def _relative_change(values):
    if len(values) < 2 or values[-2] == 0:
        return math.inf
    return abs(values[-1] - values[-2]) / abs(values[-2])


def _decreasing_with_one_slip(values):
    slips = sum(1 for x, y in zip(values[:-1], values[1:]) if y > x)
    return slips <= 1


def _leading_spread(betas, count=2):
    live = sorted((betas[j] for j in betas.modes if not betas[j].negligible),
                  key=lambda est: -abs(est.beta))
    return max((est.spread for est in live[:count]), default=math.inf)


def evaluate_invariants(report, profile=None, limit=None):
    """PASS/FAIL verdicts of the asymptotic invariants over a sweep."""
    out = []
    order = report.order
    floor = 1 + math.floor(2.0 * order) - 0.2
    out.append(InvariantResult('rate_floor', report.fitted_slope >= floor,
                               report.fitted_slope,
                               'floor=%s' % format_float(floor)))
    try:
        spread = quotient_boundedness(report.rate_samples(), order,
                                      report.noise_floor)
    except RateFitError:
        spread = math.inf
    out.append(InvariantResult('quotient_spread', math.isfinite(spread),
                               spread))

    h_ratios = [s.h_ratio for s in report.samples]
    change = _relative_change(h_ratios)
    out.append(InvariantResult('h_ratio_convergence', change < 0.10, change))
    beta_k = report.reference.betas.beta(report.reference.k)
    if profile is not None and beta_k != 0:
        target = h_ratio_limit(profile, report.K, beta_k)
        rel = abs(h_ratios[-1] - target) / target
        out.append(InvariantResult('h_ratio_limit', rel < 0.20, rel,
                                   'limit=%s' % format_float(target)))

    if profile is not None:
        dists = [s.blowup.distance for s in report.samples]
        out.append(InvariantResult(
            'blowup_convergence',
            _decreasing_with_one_slip(dists) and dists[-1] < 0.10, dists[-1]))
        c_rel = abs(abs(report.samples[-1].blowup.c) - abs(beta_k)) / abs(
            beta_k) if beta_k != 0 else math.inf
        out.append(InvariantResult('blowup_constant', c_rel < 0.20, c_rel))

    origin = [s.origin_blowup.distance for s in report.samples]
    out.append(InvariantResult('origin_blowup_convergence',
                               _decreasing_with_one_slip(origin), origin[-1]))

    gaps = [s.gap for s in report.samples]
    change = _relative_change(gaps)
    out.append(InvariantResult('gap_stabilizes', change < 0.50, change))
    if limit is not None:
        expected = abs(beta_k) ** 2 * limit.L
        factor = gaps[-1] / expected if expected > 0 else math.inf
        out.append(InvariantResult('gap_limit', 0.5 <= factor <= 2.0, factor,
                                   'beta2L=%s' % format_float(expected)))
        out.append(InvariantResult(
            'limit_constant_positive',
            limit.L > 0 and limit.L > 10.0 * limit.tail_increment, limit.L))

    worst = max(s.order - order for s in report.samples)
    out.append(InvariantResult('vanishing_order_stability', worst <= 0.05,
                               worst))

    bounded = [s for s in report.samples if s.frequency_bound is not None
               and s.abs_a <= 0.05]
    if bounded:
        out.append(InvariantResult(
            'frequency_bound', all(s.frequency_bound for s in bounded),
            max(s.N_max for s in bounded),
            'bound=%s' % format_float(order + FREQUENCY_DELTA)))

    states = [report.reference] + [s.state for s in report.samples]
    beta_spread = max(_leading_spread(state.betas) for state in states)
    out.append(InvariantResult('beta_spread',
                               beta_spread < LEADING_BETA_SPREAD, beta_spread))

    checks = [state.inequalities for state in states]
    worst_hardy = max(c.hardy_ratio for c in checks)
    out.append(InvariantResult('hardy', all(c.hardy_passed for c in checks),
                               worst_hardy))
    out.append(InvariantResult(
        'poincare', all(c.poincare_passed for c in checks),
        float(sum(c.poincare_passed for c in checks))))
    out.append(InvariantResult('h_positivity',
                               all(s.H_K > 0 for s in report.samples),
                               min(s.H_K for s in report.samples)))
    for result in out:
        logger.info('%s', result)
    return out
