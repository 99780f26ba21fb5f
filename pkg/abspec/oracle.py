"""Exact Aharonov-Bohm eigenpairs on the unit disk with the pole at the
center.

With the pole at the origin the eigenfunctions separate as
J_nu(z r) e^{ijt} with nu = |alpha - j| and z a positive zero of J_nu,
so the eigenvalues are the squared zeros j_{nu,m}^2.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
import pandas as pd
from scipy import special
from scipy.integrate import quad
from scipy.optimize import brentq

from abspec.gauge import SQRT_2PI
from abspec.utils.common import LOG_FMT, LOG_LEVEL_NUMERICS, Logger
from abspec.utils.config import check_alpha
from abspec.utils.errors import BracketError, ConfigurationError, OracleError

logger = Logger().getLogger('ABSPEC_ORACLE', LOG_LEVEL_NUMERICS, LOG_FMT)

X_MAX = 1e4
SCAN_STEP = 0.05
MAX_ORDER = 10.0
MAX_ZERO_INDEX = 20


def bessel_j(nu, x):
    """J_nu(x) for nu >= 0 and 0 <= x <= 1e4.

    Raises:
        ConfigurationError: Negative order or argument.
        OracleError: Argument above 1e4.
    """
    x_arr = np.asarray(x, dtype=float)
    if nu < 0 or np.any(x_arr < 0):
        raise ConfigurationError('bessel_j needs nu >= 0 and x >= 0')
    if np.any(x_arr > X_MAX):
        raise OracleError('bessel_j argument above %g' % X_MAX)
    return special.jv(nu, x)


def bessel_integral_representation(n, x, points=512):
    """J_n(x) for integer n by the midpoint rule on
    (1/pi) int_0^pi cos(n t - x sin t) dt."""
    t = (np.arange(points) + 0.5) * math.pi / points
    return float(np.mean(np.cos(n * t - x * np.sin(t))))


@lru_cache(maxsize=None)
def _zeros(nu, count):
    found = []
    x0 = 1e-6
    f0 = special.jv(nu, x0) if nu > 0 else 1.0
    x = x0
    while len(found) < count:
        x1 = x + SCAN_STEP
        f1 = special.jv(nu, x1)
        if f1 == 0.0:
            found.append(x1)
            x1 += SCAN_STEP
            f1 = special.jv(nu, x1)
        elif f0 * f1 < 0.0:
            found.append(brentq(lambda s: special.jv(nu, s), x, x1,
                                xtol=1e-15, rtol=4 * np.finfo(float).eps,
                                maxiter=200))
        x, f0 = x1, f1
        if x > X_MAX:
            raise BracketError('no bracket for zero %d of J_%g' % (count, nu))
    return tuple(found)


def bessel_zero(nu, m):
    """m-th positive zero of J_nu.

    Zeros are bracketed by a sign scan finer than their spacing, refined
    by Brent's method, and checked against the interlacing
    j_{nu,m} < j_{nu+1,m} < j_{nu,m+1}.

    Raises:
        ConfigurationError: nu outside [0, 10] or m outside [1, 20].
        BracketError: Interlacing violated.
    """
    if not 0.0 <= nu <= MAX_ORDER:
        raise ConfigurationError('bessel_zero needs 0 <= nu <= %g' % MAX_ORDER)
    if not 1 <= m <= MAX_ZERO_INDEX:
        raise ConfigurationError('bessel_zero needs 1 <= m <= %d'
                                 % MAX_ZERO_INDEX)
    zeros = _zeros(float(nu), m + 1)
    lo, hi = zeros[m - 1], zeros[m]
    if special.jv(nu + 1.0, lo) * special.jv(nu + 1.0, hi) >= 0.0:
        raise BracketError('interlacing check failed for j_{%g,%d}' % (nu, m))
    return lo


@dataclass(frozen=True)
class DiskEntry:
    """One separated eigenpair: mode j, zero index m, order nu = |alpha - j|."""
    j: int
    m: int
    nu: float
    zero: float

    @property
    def lam(self):
        return self.zero ** 2

    @property
    def k(self):
        return self.j


@dataclass(frozen=True)
class DiskEigenTable:
    alpha: float
    entries: Tuple[DiskEntry, ...]

    @property
    def lambdas(self):
        return np.array([e.lam for e in self.entries])

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def to_frame(self):
        return pd.DataFrame({'j': [e.j for e in self.entries],
                             'm': [e.m for e in self.entries],
                             'nu': [e.nu for e in self.entries],
                             'zero': [e.zero for e in self.entries],
                             'lambda': [e.lam for e in self.entries]})


def disk_spectrum(alpha, count):
    """Lowest count eigenvalues of the unit disk with central pole.

    The mode window j in [-J, J] and the zero index window grow until no
    pair outside them can fall below the count-th eigenvalue.

    Raises:
        ConfigurationError: Bad alpha or count < 1.
    """
    check_alpha(alpha)
    if count < 1:
        raise ConfigurationError('count must be >= 1')
    J, M = 3, 3
    while True:
        entries = []
        for j in range(-J, J + 1):
            nu = abs(alpha - j)
            if nu > MAX_ORDER:
                continue
            for m in range(1, M + 1):
                entries.append(DiskEntry(j, m, nu, bessel_zero(nu, m)))
        entries.sort(key=lambda e: (e.lam, e.j, e.m))
        if len(entries) >= count:
            threshold = entries[count - 1].lam
            # j_{nu,1}^2 > nu (nu + 2) and j_{nu,m} > (m - 1/4) pi
            nu_out = J + 1 - max(alpha, 1 - alpha)
            modes_ok = nu_out * (nu_out + 2) > threshold
            zeros_ok = ((M + 0.75) * math.pi) ** 2 > threshold
            if modes_ok and zeros_ok:
                break
            if not modes_ok:
                J += 2
            if not zeros_ok:
                M += 2
        else:
            J += 2
            M += 2
        if J > MAX_ORDER or M > MAX_ZERO_INDEX:
            raise OracleError('count %d exceeds the oracle range' % count)
    logger.debug('disk spectrum alpha=%g: window J=%d, M=%d', alpha, J, M)
    return DiskEigenTable(float(alpha), tuple(entries[:count]))


def normalization_constant(entry):
    """c with c J_nu(z r) e^{ijt} of unit L2 norm on the unit disk."""
    return 1.0 / (math.sqrt(math.pi) * abs(special.jv(entry.nu + 1.0,
                                                      entry.zero)))


def normalization_by_quadrature(entry):
    """Same constant from quad of 2 pi int_0^1 r J_nu(z r)^2 dr."""
    value, _ = quad(lambda r: r * special.jv(entry.nu, entry.zero * r) ** 2,
                    0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    return 1.0 / math.sqrt(2.0 * math.pi * value)


def disk_eigenfunction(alpha, entry, x):
    """c J_nu(z |x|) e^{ij angle(x)}, extended by zero outside the disk."""
    x = np.asarray(x, dtype=float)
    r = np.hypot(x[..., 0], x[..., 1])
    t = np.arctan2(x[..., 1], x[..., 0])
    c = normalization_constant(entry)
    radial = special.jv(entry.nu, entry.zero * np.minimum(r, 1.0))
    values = c * radial * np.exp(1j * entry.j * t)
    return np.where(r <= 1.0, values, 0.0)


def oracle_beta(alpha, entry):
    """Leading coefficient: u = beta r^nu e^{ijt}/sqrt(2 pi) + o(r^nu)."""
    c = normalization_constant(entry)
    return (SQRT_2PI * c * (entry.zero / 2.0) ** entry.nu
            / special.gamma(1.0 + entry.nu))


def radial_ode_residual(alpha, entry, r):
    """-R'' - R'/r + nu^2 R/r^2 - lambda R for R(r) = J_nu(z r)."""
    r = np.asarray(r, dtype=float)
    z, nu = entry.zero, entry.nu
    R = special.jv(nu, z * r)
    dR = z * special.jvp(nu, z * r, 1)
    d2R = z * z * special.jvp(nu, z * r, 2)
    return -d2R - dR / r + nu * nu * R / (r * r) - entry.lam * R
