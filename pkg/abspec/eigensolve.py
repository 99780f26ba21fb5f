"""Lowest eigenpairs of K u = lambda M u, normalization and phase alignment."""

import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np
import scipy.linalg as la
import scipy.sparse.linalg as spla

from abspec.gauge import gauge_phase
from abspec.geometry import NodalField
from abspec.quadrature import region_quadrature
from abspec.utils.common import LOG_FMT, LOG_LEVEL_NUMERICS, Logger
from abspec.utils.errors import (ConfigurationError, EigenSolverError,
                                 MassMatrixError, PhaseAmbiguityError)

logger = Logger().getLogger('ABSPEC_EIGENSOLVE', LOG_LEVEL_NUMERICS, LOG_FMT)

DENSE_LIMIT = 600
MAX_ATTEMPTS = 4
AMBIGUOUS_PHASE = 1e-10


@dataclass(frozen=True, eq=False)
class EigenPair:
    """Eigenvalue and M-normalized eigenvector over the free dofs.

    Args:
        lam (float): Eigenvalue.
        vector (np.ndarray): Complex coefficients on the free dofs.
        l2_norm (float): M-norm of vector.
        residual (float): |K u - lam M u| / (lam |M u|).
        index (int): 1-based position in the spectrum.
        free_dofs (np.ndarray): Vertex index of every coefficient.
        n_vertices (int): Number of mesh vertices.
        phase_aligned_against (str, optional): Label of the reference
            the phase was fixed against.
    """
    lam: float
    vector: np.ndarray
    l2_norm: float
    residual: float
    index: int
    free_dofs: np.ndarray
    n_vertices: int
    phase_aligned_against: Optional[str] = None

    def nodal(self):
        """Values at every mesh vertex (zero on boundary and pole)."""
        out = np.zeros(self.n_vertices, dtype=complex)
        out[self.free_dofs] = self.vector
        return out

    def scaled(self, factor, label=None):
        return replace(self, vector=self.vector * factor,
                       phase_aligned_against=label)


@dataclass(frozen=True, eq=False)
class SpectrumSlice:
    """Lowest eigenpairs in nondecreasing order around a target index."""
    pairs: Tuple[EigenPair, ...]
    target: int = 1

    @property
    def eigenvalues(self):
        return np.array([p.lam for p in self.pairs])

    def __len__(self):
        return len(self.pairs)

    def __getitem__(self, n):
        """Pair with 1-based index n."""
        return self.pairs[n - 1]

    def gaps(self, n0):
        lam = self.eigenvalues
        below = math.inf if n0 == 1 else float(lam[n0 - 1] - lam[n0 - 2])
        above = math.inf if n0 >= len(lam) else float(lam[n0] - lam[n0 - 1])
        return below, above

    @property
    def gap_below_target(self):
        return self.gaps(self.target)[0]

    @property
    def gap_above_target(self):
        return self.gaps(self.target)[1]

    @property
    def simple(self):
        """Both gaps around the target exceed the default relative gap."""
        return check_simplicity(self, self.target)


def _check_mass(M):
    diag = M.diagonal()
    if np.any(diag <= 0.0):
        raise MassMatrixError('mass matrix has a non positive diagonal entry')


def _preconditioner(K, kind):
    if kind == 'jacobi':
        inv = 1.0 / K.diagonal()
        return spla.LinearOperator(K.shape, matvec=lambda x: inv * x.ravel(),
                                   matmat=lambda X: inv[:, None] * X,
                                   dtype=complex)
    if kind == 'ilu':
        ilu = spla.spilu(K.tocsc(), drop_tol=1e-6, fill_factor=20)
        return spla.LinearOperator(K.shape, matvec=ilu.solve,
                                   matmat=ilu.solve, dtype=complex)
    raise ConfigurationError('unknown preconditioner %r' % kind)


def relative_residuals(K, M, lam, V):
    KV = K @ V
    MV = M @ V
    num = np.linalg.norm(KV - MV * lam[None, :], axis=0)
    den = np.abs(lam) * np.linalg.norm(MV, axis=0)
    den = np.where(den == 0.0, 1.0, den)
    return num / den


def _dense(K, M, m):
    try:
        lam, V = la.eigh(K.toarray(), M.toarray(), subset_by_index=[0, m - 1])
    except la.LinAlgError as err:
        raise MassMatrixError('mass matrix is not positive definite: %s' % err)
    return lam, V


def _lobpcg(K, M, m, tol, seed, preconditioner, maxiter):
    n = K.shape[0]
    block = m + min(max(2, m), 10)
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, block)) + 1j * rng.standard_normal((n, block))
    X, _ = np.linalg.qr(X)
    P = _preconditioner(K, preconditioner)
    inner_tol = tol
    residuals = None
    for attempt in range(1, MAX_ATTEMPTS + 1):
        lam, X = spla.lobpcg(K, X, B=M, M=P, tol=inner_tol, maxiter=maxiter,
                             largest=False)
        order = np.argsort(lam)
        lam, X = lam[order], X[:, order]
        residuals = relative_residuals(K, M, lam[:m], X[:, :m])
        logger.info('lobpcg attempt %d: max relative residual %.3e',
                    attempt, residuals.max())
        if residuals.max() < tol:
            return lam[:m], X[:, :m]
        inner_tol *= 0.1
        maxiter *= 2
    logger.warning('lobpcg stalled at residual %.3e, refining by shift-invert',
                   residuals.max())
    try:
        lam, V = spla.eigsh(K, k=m, M=M, sigma=0.0, which='LM',
                            v0=X[:, 0], tol=tol * 1e-2)
    except (RuntimeError, spla.ArpackNoConvergence) as err:
        raise EigenSolverError('no convergence: %s' % err, residuals)
    order = np.argsort(lam)
    lam, V = lam[order], V[:, order]
    residuals = relative_residuals(K, M, lam, V)
    if residuals.max() >= tol:
        raise EigenSolverError('eigenpairs did not reach the requested '
                               'residual', residuals)
    return lam, V


def _canonical_phase(v):
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def solve_lowest(system, m, tol=1e-8, seed=0, preconditioner='ilu',
                 maxiter=400, dense_limit=DENSE_LIMIT):
    """Lowest m eigenpairs of an assembled system.

    Small systems are solved densely; larger ones by LOBPCG with an
    incomplete LU or Jacobi preconditioner from a seeded random block.
    Eigenvectors are M-normalized, with their largest entry real and
    positive.

    Args:
        system (AssembledSystem): Assembled system.
        m (int): Number of pairs.
        tol (float, optional): Relative residual target. Defaults to 1e-8.
        seed (int, optional): Seed of the starting block. Defaults to 0.
        preconditioner (str, optional): 'ilu' or 'jacobi'.
        maxiter (int, optional): LOBPCG iterations per attempt.
        dense_limit (int, optional): Dense solve below this dimension.

    Raises:
        ConfigurationError: m outside [1, dim // 4].
        MassMatrixError: M not positive definite.
        EigenSolverError: Residual target not reached.

    Returns:
        SpectrumSlice: Pairs in nondecreasing order.
    """
    K, M = system.stiffness, system.mass
    n = K.shape[0]
    if m < 1 or m > n // 4:
        raise ConfigurationError('need 1 <= m <= dim/4 = %d, got %d'
                                 % (n // 4, m))
    _check_mass(M)
    block = m + min(max(2, m), 10)
    if n <= dense_limit or n < 5 * block:
        lam, V = _dense(K, M, m)
    else:
        lam, V = _lobpcg(K, M, m, tol, seed, preconditioner, maxiter)

    pairs = []
    norms = np.sqrt(np.einsum('ij,ij->j', V.conj(), M @ V).real)
    V = V / norms[None, :]
    residuals = relative_residuals(K, M, lam, V)
    if residuals.max() >= tol:
        raise EigenSolverError('eigenpairs did not reach the requested '
                               'residual', residuals)
    for i in range(m):
        v = _canonical_phase(V[:, i])
        l2 = math.sqrt(np.vdot(v, M @ v).real)
        pairs.append(EigenPair(lam=float(lam[i]), vector=v, l2_norm=l2,
                               residual=float(residuals[i]), index=i + 1,
                               free_dofs=system.free_dofs,
                               n_vertices=system.mesh.n_vertices))
    logger.info('lowest %d eigenvalues: %s', m,
                ', '.join('%.10g' % p.lam for p in pairs))
    return SpectrumSlice(tuple(pairs))


def check_simplicity(spectrum, n0, rel_gap=1e-3):
    """True iff both gaps around lambda_n0 exceed rel_gap * lambda_n0.

    The slice must extend past n0 so that the gap above is known.
    """
    if not 1 <= n0 <= len(spectrum) - 1:
        raise ConfigurationError('n0=%d needs pairs 1..%d, the slice has %d'
                                 % (n0, n0 + 1, len(spectrum)))
    below, above = spectrum.gaps(n0)
    return bool(min(below, above) > rel_gap * spectrum[n0].lam)


def m_orthogonality_defect(spectrum, system):
    """Largest |<phi_i, phi_j>_M| over i != j."""
    V = np.stack([p.vector for p in spectrum.pairs], axis=1)
    G = V.conj().T @ (system.mass @ V)
    np.fill_diagonal(G, 0.0)
    return float(np.abs(G).max()) if G.size else 0.0


def overlap_integral(pair, reference, cfg, mesh, reference_mesh=None,
                     order=4):
    """int e^{i alpha (theta_0^a - theta_a)} phi_a conj(phi_0) dx.

    The integral runs over the mesh of phi_a with elements crossed by the
    segment [0, a] split along it; phi_0 is interpolated from its own mesh.
    """
    u = NodalField(mesh, pair.nodal())
    qset = region_quadrature(mesh, order, cut=cfg.pole, singular=[(0.0, 0.0)])
    if reference_mesh is None or reference_mesh is mesh:
        ref_values = NodalField(mesh, reference.nodal()).at(qset.owners,
                                                            qset.bary)
    else:
        ref_values = NodalField(reference_mesh, reference.nodal())(qset.points)
    values = u.at(qset.owners, qset.bary)
    phase = gauge_phase(cfg, qset.points)
    return complex(qset.integrate(phase * values * np.conj(ref_values)))


def align_phase(pair, reference, cfg, mesh, reference_mesh=None,
                label='reference'):
    """Multiply pair by the unit constant making the overlap real positive.

    Raises:
        PhaseAmbiguityError: If the overlap is below 1e-10 in modulus.
    """
    integral = overlap_integral(pair, reference, cfg, mesh, reference_mesh)
    size = abs(integral)
    if size < AMBIGUOUS_PHASE:
        raise PhaseAmbiguityError(
            'overlap with the reference is %.3e: eigenvectors are probably '
            'mispaired' % size)
    multiplier = np.conj(integral) / size
    return pair.scaled(multiplier, label)


def dump_eigenpair(pair, path):
    """Header with lambda and residual, then ``i re im`` per vertex."""
    values = pair.nodal()
    with open(path, 'w', newline='\n') as file_obj:
        file_obj.write('# lambda %.17g\n' % pair.lam)
        file_obj.write('# residual %.17g\n' % pair.residual)
        for i, value in enumerate(values):
            file_obj.write('%d %.17g %.17g\n' % (i, value.real, value.imag))
    return path
