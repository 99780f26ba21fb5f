"""P1 finite element assembly of the Aharonov-Bohm quadratic forms.

The stiffness matrix discretizes

    q(u, v) = int (i grad + A_a) u . conj((i grad + A_a) v) dx

and the mass matrix int u conj(v) dx. Boundary vertices and the pole
vertex are eliminated, which realizes the homogeneous Dirichlet
condition and the vanishing condition at the pole.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
from skfem import Basis, BilinearForm, ElementTriP1, MeshTri, asm

from abspec.gauge import hardy_constant, vector_potential
from abspec.quadrature import region_quadrature
from abspec.utils.common import LOG_FMT, LOG_LEVEL_NUMERICS, Logger
from abspec.utils.errors import AssemblyError, ConfigurationError

logger = Logger().getLogger('ABSPEC_ASSEMBLY', LOG_LEVEL_NUMERICS, LOG_FMT)

POLE_QUADRATURE_ORDER = 6


def _potential_at(cfg, x):
    """A_a at skfem quadrature points x of shape (2, elements, points)."""
    d0 = x[0] - cfg.pole[0]
    d1 = x[1] - cfg.pole[1]
    r2 = d0 * d0 + d1 * d1
    if np.any(r2 == 0.0):
        raise AssemblyError('a quadrature point coincides with the pole')
    return -cfg.alpha * d1 / r2, cfg.alpha * d0 / r2


def _stiffness_form(cfg):

    @BilinearForm(dtype=np.complex128)
    def magnetic_stiffness(u, v, w):
        a0, a1 = _potential_at(cfg, w.x)
        a_grad_u = a0 * u.grad[0] + a1 * u.grad[1]
        a_grad_v = a0 * v.grad[0] + a1 * v.grad[1]
        grad_grad = u.grad[0] * v.grad[0] + u.grad[1] * v.grad[1]
        return (grad_grad + 1j * (v * a_grad_u - u * a_grad_v)
                + (a0 * a0 + a1 * a1) * u * v)

    return magnetic_stiffness


@BilinearForm
def mass_form(u, v, w):
    return u * v


def skfem_mesh(mesh):
    """scikit-fem MeshTri sharing vertex and element numbering."""
    return MeshTri(np.ascontiguousarray(mesh.vertices.T),
                   np.ascontiguousarray(mesh.triangles.T))


@dataclass(frozen=True, eq=False)
class AssembledSystem:
    """Stiffness and mass restricted to the free degrees of freedom.

    Args:
        mesh (Mesh): Mesh the system lives on.
        cfg (PoleConfig): Circulation and pole.
        stiffness (scipy.sparse.csr_matrix): Complex Hermitian K.
        mass (scipy.sparse.csr_matrix): Real symmetric positive definite M.
        free_dofs (np.ndarray): Vertex index of every free unknown.
        quadrature_order (int): Order used away from the pole.
    """
    mesh: object
    cfg: object
    stiffness: sp.csr_matrix
    mass: sp.csr_matrix
    free_dofs: np.ndarray
    quadrature_order: int
    full_stiffness: Optional[sp.csr_matrix] = None
    full_mass: Optional[sp.csr_matrix] = None

    @property
    def dim(self):
        return len(self.free_dofs)

    def expand(self, u_free):
        """Nodal vector over all vertices, zero on boundary and pole."""
        u_free = np.asarray(u_free)
        if u_free.shape[0] != self.dim:
            raise AssemblyError('expected %d free values, got %d'
                                % (self.dim, u_free.shape[0]))
        out = np.zeros((self.mesh.n_vertices,) + u_free.shape[1:],
                       dtype=complex)
        out[self.free_dofs] = u_free
        return out

    def restrict(self, u_full):
        return np.asarray(u_full)[self.free_dofs]

    def hermiticity_defect(self):
        K = self.stiffness
        return float(abs(K - K.conj().T).max() / abs(K).max())


def assemble(mesh, cfg, quadrature_order=4):
    """Assemble the magnetic stiffness and the mass matrix.

    Elements touching the pole get an order 6 rule, the rest the given
    order.

    Args:
        mesh (Mesh): Mesh whose pole vertex sits at the pole of cfg.
        cfg (PoleConfig): Circulation and pole.
        quadrature_order (int, optional): Order away from the pole
            (>= 4). Defaults to 4.

    Raises:
        ConfigurationError: quadrature_order < 4.
        AssemblyError: Mesh pole vertex and cfg.pole disagree.

    Returns:
        AssembledSystem: The condensed system.
    """
    if quadrature_order < 4:
        raise ConfigurationError('quadrature order must be >= 4')
    pole = np.asarray(cfg.pole)
    if np.linalg.norm(mesh.vertices[mesh.pole_vertex] - pole) > 1e-12 * max(
            1.0, float(np.linalg.norm(pole))):
        raise AssemblyError('mesh pole vertex %r does not match pole %r'
                            % (mesh.pole, cfg.pole))

    m = skfem_mesh(mesh)
    element = ElementTriP1()
    near = mesh.pole_elements
    far = np.setdiff1d(np.arange(mesh.n_triangles), near)
    form = _stiffness_form(cfg)
    near_order = max(POLE_QUADRATURE_ORDER, quadrature_order)
    K = asm(form, Basis(m, element, intorder=near_order, elements=near))
    if len(far):
        K = K + asm(form, Basis(m, element, intorder=quadrature_order,
                                elements=far))
    M = asm(mass_form, Basis(m, element, intorder=2))
    K = sp.csr_matrix(K)
    M = sp.csr_matrix(M)

    fixed = np.zeros(mesh.n_vertices, dtype=bool)
    fixed[mesh.boundary_vertices] = True
    fixed[mesh.pole_vertex] = True
    free = np.flatnonzero(~fixed)
    K_free = K[free][:, free].tocsr()
    M_free = M[free][:, free].tocsr()
    logger.info('assembled %d free dofs (%d vertices, %d elements, alpha=%g, '
                'pole=(%g, %g))', len(free), mesh.n_vertices, mesh.n_triangles,
                cfg.alpha, cfg.pole[0], cfg.pole[1])
    return AssembledSystem(mesh=mesh, cfg=cfg, stiffness=K_free, mass=M_free,
                           free_dofs=free, quadrature_order=quadrature_order,
                           full_stiffness=K, full_mass=M)


def apply_operator(system, u):
    """K u for a vector (or block) over the free dofs.

    Raises:
        AssemblyError: Size mismatch.
    """
    u = np.asarray(u)
    if u.shape[0] != system.dim:
        raise AssemblyError('vector of size %d applied to a system of '
                            'dimension %d' % (u.shape[0], system.dim))
    return system.stiffness @ u


def dump_matrix(K, path):
    """Write a sparse matrix as ``i j re im`` coordinate triplets."""
    coo = sp.coo_matrix(K)
    order = np.lexsort((coo.col, coo.row))
    with open(path, 'w', newline='\n') as file_obj:
        file_obj.write('# %d %d %d\n' % (coo.shape[0], coo.shape[1], coo.nnz))
        for k in order:
            value = complex(coo.data[k])
            file_obj.write('%d %d %.17g %.17g\n' % (coo.row[k], coo.col[k],
                                                     value.real, value.imag))
    return path


# ---------------------------------------------------------------------------- #
#                      Pointwise evaluation and local energies                 #
# ---------------------------------------------------------------------------- #

def field_values(mesh, u_full, owners, bary):
    return np.einsum('pi,pi->p', bary, u_full[mesh.triangles[owners]])


def magnetic_gradient(mesh, cfg, u_full, owners, bary, points):
    """(i grad + A_a) u at points inside the given owner elements."""
    u = field_values(mesh, u_full, owners, bary)
    grad = np.einsum('pi,pij->pj', u_full[mesh.triangles[owners]],
                     mesh.barycentric_gradients[owners])
    return 1j * grad + vector_potential(cfg, points) * u[:, None]


def local_integrals(mesh, cfg, u_full, qset):
    """Energy, mass and Hardy weighted mass of u over a quadrature set."""
    if len(qset) == 0:
        return 0.0, 0.0, 0.0
    u = field_values(mesh, u_full, qset.owners, qset.bary)
    g = magnetic_gradient(mesh, cfg, u_full, qset.owners, qset.bary,
                          qset.points)
    d = qset.points - np.asarray(cfg.pole)
    r2 = np.einsum('ij,ij->i', d, d)
    energy = qset.integrate(np.sum(np.abs(g) ** 2, axis=1))
    mass = qset.integrate(np.abs(u) ** 2)
    weighted = qset.integrate(np.abs(u) ** 2 / r2)
    return float(energy), float(mass), float(weighted)


@dataclass(frozen=True)
class HardyResult:
    energy: float
    weighted_mass: float
    constant: float
    slack: float

    @property
    def ratio(self):
        """weighted_mass * constant / energy, at most 1 in the continuum."""
        if self.energy == 0.0:
            return 0.0 if self.weighted_mass == 0.0 else np.inf
        return self.constant * self.weighted_mass / self.energy

    @property
    def passed(self):
        return self.ratio <= 1.0 + self.slack


def _disk_integrals(system, u_full, radius):
    qset = region_quadrature(system.mesh, system.quadrature_order + 2,
                             disk=(system.cfg.pole, radius))
    return local_integrals(system.mesh, system.cfg, u_full, qset)


def hardy_check(system, u, radius, slack=0.05):
    """Magnetic Hardy inequality on D_radius(a) for a free dof vector u."""
    u_full = system.expand(u)
    energy, _, weighted = _disk_integrals(system, u_full, radius)
    return HardyResult(energy, weighted, hardy_constant(system.cfg.alpha),
                       slack)


def hardy_annulus_check(system, u, r_in, r_out, slack=0.05):
    """Hardy inequality on the annulus D_r_out(a) minus D_r_in(a)."""
    if not 0.0 < r_in < r_out:
        raise ConfigurationError('annulus needs 0 < r_in < r_out')
    u_full = system.expand(u)
    e_out, _, w_out = _disk_integrals(system, u_full, r_out)
    e_in, _, w_in = _disk_integrals(system, u_full, r_in)
    return HardyResult(e_out - e_in, w_out - w_in,
                       hardy_constant(system.cfg.alpha), slack)


def rayleigh_quotient(system, u):
    u = np.asarray(u)
    num = np.vdot(u, system.stiffness @ u).real
    den = np.vdot(u, system.mass @ u).real
    return float(num / den)
