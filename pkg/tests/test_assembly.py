import numpy as np
import pytest

import abspec.assembly as assembly
from abspec.quadrature import element_quadrature
from abspec.utils.errors import AssemblyError, ConfigurationError


def test_system_shapes(system0, disk_mesh):
    n_fixed = len(disk_mesh.boundary_vertices) + 1
    assert system0.dim == disk_mesh.n_vertices - n_fixed
    assert system0.stiffness.shape == (system0.dim, system0.dim)
    assert system0.mass.shape == (system0.dim, system0.dim)
    assert disk_mesh.pole_vertex not in system0.free_dofs
    assert system0.full_stiffness.shape == (disk_mesh.n_vertices,) * 2


@pytest.mark.parametrize('system_name', ['system0', 'system_a'])
def test_stiffness_hermitian(request, system_name):
    system = request.getfixturevalue(system_name)
    assert system.hermiticity_defect() < 1e-12
    M = system.mass
    assert abs(M - M.T).max() <= 1e-14 * abs(M).max()
    assert np.all(M.diagonal() > 0.0)
    assert np.abs(system.stiffness.data.imag).max() > 0.0


def test_assemble_errors(disk_mesh, cfg0, cfg_a):
    with pytest.raises(ConfigurationError):
        assembly.assemble(disk_mesh, cfg0, quadrature_order=3)
    # The mesh pole sits at the origin, not at a
    with pytest.raises(AssemblyError):
        assembly.assemble(disk_mesh, cfg_a)


def test_expand_restrict(system0):
    u = np.arange(system0.dim) + 1j
    full = system0.expand(u)
    assert full[system0.mesh.pole_vertex] == 0.0
    assert np.all(full[system0.mesh.boundary_vertices] == 0.0)
    np.testing.assert_array_equal(system0.restrict(full), u)
    with pytest.raises(AssemblyError):
        system0.expand(np.zeros(3))


def test_apply_operator(system0):
    u = np.ones(system0.dim, dtype=complex)
    np.testing.assert_allclose(assembly.apply_operator(system0, u),
                               system0.stiffness @ u)
    with pytest.raises(AssemblyError):
        assembly.apply_operator(system0, np.ones(system0.dim + 1))


def test_rayleigh_quotient(system0, ground0):
    assert assembly.rayleigh_quotient(system0, ground0.vector) == pytest.approx(
        ground0.lam, rel=1e-10)


def test_local_integrals_match_matrices(system0, ground0, disk_mesh, cfg0):
    u_full = ground0.nodal()
    energy, mass, weighted = assembly.local_integrals(
        disk_mesh, cfg0, u_full, element_quadrature(disk_mesh, 6))
    assert mass == pytest.approx(1.0, rel=1e-10)
    assert energy == pytest.approx(ground0.lam, rel=1e-3)
    assert weighted > mass


def test_magnetic_gradient_of_constant(disk_mesh, cfg0):
    # grad of a constant vanishes, leaving A u
    u_full = np.full(disk_mesh.n_vertices, 2.0 + 0j)
    owners = np.array([5, 9])
    bary = np.full((2, 3), 1.0 / 3.0)
    points = disk_mesh.centroids[owners]
    g = assembly.magnetic_gradient(disk_mesh, cfg0, u_full, owners, bary,
                                   points)
    r2 = np.sum(points ** 2, axis=1)
    expected = 2.0 * 0.3 * np.stack([-points[:, 1], points[:, 0]], axis=1) \
        / r2[:, None]
    np.testing.assert_allclose(g, expected, rtol=1e-10)


@pytest.mark.parametrize('radius', [0.1, 0.3, 0.6])
def test_hardy_check(system0, ground0, radius):
    result = assembly.hardy_check(system0, ground0.vector, radius)
    assert result.energy > 0.0
    assert result.passed
    assert result.ratio <= 1.05


def test_hardy_annulus_check(system_a, spectrum_a):
    result = assembly.hardy_annulus_check(system_a, spectrum_a[1].vector,
                                          0.1, 0.4)
    assert result.passed
    with pytest.raises(ConfigurationError):
        assembly.hardy_annulus_check(system_a, spectrum_a[1].vector, 0.4, 0.1)


def test_hardy_result_ratio():
    assert assembly.HardyResult(0.0, 0.0, 0.09, 0.05).ratio == 0.0
    assert np.isinf(assembly.HardyResult(0.0, 1.0, 0.09, 0.05).ratio)
    assert not assembly.HardyResult(1.0, 20.0, 0.09, 0.05).passed


def test_dump_matrix(tmp_path, system0):
    path = str(tmp_path / 'stiffness.txt')
    assembly.dump_matrix(system0.stiffness, path)
    with open(path) as file_obj:
        lines = file_obj.read().splitlines()
    rows, cols, nnz = (int(x) for x in lines[0][2:].split())
    assert rows == cols == system0.dim
    assert nnz == len(lines) - 1
    first = lines[1].split()
    assert len(first) == 4
    keys = [tuple(int(x) for x in line.split()[:2]) for line in lines[1:]]
    assert keys == sorted(keys)
