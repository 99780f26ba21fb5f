import math

import numpy as np
import pytest

import abspec.spectral as spectral
from abspec.gauge import psi_profile
from abspec.oracle import disk_eigenfunction, disk_spectrum, oracle_beta
from abspec.utils.errors import (ConfigurationError, DegenerateFieldError,
                                 OutOfDomainError, UnderResolvedError,
                                 WindowError)

ALPHA = 0.3
RADII = np.linspace(0.02, 0.6, 160)
R_GRID = (0.2, 0.3, 0.4, 0.5)


def two_modes(points):
    return psi_profile(ALPHA, 0, points) + 0.5 * psi_profile(ALPHA, 1, points)


@pytest.fixture(scope='module')
def two_mode_trace():
    return spectral.fourier_trace_from_callable(two_modes, (0.0, 0.0), RADII,
                                                ALPHA, Q=128, J=4)


@pytest.fixture(scope='module')
def disk_entries():
    return disk_spectrum(ALPHA, 2)

############### CIRCLE TRACES ###############


def test_fourier_modes_single_mode():
    t = 0.3 + 2 * math.pi * np.arange(64) / 64
    trace = spectral.CircleTrace((0.0, 0.0), 0.5, 0.5 * np.exp(3j * t), 0.3)
    j, v = spectral.fourier_modes(trace)
    assert j[0] == -32 and j[-1] == 31
    assert v[j == 3][0] == pytest.approx(0.5 * math.sqrt(2 * math.pi))
    assert np.max(np.abs(v[j != 3])) < 1e-14


def test_parseval():
    rng = np.random.default_rng(3)
    samples = rng.standard_normal(128) + 1j * rng.standard_normal(128)
    trace = spectral.CircleTrace((0.0, 0.0), 1.0, samples, 0.7)
    assert spectral.parseval_defect(trace) < 1e-12
    empty = spectral.CircleTrace((0.0, 0.0), 1.0, np.zeros(64))
    assert spectral.parseval_defect(empty) == 0.0


def test_trace_circle_on_mesh(fine_mesh):
    values = fine_mesh.vertices[:, 0].astype(complex)
    trace = spectral.trace_circle(fine_mesh, values, (0.0, 0.0), 0.5, Q=64)
    assert trace.Q == 64
    # int_0^{2 pi} (r cos t)^2 dt
    assert trace.boundary_mass() == pytest.approx(math.pi * 0.25, rel=1e-12)
    np.testing.assert_allclose(trace.angles[:2], [0.0, 2 * math.pi / 64])


def test_trace_circle_errors(disk_mesh):
    values = np.zeros(disk_mesh.n_vertices)
    with pytest.raises(OutOfDomainError):
        spectral.trace_circle(disk_mesh, values, (0.0, 0.0), 1.5)
    with pytest.raises(UnderResolvedError):
        spectral.trace_circle(disk_mesh, values, (0.0, 0.0), 1e-6)
    with pytest.raises(UnderResolvedError):
        spectral.trace_circle(disk_mesh, values, (0.0, 0.0), 0.0)
    with pytest.raises(ConfigurationError):
        spectral.trace_circle(disk_mesh, values, (0.0, 0.0), 0.5, Q=100)


def test_fourier_trace_errors(disk_mesh):
    values = np.zeros(disk_mesh.n_vertices)
    with pytest.raises(ConfigurationError):
        spectral.fourier_trace(disk_mesh, values, (0.0, 0.0), [0.4, 0.3],
                               ALPHA)
    with pytest.raises(ConfigurationError):
        spectral.fourier_trace(disk_mesh, values, (0.0, 0.0), [0.3, 0.4],
                               ALPHA, Q=64, J=40)
    with pytest.raises(ConfigurationError):
        spectral.fourier_trace_from_callable(two_modes, (0.0, 0.0), RADII,
                                             ALPHA, Q=96)

############### BETA COEFFICIENTS ###############


def test_two_mode_betas(two_mode_trace):
    betas = spectral.estimate_betas(two_mode_trace, 0.0, R_GRID)
    assert betas.beta(0) == pytest.approx(1.0, abs=1e-9)
    assert betas.beta(1) == pytest.approx(0.5, abs=1e-9)
    assert betas[0].spread < 1e-9
    assert betas[2].negligible
    assert betas.modes == list(range(-4, 5))
    assert betas.beta(7) == 0j
    order = spectral.vanishing_order(two_mode_trace, betas)
    assert order.k == 0
    assert order.order == pytest.approx(ALPHA)
    assert order.slope_consistent
    error = spectral.leading_modes_error(two_mode_trace, betas)
    assert np.max(error) < 1e-9


def test_power_law_fit(two_mode_trace):
    slope, r2, exponent = spectral.power_law_fit(two_mode_trace, 1)
    assert slope == pytest.approx(0.7, abs=1e-10)
    assert r2 == pytest.approx(1.0, abs=1e-10)
    # Exact power law: remainder at rounding level
    assert math.isnan(exponent)
    with pytest.raises(WindowError):
        spectral.power_law_fit(two_mode_trace, 1, window=(0.1, 0.101))


def test_reconstruct_and_truncate(two_mode_trace):
    r = RADII[40]
    t = np.array([0.0, 1.0, 2.5])
    points = r * np.stack([np.cos(t), np.sin(t)], axis=1)
    np.testing.assert_allclose(
        spectral.reconstruct_expansion(two_mode_trace, r, t, 3),
        two_modes(points), atol=1e-12)
    assert np.max(spectral.truncation_error(two_mode_trace, 1)) < 1e-12
    np.testing.assert_allclose(spectral.truncation_error(two_mode_trace, 0),
                               0.5 * RADII ** 0.7, rtol=1e-10)
    with pytest.raises(WindowError):
        spectral.reconstruct_expansion(two_mode_trace, 0.9, t, 3)


def test_mode_lookup(two_mode_trace):
    np.testing.assert_allclose(two_mode_trace.mode(0), RADII ** 0.3)
    assert two_mode_trace.window_modes.tolist() == list(range(-4, 5))
    np.testing.assert_allclose(two_mode_trace.H(),
                               RADII ** 0.6 + 0.25 * RADII ** 1.4)
    with pytest.raises(ConfigurationError):
        two_mode_trace.mode(1000)


def test_beta_window(two_mode_trace):
    with pytest.raises(WindowError):
        spectral.beta_coefficient(two_mode_trace, 0, 0.0, (0.3, 0.9))
    with pytest.raises(WindowError):
        spectral.beta_coefficient(two_mode_trace, 0, 0.0, (0.01, 0.3))


@pytest.mark.parametrize('index', [0, 1])
def test_oracle_betas(disk_entries, index):
    entry = disk_entries[index]
    ft = spectral.fourier_trace_from_callable(
        lambda p: disk_eigenfunction(ALPHA, entry, p), (0.0, 0.0), RADII,
        ALPHA, Q=128, J=4)
    betas = spectral.estimate_betas(ft, entry.lam, R_GRID)
    assert betas.beta(entry.j) == pytest.approx(oracle_beta(ALPHA, entry),
                                                rel=1e-4)
    assert betas[entry.j].resolved
    vanishing = spectral.vanishing_order(ft, betas)
    assert vanishing.k == entry.j
    assert vanishing.order == pytest.approx(entry.nu)


def test_degenerate_field():
    ft = spectral.fourier_trace_from_callable(
        lambda p: np.zeros(len(p)), (0.0, 0.0), RADII, ALPHA, Q=64, J=2)
    with pytest.raises(DegenerateFieldError):
        spectral.estimate_betas(ft, 1.0, R_GRID)

############### MESH WINDOWS ###############


def test_trace_radii(fine_mesh):
    radii = spectral.trace_radii(fine_mesh, (0.0, 0.0), 0.5, R_GRID)
    assert np.all(np.diff(radii) > 0.0)
    assert radii[-1] == pytest.approx(0.5)
    assert radii[0] < 0.2
    for R in R_GRID:
        assert np.any(np.isclose(radii, R))
    lo = spectral.resolved_radius(fine_mesh, (0.0, 0.0), 0.5)
    assert lo == radii[0]


def test_unresolved_window(uniform_mesh):
    with pytest.raises(WindowError):
        spectral.trace_radii(uniform_mesh, (0.0, 0.0), 0.3)


def test_mesh_betas_against_oracle(fine_mesh, fine_ground, disk_entries):
    radii = spectral.trace_radii(fine_mesh, (0.0, 0.0), 0.5, R_GRID)
    ft = spectral.fourier_trace(fine_mesh, fine_ground.nodal(), (0.0, 0.0),
                                radii, ALPHA, Q=128, J=4)
    assert fine_ground.lam == pytest.approx(disk_entries[0].lam, rel=0.02)
    betas = spectral.estimate_betas(ft, fine_ground.lam, R_GRID)
    assert abs(betas.beta(0)) == pytest.approx(oracle_beta(ALPHA,
                                                           disk_entries[0]),
                                               rel=0.1)
    vanishing = spectral.vanishing_order(ft, betas)
    assert vanishing.k == 0
    assert vanishing.order == pytest.approx(0.3)
    # Only the radial mode survives on a disk with the pole at the center
    assert abs(betas.beta(1)) < 0.05 * abs(betas.beta(0))
