import math

import numpy as np
import pytest
from scipy import special

import abspec.almgren as almgren
from abspec.assembly import assemble
from abspec.eigensolve import solve_lowest
from abspec.gauge import PoleConfig
from abspec.geometry import make_disk_domain, mesh_domain
from abspec.oracle import disk_spectrum
from abspec.utils.config import default_grading
from abspec.utils.errors import (ConfigurationError, PositivityError,
                                 WindowError)

NU = 0.3
RADII = np.linspace(0.2, 1.0, 81)


def power_curve(nu=NU, radii=RADII):
    # psi_nu: H = r^{2 nu} and E = nu r^{2 nu}
    return almgren.AlmgrenCurve.from_arrays(radii, radii ** (2 * nu),
                                            nu * radii ** (2 * nu))

############### SYNTHETIC CURVES ###############


def test_from_arrays():
    curve = power_curve()
    np.testing.assert_allclose(curve.N, NU)
    assert curve.lam == 0.0
    assert curve.normal_flux is None


def test_dH_identity():
    assert almgren.dH_identity_check(power_curve()) < 1e-3
    wrong = almgren.AlmgrenCurve.from_arrays(RADII, RADII ** 0.6,
                                             0.5 * RADII ** 0.6)
    assert almgren.dH_identity_check(wrong) > 0.3
    with pytest.raises(WindowError):
        almgren.dH_identity_check(power_curve(radii=RADII[:4]))


def test_dE_identity_with_pole_term():
    lam, M = 5.0, 0.05
    r = RADII
    # E' = 2 flux - (2/r)(M + lam mass) with flux = nu^2 r^{2 nu - 1}, mass = r^2
    E = NU * r ** (2 * NU) - 2.0 * M * np.log(r) - lam * r ** 2
    H = r ** (2 * NU)
    curve = almgren.AlmgrenCurve(radii=r, H=H, E=E, N=E / H, center=(0.0, 0.0),
                                 lam=lam, mass=r ** 2,
                                 normal_flux=NU ** 2 * r ** (2 * NU - 1))
    assert almgren.dE_identity_check(curve, M) < 1e-3
    assert almgren.dE_identity_check(curve, 0.0) > 0.01
    with pytest.raises(ConfigurationError):
        almgren.dE_identity_check(power_curve())


def test_frequency_bound():
    curve = power_curve()
    assert almgren.frequency_bound_check(curve, NU, 0.01, (0.3, 0.8))
    assert not almgren.frequency_bound_check(curve, 0.2, 0.05, (0.3, 0.8))
    with pytest.raises(WindowError):
        almgren.frequency_bound_check(curve, NU, 0.01, (0.1, 0.8))
    with pytest.raises(WindowError):
        almgren.frequency_bound_check(curve, NU, 0.01, (0.8, 0.3))


def test_lower_growth():
    passed, worst = almgren.lower_growth_check(power_curve(), NU ** 2, 1.0, 1.0)
    assert passed and worst >= 1.0
    # Growth r^{0.2} is slower than the guaranteed r^{0.4} when Lam = 0
    slow = power_curve(nu=0.1)
    passed, worst = almgren.lower_growth_check(slow, NU ** 2, 0.0, 1.0)
    assert not passed and worst < 1.0
    with pytest.raises(WindowError):
        almgren.lower_growth_check(power_curve(), NU ** 2, 1.0, 0.1)


def test_perturbed_monotonicity():
    assert almgren.perturbed_monotonicity_check(power_curve(), 0.1, 1.0)
    falling = almgren.AlmgrenCurve.from_arrays(RADII, np.ones_like(RADII),
                                               10.0 * (1.0 - RADII))
    assert not almgren.perturbed_monotonicity_check(falling, 0.1, 1.0)
    with pytest.raises(ConfigurationError):
        almgren.perturbed_frequency(power_curve(), 2.0, 1.0)


@pytest.mark.parametrize(
    'beta0,beta1,a,expected',
    [
        (1.0, 1.0, (0.1, 0.0), 0.042),
        (1.0, 1.0, (0.0, 0.1), 0.0),
        (1.0, 1j, (0.0, 0.1), -0.042),
        (2.0, -0.5, (0.1, 0.0), -0.042),
    ]
)
def test_pole_term(beta0, beta1, a, expected):
    term = almgren.pole_term(beta0, beta1, a, 0.3)
    assert term.value == pytest.approx(expected, abs=1e-15)
    assert abs(term.value) <= term.bound * (1 + 1e-12)
    assert term.bound == pytest.approx(0.042 * abs(beta0) * abs(beta1))

############### MESH CURVES ###############


@pytest.fixture(scope='module')
def ground_curve(fine_mesh, fine_ground, cfg0):
    radii = np.linspace(0.25, 0.6, 15)
    return almgren.frequency_curve(fine_mesh, fine_ground.nodal(),
                                   fine_ground.lam, cfg0, radii)


def test_frequency_curve_of_ground_state(ground_curve, alpha):
    entry = disk_spectrum(alpha, 1)[0]
    kr = entry.k * ground_curve.radii
    # N(r) = r d/dr log J_nu(kr) for the disk ground state
    exact = kr * special.jvp(entry.nu, kr) / special.jv(entry.nu, kr)
    np.testing.assert_allclose(ground_curve.N, exact, atol=0.1)
    assert np.all(ground_curve.N < alpha + 0.01)
    assert almgren.dH_identity_check(ground_curve) < 0.1
    assert np.all(ground_curve.normal_flux > 0.0)
    assert np.all(np.diff(ground_curve.mass) > 0.0)


def test_frequency_curve_errors(fine_mesh, fine_ground, cfg0):
    values = fine_ground.nodal()
    with pytest.raises(WindowError):
        almgren.frequency_curve(fine_mesh, values, 1.0, cfg0, [0.4, 0.3])
    with pytest.raises(WindowError):
        almgren.frequency_curve(fine_mesh, values, 1.0,
                                PoleConfig(0.3, (0.1, 0.0)), [0.05, 0.3])
    with pytest.raises(WindowError):
        almgren.frequency_curve(fine_mesh, values, 1.0, cfg0, [0.3, 1.2])
    with pytest.raises(PositivityError):
        almgren.frequency_curve(fine_mesh, np.zeros_like(values), 1.0, cfg0,
                                [0.3, 0.4])


def test_poincare(fine_mesh, fine_ground, cfg0):
    result = almgren.poincare_check(fine_mesh, fine_ground.nodal(), cfg0, 0.5)
    assert result.passed
    assert result.lhs > 0.0
    with pytest.raises(WindowError):
        almgren.poincare_check(fine_mesh, fine_ground.nodal(),
                               PoleConfig(0.3, (0.3, 0.0)), 0.2)


def test_inequality_checks(system0, ground0):
    checks = almgren.inequality_checks(system0, ground0.vector)
    assert [r for r, _ in checks.hardy] == [0.25, 0.5]
    assert checks.poincare_radius == 0.5
    assert checks.poincare is not None
    assert checks.hardy_passed and checks.poincare_passed and checks.passed
    assert 0.0 < checks.hardy_ratio <= 1.05


def test_inequality_checks_skip_radii(system_a, spectrum_a):
    u = spectrum_a[1].vector
    # Radius 2 leaves the unit disk; the pole at 0.1 is outside D_0.05
    checks = almgren.inequality_checks(system_a, u, hardy_radii=(0.25, 2.0),
                                       poincare_radius=0.05)
    assert [r for r, _ in checks.hardy] == [0.25]
    assert checks.poincare is None
    assert checks.poincare_passed
    assert checks.passed


def test_local_scalings_need_moved_pole(fine_mesh, fine_ground, cfg0):
    with pytest.raises(ConfigurationError):
        almgren.local_scalings(fine_mesh, fine_ground.nodal(), cfg0, 2.0, 1.0)


def test_normal_flux_leaves_domain(fine_mesh, fine_ground, cfg0):
    with pytest.raises(WindowError):
        almgren.normal_flux(fine_mesh, cfg0, fine_ground.nodal(), (0.0, 0.0),
                            1.5)
    assert math.isfinite(almgren.normal_flux(fine_mesh, cfg0,
                                             fine_ground.nodal(), (0.0, 0.0),
                                             0.4))

############### ACCEPTANCE SCALE ###############


@pytest.mark.slow
def test_dH_identity_at_acceptance_resolution(alpha):
    mesh = mesh_domain(make_disk_domain(1.0, 128), (0.0, 0.0), 0.05,
                       default_grading(alpha))
    cfg = PoleConfig(alpha, (0.0, 0.0))
    ground = solve_lowest(assemble(mesh, cfg), 2)[1]
    curve = almgren.frequency_curve(mesh, ground.nodal(), ground.lam, cfg,
                                    np.linspace(0.1, 0.5, 17))
    assert almgren.dH_identity_check(curve) < 0.02
