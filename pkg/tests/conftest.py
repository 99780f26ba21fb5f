import pytest

from abspec.assembly import assemble
from abspec.asymptotics import solve_limit_profile
from abspec.eigensolve import solve_lowest
from abspec.gauge import PoleConfig
from abspec.geometry import make_disk_domain, mesh_domain, remesh_for_pole
from abspec.utils.config import RunConfig, default_grading

# Dense eigensolves keep the fixtures deterministic and fast at this size.
DENSE = 5000
FINE_H_MAX = 0.12


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False,
                     help='Also run the acceptance scale tests.')


def pytest_configure(config):
    config.addinivalue_line('markers',
                            'slow: acceptance scale run (minutes)')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)

############### DOMAINS AND MESHES ###############


@pytest.fixture(scope='session')
def alpha():
    return 0.3


@pytest.fixture(scope='session')
def disk_domain():
    return make_disk_domain(1.0, 48)


@pytest.fixture(scope='session')
def disk_mesh(disk_domain, alpha):
    return mesh_domain(disk_domain, (0.0, 0.0), 0.2, default_grading(alpha))


@pytest.fixture(scope='session')
def uniform_mesh(disk_domain):
    return mesh_domain(disk_domain, (0.0, 0.0), 0.2, 1.0)


@pytest.fixture(scope='session')
def moved_pole():
    return (0.1, 0.0)


@pytest.fixture(scope='session')
def moved_mesh(disk_mesh, moved_pole):
    return remesh_for_pole(disk_mesh, moved_pole)

############### ASSEMBLED SYSTEMS ###############


@pytest.fixture(scope='session')
def cfg0(alpha):
    return PoleConfig(alpha, (0.0, 0.0))


@pytest.fixture(scope='session')
def cfg_a(alpha, moved_pole):
    return PoleConfig(alpha, moved_pole)


@pytest.fixture(scope='session')
def system0(disk_mesh, cfg0):
    return assemble(disk_mesh, cfg0)


@pytest.fixture(scope='session')
def system_a(moved_mesh, cfg_a):
    return assemble(moved_mesh, cfg_a)

############### EIGENPAIRS ###############


@pytest.fixture(scope='session')
def spectrum0(system0):
    return solve_lowest(system0, 4, dense_limit=DENSE)


@pytest.fixture(scope='session')
def spectrum_a(system_a):
    return solve_lowest(system_a, 3, dense_limit=DENSE)


@pytest.fixture(scope='session')
def ground0(spectrum0):
    return spectrum0[1]

############### RESOLVED POLE WINDOWS ###############
# Trace circles need five local element diameters of room around the pole,
# which the coarse disk mesh above does not give.


@pytest.fixture(scope='session')
def fine_mesh(disk_domain, alpha):
    return mesh_domain(disk_domain, (0.0, 0.0), FINE_H_MAX,
                       default_grading(alpha))


@pytest.fixture(scope='session')
def fine_ground(fine_mesh, cfg0):
    return solve_lowest(assemble(fine_mesh, cfg0), 2)[1]


@pytest.fixture(scope='session')
def sweep_run():
    return RunConfig(alpha=0.3, h_max=FINE_H_MAX, n_boundary=48,
                     a_list=(0.1, 0.07, 0.05, 0.025), Q=128,
                     beta_radii=(0.2, 0.3, 0.4)).validate()

############### LIMIT PROFILE ###############


@pytest.fixture(scope='session')
def small_profile(alpha):
    return solve_limit_profile(alpha, 0, S=8.0, h_max=1.0, n_boundary=64)
