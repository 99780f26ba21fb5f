import io
import os

import pandas as pd
import pytest

from abspec import cli
from abspec.geometry import read_mesh

FINE = ['--h-max', '0.12', '--n-boundary', '48', '--Q', '128',
        '--beta-radii', '0.2,0.3,0.4']


def read_summary(path):
    with open(os.path.join(path, 'summary.txt')) as file_obj:
        pairs = [line.split(' = ', 1) for line in file_obj.read().splitlines()]
    return dict(pairs)

############### ORACLE ###############


def test_oracle_table(capsys):
    assert cli.main(['oracle', '--alpha', '0.3', '--count', '5']) == 0
    frame = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert list(frame.columns) == ['j', 'm', 'nu', 'zero', 'lambda']
    assert len(frame) == 5
    assert (frame['j'][0], frame['m'][0]) == (0, 1)


def test_oracle_conjugate_circulations(capsys):
    cli.main(['oracle', '--alpha', '0.3', '--count', '6'])
    low = pd.read_csv(io.StringIO(capsys.readouterr().out))
    cli.main(['oracle', '--alpha', '0.7', '--count', '6'])
    high = pd.read_csv(io.StringIO(capsys.readouterr().out))
    pd.testing.assert_series_equal(low['lambda'], high['lambda'])
    assert high['j'][0] == 1


def test_oracle_from_config_file(tmp_path, capsys):
    path = tmp_path / 'run.cfg'
    path.write_text('# oracle run\nalpha = 0.25\ncount = 3\n')
    assert cli.main(['oracle', '--config', str(path)]) == 0
    frame = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert len(frame) == 3
    assert frame['nu'][0] == pytest.approx(0.25)

############### EXIT CODES ###############


@pytest.mark.parametrize(
    'argv',
    [
        ['oracle', '--alpha', '0.5'],
        ['oracle', '--alpha', '1.3'],
        [],
        ['oracle', '--bogus'],
    ]
)
def test_usage_errors(argv):
    assert cli.main(argv) == 2


def test_unknown_config_key(tmp_path):
    path = tmp_path / 'run.cfg'
    path.write_text('bogus = 1\n')
    assert cli.main(['oracle', '--config', str(path)]) == 2


def test_pole_outside_domain(tmp_path):
    argv = ['solve', '--pole', '2', '0', '--h-max', '0.3',
            '--output', str(tmp_path / 'out')]
    assert cli.main(argv) == 2


def test_sweep_needs_enough_samples(tmp_path):
    argv = ['sweep', '--a-list', '0.1', '--output', str(tmp_path / 'out')]
    assert cli.main(argv) == 2


def test_sweep_rejects_increasing_list(tmp_path):
    argv = ['sweep', '--a-list', '0.05,0.1,0.2,0.3',
            '--output', str(tmp_path / 'out')]
    assert cli.main(argv) == 2

############### MESH ###############


def test_mesh_export(tmp_path, capsys):
    out = str(tmp_path / 'mesh')
    argv = ['mesh', '--h-max', '0.2', '--n-boundary', '48', '--matrices',
            '--output', out]
    assert cli.main(argv) == 0
    assert capsys.readouterr().out.strip() == os.path.abspath(out)
    for name in ('mesh.abmesh', 'stiffness.txt', 'mass.txt', 'summary.txt'):
        assert os.path.isfile(os.path.join(out, name))
    summary = read_summary(out)
    mesh = read_mesh(os.path.join(out, 'mesh.abmesh'))
    assert int(summary['vertices']) == mesh.n_vertices
    assert int(summary['dofs']) == \
        mesh.n_vertices - len(mesh.boundary_vertices) - 1


def test_mesh_export_is_deterministic(tmp_path):
    texts = []
    for name in ('first', 'second'):
        out = str(tmp_path / name)
        cli.main(['mesh', '--h-max', '0.2', '--n-boundary', '48',
                  '--pole', '0.1', '0.05', '--matrices', '--output', out])
        with open(os.path.join(out, 'stiffness.txt')) as file_obj:
            texts.append(file_obj.read())
    assert texts[0] == texts[1]


def test_numbered_output_folder(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr('abspec.utils.config.CWD', str(tmp_path))
    monkeypatch.chdir(tmp_path)
    cli.main(['mesh', '--h-max', '0.3', '--n-boundary', '32'])
    cli.main(['mesh', '--h-max', '0.3', '--n-boundary', '32'])
    assert sorted(os.listdir(str(tmp_path))) == ['abspec-mesh-res1',
                                                 'abspec-mesh-res2']

############### SOLVE ###############


@pytest.fixture(scope='module')
def solve_output(tmp_path_factory):
    out = str(tmp_path_factory.mktemp('solve'))
    argv = ['solve', '--alpha', '0.3', '--count', '3', '--emit-plots',
            '--output', out] + FINE
    assert cli.main(argv) == 0
    return out


def test_solve_eigenvalues(solve_output):
    frame = pd.read_csv(os.path.join(solve_output, 'eigenvalues.csv'))
    assert list(frame.columns) == ['n', 'lambda', 'residual', 'oracle',
                                   'rel_error']
    assert len(frame) == 3
    assert (frame['rel_error'] < 0.02).all()
    assert (frame['lambda'] > frame['oracle']).all()


def test_solve_diagnostics(solve_output):
    summary = read_summary(solve_output)
    assert summary['k'] == '0'
    assert float(summary['vanishing_order']) == pytest.approx(0.3)
    assert summary['hardy'] == 'PASS'
    assert summary['poincare'] == 'PASS'
    betas = pd.read_csv(os.path.join(solve_output, 'betas.csv'))
    assert list(betas['j']) == list(range(-8, 9))
    almgren = pd.read_csv(os.path.join(solve_output, 'almgren.csv'))
    assert list(almgren.columns) == ['r', 'H', 'E', 'N']
    assert (almgren['H'] > 0).all()
    for name in ('eigenpair_1.dat', 'almgren_N.dat', 'almgren_H.dat',
                 'mode_0.dat'):
        assert os.path.isfile(os.path.join(solve_output, name))
