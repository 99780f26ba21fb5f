import os

import pytest

from abspec.utils.config import (Config, RunConfig, check_alpha,
                                 default_grading)
from abspec.utils.errors import ConfigurationError


@pytest.mark.parametrize(
    'alpha,expected',
    [
        (0.3, 2.0 / 0.3),
        (0.7, 2.0 / 0.3),
        # Clamped from above
        (0.1, 8.0),
        (0.49, 2.0 / 0.49),
    ]
)
def test_default_grading(alpha, expected):
    assert default_grading(alpha) == pytest.approx(expected)


@pytest.mark.parametrize('alpha', [0.0, 1.0, 0.5, -0.2, 1.3, 'abc'])
def test_check_alpha_rejects(alpha):
    with pytest.raises(ConfigurationError):
        check_alpha(alpha)


def test_from_file(tmp_path):
    path = tmp_path / 'run.cfg'
    path.write_text('# sweep along the x axis\n'
                    'alpha = 0.7\n'
                    '\n'
                    'a_list = 0.2, 0.1, 0.05\n'
                    'pole = 0.1, -0.2\n'
                    'Q = 128\n'
                    'emit_plots = yes\n'
                    'grading = auto\n')
    run = RunConfig.from_file(str(path))
    assert run.alpha == 0.7
    assert run.a_list == (0.2, 0.1, 0.05)
    assert run.pole == (0.1, -0.2)
    assert run.Q == 128 and isinstance(run.Q, int)
    assert run.emit_plots is True
    assert run.grading is None
    assert run.grading_exponent == pytest.approx(2.0 / 0.3)


@pytest.mark.parametrize(
    'text',
    [
        'unknown_key = 3\n',
        'alpha 0.3\n',  # Missing '='
        'Q = many\n',
    ]
)
def test_from_file_errors(tmp_path, text):
    path = tmp_path / 'bad.cfg'
    path.write_text(text)
    with pytest.raises(ConfigurationError):
        RunConfig.from_file(str(path))


def test_merged_skips_none():
    run = RunConfig().merged({'alpha': 0.2, 'h_max': None, 'jobs': '3'})
    assert run.alpha == 0.2
    assert run.h_max == RunConfig().h_max
    assert run.jobs == 3


@pytest.mark.parametrize(
    'overrides',
    [
        {'alpha': 0.5},
        {'a_list': (0.1, 0.2)},  # Not decreasing
        {'a_list': (0.1, -0.05)},
        {'Q': 100},  # Not a power of two
        {'Q': 32},
        {'annulus': (2.0, 1.0)},
        {'jobs': 0},
        {'preconditioner': 'amg'},
        {'n0': 0},
        {'grading': 0.5},
    ]
)
def test_validate_errors(overrides):
    with pytest.raises(ConfigurationError):
        RunConfig().merged(overrides).validate()


def test_validate_default():
    run = RunConfig()
    assert run.validate() is run


def test_direction_vector():
    x, y = RunConfig(direction=0.5 * 3.141592653589793).direction_vector
    assert x == pytest.approx(0.0, abs=1e-15)
    assert y == pytest.approx(1.0)


def test_config_numbered_folders(tmp_path):
    first = Config('solve', root=str(tmp_path))
    second = Config('solve', root=str(tmp_path))
    assert os.path.basename(first.experiment_path) == 'abspec-solve-res1'
    assert os.path.basename(second.experiment_path) == 'abspec-solve-res2'
    assert first.path('summary.txt') == os.path.join(
        first.experiment_path, 'summary.txt')


def test_config_explicit_output(tmp_path):
    target = str(tmp_path / 'out')
    config = Config('sweep', output=target)
    assert config.experiment_path == os.path.abspath(target)
    assert os.path.isdir(target)


def test_config_creates_missing_parents(tmp_path):
    nested = Config('mesh', output=str(tmp_path / 'a' / 'b'))
    assert os.path.isdir(nested.experiment_path)
    numbered = Config('mesh', root=str(tmp_path / 'runs' / 'today'))
    assert os.path.basename(numbered.experiment_path) == 'abspec-mesh-res1'
    assert os.path.isdir(numbered.experiment_path)
