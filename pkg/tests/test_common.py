import logging
import os

import numpy as np
import pandas as pd
import pytest

import abspec.utils.common as common


@pytest.mark.parametrize(
    'value,expected',
    [
        (1.0 / 3.0, '0.333333333333'),
        (8.0, '8'),
        # Exponent notation for small numbers
        (1.5e-9, '1.5e-09'),
        (-2.25, '-2.25'),
    ]
)
def test_format_float(value, expected):
    assert common.format_float(value) == expected


def test_write_csv_from_dict(tmp_path):
    path = str(tmp_path / 'table.csv')
    output = common.write_csv({'n': [1, 2], 'lambda': [1.0 / 3.0, 2.5]}, path)
    assert output == path
    with open(path) as file_obj:
        lines = file_obj.read().splitlines()
    # Column order follows the dict order
    assert lines[0] == 'n,lambda'
    assert lines[1] == '1,0.333333333333'
    assert lines[2] == '2,2.5'


def test_write_csv_from_frame(tmp_path):
    path = str(tmp_path / 'frame.csv')
    common.write_csv(pd.DataFrame({'x': [0.1], 'y': [np.pi]}), path)
    frame = pd.read_csv(path)
    assert list(frame.columns) == ['x', 'y']
    assert frame['y'][0] == pytest.approx(np.pi, rel=1e-11)


def test_write_dat_skips_non_finite(tmp_path):
    path = str(tmp_path / 'curve.dat')
    common.write_dat([1.0, 2.0, 3.0], [0.5, np.nan, np.inf], path,
                     header='r H')
    with open(path) as file_obj:
        lines = file_obj.read().splitlines()
    assert lines == ['# r H', '1 0.5']


def test_write_lines(tmp_path):
    path = str(tmp_path / 'summary.txt')
    common.write_lines(['a', 'b'], path)
    with open(path, 'rb') as file_obj:
        assert file_obj.read() == b'a\nb\n'


def test_ensure_dir(tmp_path):
    target = str(tmp_path / 'x' / 'y')
    assert common.ensure_dir(target) == target
    assert os.path.isdir(target)
    # Calling it twice is harmless
    common.ensure_dir(target)


def test_logger_attaches_one_handler():
    first = common.Logger().getLogger('ABSPEC_TEST', 'INFO', common.LOG_FMT)
    second = common.Logger().getLogger('ABSPEC_TEST', 'DEBUG', common.LOG_FMT)
    assert first is second
    assert len(second.handlers) == 1
    assert second.level == logging.DEBUG
    assert not second.propagate


def test_set_log_level():
    logger = common.Logger().getLogger('ABSPEC_LEVELS', 'INFO', common.LOG_FMT)
    other = logging.getLogger('NOT_ABSPEC')
    other.setLevel(logging.ERROR)
    common.set_log_level('WARNING')
    assert logger.level == logging.WARNING
    assert other.level == logging.ERROR
