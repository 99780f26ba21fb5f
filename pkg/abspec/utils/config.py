"""Run configuration (key=value files merged with command line flags) and
output directory management for abspec experiments."""
import math
import os
from dataclasses import dataclass, fields, replace
from typing import Optional, Tuple

from abspec.utils.common import ensure_dir
from abspec.utils.errors import ConfigurationError

CWD = os.getcwd()

ALPHA_TOL = 1e-12


def default_grading(alpha):
    """Grading exponent restoring optimal P1 convergence near the pole.

    Args:
        alpha (float): Circulation.

    Returns:
        float: 2/min(alpha, 1-alpha) clamped to [2, 8].
    """
    mu = min(alpha, 1.0 - alpha)
    return float(min(8.0, max(2.0, 2.0 / mu)))


def check_alpha(alpha):
    """Raise ConfigurationError unless alpha is in (0,1) and not 1/2."""
    try:
        alpha = float(alpha)
    except (TypeError, ValueError):
        raise ConfigurationError('alpha must be a real number, got %r' % (alpha,))
    if not 0.0 < alpha < 1.0 or min(
            abs(alpha), abs(alpha - 0.5), abs(alpha - 1.0)) <= ALPHA_TOL:
        raise ConfigurationError(
            'alpha must lie in (0,1) and differ from 1/2, got %r' % alpha)
    return alpha


def _parse_list(text):
    return tuple(float(item) for item in str(text).replace(
        ' ', '').split(',') if item != '')


_TUPLE_KEYS = {'a_list', 'beta_radii', 'annulus', 'limit_radii'}
_BOOL_KEYS = {'emit_plots', 'rescale', 'verify_doubling'}
_STR_KEYS = {'polygon', 'preconditioner', 'output', 'log_level'}
_INT_KEYS = {'n_boundary', 'n0', 'quadrature_order', 'seed', 'jobs', 'Q',
             'J', 'count', 'profile_n_boundary', 'k', 'dense_limit'}


@dataclass(frozen=True)
class RunConfig:
    """All knobs of an abspec run.

    Values come from an optional ``key = value`` file and are overridden
    by command line flags. ``None`` means "derive a default" for the
    knobs whose default depends on alpha (grading) or on the domain.
    """

    # ------------------------------------------------------------------ #
    #                              Problem                               #
    # ------------------------------------------------------------------ #
    alpha: float = 0.3
    n0: int = 1
    radius: float = 1.0
    n_boundary: int = 64
    polygon: Optional[str] = None
    rescale: bool = False
    pole: Tuple[float, float] = (0.0, 0.0)
    direction: float = 0.0
    a_list: Tuple[float, ...] = (0.1, 0.07, 0.05, 0.035, 0.025)
    count: int = 10
    # ------------------------------------------------------------------ #
    #                          Discretization                            #
    # ------------------------------------------------------------------ #
    h_max: float = 0.05
    grading: Optional[float] = None
    h_min_floor: float = 1e-5
    quadrature_order: int = 4
    tol: float = 1e-8
    seed: int = 0
    preconditioner: str = 'ilu'
    dense_limit: int = 600
    # ------------------------------------------------------------------ #
    #                            Diagnostics                             #
    # ------------------------------------------------------------------ #
    K: float = 4.0
    Q: int = 256
    J: int = 8
    beta_radii: Tuple[float, ...] = (0.2, 0.3, 0.4, 0.5)
    annulus: Tuple[float, float] = (1.5, 3.0)
    # ------------------------------------------------------------------ #
    #                           Limit profile                            #
    # ------------------------------------------------------------------ #
    k: Optional[int] = None
    profile_S: float = 16.0
    profile_h_max: float = 0.5
    profile_n_boundary: int = 256
    limit_radii: Tuple[float, ...] = (1.0, 2.0, 3.0, 4.0, 6.0, 8.0)
    verify_doubling: bool = False
    # ------------------------------------------------------------------ #
    #                               Output                               #
    # ------------------------------------------------------------------ #
    output: Optional[str] = None
    jobs: int = 1
    emit_plots: bool = False
    log_level: str = 'INFO'

    @property
    def grading_exponent(self):
        if self.grading is None:
            return default_grading(self.alpha)
        return float(self.grading)

    @property
    def direction_vector(self):
        return (math.cos(self.direction), math.sin(self.direction))

    @classmethod
    def from_file(cls, path):
        """Read a ``key = value`` configuration file.

        Blank lines and ``#`` comments are ignored, lists are comma
        separated, ``pole`` takes two comma separated numbers.

        Args:
            path (str): Configuration file path.

        Returns:
            RunConfig: Configuration (not yet validated).
        """
        values = {}
        with open(path, 'r') as file_obj:
            for number, line in enumerate(file_obj, start=1):
                line = line.split('#', 1)[0].strip()
                if not line:
                    continue
                if '=' not in line:
                    raise ConfigurationError(
                        '%s:%d: expected key = value' % (path, number))
                key, value = (part.strip() for part in line.split('=', 1))
                values[key] = value
        return cls().merged(values)

    def merged(self, overrides):
        """Return a copy with the given values applied (None values skipped).

        Args:
            overrides (dict): Mapping of field name to raw or typed value.

        Returns:
            RunConfig: New configuration.
        """
        known = {f.name for f in fields(self)}
        changes = {}
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in known:
                raise ConfigurationError('unknown configuration key %r' % key)
            changes[key] = self._coerce(key, value)
        return replace(self, **changes)

    @staticmethod
    def _coerce(key, value):
        try:
            if key in _TUPLE_KEYS or key == 'pole':
                if isinstance(value, str):
                    return _parse_list(value)
                return tuple(float(v) for v in value)
            if key in _BOOL_KEYS:
                if isinstance(value, str):
                    return value.strip().lower() in ('1', 'true', 'yes', 'on')
                return bool(value)
            if key in _STR_KEYS:
                return str(value)
            if key in _INT_KEYS:
                return int(value)
            if key == 'grading' and str(value).lower() in ('none', 'auto'):
                return None
            return float(value)
        except ValueError:
            raise ConfigurationError(
                'invalid value %r for configuration key %r' % (value, key))

    def validate(self):
        """Check the RunConfig invariants.

        Raises:
            ConfigurationError: On the first violated invariant.

        Returns:
            RunConfig: self, for chaining.
        """
        check_alpha(self.alpha)
        if len(self.pole) != 2:
            raise ConfigurationError('pole needs two coordinates')
        if self.n0 < 1:
            raise ConfigurationError('n0 must be >= 1')
        if self.radius <= 0 or self.h_max <= 0:
            raise ConfigurationError('radius and h_max must be positive')
        if self.grading is not None and self.grading < 1:
            raise ConfigurationError('grading exponent must be >= 1')
        a_list = self.a_list
        if any(a <= 0 for a in a_list):
            raise ConfigurationError('a_list entries must be positive')
        if any(a_list[i + 1] >= a_list[i] for i in range(len(a_list) - 1)):
            raise ConfigurationError('a_list must be strictly decreasing')
        if len(self.annulus) != 2 or not 0 < self.annulus[0] < self.annulus[1]:
            raise ConfigurationError('annulus must be (r1, r2) with 0 < r1 < r2')
        if self.Q < 64 or self.Q & (self.Q - 1):
            raise ConfigurationError('Q must be a power of two >= 64')
        if self.jobs < 1:
            raise ConfigurationError('jobs must be >= 1')
        if self.preconditioner not in ('ilu', 'jacobi'):
            raise ConfigurationError(
                "preconditioner must be 'ilu' or 'jacobi'")
        return self


class Config(object):
    """Output directory management for abspec experiments.

        :param command: Subcommand name used to label working folders.
        :param output: Explicit output directory (used as given) or None.
        :param experiment_path: Directory all artifacts of the run go to.
    """

    def __init__(self, command, output=None, root=None):
        self.command = command
        if output is not None:
            self.experiment_path = os.path.abspath(ensure_dir(output))
        else:
            self.experiment_path = self.set_experiment_working_dir(
                command, root or CWD)

    def set_experiment_working_dir(self, command, root=CWD):
        """Create a fresh numbered working dir for the command.

        Args:
            command (str): subcommand name to define a name in directory
            root (str, optional): Parent directory. Defaults to the cwd.

        Returns:
            str: Experiment path for directory created.
        """
        experiment_path = self._get_working_folder(
            directory_path=root,
            base_name='-%s-res' % command)
        os.makedirs(experiment_path)
        return experiment_path

    def path(self, filename):
        """Absolute path of an artifact inside the experiment directory."""
        return os.path.join(self.experiment_path, filename)

    def _get_working_folder(self, directory_path, base_name='-run'):
        """Create a working folder path from directory_path using base_name.

        Assumes folders in *directory_path* have suffix *base_name{N}*.
        Finds the highest N and returns the folder with N + 1.

        Args:
            directory_path (str): Path where the working dir will be created.
            base_name (str, optional): Suffix stem. Defaults to '-run'.

        Returns:
            str: Path to the working directory.
        """
        ensure_dir(directory_path)
        experiment_id = 0
        for folder_name in os.listdir(directory_path):
            if not os.path.isdir(os.path.join(directory_path, folder_name)):
                continue
            if base_name not in folder_name:
                continue
            try:
                folder_id = int(folder_name.split(base_name)[-1])
            except ValueError:
                continue
            experiment_id = max(experiment_id, folder_id)
        experiment_id += 1

        working_dir = os.path.join(directory_path, 'abspec')
        return working_dir + '%s%d' % (base_name, experiment_id)
