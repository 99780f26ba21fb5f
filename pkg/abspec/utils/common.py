"""Common utilities: terminal logger and deterministic artifact writers."""

import logging
import os

import numpy as np
import pandas as pd

LOG_LEVEL_MAIN = 'INFO'
LOG_LEVEL_NUMERICS = 'WARNING'
LOG_FMT = "[%(asctime)s] %(name)s %(levelname)s:%(message)s"

# Every float written to an artifact goes through this format so that
# repeated runs diff cleanly.
FLOAT_FORMAT = '%.12g'


class Logger():
    """abspec terminal logger for long running computations.
    """

    def getLogger(self, name, level, formatter):
        """Return abspec logger for the progress output in terminal.

        Handlers are attached only once per logger name, so modules and
        repeated CLI invocations in the same process can ask for the
        same logger freely.

        Args:
            name (str): logger name
            level (str): logger level
            formatter (str): logger formatter

        Returns:
            logging.logger

        """
        logger = logging.getLogger(name)
        if not logger.handlers:
            consoleHandler = logging.StreamHandler()
            consoleHandler.setFormatter(logging.Formatter(formatter))
            logger.addHandler(consoleHandler)
        logger.setLevel(level)
        logger.propagate = False
        return logger


def set_log_level(level):
    """Change the level of every abspec logger already created.

    Args:
        level (str): New level name (DEBUG, INFO, WARNING...).
    """
    for name in list(logging.root.manager.loggerDict):
        if name.startswith('ABSPEC'):
            logging.getLogger(name).setLevel(level)


def format_float(value):
    """Format a float with the artifact precision (12 significant digits).

    Args:
        value (float): Number to format.

    Returns:
        str: Formatted number.
    """
    return FLOAT_FORMAT % value


def write_csv(frame, path):
    """Write a table as CSV with the artifact float format.

    Args:
        frame (pandas.DataFrame or dict): Table to write. Dicts are turned
            into DataFrames keeping their key order as column order.
        path (str): Output file.

    Returns:
        str: The path written.
    """
    if not isinstance(frame, pd.DataFrame):
        frame = pd.DataFrame(frame)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT,
                 lineterminator='\n')
    return path


def write_dat(x, y, path, header=None):
    """Write a two-column, whitespace separated file readable by gnuplot.

    Non finite rows are skipped, since gnuplot cannot use them on log
    axes anyway.

    Args:
        x (array-like): First column.
        y (array-like): Second column.
        path (str): Output file.
        header (str, optional): Comment written after a leading ``#``.

    Returns:
        str: The path written.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    with open(path, 'w', newline='\n') as file_obj:
        if header:
            file_obj.write('# %s\n' % header)
        for xi, yi in zip(x, y):
            if np.isfinite(xi) and np.isfinite(yi):
                file_obj.write('%s %s\n' % (format_float(xi), format_float(yi)))
    return path


def write_lines(lines, path):
    """Write plain text lines (one per item) with unix line endings.

    Args:
        lines (list): Lines without terminator.
        path (str): Output file.

    Returns:
        str: The path written.
    """
    with open(path, 'w', newline='\n') as file_obj:
        for line in lines:
            file_obj.write(line + '\n')
    return path


def ensure_dir(path):
    """Create a directory (and parents) if missing and return its path."""
    os.makedirs(path, exist_ok=True)
    return path
