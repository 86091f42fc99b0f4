"""
Single loguru logger for the whole package. Import it as:

    from LoggingConfigurator import logger

Only one sink is ever active, and it always points at stderr so stdout stays clean for CSV / JSON.
"""

import sys

from loguru import logger

# <caller> msg layout, loguru fills {function} for us.
LOG_FORMAT = "{time:HH:mm:ss.SSS} [{level}] <{function}> {message}"

VERBOSITY_LEVELS = ("WARNING", "INFO", "DEBUG")

_sink_id = None


def level_for_verbosity(verbosity: int) -> str:
    """
    Maps count of -v flags to loguru level name.

    :param verbosity: number of -v flags given

    >>> level_for_verbosity(0)
    'WARNING'
    >>> level_for_verbosity(2)
    'DEBUG'
    >>> level_for_verbosity(7)
    'DEBUG'
    """

    return VERBOSITY_LEVELS[min(max(verbosity, 0), len(VERBOSITY_LEVELS) - 1)]


def configure_logger(verbosity: int = 0, sink=None) -> int:
    """
    Replaces loguru's default handler with one stderr sink. Safe to call repeatedly.

    :param verbosity: number of -v flags given
    :param sink: alternative sink, mostly for tests. Defaults to sys.stderr.

    :return: loguru handler id
    """

    global _sink_id

    if _sink_id is None:
        # drop loguru's default stderr handler, otherwise every record shows twice.
        logger.remove()
    else:
        logger.remove(_sink_id)

    _sink_id = logger.add(
        sys.stderr if sink is None else sink,
        level=level_for_verbosity(verbosity),
        format=LOG_FORMAT,
        colorize=False,
    )

    return _sink_id


if __name__ == '__main__':
    import doctest
    doctest.testmod(verbose=True)
