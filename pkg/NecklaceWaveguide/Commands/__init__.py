import itertools
from typing import Callable, Tuple, Sequence

from LoggingConfigurator import logger


def gen_progress_bar_wrapper(char_set: Tuple[str, str], fill_character: Sequence[str]):
    """
    Returns progress bar generator for sweep logging.
    Do not expect to run with small space less than 3 character.

    :param char_set: Sequence containing characters for start and end. Should be 1 width.
    :param fill_character: Sequence containing characters to represent from 0 to N. N-digit system will be used.

    """

    start, end = char_set
    digit_system = len(fill_character) - 1
    fill_system = fill_character

    def gen_progress_inner(value: float, width: int):
        """
        Create progress-bar string using value.

        :param value: float ranging from 0 to 1
        :param width: width of progress bar in characters

        :return: progress bar string

        >>> gen_progress_bar(0.5, 6)
        '|##  |'
        """

        width -= 2

        def inner_gen():
            value_factor = int(value * width * digit_system)

            for _ in range(width):
                if value_factor == 0:
                    yield fill_system[0]
                else:
                    try:
                        yield fill_system[value_factor]
                    except IndexError:
                        yield fill_system[-1]

                    value_factor -= digit_system
                    if value_factor < 0:
                        value_factor = 0

        return start + "".join(inner_gen()) + end

    return gen_progress_inner


# stderr may not be a unicode terminal, keep to ascii.
gen_progress_bar = gen_progress_bar_wrapper(("|", "|"), (" ", ".", ":", "#"))


def progress_closure(total: int, every_n: int = 10, width: int = 32) -> Callable[[int], None]:
    """
    Returns callback taking count of finished items. Logs a bar on every n-th call and on the last one.

    :param total: number of items in the sweep
    :param every_n: log once per this many calls
    :param width: bar width in characters
    """

    cycle = itertools.cycle((not n for n in range(max(every_n, 1))))

    def callback(done: int):
        if next(cycle) or done == total:
            fraction = done / total if total else 1.0
            logger.info(f"{gen_progress_bar(fraction, width)} {done}/{total}")

    return callback
