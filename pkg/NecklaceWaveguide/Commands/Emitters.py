"""
Deterministic CSV / JSON writers. Floats use 17 significant digits so values survive a round trip.
"""

import contextlib
import csv
import json
import math
import pathlib
import sys
from typing import Any, Iterable, Mapping, Optional, Sequence, TextIO

import numpy as np

from LoggingConfigurator import logger


def format_value(value: Any) -> str:
    """
    >>> format_value(0.1)
    '0.10000000000000001'
    >>> format_value(None)
    ''
    >>> format_value(True)
    '1'
    """

    if value is None:
        return ""

    if isinstance(value, (bool, np.bool_)):
        return str(int(value))

    if isinstance(value, (int, np.integer)):
        return str(int(value))

    if isinstance(value, (float, np.floating)):
        value = float(value)
        return "" if math.isnan(value) else format(value, ".17g")

    return str(value)


def write_csv(rows: Iterable[Mapping[str, Any]], columns: Sequence[str], stream: TextIO):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)

    for row in rows:
        writer.writerow([format_value(row.get(column)) for column in columns])


def _to_json(value: Any):
    if isinstance(value, np.ndarray):
        return value.tolist()

    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()

    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def write_json(data: Mapping[str, Any], stream: TextIO):
    # NaN has no JSON form, callers replace it with None beforehand.
    json.dump(data, stream, sort_keys=True, indent=2, default=_to_json, allow_nan=False)
    stream.write("\n")


@contextlib.contextmanager
def open_output(path: Optional[str]):
    """
    Yields file opened for writing, or stdout when path is None.
    """

    if path is None:
        yield sys.stdout
        return

    target = pathlib.Path(path)
    logger.info(f"Writing <{target.as_posix()}>")

    with target.open("w", encoding="utf-8", newline="") as file:
        yield file
