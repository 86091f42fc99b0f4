"""
JSON run configuration. Blocks:

    necklace      l1, l2, l3, A (or A_table + wave)   every command
    scan          sigma_min, sigma_max, grid          bands, dispersion, reflect
    truncation    n_cells                             reflect, design (oracle)
    design        sigma0, eps, branch_offsets?, eps_sweep?
    period_length L for group velocity, default l3 + l2
    output        format (csv | json), path

Command line overrides are written into the raw dict before validation, so they are validated the same way.
"""

from __future__ import annotations

import copy
import json
import math
import pathlib
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple, Union

from LoggingConfigurator import logger
from Errors import InvalidParameters
from GraphModel.NecklaceParams import NecklaceParams
from Designer.DesignLogic import DesignRequest, DEFAULT_CELLS


OUTPUT_FORMATS = ("csv", "json")

REQUIRED_BLOCKS = {
    "bands": ("necklace", "scan"),
    "dispersion": ("necklace", "scan"),
    "reflect": ("necklace", "scan", "truncation"),
    "design": ("necklace", "design"),
}

# (argparse dest, dotted path in the raw config)
OVERRIDES = (
    ("sigma_min", "scan.sigma_min"),
    ("sigma_max", "scan.sigma_max"),
    ("grid", "scan.grid"),
    ("cells", "truncation.n_cells"),
    ("eps", "design.eps"),
    ("sigma0", "design.sigma0"),
    ("output", "output.path"),
    ("format", "output.format"),
)


@dataclass(frozen=True)
class ScanConfig:
    sigma_min: float
    sigma_max: float
    grid: int

    @property
    def window(self):
        return self.sigma_min, self.sigma_max


@dataclass(frozen=True)
class RunConfig:
    command: str
    source: Dict[str, Any]
    scan: Optional[ScanConfig]
    n_cells: int
    period_length: Optional[float]
    output_format: str
    output_path: Optional[str]
    eps_sweep: Optional[Tuple[float, ...]] = None

    def necklace(self) -> NecklaceParams:
        return NecklaceParams.from_json_dict(self.source["necklace"], "necklace")

    def design_request(self) -> DesignRequest:
        return DesignRequest.from_json_dict(self.source["design"], self.source["necklace"], self.n_cells,
                                            self.period_length)


def read_json(path: Union[str, pathlib.Path]) -> Dict[str, Any]:
    path = pathlib.Path(path)

    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise InvalidParameters(f"cannot read config <{path.as_posix()}>: {err.strerror}") from err

    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise InvalidParameters(f"{path.as_posix()}:{err.lineno}:{err.colno}: {err.msg}") from err

    if not isinstance(data, dict):
        raise InvalidParameters(f"{path.as_posix()}: top level must be an object")

    return data


def apply_overrides(raw: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """
    Writes non-None command line values into a copy of the raw config.

    >>> apply_overrides({"scan": {"grid": 10}}, {"grid": 20, "cells": None})
    {'scan': {'grid': 20}}
    """

    merged = copy.deepcopy(raw)

    for dest, dotted in OVERRIDES:
        value = overrides.get(dest)
        if value is None:
            continue

        block, key = dotted.split(".")
        target = merged.setdefault(block, {})

        if not isinstance(target, dict):
            raise InvalidParameters(f"{block}: expected an object")

        target[key] = value

    return merged


def _number(block: dict, key: str, field: str, kind=float):
    if key not in block:
        raise InvalidParameters(f"{field}.{key}: missing")

    value = block[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidParameters(f"{field}.{key}: expected a number, got {value!r}")

    if kind is int and value != int(value):
        raise InvalidParameters(f"{field}.{key}: expected an integer, got {value!r}")

    return kind(value)


def _block(raw: dict, name: str) -> dict:
    block = raw[name]
    if not isinstance(block, dict):
        raise InvalidParameters(f"{name}: expected an object, got {block!r}")

    return block


def _scan(raw: dict) -> ScanConfig:
    block = _block(raw, "scan")

    scan = ScanConfig(_number(block, "sigma_min", "scan"), _number(block, "sigma_max", "scan"),
                      _number(block, "grid", "scan", int))

    if not (math.isfinite(scan.sigma_min) and math.isfinite(scan.sigma_max) and 0 < scan.sigma_min < scan.sigma_max):
        raise InvalidParameters(f"scan: need 0 < sigma_min < sigma_max, got {scan.window}")

    if scan.grid < 2:
        raise InvalidParameters(f"scan.grid: must be at least 2, got {scan.grid}")

    return scan


def _eps_sweep(raw: dict) -> Optional[Tuple[float, ...]]:
    """
    >>> _eps_sweep({"design": {"eps_sweep": [0.1, 0.05]}})
    (0.1, 0.05)
    >>> _eps_sweep({"design": {}}) is None
    True
    """

    values = _block(raw, "design").get("eps_sweep")
    if values is None:
        return None

    if not isinstance(values, list) or not values:
        raise InvalidParameters(f"design.eps_sweep: expected a non-empty list, got {values!r}")

    for idx, value in enumerate(values):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not 0 < value < math.inf:
            raise InvalidParameters(f"design.eps_sweep[{idx}]: expected a positive number, got {value!r}")

    return tuple(float(value) for value in values)


def build_run_config(command: str, raw: Dict[str, Any]) -> RunConfig:
    """
    Validates the blocks the command needs. Blocks for other commands are ignored.
    """

    missing = [block for block in REQUIRED_BLOCKS[command] if block not in raw]
    if missing:
        raise InvalidParameters(f"{command}: missing block(s) {', '.join(missing)}")

    for block in raw:
        if block not in REQUIRED_BLOCKS[command] and block not in ("period_length", "output", "truncation"):
            logger.debug(f"Ignoring block '{block}' for {command}")

    n_cells = DEFAULT_CELLS
    if "truncation" in raw:
        n_cells = _number(_block(raw, "truncation"), "n_cells", "truncation", int)
        if n_cells < 1:
            raise InvalidParameters(f"truncation.n_cells: must be positive, got {n_cells}")

    period_length = None
    if raw.get("period_length") is not None:
        period_length = _number(raw, "period_length", "config")
        if not period_length > 0:
            raise InvalidParameters(f"period_length: must be positive, got {period_length}")

    output = _block(raw, "output") if "output" in raw else {}
    output_format = output.get("format", "json" if command == "design" else "csv")
    if output_format not in OUTPUT_FORMATS:
        raise InvalidParameters(f"output.format: expected one of {OUTPUT_FORMATS}, got {output_format!r}")

    return RunConfig(
        command=command,
        source=raw,
        scan=_scan(raw) if "scan" in REQUIRED_BLOCKS[command] else None,
        n_cells=n_cells,
        period_length=period_length,
        output_format=output_format,
        output_path=output.get("path"),
        eps_sweep=_eps_sweep(raw) if command == "design" else None,
    )


def load_run_config(path: Union[str, pathlib.Path], command: str, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    :param path: JSON file
    :param command: subcommand name, decides which blocks are required
    :param overrides: argparse values keyed by dest, None entries ignored

    :return: RunConfig
    """

    raw = apply_overrides(read_json(path), overrides or {})
    logger.debug(f"Loaded config <{pathlib.Path(path).as_posix()}> for {command}")
    return build_run_config(command, raw)
