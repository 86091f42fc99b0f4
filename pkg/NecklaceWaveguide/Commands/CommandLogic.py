"""
Subcommand handlers. Every public function named cmd_<name> becomes the subcommand <name>.
Handlers take (RunConfig, SweepRunner) and write their table to config.output_path or stdout.
"""

from __future__ import annotations

import functools
import pathlib
from typing import TYPE_CHECKING, Dict, List, Optional, Tuple

import numpy as np

from LoggingConfigurator import logger
from Errors import BandEdge, OutsideBand, SingularSystem, TransferPole
from Monodromy.Transfer import discriminant_kernel
from Spectrum.BandScan import BandStructure, scan_bands
from Spectrum.Dispersion import dispersion_k
from Scattering.TruncatedNecklace import TruncatedNecklace, reflection_formula
from Scattering.Oracle import solve_scattering_oracle
from Designer.DesignManager import design, design_sweep
from Designer.Verification import Diagnostics, verify_design
from .Emitters import open_output, write_csv, write_json

if TYPE_CHECKING:
    from ConfigLoader import RunConfig
    from GraphModel.NecklaceParams import NecklaceParams
    from .SweepRunner import SweepRunner


BAND_COLUMNS = ("sigma", "F", "is_pole", "band_id")
DISPERSION_COLUMNS = ("sigma", "k", "vg", "band_id")
REFLECT_COLUMNS = ("sigma", "formula_r", "oracle_r", "oracle_t", "unitarity_defect", "flag")
VERIFY_COLUMNS = ("quantity", "stored", "recomputed")
SWEEP_COLUMNS = ("eps", "pole_distance", "min_vg", "oracle_r")

MIN_BAND_POINTS = 32


def _band_id(structure: BandStructure, sigma: float) -> Optional[int]:
    for idx, (lo, hi) in enumerate(structure.bands):
        if lo <= sigma <= hi:
            return idx
    return None


def companion_path(path: str, output_format: str) -> pathlib.Path:
    """
    Where design writes the format it was not asked for.

    >>> companion_path("runs/design.json", "json").as_posix()
    'runs/design.csv'
    >>> companion_path("design.out", "csv").as_posix()
    'design.json'
    >>> companion_path("design.csv", "json").as_posix()
    'design_verification.csv'
    """

    target = pathlib.Path(path)
    other = "json" if output_format == "csv" else "csv"
    candidate = target.with_suffix(f".{other}")

    if candidate == target:
        suffix = "report" if other == "json" else "verification"
        candidate = target.with_name(f"{target.stem}_{suffix}.{other}")

    return candidate


def _write(path, output_format: str, config: RunConfig, columns, rows: List[Dict], report: Dict):
    with open_output(path) as stream:
        if output_format == "csv":
            write_csv(rows, columns, stream)
        else:
            # echo never includes the output block
            source = {block: value for block, value in config.source.items() if block != "output"}
            write_json({"config": source, **report}, stream)


def _emit(config: RunConfig, columns, rows: List[Dict], report: Dict, companion=False):
    _write(config.output_path, config.output_format, config, columns, rows, report)

    if companion and config.output_path is not None:
        other = "json" if config.output_format == "csv" else "csv"
        _write(companion_path(config.output_path, config.output_format), other, config, columns, rows, report)


# --------------------------------------------------------------------


def cmd_bands(config: RunConfig, runner: SweepRunner):
    """
    Hill discriminant over the scan grid plus the refined pole locations.
    """

    params = config.necklace()
    scan = config.scan

    structure = scan_bands(params, scan.window, scan.grid)

    sigma = np.linspace(*scan.window, scan.grid)
    f, mask, _ = discriminant_kernel(params, sigma)

    rows = [
        {"sigma": s, "F": None if pole else value, "is_pole": pole, "band_id": _band_id(structure, s)}
        for s, value, pole in zip(sigma.tolist(), f.tolist(), mask.tolist())
    ]
    rows.extend({"sigma": pole, "F": None, "is_pole": True, "band_id": None} for pole in structure.poles)
    rows.sort(key=lambda row: row["sigma"])

    _emit(config, BAND_COLUMNS, rows, {
        "bands": structure.bands,
        "gaps": structure.gaps,
        "poles": structure.poles,
        "degenerate": structure.degenerate,
        "advisories": [str(advisory) for advisory in structure.advisories],
        "samples": rows,
    })


def _band_dispersion(params: NecklaceParams, period_length: Optional[float], item: Tuple[int, Tuple[float, float], int]):
    band_id, band, count = item
    return [
        {"sigma": point.sigma, "k": point.k, "vg": point.vg, "band_id": band_id}
        for point in dispersion_k(params, band, count, period_length)
        if point.vg is not None
    ]


def cmd_dispersion(config: RunConfig, runner: SweepRunner):
    """
    k and group velocity on each detected band. Points whose stencil leaves the band are dropped.
    """

    params = config.necklace()
    scan = config.scan
    structure = scan_bands(params, scan.window, scan.grid)

    span = scan.sigma_max - scan.sigma_min
    items = [
        (band_id, band, max(MIN_BAND_POINTS, round(scan.grid * (band[1] - band[0]) / span)))
        for band_id, band in enumerate(structure.bands)
    ]

    per_band = runner.map(functools.partial(_band_dispersion, params, config.period_length), items)
    rows = [row for band_rows in per_band for row in band_rows]

    _emit(config, DISPERSION_COLUMNS, rows, {"bands": structure.bands, "samples": rows})


def _reflect_row(tn: TruncatedNecklace, sigma: float) -> Dict:
    row = {column: None for column in REFLECT_COLUMNS}
    row["sigma"] = sigma
    flags = []

    try:
        row["formula_r"] = reflection_formula(tn, sigma).value
    except OutsideBand as err:
        flags.append("pole" if isinstance(err.__cause__, TransferPole) else "gap")
    except BandEdge:
        flags.append("edge")

    try:
        oracle = solve_scattering_oracle(tn, sigma)
    except SingularSystem:
        flags.append("singular")
    else:
        row["oracle_r"] = abs(oracle.r)
        row["oracle_t"] = abs(oracle.t)
        row["unitarity_defect"] = oracle.unitarity_defect

    row["flag"] = "+".join(flags)
    return row


def cmd_reflect(config: RunConfig, runner: SweepRunner):
    """
    Closed-form and oracle reflection of the N-cell chain over the scan grid.
    """

    tn = TruncatedNecklace(config.necklace(), config.n_cells)
    sigma = np.linspace(*config.scan.window, config.scan.grid).tolist()

    rows = runner.map(functools.partial(_reflect_row, tn), sigma)
    _emit(config, REFLECT_COLUMNS, rows, {"n_cells": tn.n_cells, "samples": rows})


def _flat_diagnostics(diagnostics: Diagnostics) -> Dict:
    flat = diagnostics.to_json_dict()
    interval = flat.pop("slow_interval") or (None, None)
    flat["slow_interval_lo"], flat["slow_interval_hi"] = interval
    return flat


def cmd_design(config: RunConfig, runner: SweepRunner):
    """
    Runs the design, verifies it, and writes the report (json) and the verification table (csv).
    The format output.format does not pick goes to companion_path() when output.path is set.
    With design.eps_sweep set, designs every eps and reports the scaling slopes instead.
    """

    request = config.design_request()

    if config.eps_sweep:
        report = design_sweep(request, config.eps_sweep, mapper=runner)

        for result in report.results:
            verify_design(result)

        rows = report.rows()
        rows.append({"eps": "slope", **report.slopes})

        _emit(config, SWEEP_COLUMNS, rows, {
            "runs": [result.to_json_dict() for result in report.results],
            "slopes": report.slopes,
        }, companion=True)
        return

    result = design(request)
    fresh = verify_design(result)

    stored, recomputed = _flat_diagnostics(result.diagnostics), _flat_diagnostics(fresh)
    rows = [{"quantity": name, "stored": stored[name], "recomputed": recomputed[name]} for name in sorted(stored)]

    logger.info(f"|F(sigma0)| = {abs(fresh.f_sigma0):.3e}, pole distance {fresh.pole_distance}")
    _emit(config, VERIFY_COLUMNS, rows, {"result": result.to_json_dict(), "verification": fresh.to_json_dict()},
          companion=True)
