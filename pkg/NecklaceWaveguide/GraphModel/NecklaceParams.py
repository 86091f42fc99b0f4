"""
One period of the necklace: two arches (l1 >= l2) between a pair of junctions, then a straight segment l3.

JSON layout:
    {"l1": num, "l2": num, "l3": num, "A": [[..], [..], [..]], "wave": {"epsilon": num, "lambda0": num, "lambda1": num}}

"A" may be replaced by "A_table": [{"eps_omega": num, "A": [[..]]}, ...], which then requires "wave".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple, Union

from Errors import AsymmetricCondition, InvalidParameters
from . import as_square_matrix
from .VertexCondition import VertexCondition, VertexConditionTable, validate_vertex_condition
from .WaveContext import WaveContext


@dataclass(frozen=True, eq=False)
class NecklaceParams:
    l1: float
    l2: float
    l3: Optional[float]
    vc: Union[VertexCondition, VertexConditionTable]
    wave: Optional[WaveContext] = None

    def __post_init__(self):
        for name in ("l1", "l2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParameters(f"{name}: must be a positive length, got {value}")

        if self.l2 > self.l1:
            raise InvalidParameters(f"arches must satisfy l2 <= l1, got l1={self.l1}, l2={self.l2}")

        # l3 stays None while the designer has not chosen it yet.
        if self.l3 is not None and not (math.isfinite(self.l3) and self.l3 > 0):
            raise InvalidParameters(f"l3: must be a positive length, got {self.l3}")

    @property
    def is_frequency_dependent(self) -> bool:
        return isinstance(self.vc, VertexConditionTable)

    @property
    def period_length(self) -> float:
        """
        Default L for group velocity: segment plus the shorter arch.
        """

        return self.require_l3() + self.l2

    def require_l3(self) -> float:
        if self.l3 is None:
            raise InvalidParameters("l3 is not chosen yet")
        return self.l3

    def condition(self) -> VertexCondition:
        if self.is_frequency_dependent:
            raise InvalidParameters("a constant vertex condition is required here, got a frequency table")
        return self.vc

    def condition_at(self, sigma: float) -> VertexCondition:
        return self.vc.at_sigma(sigma) if self.is_frequency_dependent else self.vc

    def entries(self, sigma):
        return self.vc.entries(sigma)

    def with_l3(self, l3: float) -> NecklaceParams:
        return replace(self, l3=l3)

    @classmethod
    def from_json_dict(cls, data: dict, field: str = "necklace") -> NecklaceParams:
        """
        Parses the necklace block, rejecting asymmetric matrices.

        :param data: parsed JSON object
        :param field: dotted path used in error messages
        """

        vc, wave = load_vertex_data(data, field)

        lengths = {}
        for name in ("l1", "l2", "l3"):
            if name not in data:
                raise InvalidParameters(f"{field}.{name}: missing")

            try:
                lengths[name] = float(data[name])
            except (TypeError, ValueError) as err:
                raise InvalidParameters(f"{field}.{name}: expected a number") from err

        return cls(vc=vc, wave=wave, **lengths)

    def to_json_dict(self) -> dict:
        output = {"l1": self.l1, "l2": self.l2, "l3": self.l3}

        if self.is_frequency_dependent:
            output["A_table"] = self.vc.to_json_list()
        else:
            output["A"] = self.vc.to_rows()

        if self.wave is not None:
            output["wave"] = self.wave.to_json_dict()

        return output


def _load_condition(rows, field: str) -> VertexCondition:
    vc = VertexCondition(as_square_matrix(rows, 3, field))

    try:
        validate_vertex_condition(vc, strict=True)
    except AsymmetricCondition as err:
        row, col = err.index_pair
        raise InvalidParameters(f"{field}[{row - 1}][{col - 1}]: {err}") from err

    return vc


def load_vertex_data(data: dict, field: str) -> Tuple[Union[VertexCondition, VertexConditionTable], Optional[WaveContext]]:
    """
    Reads "A" or "A_table" plus the optional "wave" block.

    :return: (vertex condition or table, wave context or None)
    """

    if not isinstance(data, dict):
        raise InvalidParameters(f"{field}: expected an object")

    wave = WaveContext.from_json_dict(data["wave"], f"{field}.wave") if "wave" in data else None

    if "A_table" in data:
        if wave is None:
            raise InvalidParameters(f"{field}.A_table: requires {field}.wave")

        samples = data["A_table"]
        if not isinstance(samples, list) or not all(isinstance(entry, dict) for entry in samples):
            raise InvalidParameters(f"{field}.A_table: expected a list of {{eps_omega, A}} objects")

        conditions = [_load_condition(entry.get("A"), f"{field}.A_table[{idx}].A") for idx, entry in enumerate(samples)]

        try:
            eps_omega = [float(entry["eps_omega"]) for entry in samples]
        except (KeyError, TypeError, ValueError) as err:
            raise InvalidParameters(f"{field}.A_table: every sample needs a numeric eps_omega") from err

        return VertexConditionTable(eps_omega, conditions, wave), wave

    if "A" in data:
        return _load_condition(data["A"], f"{field}.A"), wave

    raise InvalidParameters(f"{field}.A: missing")
