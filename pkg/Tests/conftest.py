import json
import math
import pathlib
import sys

import numpy as np
import pytest

SOURCE_DIR = pathlib.Path(__file__).resolve().parent.parent / "NecklaceWaveguide"
sys.path.insert(0, str(SOURCE_DIR))

from GraphModel.VertexCondition import VertexCondition  # noqa: E402
from GraphModel.NecklaceParams import NecklaceParams  # noqa: E402


WORKED_A = [[1.0, 0.5, 1.0], [0.5, 2.0, 2.0], [1.0, 2.0, 0.3]]
WORKED_SIGMA0 = 5.0


def equal_arm(length=1.0, l3=0.5, angle=0.7) -> NecklaceParams:
    """
    l1 = l2, B = 0, c = 0, |delta| = 1. The loop then acts as a plain segment: F = -2 cos(sigma (l + l3)).
    """

    vc = VertexCondition.from_blocks(np.zeros((2, 2)), (math.cos(angle), math.sin(angle)), 0.0)
    return NecklaceParams(length, length, l3, vc)


def random_params(rng: np.random.Generator) -> NecklaceParams:
    l2, l1 = sorted(rng.uniform(0.2, 3.0, 2))
    a = rng.normal(size=(3, 3))
    return NecklaceParams(float(l1), float(l2), float(rng.uniform(0.2, 3.0)), VertexCondition((a + a.T) / 2))


@pytest.fixture
def rng():
    return np.random.default_rng(20201016)


@pytest.fixture
def worked_vc():
    return VertexCondition(WORKED_A)


@pytest.fixture
def equal_arm_params():
    return equal_arm()


@pytest.fixture
def generic_params():
    return NecklaceParams(1.3, 0.7, 0.9, VertexCondition(WORKED_A))


@pytest.fixture
def write_config(tmp_path):
    def inner(data: dict, name="config.json") -> pathlib.Path:
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return inner
