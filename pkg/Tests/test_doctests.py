import doctest
import importlib

import pytest


MODULES = (
    "GraphModel",
    "GraphModel.VertexCondition",
    "GraphModel.WaveContext",
    "Monodromy",
    "Monodromy.TangentForms",
    "Monodromy.Transfer",
    "Scattering.TruncatedNecklace",
    "Spectrum.Dispersion",
    "Designer.DesignLogic",
    "Designer.DesignManager",
    "ConfigLoader",
    "LoggingConfigurator",
    "Commands",
    "Commands.CommandLogic",
    "Commands.Emitters",
)


@pytest.mark.parametrize("name", MODULES)
def test_doctests(name):
    result = doctest.testmod(importlib.import_module(name))

    assert result.attempted > 0
    assert result.failed == 0
