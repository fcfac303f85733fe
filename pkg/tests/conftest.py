import functools
import pathlib

import pytest

from entropik.parser import parse_model
from entropik.report import run_liu, run_solution_set

MODELS = pathlib.Path(__file__).resolve().parents[1] / "src" / "entropik" / "models"


@functools.lru_cache(maxsize=None)
def load_model(name):
    text = (MODELS / f"{name}.epk").read_text()
    return parse_model(text, filename=f"{name}.epk").raise_on_error()


@functools.lru_cache(maxsize=None)
def solution_run(name):
    return run_solution_set(load_model(name))


@functools.lru_cache(maxsize=None)
def liu_run(name):
    return run_liu(load_model(name))


@pytest.fixture(scope="session")
def gas():
    return load_model("gas1d")


@pytest.fixture(scope="session")
def fluid():
    return load_model("fluid2d")


@pytest.fixture(scope="session")
def nonsimple():
    return load_model("nonsimple2d")


@pytest.fixture(scope="session")
def granular():
    return load_model("granular2d")


def bindings_text(name):
    return (MODELS / f"{name}.bind").read_text()
