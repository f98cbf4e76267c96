import pytest
from loguru import logger

from heckezeros.coefficients import load_or_build
from heckezeros.lfunction import LFunctionEvaluator
from heckezeros.models import EigenformSpec
from heckezeros.zeros import ZeroFinder

SMALL_TABLE = 3000


@pytest.fixture(scope="session")
def delta_table():
    return load_or_build(EigenformSpec.from_weight(12), SMALL_TABLE)


@pytest.fixture(scope="session")
def weight16_table():
    return load_or_build(EigenformSpec.from_weight(16), SMALL_TABLE)


@pytest.fixture(scope="session")
def evaluator(delta_table):
    return LFunctionEvaluator(delta_table, max_order=2)


@pytest.fixture(scope="session")
def finder(evaluator):
    return ZeroFinder(evaluator, max_height=60.0)


@pytest.fixture
def log_messages():
    """Collect loguru output for the duration of one test."""
    messages: list[str] = []
    handle = logger.add(messages.append, level="DEBUG", format="{level} {message}")
    yield messages
    logger.remove(handle)
