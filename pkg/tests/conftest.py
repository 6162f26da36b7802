import pytest

from hisim.data import CIFAR_TRACE, DOG_TRACE, LAYER_PROFILE, fixture_path
from hisim.schedulers import load_layer_profile
from hisim.traces import parse_trace


@pytest.fixture(scope="session")
def cifar_trace():
    return parse_trace(fixture_path(CIFAR_TRACE))


@pytest.fixture(scope="session")
def dog_trace():
    return parse_trace(fixture_path(DOG_TRACE))


@pytest.fixture(scope="session")
def layer_profile():
    return load_layer_profile(fixture_path(LAYER_PROFILE))
