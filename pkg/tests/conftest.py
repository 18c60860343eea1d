import numpy as np
import pytest

from cspdsss import chipmap, rx


@pytest.fixture(scope="session")
def table():
    return chipmap.load_default_table()


@pytest.fixture(scope="session")
def dictionary(table):
    return chipmap.build_dictionaries(table)


@pytest.fixture(params=[1.0, 0.5, 0.25, 0.125], ids=lambda k: f"kappa={k}")
def theta(request):
    return rx.measurement_for(request.param, 16)


@pytest.fixture
def rng():
    return np.random.default_rng(20120325)
