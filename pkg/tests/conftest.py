import json
import math
import pathlib

import numpy as np
import pytest

from semifrac.charfun import CharExponent, SemistableSpec
from semifrac.laplace import LaplaceSystem
from semifrac.spectrum import extract_spectrum

GOLDEN = json.loads((pathlib.Path(__file__).parent / "golden.json").read_text())


@pytest.fixture(scope="session")
def golden():
    return GOLDEN


@pytest.fixture(scope="session")
def stable_spec():
    return SemistableSpec.stable()


@pytest.fixture(scope="session")
def default_spec():
    return SemistableSpec.default()


@pytest.fixture(scope="session")
def stable_ce(stable_spec):
    return CharExponent(stable_spec)


@pytest.fixture(scope="session")
def default_ce(default_spec):
    return CharExponent(default_spec)


@pytest.fixture(scope="session")
def stable_ls(stable_ce):
    return LaplaceSystem(stable_ce)


@pytest.fixture(scope="session")
def default_ls(default_ce):
    return LaplaceSystem(default_ce)


@pytest.fixture(scope="session")
def stable_spectrum(stable_ls):
    return extract_spectrum(stable_ls)


@pytest.fixture(scope="session")
def default_spectrum(default_ls):
    return extract_spectrum(default_ls)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def rel(a, b):
    return abs(a - b) / abs(b)
