import numpy as np
import pytest

from corpus import build_corpus, small_corpus


@pytest.fixture(scope="session")
def corpus():
    return build_corpus()


@pytest.fixture(scope="session")
def small():
    return small_corpus()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
