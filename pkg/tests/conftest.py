import numpy as np
import pytest

from areatype import Configuration


def config_from_rows(rows: np.ndarray) -> Configuration:
    return Configuration.from_pairs([(float(x), float(y)) for x, y in rows])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
