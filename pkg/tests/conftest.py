import logging

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(autouse=True)
def _quiet_exotic(caplog):
    caplog.set_level(logging.ERROR, logger="rabisim")
