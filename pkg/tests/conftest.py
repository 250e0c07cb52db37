import logging

import numpy as np
import pytest

from scatternet.core.configuration import ScatternetConfiguration
from scatternet.typing.energy_types import RbmParams
from tests.mock.model_factory import small_cnn, small_rbm


@pytest.fixture
def configuration(tmp_path):
    return ScatternetConfiguration(
        output_root=str(tmp_path / "out"),
        seed=7,
        logger=logging.getLogger("scatternet.tests"),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def rbm_params() -> RbmParams:
    return small_rbm(n_visible=3, n_hidden=2, seed=3)


@pytest.fixture
def cnn():
    return small_cnn(seed=5)
