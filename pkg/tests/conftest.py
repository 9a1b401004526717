import os
import pytest

from hydra import compose, initialize_config_dir
from sim.paths import stream_generators

CONFIG_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "configs")


@pytest.fixture
def rng():
    return stream_generators(125125125, 1)[0]


@pytest.fixture
def make_cfg(tmp_path):
    """ Composes the root config with its output folder redirected into tmp_path """
    def _make(*overrides):
        with initialize_config_dir(version_base="1.3", config_dir=os.path.abspath(CONFIG_DIR)):
            return compose(config_name="config", overrides=[f"out={tmp_path}", "sim.progress=false", *overrides])
    return _make
