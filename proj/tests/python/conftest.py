import os
import pathlib

import pytest


@pytest.fixture
def cli():
    path = os.environ.get("PITCHRL_CLI")
    if not path:
        pytest.skip("PITCHRL_CLI not set")
    return path


@pytest.fixture
def source_dir():
    return pathlib.Path(os.environ.get("PITCHRL_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))
