import os
import pathlib

import pytest

SOURCE_DIR = pathlib.Path(os.environ.get("HOMOGEIG_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))


@pytest.fixture
def source_dir():
    return SOURCE_DIR


@pytest.fixture
def binary():
    path = os.environ.get("HOMOGEIG_BINARY")
    if not path:
        pytest.skip("HOMOGEIG_BINARY not set")
    return path
