import os
import pathlib

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def root():
    return ROOT


@pytest.fixture(scope="session")
def omnislide_bin():
    path = os.environ.get("OMNISLIDE_BIN")
    if not path or not os.path.exists(path):
        pytest.skip("OMNISLIDE_BIN not set; the CLI was not built")
    return path
