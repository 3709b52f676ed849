import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))


@pytest.fixture
def rng():
    return np.random.default_rng(0x5EED)


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    """Run inside an empty directory so config/ and logs/ come from defaults."""
    monkeypatch.chdir(tmp_path)
    for var in ("UNITDIST_SEED", "UNITDIST_MAX_RETRIES", "UNITDIST_LOG_FILE"):
        monkeypatch.delenv(var, raising=False)
    return tmp_path
