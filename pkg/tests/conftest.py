import os
import tempfile

# settings reads the environment at import time, so point the archive and the table
# cache at scratch locations before any project module is imported
_SCRATCH = tempfile.mkdtemp(prefix="polar-tests-")
os.environ["DATABASE_URL"] = f"sqlite:///{os.path.join(_SCRATCH, 'campaigns.db')}"
os.environ["POLAR_TABLE_CACHE"] = os.path.join(_SCRATCH, "tables")
os.environ.setdefault("POLAR_WORKERS", "1")

import numpy as np
import pytest

from polar_core import CodeSpec


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def table_dir(tmp_path):
    return str(tmp_path / "tables")


@pytest.fixture(scope="session")
def spec_1024():
    return CodeSpec.pw(1024, 512, crc_len=16)


@pytest.fixture(scope="session")
def spec_small():
    return CodeSpec.pw(64, 16, crc_len=16)
