import os
import shutil

import pytest

SMALL = {
    "node_count": 20,
    "duration_s": 600,
    "calibration_start_s": 100,
    "attack_start_s": 300,
}


@pytest.fixture
def small_config():
    from uitrust import config_text

    def make(**extra):
        return config_text(**{**SMALL, **extra})

    return make


@pytest.fixture
def cli():
    path = os.environ.get("UITRUST_CLI") or shutil.which("uitrust")
    if not path:
        pytest.skip("uitrust command-line tool not found (set UITRUST_CLI)")
    return path
