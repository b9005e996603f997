import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ipdecode import build_encoder, load_alist  # noqa: E402
from ipdecode.sim import bundled_code_path  # noqa: E402


@pytest.fixture(scope="session")
def code204():
    return load_alist(bundled_code_path("regular_204_102.alist"))


@pytest.fixture(scope="session")
def enc204(code204):
    return build_encoder(code204)


@pytest.fixture(scope="session")
def toy15():
    return load_alist(bundled_code_path("regular_15_9.alist"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
