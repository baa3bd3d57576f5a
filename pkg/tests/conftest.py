import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def ex1_data():
    from mslcombine.sampling import make_rng
    from mslcombine.simulation import generate_ex1

    return generate_ex1(1.0, 150, 150, make_rng(99, 0))


@pytest.fixture(scope="session")
def pancreatic_fixture():
    return DATA_DIR / "pancreatic_synthetic.csv"


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
