import numpy as np
import pytest

from sectorbound.cli import packaged_example_path, parse_system_file


@pytest.fixture(scope="session")
def bench_sys():
    """The shipped third-order benchmark system."""
    return parse_system_file(packaged_example_path())


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
