import pytest

from zmharvest import config as C


@pytest.fixture
def fig1():
    """gamma = 1, T = W = 1, L = 10, detectors half a circumference apart."""
    return C.validate(C.symmetric_config())


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: one numbered acceptance criterion")
