import pytest

from qgol.scattering import build_scattering_unitary


@pytest.fixture(scope="session")
def op():
    return build_scattering_unitary()


@pytest.fixture(scope="session")
def cat(op):
    from qgol.gadgets import catalogue

    return catalogue(op)
