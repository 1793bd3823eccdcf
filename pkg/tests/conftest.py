import pytest

from spinlattice.dieudonne import Isocrystal
from spinlattice.exactalg import PrimeConfig, WittRing
from spinlattice.vertexlat import QuadSpace, base_type6, build_complex


@pytest.fixture(scope="session")
def cfg():
    return PrimeConfig(3, N=12)


@pytest.fixture(scope="session")
def W(cfg):
    return WittRing.from_config(cfg)


@pytest.fixture(scope="session")
def space(cfg):
    return QuadSpace(cfg)


@pytest.fixture(scope="session")
def base(space):
    return base_type6(space)


@pytest.fixture(scope="session")
def complex1(space, base):
    return build_complex(space, base, 1)


@pytest.fixture(scope="session")
def iso(cfg):
    return Isocrystal.from_config(cfg)
