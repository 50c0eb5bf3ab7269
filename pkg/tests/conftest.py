from __future__ import annotations

import pytest

from wgr_noise.config import RefinementConfig
from wgr_noise.materials import load_bundled, properties_at
from wgr_noise.modes import reference_mode
from wgr_noise.reference import load_reference_tables
from wgr_noise.types import Shape


MATERIAL_TEXT = """\
name = "test crystal"
n = 1.5
C11 = 100e9
C12 = 40e9
C44 = 30e9
p11 = 0.1
p12 = 0.2
p44 = 0.05

property gamma {
    4       100
    400     1
}
property dn_dT_over_n {
    4       1e-6
    400     1e-4
}
property phi linear {
    4       1e-8
    400     1e-6
}
property alpha {
    4       1e-9
    400     1e-5
}
"""


@pytest.fixture(scope="session")
def caf2():
    return load_bundled("caf2")


@pytest.fixture(scope="session")
def tables():
    return load_reference_tables()


@pytest.fixture(scope="session")
def cold(caf2, tables):
    return properties_at(caf2, tables.temperature)


@pytest.fixture(scope="session")
def moduli(caf2, tables):
    return caf2.moduli_at(tables.temperature)


@pytest.fixture(scope="session")
def sphere_1mm_mode(cold):
    return reference_mode(Shape.SPHERE, 1e-3, n=cold.n)


@pytest.fixture(scope="session")
def sphere_100um_mode(cold):
    return reference_mode(Shape.SPHERE, 1e-4, n=cold.n)


@pytest.fixture
def material_text():
    return MATERIAL_TEXT


@pytest.fixture(scope="session")
def coarse():
    """Refinement settings for the quicker finite-element tests."""
    return RefinementConfig(mode_size_fraction=0.5, grading=0.4, energy_tolerance=0.1)
