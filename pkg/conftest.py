"""
ToroExtremal v1.0 - Fixtures compartidas de pytest
"""

from fractions import Fraction

import pytest

from core.catalog import catalog_lookup
from core.config import set_settings
from core.fourier_calculus import TorusShape
from core.lattice_spectrum import LatticeBasis
from core.linalg import freeze
from core.scalars import EXACT


def _diagonal_basis(*entries, label=None) -> LatticeBasis:
    rows = [[Fraction(0)] * len(entries) for _ in entries]
    for i, e in enumerate(entries):
        rows[i][i] = Fraction(e)
    return LatticeBasis(freeze(rows), EXACT, label)


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Cada prueba parte de la configuración por defecto"""
    monkeypatch.delenv("TORUS_EXTREMAL_TOL", raising=False)
    set_settings(None)
    yield
    set_settings(None)


@pytest.fixture
def diagonal():
    """Constructor de bases diagonales exactas"""
    return _diagonal_basis


@pytest.fixture
def standard1():
    return catalog_lookup("standard", {"n": 1})


@pytest.fixture
def standard2():
    return catalog_lookup("standard", {"n": 2})


@pytest.fixture
def d4():
    return catalog_lookup("checkerboard", {"m": 4})


@pytest.fixture
def gamma_ab():
    return catalog_lookup("gamma_ab", {"a": 2, "b": 3})


@pytest.fixture
def lone_pair():
    """Retículo con l(λ_1) = 1: dual diag(1, 2, 3, 5)"""
    return _diagonal_basis(1, Fraction(1, 2), Fraction(1, 3), Fraction(1, 5), label="lone_pair")


@pytest.fixture
def shape1(standard1):
    return TorusShape.from_basis(standard1)


@pytest.fixture
def shape2(standard2):
    return TorusShape.from_basis(standard2)
