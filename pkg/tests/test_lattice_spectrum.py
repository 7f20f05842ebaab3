"""
Pruebas de retículos, dual y enumeración de niveles
"""

from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, seed, settings
from hypothesis import strategies as st

from core.catalog import catalog_lookup
from core.config import Settings, set_settings
from core.errors import (
    EnumerationOverflow,
    IndexBeyondEnumeration,
    ModeMismatch,
    NoComplexStructure,
    SingularBasis,
)
from core.lattice_spectrum import (
    ComplexVector,
    LatticeBasis,
    brute_force_levels,
    check_dual,
    dual_basis,
    enumerate_levels,
    gram_matrix,
    level_for_index,
    levels_covering,
    product_lattice,
    same_lattice,
    scaled_lattice,
)
from core.linalg import freeze, identity
from core.scalars import EXACT, NumericMode

ONE, ZERO = Fraction(1), Fraction(0)


def test_standard_dual_is_identity(standard2):
    D = dual_basis(standard2)
    assert D.matrix == identity(4, EXACT)
    assert check_dual(D)


def test_gamma_ab_dual_scales_imaginary_axes(gamma_ab):
    D = dual_basis(gamma_ab)
    assert [D.matrix[i][i] for i in range(4)] == [1, 2, 1, 3]
    assert check_dual(D)


def test_checkerboard_dual_contains_half_vectors(d4):
    D = dual_basis(d4)
    assert check_dual(D)
    half = Fraction(1, 2)
    G = gram_matrix(D)
    assert all(G[i][i] > 0 for i in range(4))
    levels = enumerate_levels(D, 1)
    coords = {r.coords for r in levels[0].reps}
    assert (half, half, half, half) in coords


def test_singular_basis_is_rejected():
    B = LatticeBasis(freeze([[ONE, ONE], [ONE, ONE]]), EXACT)
    with pytest.raises(SingularBasis):
        dual_basis(B)


def test_odd_dimension_has_no_complex_structure():
    B = catalog_lookup("checkerboard", {"m": 3})
    assert not B.has_complex_structure
    with pytest.raises(NoComplexStructure):
        B.n


def test_standard_levels(standard2):
    levels = enumerate_levels(dual_basis(standard2), 2)
    first, second = levels
    assert first.squared_norm == 1
    assert first.l == 4
    assert first.multiplicity == 8
    assert [r.coords for r in first.reps] == [
        (ONE, ZERO, ZERO, ZERO),
        (ZERO, ONE, ZERO, ZERO),
        (ZERO, ZERO, ONE, ZERO),
        (ZERO, ZERO, ZERO, ONE),
    ]
    assert second.squared_norm == 2
    assert second.l == 12
    assert second.position == 2


def test_checkerboard_level_one_has_twelve_pairs(d4):
    level = enumerate_levels(dual_basis(d4), 1)[0]
    assert level.squared_norm == 1
    assert level.l == 12
    assert [r.support_size() for r in level.reps[:4]] == [1, 1, 1, 1]
    assert all(r.support_size() == 4 for r in level.reps[4:])
    assert all(r.is_canonical() for r in level.reps)


def test_level_lookup_flags(standard2):
    levels = enumerate_levels(dual_basis(standard2), 2)
    first = level_for_index(levels, 1)
    assert first.is_strictly_above_prev and not first.is_strictly_below_next
    inner = level_for_index(levels, 4)
    assert not inner.is_strictly_above_prev and not inner.is_strictly_below_next
    last = level_for_index(levels, 8)
    assert last.is_strictly_below_next and last.level.position == 1
    nxt = level_for_index(levels, 9)
    assert nxt.level.position == 2 and nxt.first_index == 9 and nxt.last_index == 32


def test_level_lookup_out_of_range(standard2):
    levels = enumerate_levels(dual_basis(standard2), 1)
    with pytest.raises(IndexBeyondEnumeration):
        level_for_index(levels, 0)
    with pytest.raises(IndexBeyondEnumeration):
        level_for_index(levels, 9)


def test_levels_covering_reaches_index(standard2):
    levels = levels_covering(dual_basis(standard2), 9)
    assert sum(lv.multiplicity for lv in levels) >= 9
    assert len(levels) == 2


def test_enumeration_cap_overflows(standard2):
    set_settings(replace(Settings(), enumeration_cap=2))
    with pytest.raises(EnumerationOverflow):
        enumerate_levels(dual_basis(standard2), 1)


def test_float_mode_enumeration(standard2):
    B = standard2.with_mode(NumericMode.float_mode())
    level = enumerate_levels(dual_basis(B), 1)[0]
    assert level.l == 4
    assert level.eigenvalue_float == pytest.approx(4 * 3.141592653589793 ** 2)


def test_float_to_exact_is_refused(standard2):
    B = standard2.with_mode(NumericMode.float_mode())
    with pytest.raises(ModeMismatch):
        B.with_mode(EXACT)


def test_product_and_scaling(standard1):
    P = product_lattice(standard1, scaled_lattice(standard1, 2))
    assert P.dim == 4
    assert [P.matrix[i][i] for i in range(4)] == [1, 1, 2, 2]
    with pytest.raises(ModeMismatch):
        product_lattice(standard1, standard1.with_mode(NumericMode.float_mode()))


def test_same_lattice_under_unimodular_change(standard1):
    other = LatticeBasis(freeze([[ONE, ONE], [ZERO, ONE]]), EXACT)
    assert same_lattice(standard1, other)
    assert not same_lattice(standard1, scaled_lattice(standard1, 2))


@st.composite
def triangular_bases(draw):
    dim = draw(st.integers(min_value=2, max_value=3))
    rows = [[ZERO] * dim for _ in range(dim)]
    for i in range(dim):
        rows[i][i] = Fraction(draw(st.integers(1, 3)), draw(st.integers(1, 2)))
        for j in range(i):
            rows[i][j] = Fraction(draw(st.integers(-2, 2)), draw(st.integers(1, 2)))
    return LatticeBasis(freeze(rows), EXACT)


@seed(7)
@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(B=triangular_bases())
def test_enumeration_matches_brute_force(B):
    D = dual_basis(B)
    fast = [lv.to_dict() for lv in enumerate_levels(D, 3)]
    slow = [lv.to_dict() for lv in brute_force_levels(D, 3)]
    assert fast == slow


@seed(13)
@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(B=triangular_bases())
def test_dual_of_dual_is_the_lattice(B):
    D = dual_basis(B)
    back = dual_basis(LatticeBasis(D.matrix, EXACT))
    assert same_lattice(LatticeBasis(back.matrix, EXACT), B)


def test_complex_components_round_trip():
    components = ((Fraction(1, 2), Fraction(-3)), (ZERO, Fraction(5, 7)))
    v = ComplexVector.from_complex(components, EXACT)
    assert v.coords == (Fraction(1, 2), Fraction(-3), ZERO, Fraction(5, 7))
    assert v.n == 2
    assert v.complex_components() == components
    assert v.to_complex() == (complex(0.5, -3.0), complex(0.0, 5 / 7))
    again = ComplexVector.from_complex([(z.real, z.imag) for z in v.to_complex()], NumericMode.float_mode())
    assert again.to_complex() == v.to_complex()
