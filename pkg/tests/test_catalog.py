"""
Pruebas del catálogo de retículos y de la lectura de archivos
"""

import json
from fractions import Fraction

import pytest

from core.catalog import (
    build_gamma_ab,
    catalog_lookup,
    expectation_for_spec,
    get_entry,
    kahler_reduction,
    lattice_to_dict,
    list_entries,
    listed_dual_pairing,
    lookup_spec,
    parse_entry_spec,
    parse_lattice_file,
    parse_lattice_text,
    parse_params,
)
from core.errors import MixedMode, ParameterOutOfRange, ParseError, SingularBasis, UnknownEntry
from core.lattice_spectrum import check_dual, dual_basis, enumerate_levels


def test_catalog_lists_every_family():
    names = [e["name"] for e in list_entries()]
    assert names == ["checkerboard", "gamma_ab", "gamma_t", "product", "standard"]


def test_unknown_entry():
    with pytest.raises(UnknownEntry):
        get_entry("e8")


@pytest.mark.parametrize(
    "name, params",
    [
        ("checkerboard", {"m": 2}),
        ("checkerboard", {"m": "5/2"}),
        ("standard", {"n": 0}),
        ("standard", {"q": 1}),
        ("gamma_ab", {"a": 2}),
        ("gamma_ab", {"a": 1, "b": 3}),
        ("gamma_t", {"t": 1.0}),
        ("standard", {"scale": -1}),
    ],
)
def test_parameter_validation(name, params):
    with pytest.raises(ParameterOutOfRange):
        catalog_lookup(name, params)


def test_scale_and_label(standard1):
    B = catalog_lookup("standard", {"n": 1, "scale": 2})
    assert B.matrix == ((2, 0), (0, 2))
    assert B.label == "standard(n=1,scale=2)"
    assert standard1.label == "standard(n=1)"


def test_gamma_ab_accepts_rational_text():
    B = catalog_lookup("gamma_ab", {"a": "5/2", "b": "3"})
    assert B.mode.exact
    assert B.matrix[1][1] == Fraction(2, 5)


def test_gamma_t_dual_is_integral_but_listed_dual_is_not():
    B = catalog_lookup("gamma_t", {"t": 0.1})
    assert not B.mode.exact
    assert check_dual(dual_basis(B))
    level = enumerate_levels(dual_basis(B), 1)[0]
    assert level.l == 4
    assert level.squared_norm == pytest.approx(1.0)
    assert listed_dual_pairing(0.1)["integral"] is False


def test_entry_spec_parsing():
    assert parse_entry_spec("standard:n=1,scale=2") == ("standard", {"n": "1", "scale": "2"})
    assert parse_entry_spec("checkerboard") == ("checkerboard", {})
    assert parse_params(["left=standard:n=1", "right=standard:n=1,scale=2"]) == {
        "left": "standard:n=1",
        "right": "standard:n=1,scale=2",
    }
    with pytest.raises(ParameterOutOfRange):
        parse_params(["novalue"])


def test_product_of_mixed_modes_is_float():
    B = catalog_lookup("product", {"left": "standard:n=1", "right": "gamma_t:t=0.1"})
    assert B.dim == 6
    assert not B.mode.exact


def test_expectations():
    assert expectation_for_spec("gamma_ab:a=2,b=3").immersion is False
    gamma_t = expectation_for_spec("gamma_t:t=0.1")
    assert gamma_t.kahler is False
    assert gamma_t.claim == "they do not satisfy the first equation in (R)"
    assert len(gamma_t.notes) == 2
    assert expectation_for_spec("checkerboard:m=5").kahler is None


def test_gamma_t_note_is_derived_from_the_computed_system():
    reduction = kahler_reduction(catalog_lookup("gamma_t", {"t": 0.1}))
    assert reduction["l"] == 4
    assert reduction["off_diagonal_vanish"] is True
    assert reduction["equations"] == ["R_1 + R_2 = 1", "R_3 + R_4 = 1"]
    assert reduction["status"] == "feasible"
    note = expectation_for_spec("gamma_t:t=0.1").notes[0]
    assert "idénticamente nulas" in note
    assert "R_1 + R_2 = 1 y R_3 + R_4 = 1" in note
    assert note.endswith("el sistema es factible")


def test_kahler_reduction_reports_coupled_rows(d4):
    reduction = kahler_reduction(d4)
    assert reduction["l"] == 12
    assert reduction["off_diagonal_vanish"] is False
    assert reduction["status"] == "feasible"


def test_product_expectation_detects_mismatched_first_eigenvalue():
    entry = get_entry("product")
    mismatch = entry.expectation_for({"left": "standard:n=1", "right": "standard:n=1,scale=2"})
    assert mismatch.kahler is False and mismatch.immersion is False
    same = entry.expectation_for({"left": "standard:n=1", "right": "standard:n=1"})
    assert same.kahler is True and same.immersion is True


def test_complex_basis_matches_catalog():
    text = json.dumps({
        "n": 2,
        "complex_basis": [
            [["1", "0"], ["0", "0"]],
            [["0", "1/2"], ["0", "0"]],
            [["0", "0"], ["1", "0"]],
            [["0", "0"], ["0", "1/3"]],
        ],
    })
    B = parse_lattice_text(text)
    assert B.matrix == build_gamma_ab(2, 3).matrix


def test_basis_file_round_trip(gamma_ab):
    again = parse_lattice_text(json.dumps(lattice_to_dict(gamma_ab)))
    assert again.matrix == gamma_ab.matrix
    assert again.label == gamma_ab.label


def test_odd_dimension_file():
    B = parse_lattice_text(json.dumps({"dim": 3, "basis": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "2"]]}))
    assert B.dim == 3 and not B.has_complex_structure
    assert "n" not in lattice_to_dict(B)


def test_mixed_entries_are_refused():
    with pytest.raises(MixedMode):
        parse_lattice_text(json.dumps({"n": 1, "basis": [["1", 0.5], ["0", "1"]]}))
    with pytest.raises(MixedMode):
        parse_lattice_text(json.dumps({"n": 1, "mode": "float", "basis": [["1", "0"], ["0", "1"]]}))


def test_parse_errors_report_line():
    text = '{\n  "n": 1,\n  "basis": [["1", "x"], ["0", "1"]]\n}'
    with pytest.raises(ParseError) as info:
        parse_lattice_text(text)
    assert info.value.line == 3
    assert info.value.field == "basis"
    assert "línea 3" in str(info.value)

    with pytest.raises(ParseError) as info:
        parse_lattice_text('{\n  "n": 1,\n  "basis": [[1, 0], [0, 1]\n}')
    assert info.value.line is not None

    with pytest.raises(ParseError):
        parse_lattice_text(json.dumps({"basis": [["1", "0"], ["0", "1"]]}))
    with pytest.raises(ParseError):
        parse_lattice_text(json.dumps({"n": 2, "basis": [["1", "0"], ["0", "1"]]}))


def test_singular_file_is_refused():
    with pytest.raises(SingularBasis):
        parse_lattice_text(json.dumps({"n": 1, "basis": [["1", "2"], ["2", "4"]]}))


def test_file_label_defaults_to_stem(tmp_path):
    path = tmp_path / "hexagonal.json"
    path.write_text(json.dumps({"n": 1, "basis": [[1.0, 0.5], [0.0, 0.8660254037844386]]}), encoding="utf-8")
    B = parse_lattice_file(path)
    assert B.label == "hexagonal"
    assert not B.mode.exact
    with pytest.raises(ParseError):
        parse_lattice_file(tmp_path / "missing.json")


def test_lookup_spec_builds_products():
    B = lookup_spec("product:left=standard:n=1,right=standard:n=1")
    assert B.dim == 4
