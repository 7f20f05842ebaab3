"""
Pruebas de aceptación sobre los ejemplos del catálogo
"""

import random
from fractions import Fraction

import pytest
import sympy as sp

from core.catalog import catalog_lookup, get_entry
from core.deformation import derivative_check, sample_trace_zero_alphas
from core.extremality import (
    Verdict,
    WeightCertificate,
    brute_force_oracle,
    build_immersion_system,
    build_kahler_system,
    check_farkas,
    check_outcome,
    check_weights,
    immersion_weights_symbolic,
    multiplicity_shortcut,
    solve_feasibility,
    verify_certificate,
    verify_immersion_certificate,
)
from core.fourier_calculus import TorusShape, check_identities, eigenfunction_basis
from core.lattice_spectrum import LatticeBasis, dual_basis, enumerate_levels
from core.linalg import freeze
from core.report import ReportOptions, build_report
from core.scalars import EXACT

HALF = Fraction(1, 2)


def first_level(B):
    return enumerate_levels(dual_basis(B), 1)[0]


def canonical(coords):
    """Representante de ±w con la primera coordenada no nula positiva"""
    for x in coords:
        if x != 0:
            return tuple(coords) if x > 0 else tuple(-c for c in coords)
    return tuple(coords)


def assert_kahler_geometry(B, level, outcome):
    basis = eigenfunction_basis(level, TorusShape.from_basis(B))
    report = verify_certificate(level, outcome.weights, basis)
    assert report.passed
    assert report.a.is_positive


def test_d4_golden_certificate(d4):
    level = first_level(d4)
    assert level.l == 12
    expected = {canonical(tuple(Fraction(int(i == j)) for j in range(4))) for i in range(4)}
    expected |= {canonical((HALF, s1 * HALF, s2 * HALF, s3 * HALF))
                 for s1 in (1, -1) for s2 in (1, -1) for s3 in (1, -1)}
    assert {canonical(r.coords) for r in level.reps} == expected

    S = build_kahler_system(level, 2)
    golden = tuple(Fraction(1, 4) if sum(1 for x in r.coords if x) == 1 else Fraction(1, 8)
                   for r in level.reps)
    assert check_weights(S, golden)

    outcome = solve_feasibility(S)
    assert outcome.feasible and outcome.weights.residual == 0
    assert_kahler_geometry(d4, level, outcome)
    basis = eigenfunction_basis(level, TorusShape.from_basis(d4))
    assert verify_certificate(level, WeightCertificate(golden, Fraction(0)), basis).passed


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_standard_tori_are_extremal(n):
    B = catalog_lookup("standard", {"n": n})
    level = first_level(B)
    kahler = solve_feasibility(build_kahler_system(level, n))
    assert kahler.feasible
    assert_kahler_geometry(B, level, kahler)
    immersion = solve_feasibility(build_immersion_system(level))
    assert immersion.feasible
    assert verify_immersion_certificate(level, immersion, TorusShape.from_basis(B))["system"]
    for c in immersion_weights_symbolic(immersion):
        assert sp.simplify(c - 1 / (4 * sp.pi**2)) == 0


@pytest.mark.parametrize("m", [3, 4, 5, 6, 7, 8])
def test_checkerboard_immersions(m):
    B = catalog_lookup("checkerboard", {"m": m})
    level = first_level(B)
    immersion = solve_feasibility(build_immersion_system(level))
    assert immersion.feasible
    assert verify_immersion_certificate(level, immersion)["system"]
    if m != 4:
        # D_4 tiene una familia de pesos; el resto, solución única
        for c in immersion_weights_symbolic(immersion):
            assert sp.simplify(c - 1 / (4 * sp.pi**2)) == 0
    if m % 2 == 0:
        kahler = solve_feasibility(build_kahler_system(level, m // 2))
        assert kahler.feasible
        assert_kahler_geometry(B, level, kahler)


def random_triangular_basis(rng: random.Random, dim: int) -> LatticeBasis:
    rows = [[Fraction(0)] * dim for _ in range(dim)]
    for i in range(dim):
        rows[i][i] = Fraction(rng.randint(1, 9), rng.randint(1, 9))
        for j in range(i + 1, dim):
            rows[i][j] = Fraction(rng.randint(-4, 4), rng.randint(1, 6))
    return LatticeBasis(freeze(rows), EXACT, "aleatorio")


@pytest.mark.slow
def test_single_pair_levels_are_never_extremal():
    rng = random.Random(2024)
    found = 0
    for _ in range(2000):
        n = rng.choice((2, 3))
        level = first_level(random_triangular_basis(rng, 2 * n))
        if level.l != 1:
            continue
        outcome = solve_feasibility(build_kahler_system(level, n))
        assert outcome.status == "infeasible"
        assert check_farkas(outcome.system, outcome.farkas.y)
        assert multiplicity_shortcut(level, n) is Verdict.NOT_EXTREMAL
        found += 1
        if found == 50:
            break
    assert found == 50


@pytest.mark.slow
@pytest.mark.parametrize("name, params", [
    ("standard", {"n": 1}),
    ("standard", {"n": 2}),
    ("checkerboard", {"m": 4}),
    ("gamma_ab", {"a": 2, "b": 3}),
    ("product", {"left": "standard:n=1", "right": "standard:n=1"}),
])
def test_identity_suite_on_catalog(name, params):
    B = catalog_lookup(name, params)
    level = first_level(B)
    report = check_identities(eigenfunction_basis(level, TorusShape.from_basis(B)), samples=20, seed=7)
    assert report.passed, report.failures
    assert report.reps == level.l
    assert report.operator_agreements == 20


@pytest.mark.slow
def test_oracle_agrees_on_catalog():
    lattices = [
        catalog_lookup("standard", {"n": 1}),
        catalog_lookup("standard", {"n": 2}),
        catalog_lookup("checkerboard", {"m": 3}),
        catalog_lookup("checkerboard", {"m": 4}),
        catalog_lookup("gamma_ab", {"a": 2, "b": 3}),
        catalog_lookup("gamma_t", {"t": 0.1}),
        catalog_lookup("product", {"left": "standard:n=1", "right": "standard:n=1"}),
    ]
    for B in lattices:
        level = first_level(B)
        systems = [build_immersion_system(level)]
        if B.has_complex_structure:
            systems.append(build_kahler_system(level, B.n))
        for S in systems:
            outcome = solve_feasibility(S)
            assert check_outcome(outcome)
            assert brute_force_oracle(S) == outcome.feasible, (B.label, S.kind)


def test_sampled_deformations_match_gram_extremes(standard2, shape2):
    for alpha in sample_trace_zero_alphas(shape2, 10, seed=0):
        report = derivative_check(standard2, alpha, 1)
        assert report.case == "above_prev"
        assert report.passed, report.to_dict()
        assert abs(report.d_right - report.qgram_min) <= report.tolerance
        assert abs(report.d_left - report.qgram_max) <= report.tolerance


def test_product_corollaries():
    same = catalog_lookup("product", {"left": "standard:n=1", "right": "standard:n=1"})
    level = first_level(same)
    assert solve_feasibility(build_kahler_system(level, 2)).feasible
    assert solve_feasibility(build_immersion_system(level)).feasible

    mismatch = catalog_lookup("product", {"left": "standard:n=1", "right": "standard:n=1,scale=2"})
    level = first_level(mismatch)
    kahler = solve_feasibility(build_kahler_system(level, 2))
    assert kahler.status == "infeasible"
    assert check_farkas(kahler.system, kahler.farkas.y)
    assert solve_feasibility(build_immersion_system(level)).status == "infeasible"


@pytest.mark.parametrize("name, params", [("gamma_ab", {"a": 2, "b": 3}), ("gamma_t", {"t": 0.1})])
def test_published_claims_are_reported_not_trusted(name, params):
    entry = get_entry(name)
    report = build_report(entry.build(params), ReportOptions(identities=False, levels=1,
                                                             expectation=entry.expectation_for(params)))
    for kind in ("kahler", "immersion"):
        section = report[kind]
        assert section["status"] in ("feasible", "infeasible")
        assert ("weights" in section) if section["status"] == "feasible" else section["farkas"]
        assert section["oracle"]["agrees"] is True
    assert report["expectation"]["claim"]
    assert report["discrepancies"]
