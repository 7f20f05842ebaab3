"""
Pruebas del cálculo de Fourier simbólico
"""

import math
import random

import pytest
import sympy as sp

from core.catalog import catalog_lookup
from core.errors import (
    DimensionMismatch,
    IncommensurableScale,
    ModeMismatch,
    NonRealInput,
    NotAnEigenfunction,
    UnsupportedDegree,
)
from core.extremality import build_kahler_system, solve_feasibility, verify_certificate
from core.fourier_calculus import (
    L_op,
    L_rhs,
    RealForm,
    TorusShape,
    TrigPoly,
    check_identities,
    codifferential,
    codifferential_c,
    ddc,
    eigenfunction_basis,
    exterior_d,
    exterior_dc,
    form_inner,
    form_l2_inner,
    harmonic_project,
    kahler_form,
    laplacian,
    q_alpha,
    q_alpha_polar,
    random_combination,
    trig_integrate,
    trig_mul,
)
from core.lattice_spectrum import dual_basis, enumerate_levels
from core.scalars import NumericMode


@pytest.fixture
def level1(standard1):
    return enumerate_levels(dual_basis(standard1), 1)[0]


@pytest.fixture
def pair(level1, shape1):
    """(φ, ψ) del primer representante de Z²"""
    return eigenfunction_basis(level1, shape1).pairs[0]


def test_laplacian_of_a_mode(shape1):
    F = shape1.field
    f = TrigPoly.mode((1, 2), shape1)
    assert laplacian(f).equals(f.scale_by(F.gaussian(20) * F.pi_power(2)))


def test_frequencies_add_under_product(shape1):
    product = TrigPoly.mode((1, 0), shape1) * TrigPoly.mode((0, 1), shape1)
    assert product.equals(TrigPoly.mode((1, 1), shape1))
    assert product.frequencies() == [(1, 1)]


def test_integral_keeps_only_zero_mode(shape1, pair):
    phi, psi = pair
    assert trig_integrate(trig_mul(phi, phi)) == 1
    assert trig_integrate(trig_mul(phi, psi)) == 0


def test_cosine_and_sine_are_real(pair, shape1):
    phi, psi = pair
    assert phi.is_real() and psi.is_real()
    assert not TrigPoly.mode((1, 0), shape1).is_real()


def test_evaluate_at_origin(pair):
    phi, psi = pair
    assert phi.evaluate((0.0, 0.0)).real == pytest.approx(math.sqrt(2))
    assert abs(psi.evaluate((0.0, 0.0))) < 1e-12


def test_kahler_form_is_area_form(shape1):
    real = kahler_form(shape1).to_real()
    assert real.degree == 2
    assert real.component((0, 1)).equals(TrigPoly.constant(1, shape1))


def test_incommensurable_scales_are_refused(shape1):
    F = shape1.field
    scaled = TrigPoly.build({F.key([1, 0]): F.gaussian(1)}, shape1, sp.sqrt(2))
    with pytest.raises(IncommensurableScale):
        scaled + TrigPoly.constant(1, shape1)


def test_float_constant_in_exact_mode(shape1):
    with pytest.raises(ModeMismatch):
        TrigPoly.constant(0.5, shape1)


def test_frequency_length_must_match(shape1):
    with pytest.raises(DimensionMismatch):
        TrigPoly.mode((1, 0, 0), shape1)


def test_different_tori_do_not_mix(shape1, shape2):
    with pytest.raises(DimensionMismatch):
        TrigPoly.constant(1, shape1) + TrigPoly.constant(1, shape2)


def test_d_squared_vanishes(pair):
    phi, _ = pair
    f = RealForm.from_function(phi)
    assert exterior_d(exterior_d(f)).is_zero()
    assert exterior_dc(exterior_dc(f)).is_zero()


def test_codifferential_composes_to_laplacian(pair):
    phi, _ = pair
    f = RealForm.from_function(phi)
    assert codifferential(exterior_d(f)).as_function().equals(laplacian(phi))
    assert codifferential_c(exterior_dc(f)).as_function().equals(laplacian(phi))


def test_codifferential_is_adjoint_of_d(pair):
    phi, psi = pair
    f = RealForm.from_function(phi)
    beta = exterior_d(RealForm.from_function(psi + phi))
    left = form_l2_inner(exterior_d(f), beta)
    right = form_l2_inner(f, codifferential(beta))
    assert sp.simplify(left - right) == 0


def test_unsupported_degrees(pair):
    phi, _ = pair
    f = RealForm.from_function(phi)
    with pytest.raises(UnsupportedDegree):
        codifferential(f)
    one_form = exterior_d(f)
    with pytest.raises(UnsupportedDegree):
        exterior_d(exterior_d(one_form))


def test_ddc_norm_and_harmonic_part(pair, level1, shape1):
    phi, _ = pair
    F = shape1.field
    lam = F.from_value(level1.eigenvalue)
    eta = ddc(phi)
    assert form_inner(eta, eta).equals(trig_mul(phi, phi).scale_by(lam * lam))
    assert harmonic_project(eta).is_zero()
    assert not harmonic_project(eta.multiply(phi)).is_zero()


def test_operator_identity_on_eigenfunction(pair, level1):
    phi, _ = pair
    assert L_op(phi).equals(L_rhs(phi, level1.eigenvalue))


def test_rhs_rejects_wrong_eigenvalue(pair):
    phi, _ = pair
    with pytest.raises(NotAnEigenfunction):
        L_rhs(phi, 1)


def test_q_alpha_requires_real_input(shape1):
    with pytest.raises(NonRealInput):
        q_alpha(TrigPoly.mode((1, 0), shape1), kahler_form(shape1))


def test_polar_form_is_symmetric(pair, shape1):
    phi, psi = pair
    omega = kahler_form(shape1)
    assert sp.simplify(q_alpha_polar(phi, psi, omega) - q_alpha_polar(psi, phi, omega)) == 0
    assert sp.simplify(q_alpha_polar(phi, phi, omega) - q_alpha(phi, omega)) == 0


def test_identity_battery_exact(standard2):
    level = enumerate_levels(dual_basis(standard2), 1)[0]
    basis = eigenfunction_basis(level, TorusShape.from_basis(standard2))
    report = check_identities(basis, samples=3, seed=1)
    assert report.passed, report.failures
    assert report.reps == 4
    assert report.grad_phi == report.grad_psi == report.ddc_norm == report.l_sum == 4
    assert report.operator_agreements == report.operator_samples == 3
    assert report.orthonormal


def test_identity_battery_float(standard1):
    B = standard1.with_mode(NumericMode.float_mode())
    level = enumerate_levels(dual_basis(B), 1)[0]
    report = check_identities(eigenfunction_basis(level, TorusShape.from_basis(B)), samples=2)
    assert report.passed, report.failures
    assert report.to_dict()["passed"] is True


@pytest.fixture
def basis2(standard2):
    level = enumerate_levels(dual_basis(standard2), 1)[0]
    return eigenfunction_basis(level, TorusShape.from_basis(standard2))


def test_codifferential_c_is_adjoint_of_dc_on_random_forms(basis2):
    rng = random.Random(17)
    for _ in range(3):
        f = random_combination(basis2, rng)
        g = random_combination(basis2, rng)
        zero_form = RealForm.from_function(f)
        beta = exterior_dc(RealForm.from_function(g))
        left = form_l2_inner(exterior_dc(zero_form), beta)
        assert sp.simplify(left - form_l2_inner(zero_form, codifferential_c(beta))) == 0
        one_form = exterior_d(zero_form)
        gamma = exterior_dc(exterior_d(RealForm.from_function(g)) + beta)
        left = form_l2_inner(exterior_dc(one_form), gamma)
        assert sp.simplify(left - form_l2_inner(one_form, codifferential_c(gamma))) == 0


def test_harmonic_projection_of_mixed_potentials(standard2, basis2):
    levels = enumerate_levels(dual_basis(standard2), 2)
    upper = eigenfunction_basis(levels[1], basis2.shape)
    rng = random.Random(23)
    psi = random_combination(basis2, rng) + random_combination(upper, rng)
    assert not laplacian(psi).equals(psi.scale_by(basis2.shape.field.from_value(levels[0].eigenvalue)))
    assert harmonic_project(ddc(psi)).is_zero()
    phi = basis2.pairs[0][0]
    product = ddc(phi).multiply(phi)
    projected = harmonic_project(product)
    assert not projected.is_zero()
    assert harmonic_project(projected).equals(projected)


def test_q_alpha_of_kahler_form_is_minus_eigenvalue_times_norm(basis2):
    omega = kahler_form(basis2.shape)
    rng = random.Random(29)
    for _ in range(3):
        f = random_combination(basis2, rng)
        norm = trig_integrate(trig_mul(f, f))
        assert sp.simplify(q_alpha(f, omega) + basis2.eigenvalue * norm) == 0


def test_gamma_t_identities_and_certificate_in_float_mode():
    B = catalog_lookup("gamma_t", {"t": 0.1})
    level = enumerate_levels(dual_basis(B), 1)[0]
    basis = eigenfunction_basis(level, TorusShape.from_basis(B))
    report = check_identities(basis, samples=3, seed=2)
    assert report.passed, report.failures
    assert report.reps == 4
    outcome = solve_feasibility(build_kahler_system(level, 2))
    assert outcome.feasible
    assert verify_certificate(level, outcome.weights, basis).passed
