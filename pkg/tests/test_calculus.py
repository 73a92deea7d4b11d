import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from sfcalc import calculus as calc
from sfcalc import slicefun as sf
from sfcalc.errors import DivergenceError, DomainError, GeometryError, PreconditionError, UnsafeContourError
from sfcalc.hypercomplex import Quaternion, basis_vector, imaginary_unit, paravector, quaternion_unit
from sfcalc.operator import (
    ParavectorOperator,
    lift,
    opnorm,
    random_operator,
    random_quaternion_operator,
    random_two_group_operator,
    s_resolvent,
    scalar_compose,
)
from sfcalc.spectrum import circle_contour, s_spectrum

from oracles import operator_matrix, scalar_action


def dense(T):
    return operator_matrix(T.components, T.n)


def diag_operator():
    # T0 = diag(1, -1), T1 = 0 on R_1
    return ParavectorOperator((np.diag([1.0, -1.0]), np.zeros((2, 2))))


# -- worked examples --------------------------------------------------


def test_identity_function_gives_identity():
    T = diag_operator()
    C = circle_contour(basis_vector(1, 1), 0.0, 2.0, 256)
    res = calc.func_calc(sf.constant(1.0), T, C)
    assert opnorm(res.value - np.eye(4)) < 1e-12


def test_square_and_exp_of_random_operator():
    T = random_operator(2, 3, 7)
    R = dense(T)
    C = calc.default_contour(T, nodes=512)
    sq = calc.func_calc(sf.polynomial([0.0, 0.0, 1.0]), T, C).value
    assert opnorm(sq - R @ R) < 1e-8
    ex = calc.func_calc(sf.named("exp"), T, C).value
    assert opnorm(ex - expm(R)) < 1e-7


def test_contour_through_spectrum_is_unsafe():
    T = diag_operator()
    # |1| is on the circle of radius 1
    with pytest.raises(UnsafeContourError) as info:
        calc.func_calc(sf.constant(1.0), T, circle_contour(basis_vector(1, 1), 0.0, 1.02, 64))
    assert min(info.value.margins) < 0.1


def test_contour_missing_spectrum_is_rejected():
    T = diag_operator()
    C = circle_contour(basis_vector(1, 1), 1.0, 0.5, 64)
    with pytest.raises(GeometryError):
        calc.func_calc(sf.constant(1.0), T, C)
    # allowed when the caller asks for a partial integral
    calc.func_calc(sf.constant(1.0), T, C, enclose_all=False)


def test_pole_inside_contour_is_rejected():
    T = diag_operator()
    C = circle_contour(basis_vector(1, 1), 0.0, 3.0, 64)
    with pytest.raises(DomainError):
        calc.func_calc(sf.inverse_shift(2.0), T, C)


def test_left_function_in_right_calculus_is_rejected():
    T = random_operator(2, 2, 1)
    C = calc.default_contour(T, nodes=64)
    with pytest.raises(PreconditionError):
        calc.func_calc(sf.left_series([0.0, basis_vector(1, 2)]), T, C, side="right")


def test_rational_function_matches_resolvent():
    T = random_operator(1, 2, 3)
    C = calc.default_contour(T, nodes=512)
    a = 5.0 + C.circles[0].radius
    got = calc.func_calc(sf.inverse_shift(a), T, C).value
    R = dense(T)
    assert opnorm(got - np.linalg.inv(R - a * np.eye(R.shape[0]))) < 1e-9


# -- polynomial exactness and independence --------------------------------


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 6))
def test_polynomial_exactness(seed, degree):
    rng = np.random.default_rng(seed)
    T = random_operator(int(rng.integers(1, 4)), int(rng.integers(2, 4)), seed)
    coeffs = rng.uniform(-1, 1, degree + 1)
    C = calc.default_contour(T, nodes=512)
    got = calc.func_calc(sf.polynomial(coeffs), T, C).value
    R = dense(T)
    direct = sum(c * np.linalg.matrix_power(R, m) for m, c in enumerate(coeffs))
    assert opnorm(got - direct) < 1e-8


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6))
def test_independence_of_unit_and_radius(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    T = random_operator(n, 3, seed)
    f = sf.named("exp")
    a = calc.func_calc(f, T, calc.default_contour(T, nodes=512))
    J = imaginary_unit(rng.normal(size=n), normalize=True)
    spec = s_spectrum(T)
    b = calc.func_calc(f, T, calc.default_contour(T, J, 512, radius=spec.max_modulus() + 2.0))
    assert opnorm(a.value - b.value) <= 2.0 * (a.err_estimate + b.err_estimate)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["exp", "sin", "cos"]))
def test_left_right_agree_for_intrinsic(seed, name):
    T = random_operator(2, 3, seed)
    gap, est = calc.left_right_agreement(sf.named(name), T, calc.default_contour(T, nodes=512))
    assert gap < 1e-7


def test_left_right_agreement_needs_intrinsic():
    T = random_operator(1, 2, 0)
    with pytest.raises(PreconditionError):
        calc.left_right_agreement(sf.left_series([1.0]), T, calc.default_contour(T, nodes=16))


def test_left_calculus_with_clifford_coefficients():
    # f(x) = x a is left regular; f(T) must be T composed with the scalar a on the right
    T = random_operator(2, 2, 11)
    a = paravector(0.3, -0.2, 0.5)
    f = sf.left_series([0.0, a])
    got = calc.func_calc(f, T, calc.default_contour(T, nodes=512)).value
    expected = dense(T) @ scalar_action(a.coeffs, 2, 2)
    assert opnorm(got - expected) < 1e-9


def test_right_calculus_with_clifford_coefficients():
    T = random_operator(2, 2, 12)
    a = paravector(0.3, -0.2, 0.5)
    f = sf.right_series([0.0, a])
    got = calc.func_calc(f, T, calc.default_contour(T, nodes=512), side="right").value
    expected = scalar_action(a.coeffs, 2, 2) @ dense(T)
    assert opnorm(got - expected) < 1e-9


# -- quadrature internals -------------------------------------------------


def test_batched_route_matches_pointwise_route():
    T = random_operator(3, 2, 5)
    C = calc.default_contour(T, nodes=128)
    for f, side in (
        (sf.named("exp"), "left"),
        (sf.named("cos"), "right"),
        (sf.left_series([basis_vector(2, 3), 1.0]), "left"),
        (sf.right_series([0.0, basis_vector(1, 3)]), "right"),
    ):
        batched, _ = calc._integrate(T, C, f, side)
        pointwise = calc._integrate_pointwise(T, C, f, side)
        assert opnorm(batched - pointwise) < 1e-11


def test_error_estimate_tracks_halving():
    T = random_operator(2, 3, 21)
    f = sf.named("exp")
    R = dense(T)
    C = calc.default_contour(T, nodes=32)
    res = calc.func_calc(f, T, C)
    half = calc.func_calc(f, T, C.halved()).value
    # the estimate is the gap to the even-node subrule plus a rounding floor
    assert res.err_estimate >= opnorm(res.value - half)
    assert opnorm(res.value - expm(R)) <= res.err_estimate


def test_geometric_convergence():
    T = random_operator(2, 3, 8)
    R = dense(T)
    f = sf.named("exp")
    C = calc.default_contour(T, nodes=8)
    errors = []
    for N in (8, 16, 32):
        c = circle_contour(C.I, 0.0, C.circles[0].radius, N)
        errors.append(opnorm(calc.func_calc(f, T, c).value - expm(R)))
    assert errors[1] < 0.2 * errors[0] and errors[2] < 0.2 * errors[1]


def test_result_json():
    T = diag_operator()
    res = calc.func_calc(sf.constant(1.0), T, circle_contour(basis_vector(1, 1), 0.0, 2.0, 64))
    data = res.to_json()
    assert data["nodes"] == 64 and data["side"] == "left"
    assert np.allclose(data["value"], np.eye(4), atol=1e-12)


# -- projectors -----------------------------------------------------------


def test_riesz_diagonal_example():
    T = diag_operator()
    spec = s_spectrum(T)
    k = [i for i, sp in enumerate(spec) if sp.u > 0]
    P, Tp = calc.riesz_projector(T, spec, k, nodes=256)
    # the eigenvalue +1 lives on the first coordinate of every blade block
    expected = np.kron(np.eye(2), np.diag([1.0, 0.0]))
    assert opnorm(P - expected) < 1e-12
    assert opnorm(Tp - dense(T) @ P) < 1e-12


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_two_group_projectors(seed):
    G = random_two_group_operator(2, 4, seed)
    spec = s_spectrum(G)
    groups = [[k for k, sp in enumerate(spec) if sp.u < 0], [k for k, sp in enumerate(spec) if sp.u > 0]]
    Ps = []
    for sub in groups:
        P, Tp = calc.riesz_projector(G, spec, sub, nodes=512)
        assert max(calc.projector_residuals(G, P, Tp).values()) < 1e-8
        Ps.append(P)
    assert opnorm(Ps[0] + Ps[1] - np.eye(G.size)) < 1e-8


def test_full_subset_gives_identity():
    T = random_operator(1, 3, 4)
    spec = s_spectrum(T)
    P, _ = calc.riesz_projector(T, spec, range(len(spec)), nodes=512, radius=0.05)
    assert opnorm(P - np.eye(T.size)) < 1e-8


# -- composition integrals ----------------------------------------------


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_lemma_recovers_b(seed):
    rng = np.random.default_rng(seed)
    n, d = int(rng.integers(1, 4)), 2
    B = rng.uniform(-1, 1, (d * 2**n, d * 2**n))
    p = paravector(*rng.uniform(-0.5, 0.5, n + 1))
    C = circle_contour(basis_vector(1, n), 0.0, 1.5, 256)
    assert opnorm(calc.lemma_integral(B, p, C) - B) < 1e-9
    for f in (sf.polynomial([0.0, 0.0, 1.0]), sf.named("exp")):
        expected = B @ scalar_action(sf.evaluate(f, p).coeffs, n, d)
        assert opnorm(calc.lemma_integral(B, p, C, f) - expected) < 1e-9


def test_lemma_needs_p_inside():
    B = np.eye(4)
    C = circle_contour(basis_vector(1, 1), 0.0, 0.5, 64)
    with pytest.raises(GeometryError):
        calc.lemma_integral(B, paravector(1.0, 0.0), C)


def test_scalar_compose_is_right_action():
    B = np.arange(16.0).reshape(4, 4)
    a = paravector(0.5, 2.0)
    assert np.allclose(scalar_compose(B, a, "right"), B @ scalar_action(a.coeffs, 1, 2))


# -- product rule ---------------------------------------------------------


@pytest.mark.parametrize("seed", range(4))
def test_product_rule(seed):
    T = random_operator(2, 2, seed)
    pairs = (
        (sf.identity(), sf.identity()),
        (sf.named("exp"), sf.left_series([basis_vector(1, 2), 1.0])),
        (sf.polynomial([0.0, 0.0, 1.0]), sf.left_series([0.0, basis_vector(2, 2)])),
    )
    for f, g in pairs:
        assert calc.product_rule_residual(f, g, T, nodes=512) < 1e-7


def test_product_rule_identity_pair_is_square():
    T = random_operator(1, 2, 9)
    C = calc.default_contour(T, nodes=512)
    xx = calc.func_calc(sf.pointwise_product(sf.identity(), sf.identity()), T, C).value
    R = dense(T)
    assert opnorm(xx - R @ R) < 1e-9


# -- Laplace --------------------------------------------------------------


@pytest.mark.parametrize("side", ["left", "right"])
def test_laplace_clifford(side):
    T = random_operator(2, 2, 13)
    s = paravector(2.0 * T.norm_bound() + 0.1, 0.4, -0.7)
    got = calc.laplace_resolvent(T, s, side)
    assert opnorm(got - s_resolvent(T, s, side)) < 1e-6


@pytest.mark.parametrize("side", ["left", "right"])
def test_laplace_quaternion(side):
    Q = random_quaternion_operator(4, 13)
    s = Quaternion(2.0 * Q.norm_bound() + 0.1, 0.3, 0.2, -0.6)
    got = calc.laplace_resolvent(Q, s, side)
    assert opnorm(got - s_resolvent(Q, s, side)) < 1e-6


def test_laplace_real_scalar_is_matrix_resolvent():
    T = random_operator(1, 2, 14)
    R = dense(T)
    s0 = 2.0 * T.norm_bound() + 0.5
    got = calc.laplace_resolvent(T, paravector(s0, 0.0))
    assert opnorm(got - np.linalg.inv(s0 * np.eye(4) - R)) < 1e-6


def test_laplace_diverges_inside_norm_bound():
    T = random_operator(1, 2, 14)
    with pytest.raises(DivergenceError):
        calc.laplace_resolvent(T, paravector(0.5 * T.norm_bound(), 1.0))


# -- scalar Cauchy formula ------------------------------------------------


def test_cauchy_formula_is_slice_independent():
    g = sf.left_series([paravector(0.2, 1.0, 0.0, -0.5), basis_vector(1, 3) * basis_vector(3, 3)])
    x = paravector(0.2, 0.1, -0.3, 0.2)
    for I in (basis_vector(1, 3), imaginary_unit([0.0, 0.6, 0.8])):
        for r in (1.0, 2.5):
            got = calc.cauchy_eval(g, x, circle_contour(I, 0.0, r, 256))
            assert got.isclose(sf.evaluate(g, x), 1e-12)


def test_cauchy_formula_right_and_quaternion():
    g = sf.right_series([Quaternion(0.1, 1.0, 0.0, 0.5), Quaternion(0.0, 0.0, 1.0)])
    x = Quaternion(0.3, 0.1, -0.2, 0.4)
    C = circle_contour(quaternion_unit([0.0, 1.0, 0.0]), 0.0, 2.0, 256)
    for form in ("I", "II"):
        assert calc.cauchy_eval(g, x, C, "right", form).isclose(sf.evaluate(g, x), 1e-12)


def test_lift_matches_oracle_action():
    a = paravector(0.1, 0.2, -0.3)
    assert np.allclose(lift(a, 3), scalar_action(a.coeffs, 2, 3))
    assert math.isclose(opnorm(lift(a, 3)), a.norm(), rel_tol=1e-12)
