import math

import mpmath as mp
import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from stable_jacobi import (FULL_INTERVAL, Interval, JacobiParams,
                           NotInSpaceError, TestFunction, eval_orthonormal,
                           fourier_jacobi_coefficient,
                           fourier_jacobi_coefficients, gauss_jacobi_rule,
                           measure_total, orthonormal_as_polynomial,
                           orthonormal_basis, recurrence_coefficients, weight,
                           weighted_abs_power_integral, weighted_lp_norm)

# ---------------------------------------------------------------------------
# independent oracles


def _norm_squared(zeta, eta, m):
    """Squared weighted L2 norm of the classical degree-m Jacobi polynomial."""
    s = zeta + eta
    log = ((s + 1.0) * math.log(2.0)
           + special.gammaln(m + zeta + 1.0) + special.gammaln(m + eta + 1.0)
           - special.gammaln(m + s + 1.0) - special.gammaln(m + 1.0)
           - math.log(2.0 * m + s + 1.0))
    return math.exp(log)


def oracle_orthonormal(zeta, eta, m, u):
    return special.eval_jacobi(m, zeta, eta, u) / math.sqrt(
        _norm_squared(zeta, eta, m))


def oracle_weighted_integral(f, zeta, eta, a, b, splits=()):
    """High-precision tanh-sinh quadrature; split at interior kinks.

    Evaluation points that round onto the interval endpoints (where an
    integrand may be singular) are nudged inward by one ulp; the tanh-sinh
    weights there are far below the comparison tolerance.
    """
    mp.mp.dps = 30
    pts = [a] + sorted(s for s in splits if a < s < b) + [b]

    def integrand(u):
        x = float(u)
        if x == a:
            x = math.nextafter(a, b)
        elif x == b:
            x = math.nextafter(b, a)
        return f(x) * (1 - u) ** zeta * (1 + u) ** eta

    return float(mp.quad(integrand, pts))


# ---------------------------------------------------------------------------
# parameters, weight, measure


def test_parameter_validation():
    with pytest.raises(ValueError):
        JacobiParams(-1.0, 0.0)
    with pytest.raises(ValueError):
        JacobiParams(0.0, -1.5)
    with pytest.raises(ValueError):
        JacobiParams(-0.5, 0.0).require_nonnegative()
    JacobiParams(-0.5, -0.5)  # fine without the stochastic gate


def test_interval_validation():
    with pytest.raises(ValueError):
        Interval(-1.5, 0.0)
    with pytest.raises(ValueError):
        Interval(0.5, 0.5)
    with pytest.raises(ValueError):
        Interval(0.5, -0.5)


def test_weight_values_and_domain():
    params = JacobiParams(1.0, 2.0)
    assert weight(params, 0.0) == 1.0
    npt.assert_allclose(weight(params, 0.5), 0.5 * 1.5 ** 2, rtol=1e-15)
    with pytest.raises(ValueError):
        weight(params, 1.5)
    # negative exponent blows up at the matching endpoint
    with pytest.raises(ValueError):
        weight(JacobiParams(-0.5, 0.0), 1.0)


@pytest.mark.parametrize("zeta,eta", [(0.0, 0.0), (0.5, 0.5), (1.0, 2.0),
                                      (-0.5, 0.25)])
def test_measure_total_matches_beta_function(zeta, eta):
    expected = 2.0 ** (zeta + eta + 1.0) * special.beta(zeta + 1.0, eta + 1.0)
    npt.assert_allclose(measure_total(JacobiParams(zeta, eta)), expected,
                        rtol=1e-14)


def test_weight_bounded_cases():
    assert FULL_INTERVAL.weight_bounded(JacobiParams(0.0, 0.0))
    assert FULL_INTERVAL.weight_bounded(JacobiParams(1.0, 1.0))
    # one-sided exponents push the sup above 1 away from the matching endpoint
    assert not Interval(-0.5, 0.5).weight_bounded(JacobiParams(1.0, 0.0))
    assert not Interval(-0.5, 0.5).weight_bounded(JacobiParams(0.0, 1.0))
    # interior maximum: (1-u)^2 (1+u) peaks at u = -1/3 with value 32/27
    assert not FULL_INTERVAL.weight_bounded(JacobiParams(2.0, 1.0))
    assert Interval(-1.0, -0.9).weight_bounded(JacobiParams(1.0, 0.0)) is False


# ---------------------------------------------------------------------------
# recurrence and evaluation


def test_legendre_recurrence_constants():
    a, b = recurrence_coefficients(JacobiParams(0.0, 0.0), 3)
    npt.assert_allclose(a, 0.0, atol=1e-16)
    npt.assert_allclose(b[0] ** 2, 1.0 / 3.0, rtol=1e-15)
    npt.assert_allclose(b[1] ** 2, 4.0 / 15.0, rtol=1e-15)


def test_constant_term_is_inverse_sqrt_mass(legendre):
    assert eval_orthonormal(legendre, 0, 0.3) == pytest.approx(
        1.0 / math.sqrt(2.0), abs=1e-15)
    params = JacobiParams(1.0, 1.0)
    assert eval_orthonormal(params, 0, -0.7) == pytest.approx(
        1.0 / math.sqrt(4.0 / 3.0), rel=1e-15)


@pytest.mark.parametrize("zeta,eta", [(0.0, 0.0), (0.5, 0.0), (1.0, 2.0),
                                      (2.5, 0.25)])
@pytest.mark.parametrize("m", [1, 2, 5, 17, 30])
def test_evaluation_matches_scipy_jacobi(zeta, eta, m):
    u = np.linspace(-1.0, 1.0, 23)
    expected = oracle_orthonormal(zeta, eta, m, u)
    npt.assert_allclose(eval_orthonormal(JacobiParams(zeta, eta), m, u),
                        expected, rtol=1e-10, atol=1e-12)


def test_basis_rows_match_single_degree_evaluation():
    params = JacobiParams(0.5, 1.5)
    u = np.array([-0.9, -0.2, 0.0, 0.4, 0.99])
    rows = orthonormal_basis(params, 12, u)
    for m in (0, 3, 12):
        npt.assert_array_equal(rows[m], eval_orthonormal(params, m, u))


def test_degree_cap_enforced(legendre):
    with pytest.raises(ValueError):
        eval_orthonormal(legendre, 513, 0.0)
    with pytest.raises(ValueError):
        eval_orthonormal(legendre, -1, 0.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 5.0), st.floats(0.0, 5.0), st.integers(1, 12))
def test_recurrence_agrees_with_scipy_everywhere(zeta, eta, m):
    u = np.linspace(-1.0, 1.0, 9)
    got = eval_orthonormal(JacobiParams(zeta, eta), m, u)
    npt.assert_allclose(got, oracle_orthonormal(zeta, eta, m, u),
                        rtol=1e-9, atol=1e-10)


# ---------------------------------------------------------------------------
# quadrature


def test_gauss_rule_order_one(legendre):
    rule = gauss_jacobi_rule(legendre, 1)
    npt.assert_allclose(rule.nodes, [0.0], atol=1e-15)
    npt.assert_allclose(rule.weights, [2.0], rtol=1e-15)


def test_gauss_rule_order_two_legendre(legendre):
    rule = gauss_jacobi_rule(legendre, 2)
    npt.assert_allclose(rule.nodes, [-1.0 / math.sqrt(3.0),
                                     1.0 / math.sqrt(3.0)], rtol=1e-15)
    npt.assert_allclose(rule.weights, [1.0, 1.0], rtol=1e-14)


def test_gauss_rule_weights_sum_to_mass():
    for zeta, eta in [(1.0, 1.0), (0.5, 2.0), (-0.25, 0.75)]:
        rule = gauss_jacobi_rule(JacobiParams(zeta, eta), 7)
        npt.assert_allclose(rule.weights.sum(),
                            measure_total(JacobiParams(zeta, eta)), rtol=1e-13)


@pytest.mark.parametrize("zeta,eta,order", [(0.0, 0.0, 6), (1.5, 0.5, 9)])
def test_gauss_rule_is_exact_to_design_degree(zeta, eta, order):
    """Monomials up to degree 2*order-1 integrate to the quad oracle."""
    rule = gauss_jacobi_rule(JacobiParams(zeta, eta), order)
    for k in range(2 * order):
        expected = oracle_weighted_integral(lambda u, k=k: u ** k, zeta, eta,
                                            -1.0, 1.0)
        npt.assert_allclose(rule.integrate(lambda u: u ** k), expected,
                            rtol=1e-12, atol=1e-13)


def test_rule_arrays_are_frozen(legendre):
    rule = gauss_jacobi_rule(legendre, 5)
    with pytest.raises(ValueError):
        rule.nodes[0] = 0.0


def test_orthonormality_spot_check():
    params = JacobiParams(0.5, 2.0)
    rule = gauss_jacobi_rule(params, 25)
    basis = orthonormal_basis(params, 20, rule.nodes)
    gram = (basis * rule.weights) @ basis.T
    npt.assert_allclose(gram, np.eye(21), atol=5e-13)


# ---------------------------------------------------------------------------
# test-function catalog


@pytest.mark.parametrize("text,kind", [
    ("poly:1,-2,0.5", "polynomial"),
    ("const:3", "constant"),
    ("power:2,1", "power"),
    ("power:-0.5,-1", "power"),
    ("step:0", "step"),
    ("cos:4", "cosine"),
])
def test_parse_descriptor_round_trip(text, kind):
    g = TestFunction.parse(text)
    assert g.kind == kind
    assert TestFunction.parse(g.descriptor()) == g


@pytest.mark.parametrize("bad", ["", "sin:1", "poly:", "power:1", "const:x",
                                 "poly:1;2", "power:2,0.25"])
def test_parse_rejects_malformed_descriptors(bad):
    """Unknown kinds, arity errors, and off-catalog centers all refuse."""
    with pytest.raises(ValueError):
        TestFunction.parse(bad)


def test_polynomial_evaluation_and_degree():
    g = TestFunction.parse("poly:1,-1,2")
    npt.assert_allclose(g(np.array([0.0, 0.5, -1.0])),
                        [1.0, 1.0, 4.0], rtol=1e-15)
    assert g.degree == 2
    assert TestFunction.parse("poly:0,0").is_zero
    assert not g.is_zero


def test_step_is_right_continuous():
    g = TestFunction.step(0.25)
    npt.assert_array_equal(g(np.array([0.2, 0.25, 0.3])), [0.0, 1.0, 1.0])


def test_power_semantics():
    g = TestFunction.parse("power:2,1")
    assert g(0.5) == pytest.approx(0.25)
    sing = TestFunction.parse("power:-0.5,-1")
    assert sing(0.0) == pytest.approx(1.0)
    assert sing(-0.75) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        sing(-1.0)  # the singular point itself


def test_cosine_and_sign_changes():
    g = TestFunction.cosine(4.0)
    assert g(0.0) == 1.0
    # zeros of cos(4u) inside [-1, 1]: only +-pi/8 (3pi/8 > 1)
    npt.assert_allclose(sorted(g.sign_changes(FULL_INTERVAL)),
                        [-math.pi / 8, math.pi / 8], rtol=1e-12)
    assert list(TestFunction.step(0.1).discontinuities(FULL_INTERVAL)) == [0.1]


def test_membership_decisions(legendre):
    iv = FULL_INTERVAL
    assert TestFunction.parse("poly:1,2").in_lp(3.0, legendre, iv)
    assert TestFunction.parse("power:-0.4,1").in_lp(2.0, legendre, iv)
    # s*p + eta = -1 exactly: diverges
    assert not TestFunction.parse("power:-0.5,-1").in_lp(2.0, legendre, iv)
    # away from the closure the singularity never enters the domain
    assert TestFunction.parse("power:-2,-1").in_lp(2.0, legendre,
                                                   Interval(0.0, 1.0))


# ---------------------------------------------------------------------------
# weighted integrals and norms


def test_constant_norm_example(legendre):
    assert weighted_lp_norm(TestFunction.constant(1.0), 2.0, legendre,
                            FULL_INTERVAL) == pytest.approx(math.sqrt(2.0),
                                                            rel=1e-14)


def test_norm_rejects_divergent_case(legendre):
    with pytest.raises(NotInSpaceError):
        weighted_lp_norm(TestFunction.parse("power:-0.5,-1"), 2.0, legendre,
                         FULL_INTERVAL)


@pytest.mark.parametrize("g_text,power,zeta,eta,a,b,splits", [
    ("const:2", 1.5, 0.0, 0.0, -1.0, 1.0, ()),
    ("const:1", 2.0, 1.0, 0.5, -0.25, 0.75, ()),
    ("poly:0,1", 2.0, 0.5, 0.5, -1.0, 1.0, ()),
    ("poly:1,-1,2", 4.0, 1.0, 1.0, -1.0, 1.0, ()),
    ("poly:0.5,1", 1.5, 0.0, 1.0, -0.5, 0.5, ()),
    ("poly:0,1", 1.5, 0.5, 0.25, -1.0, 1.0, (0.0,)),
    ("cos:3", 1.5, 0.0, 0.0, -1.0, 1.0, (-math.pi / 6, math.pi / 6)),
    ("cos:2", 2.0, 1.0, 0.0, -0.5, 0.5, ()),
    ("step:0.2", 1.0, 0.5, 0.5, -1.0, 1.0, (0.2,)),
    ("power:0.5,1", 2.0, 0.0, 0.0, -1.0, 1.0, ()),
    ("power:-0.25,-1", 2.0, 0.0, 0.5, -1.0, 0.0, ()),
])
def test_weighted_power_integral_matches_quad(g_text, power, zeta, eta, a, b,
                                              splits):
    """Every routing branch against the high-precision oracle."""
    g = TestFunction.parse(g_text)
    got = weighted_abs_power_integral(g, power, JacobiParams(zeta, eta),
                                      Interval(a, b))
    expected = oracle_weighted_integral(
        lambda u: abs(g(u)) ** power, zeta, eta, a, b, splits)
    npt.assert_allclose(got, expected, rtol=5e-11, atol=1e-13)


def test_zero_function_integrates_to_zero(legendre):
    assert weighted_abs_power_integral(TestFunction.parse("poly:0"), 1.5,
                                       legendre, FULL_INTERVAL) == 0.0


def test_norm_requires_p_at_least_one(legendre):
    with pytest.raises(ValueError):
        weighted_lp_norm(TestFunction.constant(1.0), 0.5, legendre,
                         FULL_INTERVAL)


# ---------------------------------------------------------------------------
# coefficients


def test_coefficient_of_constant(legendre):
    # <1, q_0> = integral of 1/sqrt(2) over du on [-1,1] = sqrt(2)
    assert fourier_jacobi_coefficient(TestFunction.constant(1.0), 0,
                                      legendre) == pytest.approx(
        math.sqrt(2.0), rel=1e-12)
    assert fourier_jacobi_coefficient(TestFunction.constant(1.0), 3,
                                      legendre) == pytest.approx(0.0,
                                                                 abs=1e-13)


def test_coefficients_of_basis_polynomial_are_unit_vectors():
    params = JacobiParams(1.0, 0.5)
    q3 = orthonormal_as_polynomial(params, 3)
    coeffs = fourier_jacobi_coefficients(q3, params, 6)
    expected = np.zeros(7)
    expected[3] = 1.0
    npt.assert_allclose(coeffs, expected, atol=5e-13)


def test_polynomial_reproduced_from_coefficients(legendre):
    g = TestFunction.parse("poly:0.5,-1,0,2")
    coeffs = fourier_jacobi_coefficients(g, legendre, 8)
    u = np.linspace(-0.95, 0.95, 11)
    recon = coeffs @ orthonormal_basis(legendre, 8, u)
    npt.assert_allclose(recon, g(u), rtol=1e-10, atol=1e-12)


def test_cosine_coefficients_against_quad(legendre):
    g = TestFunction.cosine(1.0)
    coeffs = fourier_jacobi_coefficients(g, legendre, 5)
    for m in range(6):
        expected = oracle_weighted_integral(
            lambda u, m=m: math.cos(u) * oracle_orthonormal(0.0, 0.0, m, u),
            0.0, 0.0, -1.0, 1.0)
        npt.assert_allclose(coeffs[m], expected, rtol=1e-10, atol=1e-14)


def test_step_coefficients_against_quad():
    params = JacobiParams(0.5, 0.5)
    g = TestFunction.step(0.0)
    coeffs = fourier_jacobi_coefficients(g, params, 4)
    for m in range(5):
        expected = oracle_weighted_integral(
            lambda u, m=m: oracle_orthonormal(0.5, 0.5, m, u),
            0.5, 0.5, 0.0, 1.0)
        npt.assert_allclose(coeffs[m], expected, rtol=1e-9, atol=1e-12)


def test_orthonormal_as_polynomial_matches_recurrence():
    params = JacobiParams(1.5, 0.25)
    u = np.linspace(-1.0, 1.0, 17)
    for m in range(9):
        poly = orthonormal_as_polynomial(params, m)
        npt.assert_allclose(poly(u), eval_orthonormal(params, m, u),
                            rtol=1e-11, atol=1e-12)
    with pytest.raises(ValueError):
        orthonormal_as_polynomial(params, 65)
