import math

import numpy as np
import numpy.testing as npt
import pytest

from stable_jacobi import (CoefficientVector, Grid, Interval, JacobiParams,
                           PRange, RngStream, StableLaw, TestFunction,
                           eval_orthonormal, expand, integrate_dy, kernel_sm,
                           orthonormal_as_polynomial, p_range, partial_sum,
                           random_coefficient, random_coefficient_sample,
                           reference_integral, simulate_path,
                           ultraspherical_config)
from conftest import make_identity_path, make_zero_path


def _random_path(window, n_steps=512, stream=0, chi=1.5):
    return simulate_path(StableLaw(chi), Grid(window, n_steps),
                         RngStream(99, stream))


def test_expand_constant(legendre):
    coeffs = expand(TestFunction.constant(1.0), legendre, 6)
    assert coeffs.values[0] == pytest.approx(math.sqrt(2.0), rel=1e-12)
    npt.assert_allclose(coeffs.values[1:], 0.0, atol=1e-13)
    assert coeffs.max_degree == 6
    assert coeffs.params == legendre


def test_coefficient_vector_rejects_non_finite(legendre):
    with pytest.raises(ValueError):
        CoefficientVector(params=legendre, values=np.array([1.0, np.inf]),
                          source=TestFunction.constant(1.0))


def test_random_coefficient_zero_path(window, legendre):
    path = make_zero_path(window, 64)
    assert random_coefficient(3, legendre, path) == 0.0


def test_random_coefficient_m0_telescopes(window, legendre):
    """q_0 is constant 1/sqrt(2) and the flat weight telescopes the sum."""
    path = _random_path(window)
    got = random_coefficient(0, legendre, path)
    assert got == pytest.approx(float(path.values[-1]) / math.sqrt(2.0),
                                rel=1e-12)


def test_random_coefficient_m1_identity_path(window, legendre):
    # deterministic path X(v) = v + 1/2: the left sum of q_1 over [-0.5, 0.5]
    # is the exact left-Riemann sum of an odd integrand, -sqrt(1.5)/8192
    path = make_identity_path(window, 4096)
    got = random_coefficient(1, legendre, path)
    assert got == pytest.approx(-math.sqrt(1.5) / 8192.0, rel=1e-12)
    assert got == pytest.approx(0.0, abs=2e-4)


def test_random_coefficient_matches_integrate_dy(window, legendre):
    path = _random_path(window, stream=3)
    q4 = orthonormal_as_polynomial(legendre, 4)
    assert random_coefficient(4, legendre, path) == pytest.approx(
        integrate_dy(q4, legendre, path).value, rel=1e-10)


def test_random_coefficient_requires_bounded_weight():
    path = _random_path(Interval(-0.5, 0.5))
    with pytest.raises(ValueError):
        random_coefficient(0, JacobiParams(1.0, 0.0), path)


def test_random_coefficient_sample_batches_one_path(window, legendre):
    path = _random_path(window, stream=5)
    sample = random_coefficient_sample(legendre, path, 8)
    assert sample.path_id == path.path_id
    assert sample.values.shape == (9,)
    for m in (0, 2, 7):
        assert sample.values[m] == pytest.approx(
            random_coefficient(m, legendre, path), rel=1e-12)


def test_kernel_single_surviving_term(legendre):
    q1 = orthonormal_as_polynomial(legendre, 1)
    coeffs = expand(q1, legendre, 4)
    got = kernel_sm(0.3, coeffs, 3, -0.2)
    expected = (eval_orthonormal(legendre, 1, 0.3)
                * eval_orthonormal(legendre, 1, -0.2))
    assert got == pytest.approx(expected, rel=1e-11)
    with pytest.raises(ValueError):
        kernel_sm(0.3, coeffs, 9, -0.2)


def test_kernel_brute_force_recomputation(legendre):
    g = TestFunction.parse("poly:1,0,2")
    coeffs = expand(g, legendre, 2)
    u, v = 0.3, -0.4
    expected = sum(
        coeffs.values[j] * eval_orthonormal(legendre, j, u)
        * eval_orthonormal(legendre, j, v) for j in range(3))
    assert kernel_sm(u, coeffs, 2, v) == pytest.approx(expected, rel=1e-12)


def test_partial_sum_equals_kernel_integral(window, legendre):
    """S_m(u) and the path integral of the kernel section are the same finite
    sum in two different orders; they must agree to 1e-12."""
    path = _random_path(window, stream=7)
    g = TestFunction.cosine(1.0)
    coeffs = expand(g, legendre, 16)
    rand = random_coefficient_sample(legendre, path, 16)
    for u in (-0.3, 0.0, 0.44):
        direct = partial_sum(u, coeffs, rand, 10)
        via_kernel = float(
            kernel_sm(u, coeffs, 10, path.grid.left_points) @ path.increments)
        assert direct == pytest.approx(via_kernel, rel=1e-12, abs=1e-12)


def test_partial_sum_stops_growing_past_polynomial_degree(window, legendre):
    path = _random_path(window, stream=11)
    g = TestFunction.parse("poly:0.5,-1,3")
    coeffs = expand(g, legendre, 12)
    rand = random_coefficient_sample(legendre, path, 12)
    s2 = partial_sum(0.25, coeffs, rand, 2)
    for m in (3, 7, 12):
        assert partial_sum(0.25, coeffs, rand, m) == pytest.approx(
            s2, rel=1e-10, abs=1e-12)


def test_reference_integral_is_stable_in_cutoff(window, legendre):
    path = _random_path(window, stream=13)
    g = TestFunction.cosine(1.0)
    r40 = reference_integral(0.1, expand(g, legendre, 40), legendre, path, 40)
    r60 = reference_integral(0.1, expand(g, legendre, 60), legendre, path, 60)
    assert r40 == pytest.approx(r60, abs=1e-8)


def test_partial_sum_approaches_reference(window, legendre):
    path = _random_path(window, stream=17)
    g = TestFunction.cosine(1.0)
    coeffs = expand(g, legendre, 48)
    rand = random_coefficient_sample(legendre, path, 48)
    ref = reference_integral(0.2, coeffs, legendre, path, 48)
    gaps = [abs(partial_sum(0.2, coeffs, rand, m) - ref) for m in (2, 6, 48)]
    assert gaps[-1] == pytest.approx(0.0, abs=1e-12)
    assert gaps[0] >= gaps[-1]


def test_index_mismatch_errors(window, legendre):
    path = _random_path(window, stream=19)
    coeffs = expand(TestFunction.cosine(1.0), legendre, 4)
    rand = random_coefficient_sample(legendre, path, 8)
    with pytest.raises(ValueError):
        partial_sum(0.0, coeffs, rand, 6)


# ---------------------------------------------------------------------------
# p-range


def test_p_range_frozen_values():
    window = p_range(JacobiParams(0.0, 0.0))
    assert window.lower == pytest.approx(4.0 / 3.0, abs=1e-12)
    assert window.upper == pytest.approx(4.0, abs=1e-12)
    window = p_range(JacobiParams(1.0, 1.0))
    assert window.lower == pytest.approx(8.0 / 5.0, abs=1e-12)
    assert window.upper == pytest.approx(8.0 / 3.0, abs=1e-12)


def test_p_range_contains():
    window = p_range(JacobiParams(0.0, 0.0))
    assert window.contains(2.0)
    assert not window.contains(4.0)   # open at the ends
    assert not window.contains(1.0)


def test_p_range_asymmetric_uses_worse_side():
    # lower bound driven by the larger exponent, upper by it too
    window = p_range(JacobiParams(0.0, 3.0))
    assert window.lower == pytest.approx(4.0 * 4.0 / 9.0, abs=1e-12)
    assert window.upper == pytest.approx(4.0 * 4.0 / 7.0, abs=1e-12)


def test_prange_type_validation():
    with pytest.raises(ValueError):
        PRange(2.0, 2.0)
    with pytest.raises(ValueError):
        PRange(0.0, 1.0)


def test_ultraspherical_config():
    params, iv = ultraspherical_config(0.5)
    assert params == JacobiParams(0.5, 0.5)
    assert (iv.a, iv.b) == (-1.0, 1.0)
