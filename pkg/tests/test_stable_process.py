"""Distributional checks for the heavy-tailed sampler and path simulator.

All randomized assertions use fixed seeds and bands sized so that the checks
are deterministic reruns of a draw that already passed, not flaky retries.
"""
import math

import numpy as np
import numpy.testing as npt
import pytest
from scipy import stats

from stable_jacobi import (Grid, Interval, RngStream, SamplePath, StableLaw,
                           cf_stable, sample_standard_symmetric_stable,
                           sample_standard_symmetric_stable_batch,
                           simulate_path)

N = 100_000


def ecf(samples, x):
    return np.mean(np.exp(1j * x * samples))


def test_law_validation():
    with pytest.raises(ValueError):
        StableLaw(0.9)
    with pytest.raises(ValueError):
        StableLaw(2.1)
    with pytest.raises(ValueError):
        StableLaw(1.5, 0.0)
    StableLaw(1.0)
    StableLaw(2.0, 3.5)


def test_increment_scale():
    assert StableLaw(2.0, 1.0).increment_scale(0.01) == pytest.approx(0.1)
    assert StableLaw(1.0, 2.0).increment_scale(0.5) == pytest.approx(1.0)
    assert StableLaw(1.5, 1.0).increment_scale(1.0) == pytest.approx(1.0)


def test_cf_stable_values():
    law = StableLaw(2.0, 1.0)
    assert cf_stable(law, 0.5, 1.0) == pytest.approx(math.exp(-0.5))
    assert cf_stable(law, 0.0, 3.0) == 1.0
    assert cf_stable(StableLaw(1.0), 1.0, 2.0) == pytest.approx(math.exp(-2.0))
    with pytest.raises(ValueError):
        cf_stable(law, -0.1, 1.0)


def test_single_draw_is_stream_prefix():
    first = sample_standard_symmetric_stable(1.5, RngStream(3, 8))
    batch = sample_standard_symmetric_stable_batch(1.5, RngStream(3, 8), 5)
    assert first == batch[0]


def test_reproducible_and_stream_separated():
    a = sample_standard_symmetric_stable_batch(1.5, RngStream(1, 0), 100)
    b = sample_standard_symmetric_stable_batch(1.5, RngStream(1, 0), 100)
    c = sample_standard_symmetric_stable_batch(1.5, RngStream(1, 1), 100)
    npt.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_gaussian_branch_variance():
    draws = sample_standard_symmetric_stable_batch(2.0, RngStream(7, 0), N)
    # CF exp{-x^2} corresponds to N(0, 2)
    assert np.var(draws) == pytest.approx(2.0, rel=0.02)
    assert np.mean(draws) == pytest.approx(0.0, abs=0.02)


def test_cauchy_branch_median_of_absolute_value():
    draws = sample_standard_symmetric_stable_batch(1.0, RngStream(7, 1), N)
    # |standard Cauchy| has median tan(pi/4) = 1
    assert np.median(np.abs(draws)) == pytest.approx(1.0, rel=0.02)


@pytest.mark.parametrize("chi", [1.0, 1.5, 2.0])
def test_empirical_cf_matches_target(chi):
    draws = sample_standard_symmetric_stable_batch(chi, RngStream(11, 2), N)
    band = 3.3 / math.sqrt(N)
    for x in (0.5, 1.0, 2.0):
        target = math.exp(-abs(x) ** chi)
        val = ecf(draws, x)
        assert abs(val.real - target) <= band
        assert abs(val.imag) <= band  # symmetry


def test_addition_stability():
    """Sums of k draws, rescaled by k^(1/chi), keep the same law (CF check)."""
    chi, k = 1.5, 4
    draws = sample_standard_symmetric_stable_batch(chi, RngStream(5, 3), N)
    summed = draws.reshape(-1, k).sum(axis=1) / k ** (1.0 / chi)
    band = 3.3 / math.sqrt(summed.size)
    for x in (0.5, 1.0, 2.0):
        assert abs(ecf(summed, x).real - math.exp(-abs(x) ** chi)) <= band


def test_halves_of_one_stream_agree_in_distribution():
    draws = sample_standard_symmetric_stable_batch(1.5, RngStream(13, 4), N)
    stat = stats.ks_2samp(draws[: N // 2], draws[N // 2:]).statistic
    assert stat < 1.63 / math.sqrt(N / 2)


def test_tail_against_scipy_levy_stable():
    chi = 1.5
    draws = sample_standard_symmetric_stable_batch(chi, RngStream(17, 5), N)
    for q in (2.0, 5.0):
        target = 2.0 * stats.levy_stable.sf(q, chi, 0.0)
        p_hat = np.mean(np.abs(draws) > q)
        se = math.sqrt(target * (1 - target) / N)
        assert abs(p_hat - target) <= 4.0 * se + 1e-4


def test_grid_geometry():
    grid = Grid(Interval(-0.5, 0.5), 8)
    assert grid.delta == pytest.approx(0.125)
    npt.assert_allclose(grid.points[0], -0.5)
    npt.assert_allclose(grid.points[-1], 0.5)
    assert grid.left_points.shape == (8,)
    with pytest.raises(ValueError):
        Grid(Interval(0.0, 1.0), 0)


def test_simulate_path_shape_and_scaling():
    law = StableLaw(2.0, 1.0)
    grid = Grid(Interval(0.0, 1.0), 100)
    path = simulate_path(law, grid, RngStream(0, 6))
    assert path.values.shape == (101,)
    assert path.values[0] == 0.0
    assert path.label == "X"
    assert path.path_id == 6
    assert path.law == law
    # increments are the scaled stream draws, in order
    draws = sample_standard_symmetric_stable_batch(2.0, RngStream(0, 6), 100)
    npt.assert_allclose(path.increments, draws * law.increment_scale(0.01),
                        rtol=1e-12)


def test_increment_standard_deviation():
    """Gaussian case: sd of one increment is sqrt(2 * C * delta) = 0.1414..."""
    law = StableLaw(2.0, 1.0)
    grid = Grid(Interval(0.0, 1.0), 100)
    incs = np.concatenate([
        simulate_path(law, grid, RngStream(23, i)).increments
        for i in range(200)])
    assert incs.std() == pytest.approx(math.sqrt(2.0 * 0.01), rel=0.02)


def test_sample_path_validation():
    grid = Grid(Interval(0.0, 1.0), 4)
    with pytest.raises(ValueError):
        SamplePath(grid=grid, values=np.zeros(4))  # wrong length
    with pytest.raises(ValueError):
        SamplePath(grid=grid, values=np.array([1.0, 0, 0, 0, 0.0]))
    with pytest.raises(ValueError):
        SamplePath(grid=grid, values=np.zeros(5), label="Z")
    with pytest.raises(ValueError):
        RngStream(-1, 0)
    with pytest.raises(ValueError):
        RngStream(0, 2 ** 64)
