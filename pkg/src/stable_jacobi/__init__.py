"""Random weighted orthogonal expansions on [-1, 1].

Deterministic layer: Jacobi-weight measures, orthonormal polynomials, and
Gauss quadrature (:mod:`.jacobi`).  Stochastic layer: symmetric heavy-tailed
driving paths (:mod:`.stable_process`), pathwise integrals against them
(:mod:`.stochastic_integral`), and random series built from both
(:mod:`.fourier_jacobi`).  Monte Carlo checks live in :mod:`.verification`;
``stable-jacobi`` is the command-line front end (:mod:`.cli`).
"""
from ._version import __version__
from .jacobi import (FULL_INTERVAL, MAX_DEGREE, Interval, JacobiParams,
                     NotInSpaceError, QuadratureRule, TestFunction,
                     eval_orthonormal, fourier_jacobi_coefficient,
                     fourier_jacobi_coefficients, gauss_jacobi_rule,
                     measure_total, orthonormal_as_polynomial,
                     orthonormal_basis, recurrence_coefficients, weight,
                     weighted_abs_power_integral, weighted_lp_norm)
from .stable_process import (Grid, RngStream, SamplePath, StableLaw, cf_stable,
                             sample_standard_symmetric_stable,
                             sample_standard_symmetric_stable_batch,
                             simulate_path)
from .stochastic_integral import (IntegralSample, build_y, integrate_dx,
                                  integrate_dy, stable_exponent, tail_bound,
                                  theoretical_cf)
from .fourier_jacobi import (CoefficientVector, PRange,
                             RandomCoefficientSample, expand, kernel_sm,
                             p_range, partial_sum, random_coefficient,
                             random_coefficient_sample, reference_integral,
                             ultraspherical_config)
from .verification import (ConvergenceReport, ExperimentConfig,
                           HypothesisViolation, cf_match_check,
                           convergence_experiment, empirical_cf,
                           estimate_tail_probability, existence_check,
                           tail_check)

__all__ = [
    "__version__",
    # deterministic layer
    "FULL_INTERVAL", "MAX_DEGREE", "Interval", "JacobiParams",
    "NotInSpaceError", "QuadratureRule", "TestFunction", "eval_orthonormal",
    "fourier_jacobi_coefficient", "fourier_jacobi_coefficients",
    "gauss_jacobi_rule", "measure_total", "orthonormal_as_polynomial",
    "orthonormal_basis", "recurrence_coefficients", "weight",
    "weighted_abs_power_integral", "weighted_lp_norm",
    # stochastic layer
    "Grid", "RngStream", "SamplePath", "StableLaw", "cf_stable",
    "sample_standard_symmetric_stable",
    "sample_standard_symmetric_stable_batch", "simulate_path",
    "IntegralSample", "build_y", "integrate_dx", "integrate_dy",
    "stable_exponent", "tail_bound", "theoretical_cf",
    # series layer
    "CoefficientVector", "PRange", "RandomCoefficientSample", "expand",
    "kernel_sm", "p_range", "partial_sum", "random_coefficient",
    "random_coefficient_sample", "reference_integral", "ultraspherical_config",
    # verification layer
    "ConvergenceReport", "ExperimentConfig", "HypothesisViolation",
    "cf_match_check", "convergence_experiment", "empirical_cf",
    "estimate_tail_probability", "existence_check", "tail_check",
]
