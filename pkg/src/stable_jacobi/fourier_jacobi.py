"""Random series machinery: deterministic and random expansion coefficients,
truncated kernels, partial sums, the reference integral, and the admissible
p-window.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jacobi import (FULL_INTERVAL, Interval, JacobiParams, TestFunction,
                     fourier_jacobi_coefficients, orthonormal_basis, weight)
from .stable_process import SamplePath


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Deterministic expansion coefficients c_0..c_M of a catalog function."""

    params: JacobiParams
    values: np.ndarray
    source: TestFunction

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("coefficient vector must be 1-D and nonempty")
        if not np.all(np.isfinite(values)):
            raise ValueError("coefficients must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def max_degree(self) -> int:
        return self.values.size - 1


@dataclass(frozen=True, eq=False)
class RandomCoefficientSample:
    """Random coefficients C_0..C_M computed from one shared path realization.

    Sharing one path is what makes the coefficients dependent across m; a
    sample never mixes increments from different paths.
    """

    path_id: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("coefficient sample must be 1-D and nonempty")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def max_degree(self) -> int:
        return self.values.size - 1


@dataclass(frozen=True)
class PRange:
    """Open admissibility window (lower, upper) for the exponent p."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (0.0 < self.lower < self.upper):
            raise ValueError(
                f"degenerate p-window: lower={self.lower}, upper={self.upper}"
            )

    def contains(self, p: float) -> bool:
        return self.lower < p < self.upper


def expand(g: TestFunction, params: JacobiParams, m_max: int) -> CoefficientVector:
    """Coefficient vector of g through degree m_max."""
    values = fourier_jacobi_coefficients(g, params, m_max)
    return CoefficientVector(params=params, values=values, source=g)


def _require_bounded_x_path(params: JacobiParams, path: SamplePath):
    if path.label != "X":
        raise ValueError("random coefficients integrate against the driving path X")
    params.require_nonnegative()
    if not path.grid.interval.weight_bounded(params):
        raise ValueError(
            "weight exceeds 1 somewhere on "
            f"[{path.grid.interval.a}, {path.grid.interval.b}] "
            f"for zeta={params.zeta}, eta={params.eta}"
        )


def random_coefficient(m: int, params: JacobiParams, path: SamplePath) -> float:
    """``C_m = int q_m dY`` as a left sum on the path's grid."""
    _require_bounded_x_path(params, path)
    left = path.grid.left_points
    basis_row = orthonormal_basis(params, m, left)[m]
    return float((basis_row * weight(params, left)) @ path.increments)


def random_coefficient_sample(params: JacobiParams, path: SamplePath,
                              m_max: int) -> RandomCoefficientSample:
    """All C_0..C_m_max from one path (one shared realization)."""
    _require_bounded_x_path(params, path)
    left = path.grid.left_points
    basis = orthonormal_basis(params, m_max, left)
    values = (basis * weight(params, left)) @ path.increments
    return RandomCoefficientSample(path_id=path.path_id, values=values)


def kernel_sm(u: float, coeffs: CoefficientVector, m: int, v):
    """Truncated kernel ``sum_{j<=m} c_j q_j(u) q_j(v)`` (vectorized over v)."""
    if m > coeffs.max_degree:
        raise ValueError(f"kernel order {m} exceeds coefficient degree {coeffs.max_degree}")
    basis_u = orthonormal_basis(coeffs.params, m, u)[:, 0]
    basis_v = orthonormal_basis(coeffs.params, m, v)
    out = (coeffs.values[:m + 1] * basis_u) @ basis_v
    return float(out[0]) if np.asarray(v).ndim == 0 else out


def partial_sum(u: float, coeffs: CoefficientVector,
                rand: RandomCoefficientSample, m: int) -> float:
    """``S_m(u) = sum_{j<=m} c_j C_j q_j(u)``."""
    if m > min(coeffs.max_degree, rand.max_degree):
        raise ValueError(
            f"partial-sum order {m} exceeds available coefficients "
            f"({coeffs.max_degree} deterministic, {rand.max_degree} random)"
        )
    basis_u = orthonormal_basis(coeffs.params, m, u)[:, 0]
    return float(np.sum(coeffs.values[:m + 1] * rand.values[:m + 1] * basis_u))


def reference_integral(u: float, coeffs: CoefficientVector, params: JacobiParams,
                       path: SamplePath, M_ref: int) -> float:
    """``int s_M_ref(u, v) dY(v)`` — the high-order truncation standing in for
    the series limit.

    Deliberately evaluated as a fresh left sum of the kernel section against
    the path (not through the coefficient shortcut), so it can cross-check
    :func:`partial_sum` at m = M_ref.
    """
    _require_bounded_x_path(params, path)
    left = path.grid.left_points
    section = kernel_sm(u, coeffs, M_ref, left)
    return float((section * weight(params, left)) @ path.increments)


def p_range(params: JacobiParams) -> PRange:
    """The open window of admissible p for the convergence statement."""
    params.require_nonnegative()
    z, e = params.zeta, params.eta
    lower = 4.0 * max((z + 1.0) / (2.0 * z + 3.0), (e + 1.0) / (2.0 * e + 3.0))
    upper = 4.0 * min((z + 1.0) / (2.0 * z + 1.0), (e + 1.0) / (2.0 * e + 1.0))
    return PRange(lower=lower, upper=upper)


def ultraspherical_config(zeta: float) -> tuple[JacobiParams, Interval]:
    """Equal-exponent configuration on the full interval [-1, 1].

    With zeta = eta the weight ``(1 - u^2)^zeta`` never exceeds 1, so the whole
    interval passes the boundedness check and the p-window reduces to
    ``(4(zeta+1)/(2 zeta+3), 4(zeta+1)/(2 zeta+1))``.
    """
    if zeta < 0.0:
        raise ValueError("zeta must be nonnegative")
    return JacobiParams(zeta, zeta), FULL_INTERVAL
