"""Pathwise left-sum stochastic integrals and their distributional oracles.

``integrate_dx`` forms the adapted Riemann–Stieltjes sum of g against a path's
increments; the weighted process Y is the cumulative left-sum of the weight
against X, and ``int g dY`` is evaluated through the identity
``int g dY = int g * weight dX`` on the same grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .jacobi import (Interval, JacobiParams, NotInSpaceError, TestFunction,
                     weight, weighted_abs_power_integral)
from .stable_process import Grid, SamplePath, StableLaw


@dataclass(frozen=True)
class SampleMeta:
    """Provenance of an integral sample: enough to regenerate it."""

    law: StableLaw | None
    params: JacobiParams | None
    interval: Interval
    n_steps: int


@dataclass(frozen=True)
class IntegralSample:
    value: float
    path_id: int
    meta: SampleMeta

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("integral sample must be finite")


def _left_sum(left_values: np.ndarray, increments: np.ndarray) -> float:
    return float(left_values @ increments)


def _meta(path: SamplePath, params: JacobiParams | None) -> SampleMeta:
    return SampleMeta(law=path.law, params=params, interval=path.grid.interval,
                      n_steps=path.grid.n_steps)


def integrate_dx(g: TestFunction, path: SamplePath) -> IntegralSample:
    """Left-endpoint sum ``sum_i g(v_i) (X(v_{i+1}) - X(v_i))``."""
    if path.label != "X":
        raise ValueError("integrate_dx needs a path labeled X")
    value = _left_sum(np.asarray(g(path.grid.left_points), dtype=np.float64),
                      path.increments)
    return IntegralSample(value=value, path_id=path.path_id, meta=_meta(path, None))


def build_y(params: JacobiParams, path: SamplePath) -> SamplePath:
    """The weighted path ``Y(v) = sum_{v_i < v} weight(v_i) (X(v_{i+1}) - X(v_i))``.

    Requires nonnegative exponents and a grid inside an interval where the
    weight stays <= 1.
    """
    if path.label != "X":
        raise ValueError("build_y needs a path labeled X")
    params.require_nonnegative()
    if not path.grid.interval.weight_bounded(params):
        raise ValueError(
            "weight exceeds 1 somewhere on "
            f"[{path.grid.interval.a}, {path.grid.interval.b}] "
            f"for zeta={params.zeta}, eta={params.eta}"
        )
    rho = weight(params, path.grid.left_points)
    values = np.empty(path.grid.n_steps + 1)
    values[0] = 0.0
    np.cumsum(rho * path.increments, out=values[1:])
    return SamplePath(grid=path.grid, values=values, label="Y",
                      path_id=path.path_id, law=path.law)


def integrate_dy(g: TestFunction, params: JacobiParams,
                 path: SamplePath) -> IntegralSample:
    """``int g dY`` through the identity ``int g dY = int g * weight dX``."""
    if path.label != "X":
        raise ValueError("integrate_dy consumes the driving path labeled X")
    params.require_nonnegative()
    left = path.grid.left_points
    left_values = np.asarray(g(left), dtype=np.float64) * weight(params, left)
    value = _left_sum(left_values, path.increments)
    return IntegralSample(value=value, path_id=path.path_id, meta=_meta(path, params))


def stable_exponent(g: TestFunction, law: StableLaw, params: JacobiParams,
                    iv: Interval) -> float:
    """Scale exponent of the limiting law of ``int g dY``: ``int |g * weight|^chi dv``.

    Written as a weighted-measure integral with both exponents multiplied by
    chi, so the closed-form and exact quadrature routes apply unchanged.
    """
    params.require_nonnegative()
    scaled = JacobiParams(law.chi * params.zeta, law.chi * params.eta)
    return weighted_abs_power_integral(g, law.chi, scaled, iv)


def theoretical_cf(g: TestFunction, law: StableLaw, params: JacobiParams,
                   iv: Interval, x: float) -> float:
    """Characteristic function ``exp{-C |x|^chi B}`` of the limit of ``int g dY``.

    B is the induced-law scale from :func:`stable_exponent`.  Raises
    :class:`NotInSpaceError` when B diverges.
    """
    B = stable_exponent(g, law, params, iv)
    return math.exp(-law.scale_c * abs(x) ** law.chi * B)


def tail_bound(g: TestFunction, law: StableLaw, params: JacobiParams,
               iv: Interval, eps: float) -> float:
    """Envelope ``2^(chi+1) C / ((chi+1) eps^chi) * int |g|^chi dmu`` for
    ``P(|int g dY| > eps)``.

    The measure integral here keeps a single weight factor (the form the
    truncation argument yields); values above 1 are returned as-is and are
    vacuous.  The envelope's derivation assumes the weight is <= 1 on the
    interval — callers report that flag rather than this function enforcing it.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    params.require_nonnegative()
    B = weighted_abs_power_integral(g, law.chi, params, iv)
    chi = law.chi
    return 2.0 ** (chi + 1.0) * law.scale_c / ((chi + 1.0) * eps ** chi) * B
