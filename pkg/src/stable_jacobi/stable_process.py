"""Symmetric stable variates and discretized sample paths.

A standard draw has characteristic function ``exp{-|x|^chi}`` with index
``chi`` in [1, 2]; a path increment over a step of width ``delta`` is a
standard draw scaled by ``(C * delta)^(1/chi)``, so its characteristic
function is ``exp{-C delta |x|^chi}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .jacobi import Interval

_UINT64_MAX = 2 ** 64 - 1


@dataclass(frozen=True)
class StableLaw:
    """Index chi in [1, 2] and the positive scale constant C."""

    chi: float
    scale_c: float = 1.0

    def __post_init__(self):
        if not (1.0 <= self.chi <= 2.0):
            raise ValueError(f"stability index must lie in [1, 2], got {self.chi}")
        if not self.scale_c > 0.0:
            raise ValueError(f"scale constant must be positive, got {self.scale_c}")

    def increment_scale(self, delta: float) -> float:
        """Multiplier turning a standard draw into an increment over width delta."""
        return (self.scale_c * delta) ** (1.0 / self.chi)


@dataclass(frozen=True)
class Grid:
    """Uniform grid of n_steps steps over an interval."""

    interval: Interval
    n_steps: int

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")

    @property
    def delta(self) -> float:
        return self.interval.width / self.n_steps

    @cached_property
    def points(self) -> np.ndarray:
        pts = np.linspace(self.interval.a, self.interval.b, self.n_steps + 1)
        pts.setflags(write=False)
        return pts

    @property
    def left_points(self) -> np.ndarray:
        return self.points[:-1]


@dataclass(frozen=True, eq=False)
class SamplePath:
    """A discretized realization on a grid; values[0] is pinned to 0."""

    grid: Grid
    values: np.ndarray
    label: str = "X"
    path_id: int = 0
    law: StableLaw | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.grid.n_steps + 1,):
            raise ValueError("path length must be n_steps + 1")
        if values[0] != 0.0:
            raise ValueError("paths start at 0 at the left endpoint")
        if self.label not in ("X", "Y"):
            raise ValueError("label must be 'X' or 'Y'")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values)


@dataclass(frozen=True)
class RngStream:
    """Substream selector: (master_seed, stream_id) pins the draws exactly."""

    master_seed: int
    stream_id: int

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            v = getattr(self, name)
            if not (0 <= int(v) <= _UINT64_MAX):
                raise ValueError(f"{name} must fit in an unsigned 64-bit integer")


def sample_standard_symmetric_stable(chi: float, rng: RngStream) -> float:
    """One standard symmetric stable draw (CF ``exp{-|x|^chi}``) from the stream.

    Uses the Chambers–Mallows–Stuck transform; chi = 1 takes the exact Cauchy
    branch ``tan(pi (U - 1/2))`` and chi = 2 the Gaussian branch (variance 2).
    """
    StableLaw(chi)  # range check
    return float(kernels.stable_draws(chi, rng.master_seed, rng.stream_id, 1)[0])


def sample_standard_symmetric_stable_batch(chi: float, rng: RngStream,
                                           n: int) -> np.ndarray:
    """The first n draws of the stream (the single-draw sampler is its prefix)."""
    StableLaw(chi)
    return kernels.stable_draws(chi, rng.master_seed, rng.stream_id, n)


def simulate_path(law: StableLaw, grid: Grid, rng: RngStream) -> SamplePath:
    """A path of the driving process: iid scaled increments, cumulatively summed."""
    draws = kernels.stable_draws(law.chi, rng.master_seed, rng.stream_id,
                                 grid.n_steps)
    values = np.empty(grid.n_steps + 1)
    values[0] = 0.0
    np.cumsum(law.increment_scale(grid.delta) * draws, out=values[1:])
    return SamplePath(grid=grid, values=values, label="X",
                      path_id=rng.stream_id, law=law)


def cf_stable(law: StableLaw, t: float, x: float) -> float:
    """``exp{-C t |x|^chi}`` — the (real) characteristic function at time t."""
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    return math.exp(-law.scale_c * t * abs(x) ** law.chi)
