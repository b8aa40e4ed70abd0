"""Monte Carlo experiment engine and structured, byte-deterministic reports.

Convergence in probability is operationalized as a tail-probability ladder:
``P(|S_m - reference| > eps)`` estimated over paths must be non-increasing in m
(within two pooled standard errors) and end at or below ``max(DELTA_FLOOR,
best earlier value)``.  Every report is a pure function of its config — the
same bytes for any thread count.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import kernels
from ._version import __version__
from .fourier_jacobi import p_range
from .jacobi import (Interval, JacobiParams, TestFunction, orthonormal_basis,
                     weight, fourier_jacobi_coefficients)
from .stable_process import Grid, StableLaw
from .stochastic_integral import tail_bound, theoretical_cf

DELTA_FLOOR = 0.01
CF_BAND_COEFF = 3.3  # 99.9% CLT band for a bounded statistic, per sqrt(N)
CF_DISCRETIZATION_ALLOWANCE = 0.01
# Ceiling on pure floating-point error in one truncation-difference statistic
# (expansion coefficients beyond an integrand's exact degree are quadrature
# roundoff ~1e-16; through the weighted path sums they stay below this).  Tail
# probabilities at thresholds >= 10x this value are exact zeros whenever the
# integrand lies in the span of the reference basis.
GRID_ERROR_BOUND = 1e-9
DEFAULT_X_LIST = (0.25, 0.5, 1.0, 2.0)
_U_CANDIDATES = (-0.9, -0.5, 0.0, 0.5, 0.9)


class HypothesisViolation(ValueError):
    """An experiment config violates a hypothesis of the statement it tests."""


@dataclass(frozen=True)
class ExperimentConfig:
    law: StableLaw
    params: JacobiParams
    iv: Interval
    g: TestFunction
    p: float = 2.0
    n_paths: int = 10_000
    n_steps: int = 4096
    m_max: int = 32
    m_ref: int = 128
    eps_list: tuple = (0.1,)
    u_points: tuple | None = None
    master_seed: int = 0
    m_ladder: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "eps_list", tuple(float(e) for e in self.eps_list))
        if self.u_points is not None:
            object.__setattr__(self, "u_points",
                               tuple(float(u) for u in self.u_points))
        if self.m_ladder is not None:
            object.__setattr__(self, "m_ladder",
                               tuple(int(m) for m in self.m_ladder))
        if self.n_paths < 1 or self.n_steps < 1:
            raise ValueError("n_paths and n_steps must be positive")
        if any(e <= 0.0 for e in self.eps_list):
            raise ValueError("eps values must be positive")
        if not (0 <= self.master_seed < 2 ** 64):
            raise ValueError("master_seed must fit in an unsigned 64-bit integer")

    def grid(self) -> Grid:
        return Grid(self.iv, self.n_steps)

    def resolved_u_points(self) -> tuple:
        """The fixed evaluation set, clipped to the open interval."""
        if self.u_points is not None:
            return self.u_points
        return tuple(u for u in _U_CANDIDATES if self.iv.a < u < self.iv.b)

    def resolved_m_ladder(self) -> tuple:
        """Powers of two up to m_max (m_max appended when it is not one)."""
        if self.m_ladder is not None:
            return self.m_ladder
        ladder = []
        m = 2
        while m <= self.m_max:
            ladder.append(m)
            m *= 2
        if not ladder or ladder[-1] != self.m_max:
            ladder.append(self.m_max)
        return tuple(ladder)


def config_mapping(config: ExperimentConfig) -> dict:
    """Semantic echo of a config — everything needed to reproduce the run."""
    return {
        "g": config.g.descriptor(),
        "chi": config.law.chi,
        "scale_c": config.law.scale_c,
        "zeta": config.params.zeta,
        "eta": config.params.eta,
        "a": config.iv.a,
        "b": config.iv.b,
        "p": config.p,
        "n_paths": config.n_paths,
        "n_steps": config.n_steps,
        "m_max": config.m_max,
        "m_ref": config.m_ref,
        "eps": list(config.eps_list),
        "u_points": list(config.resolved_u_points()),
        "m_ladder": list(config.resolved_m_ladder()),
        "master_seed": config.master_seed,
    }


def _metadata() -> dict:
    # Deterministic facts only: wall-clock and worker counts stay out of the
    # report so bytes never depend on scheduling.
    return {"schema": "stable-jacobi-report/1", "version": __version__,
            "backend": kernels.BACKEND}


def empirical_cf(samples, x: float) -> complex:
    """``(1/N) sum exp(i x s)`` over the samples (real and imaginary parts)."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise ValueError("empirical CF of an empty sample set")
    return complex(np.mean(np.exp(1j * x * samples)))


def estimate_tail_probability(samples, eps: float) -> float:
    """Fraction of samples with |s| > eps — one minus the mass the empirical
    distribution function puts on [-eps, eps]."""
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise ValueError("tail probability of an empty sample set")
    return float(np.mean(np.abs(samples) > eps))


def _binomial_se(p_hat: float, n: int) -> float:
    return float(np.sqrt(p_hat * (1.0 - p_hat) / n))


def _weight_row(config: ExperimentConfig, values_at_left: np.ndarray) -> np.ndarray:
    grid = config.grid()
    rho = weight(config.params, grid.left_points)
    scale = config.law.increment_scale(grid.delta)
    return values_at_left * rho * scale


def _run_weighted_rows(config: ExperimentConfig, rows: np.ndarray,
                       threads: int = 1) -> np.ndarray:
    return kernels.batch_weighted_sums(config.law.chi, config.master_seed,
                                       rows, config.n_paths, threads=threads)


def integral_samples(config: ExperimentConfig, threads: int = 1) -> np.ndarray:
    """N realizations of ``int g dY`` under the config (one per path)."""
    config.params.require_nonnegative()
    g_left = np.asarray(config.g(config.grid().left_points), dtype=np.float64)
    rows = _weight_row(config, g_left)[np.newaxis, :]
    return _run_weighted_rows(config, rows, threads).ravel()


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _combo_abs_power_integral(params: JacobiParams, combo: np.ndarray, power: float,
                              iv: Interval, segments: int = 96) -> float:
    """``int_a^b |sum_j combo[j] q_j(v)|^power dmu(v)`` by composite quadrature.

    Report-grade accuracy (the integrand kinks at unknown interior roots); the
    exact routes in the deterministic layer stay in charge of anything that
    feeds an acceptance tolerance.
    """
    if not np.any(combo):
        return 0.0
    edges = np.linspace(iv.a, iv.b, segments + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    halves = 0.5 * np.diff(edges)
    v = (mids[:, None] + halves[:, None] * _GL_NODES[None, :]).ravel()
    w = (halves[:, None] * _GL_WEIGHTS[None, :]).ravel()
    f = combo @ orthonormal_basis(params, combo.size - 1, v)
    return float(w @ (np.abs(f) ** power * weight(params, v)))


def _pair_se(se_a: float, se_b: float) -> float:
    return float(np.hypot(se_a, se_b))


def _ladder_checks(p_hats, ses):
    """Non-increase within 2 pooled SEs, plus the floor rule on the last rung."""
    monotone = all(
        p_hats[k + 1] <= p_hats[k] + 2.0 * _pair_se(ses[k], ses[k + 1])
        for k in range(len(p_hats) - 1)
    )
    floor = max(DELTA_FLOOR, min(p_hats[:-1], default=p_hats[-1]))
    final_ok = p_hats[-1] <= floor
    return monotone, final_ok


# ---------------------------------------------------------------------------
# check fragments


def cf_match_check(config: ExperimentConfig, x_list=DEFAULT_X_LIST,
                   threads: int = 1, samples: np.ndarray | None = None) -> dict:
    """Empirical CF of ``int g dY`` against the theoretical oracle at each x."""
    if samples is None:
        samples = integral_samples(config, threads)
    band = CF_BAND_COEFF / np.sqrt(samples.size) + CF_DISCRETIZATION_ALLOWANCE
    rows = []
    for x in x_list:
        theory = float(theoretical_cf(config.g, config.law, config.params,
                                      config.iv, x))
        ecf = empirical_cf(samples, x)
        dev = float(abs(ecf - theory))
        rows.append({
            "x": float(x),
            "ecf_re": float(ecf.real),
            "ecf_im": float(ecf.imag),
            "theory": theory,
            "deviation": dev,
            "band": float(band),
            "within": bool(dev <= band),
        })
    return {
        "check": "cf_match",
        "n_paths": int(samples.size),
        "weight_bounded": config.iv.weight_bounded(config.params),
        "rows": rows,
        "verdict": "pass" if all(r["within"] for r in rows) else "fail",
    }


def tail_check(config: ExperimentConfig, threads: int = 1,
               samples: np.ndarray | None = None) -> dict:
    """Estimated tails of ``int g dY`` against the envelope (3 SE slack).

    Envelope values >= 1 are vacuous and excluded from the verdict.
    """
    if samples is None:
        samples = integral_samples(config, threads)
    n = samples.size
    rows = []
    for eps in config.eps_list:
        p_hat = estimate_tail_probability(samples, eps)
        se = _binomial_se(p_hat, n)
        bound = float(tail_bound(config.g, config.law, config.params,
                                 config.iv, eps))
        vacuous = bound >= 1.0
        rows.append({
            "eps": float(eps),
            "p_hat": p_hat,
            "se": se,
            "bound": bound,
            "vacuous": vacuous,
            "within": None if vacuous else bool(p_hat <= bound + 3.0 * se),
        })
    applicable = [r["within"] for r in rows if r["within"] is not None]
    return {
        "check": "tail_bound",
        "n_paths": int(n),
        "weight_bounded": config.iv.weight_bounded(config.params),
        "rows": rows,
        "verdict": "pass" if all(applicable) else "fail",
    }


def _validate_y_experiment(config: ExperimentConfig, check_p_window: bool,
                           expect_failure: bool = False):
    config.params.require_nonnegative()
    if not config.iv.weight_bounded(config.params):
        raise HypothesisViolation(
            "hypothesis violation: weight exceeds 1 on "
            f"[{config.iv.a}, {config.iv.b}] for zeta={config.params.zeta}, "
            f"eta={config.params.eta}"
        )
    if not config.g.in_lp(config.p, config.params, config.iv):
        raise HypothesisViolation(
            f"hypothesis violation: {config.g.descriptor()} is not in "
            f"L^{config.p} of the weighted measure on [{config.iv.a}, {config.iv.b}]"
        )
    if check_p_window and not expect_failure:
        window = p_range(config.params)
        if not window.contains(config.p):
            raise HypothesisViolation(
                f"hypothesis violation: p={config.p} not in admissible range "
                f"({window.lower:.6f}, {window.upper:.6f}) for "
                f"zeta={config.params.zeta} eta={config.params.eta}"
            )


def existence_check(config: ExperimentConfig, approx_degrees,
                    threads: int = 1) -> dict:
    """Cauchy-in-probability ladder for integrals of expansion truncations.

    For each listed degree n the rung statistic is ``int (g_n - g_{2n}) dY``
    with g_n the degree-n expansion truncation of g; its tail probability at
    the configured eps should not increase with n.
    """
    degrees = sorted(int(n) for n in approx_degrees)
    if not degrees or degrees[0] < 1:
        raise ValueError("approximation degrees must be positive")
    if config.p < config.law.chi:
        raise HypothesisViolation(
            f"hypothesis violation: p={config.p} < chi={config.law.chi} "
            "(existence needs p >= chi >= 1)"
        )
    _validate_y_experiment(config, check_p_window=False)
    eps = config.eps_list[0]
    top = 2 * degrees[-1]
    coeffs = fourier_jacobi_coefficients(config.g, config.params, top)
    grid = config.grid()
    basis = orthonormal_basis(config.params, top, grid.left_points)
    rows = np.empty((len(degrees), grid.n_steps))
    for i, n in enumerate(degrees):
        combo = coeffs[n + 1:2 * n + 1] @ basis[n + 1:2 * n + 1]
        rows[i] = _weight_row(config, combo)
    diffs = np.abs(_run_weighted_rows(config, rows, threads))
    out_rows = []
    p_hats, ses = [], []
    for i, n in enumerate(degrees):
        p_hat = estimate_tail_probability(diffs[:, i], eps)
        se = _binomial_se(p_hat, config.n_paths)
        combo_mask = np.zeros(top + 1)
        combo_mask[n + 1:2 * n + 1] = coeffs[n + 1:2 * n + 1]
        B = _combo_abs_power_integral(config.params, combo_mask, config.law.chi,
                                      config.iv)
        chi = config.law.chi
        bound = (2.0 ** (chi + 1.0) * config.law.scale_c
                 / ((chi + 1.0) * eps ** chi) * B)
        p_hats.append(p_hat)
        ses.append(se)
        out_rows.append({"n": n, "n_next": 2 * n, "eps": float(eps),
                         "p_hat": p_hat, "se": se, "bound": bound})
    monotone, _ = _ladder_checks(p_hats, ses)
    for k, row in enumerate(out_rows):
        row["verdict"] = "pass" if (
            k == 0 or p_hats[k] <= p_hats[k - 1] + 2.0 * _pair_se(ses[k - 1], ses[k])
        ) else "fail"
    return {
        "check": "existence",
        "n_paths": config.n_paths,
        "rows": out_rows,
        "final_p_hat": p_hats[-1],
        "verdict": "pass" if monotone else "fail",
    }


@dataclass(frozen=True, eq=False)
class ConvergenceReport:
    """Structured outcome of the convergence experiment.

    A pure function of the config: serializing twice, or running with any
    worker count, yields identical bytes.
    """

    config: ExperimentConfig
    rows: tuple
    ladders: tuple
    dependence: dict
    truncation: dict
    verdict: str
    expect_failure: bool = False
    metadata: dict = field(default_factory=_metadata)

    def to_mapping(self) -> dict:
        return {
            "metadata": dict(self.metadata),
            "config": config_mapping(self.config),
            "expect_failure": self.expect_failure,
            "rows": [dict(r) for r in self.rows],
            "ladders": [dict(l) for l in self.ladders],
            "dependence": dict(self.dependence),
            "reference_truncation": dict(self.truncation),
            "verdict": self.verdict,
        }

    def to_json_bytes(self) -> bytes:
        return (json.dumps(self.to_mapping(), indent=2) + "\n").encode()

    def to_csv_bytes(self) -> bytes:
        lines = ["u,eps,m,p_hat,se,bound,verdict"]
        for r in self.rows:
            lines.append(",".join([
                repr(r["u"]), repr(r["eps"]), str(r["m"]), repr(r["p_hat"]),
                repr(r["se"]), "" if r["bound"] is None else repr(r["bound"]),
                r["verdict"],
            ]))
        return ("\n".join(lines) + "\n").encode()


def convergence_experiment(config: ExperimentConfig, threads: int = 1,
                           expect_failure: bool = False) -> ConvergenceReport:
    """Tail-probability ladders of ``|S_m - reference|`` per (u, eps).

    The reference is the m_ref-truncation integral on the same path, so each
    rung statistic is the absolute tail sum ``sum_{m<j<=m_ref} c_j C_j q_j(u)``.
    """
    _validate_y_experiment(config, check_p_window=True,
                           expect_failure=expect_failure)
    if config.m_ref < config.m_max:
        raise ValueError("m_ref must be at least m_max")
    ladder = config.resolved_m_ladder()
    u_points = config.resolved_u_points()
    if not u_points:
        raise ValueError("no evaluation points inside the open interval")
    coeffs = fourier_jacobi_coefficients(config.g, config.params, config.m_ref)
    grid = config.grid()
    basis = orthonormal_basis(config.params, config.m_ref, grid.left_points)
    basis_u = orthonormal_basis(config.params, config.m_ref,
                                np.asarray(u_points))
    n_stat = len(u_points) * len(ladder)
    rows_w = np.empty((n_stat + 2, grid.n_steps))
    combos = []
    k = 0
    for iu in range(len(u_points)):
        scaled = coeffs * basis_u[:, iu]
        for m in ladder:
            combo = scaled[m + 1:] @ basis[m + 1:]
            rows_w[k] = _weight_row(config, combo)
            combos.append(scaled.copy())
            combos[-1][:m + 1] = 0.0
            k += 1
    # two plain random coefficients for the dependence statistic
    rows_w[n_stat] = _weight_row(config, basis[0])
    rows_w[n_stat + 1] = _weight_row(config, basis[min(2, config.m_ref)])
    sums = _run_weighted_rows(config, rows_w, threads)
    tails = np.abs(sums[:, :n_stat])
    c_lo, c_hi = sums[:, n_stat], sums[:, n_stat + 1]

    report_rows = []
    ladder_rows = []
    all_ok = True
    for iu, u in enumerate(u_points):
        for eps in config.eps_list:
            p_hats, ses, bounds = [], [], []
            for im, m in enumerate(ladder):
                col = tails[:, iu * len(ladder) + im]
                p_hat = estimate_tail_probability(col, eps)
                se = _binomial_se(p_hat, config.n_paths)
                B = _combo_abs_power_integral(config.params,
                                              combos[iu * len(ladder) + im],
                                              config.law.chi, config.iv)
                chi = config.law.chi
                bound = (2.0 ** (chi + 1.0) * config.law.scale_c
                         / ((chi + 1.0) * eps ** chi) * B)
                p_hats.append(p_hat)
                ses.append(se)
                bounds.append(bound)
            monotone, final_ok = _ladder_checks(p_hats, ses)
            ladder_ok = monotone and final_ok
            all_ok = all_ok and ladder_ok
            for im, m in enumerate(ladder):
                rung_ok = im == 0 or p_hats[im] <= p_hats[im - 1] + 2.0 * _pair_se(
                    ses[im - 1], ses[im])
                if im == len(ladder) - 1:
                    rung_ok = rung_ok and final_ok
                report_rows.append({
                    "u": float(u), "eps": float(eps), "m": int(m),
                    "p_hat": p_hats[im], "se": ses[im], "bound": bounds[im],
                    "verdict": "pass" if rung_ok else "fail",
                })
            ladder_rows.append({
                "u": float(u), "eps": float(eps),
                "monotone": monotone, "final_ok": final_ok,
                "final_p_hat": p_hats[-1],
                "verdict": "pass" if ladder_ok else "fail",
            })

    tau = stats.kendalltau(c_lo, c_hi)
    dependence = {
        "statistic": "kendall_tau",
        "pair": [0, int(min(2, config.m_ref))],
        "value": float(tau.statistic),
        "n": config.n_paths,
        "note": "descriptive only — coefficients share one path realization",
    }
    tail_coeffs = coeffs[config.m_max + 1:]
    truncation = {
        "m_ref": config.m_ref,
        "tail_coefficient_mass": float(np.sum(np.abs(tail_coeffs))),
        "last_coefficient": float(coeffs[-1]),
    }
    verdict_ok = all_ok != expect_failure
    return ConvergenceReport(
        config=config,
        rows=tuple(report_rows),
        ladders=tuple(ladder_rows),
        dependence=dependence,
        truncation=truncation,
        verdict="pass" if verdict_ok else "fail",
        expect_failure=expect_failure,
    )
