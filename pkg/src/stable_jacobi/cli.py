"""Command-line front end.

Every experiment subcommand writes three artifacts into ``--outdir``:
``report.json`` (full structured result), ``report.csv`` (flat rows), and
``config.echo`` (flat ``key=value`` lines, reusable via ``--config``).
Exit status: 0 when the verdict passes, 1 when it fails, 2 for unusable
arguments or configs (including hypothesis violations).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import kernels
from .fourier_jacobi import p_range, ultraspherical_config
from .jacobi import (Interval, JacobiParams, NotInSpaceError, TestFunction,
                     gauss_jacobi_rule, orthonormal_basis)
from .stable_process import Grid, RngStream, StableLaw, simulate_path
from .stochastic_integral import build_y
from .verification import (ExperimentConfig, HypothesisViolation,
                           cf_match_check, config_mapping,
                           convergence_experiment, existence_check,
                           tail_check, _metadata)

_INT_KEYS = {"n_paths", "n_steps", "m_max", "m_ref", "seed", "threads",
             "max_degree", "order"}
_FLOAT_KEYS = {"chi", "scale_c", "zeta", "eta", "a", "b", "p", "tol"}
_LIST_FLOAT_KEYS = {"eps", "u_points", "x"}
_LIST_INT_KEYS = {"degrees", "m_ladder"}
_BOOL_KEYS = {"expect_failure", "with_y"}

_EXPERIMENT_DEFAULTS = {
    "chi": 1.5, "scale_c": 1.0, "zeta": 0.0, "eta": 0.0,
    "a": -0.5, "b": 0.5, "g": "cos:1", "p": 2.0,
    "n_paths": 10_000, "n_steps": 4096, "m_max": 32, "m_ref": 128,
    "eps": (0.1,), "u_points": None, "m_ladder": None, "seed": 0,
}


def _parse_float_list(text):
    return tuple(float(tok) for tok in str(text).split(",") if tok.strip())


def _parse_int_list(text):
    return tuple(int(tok) for tok in str(text).split(",") if tok.strip())


def _coerce(key: str, raw):
    if raw is None or not isinstance(raw, str):
        return raw
    if key in _INT_KEYS:
        return int(raw)
    if key in _FLOAT_KEYS:
        return float(raw)
    if key in _LIST_FLOAT_KEYS:
        return _parse_float_list(raw)
    if key in _LIST_INT_KEYS:
        return _parse_int_list(raw)
    if key in _BOOL_KEYS:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    return raw


def _load_config_file(path: str) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, raw = line.partition("=")
            key = key.strip()
            raw = raw.strip()
            values[key] = None if raw in ("", "none", "None") else _coerce(key, raw)
    return values


def _resolve(ns, defaults: dict) -> dict:
    """CLI flag > config-file entry > hard default, per key."""
    file_values = _load_config_file(ns.config) if ns.config else {}
    merged = {}
    for key, fallback in defaults.items():
        cli_value = getattr(ns, key, None)
        if cli_value is not None and cli_value is not False:
            merged[key] = _coerce(key, cli_value)
        elif key in file_values:
            merged[key] = file_values[key]
        else:
            merged[key] = fallback
    return merged


def _resolve_threads(ns) -> int:
    if getattr(ns, "threads", None) is not None:
        return int(ns.threads)
    env = os.environ.get("STABLE_JACOBI_THREADS")
    if env:
        return int(env)
    return 1


def _experiment_config(values: dict) -> ExperimentConfig:
    return ExperimentConfig(
        law=StableLaw(values["chi"], values["scale_c"]),
        params=JacobiParams(values["zeta"], values["eta"]),
        iv=Interval(values["a"], values["b"]),
        g=TestFunction.parse(values["g"]),
        p=values["p"],
        n_paths=values["n_paths"],
        n_steps=values["n_steps"],
        m_max=values["m_max"],
        m_ref=values["m_ref"],
        eps_list=values["eps"],
        u_points=values["u_points"],
        master_seed=values["seed"],
        m_ladder=values["m_ladder"],
    )


def _echo_lines(values: dict) -> str:
    lines = []
    for key in sorted(values):
        value = values[key]
        if value is None:
            text = ""
        elif isinstance(value, (tuple, list)):
            text = ",".join(repr(v) for v in value)
        elif isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        lines.append(f"{key}={text}")
    return "\n".join(lines) + "\n"


def _write_outputs(outdir: str, json_bytes: bytes, csv_bytes: bytes,
                   echo_text: str):
    os.makedirs(outdir, exist_ok=True)
    with open(os.path.join(outdir, "report.json"), "wb") as fh:
        fh.write(json_bytes)
    with open(os.path.join(outdir, "report.csv"), "wb") as fh:
        fh.write(csv_bytes)
    with open(os.path.join(outdir, "config.echo"), "w", encoding="utf-8") as fh:
        fh.write(echo_text)


def _fragment_json(config: ExperimentConfig, fragment: dict) -> bytes:
    payload = {"metadata": _metadata(), "config": config_mapping(config)}
    payload.update(fragment)
    return (json.dumps(payload, indent=2) + "\n").encode()


def _csv_from_rows(header: str, rows, fields) -> bytes:
    lines = [header]
    for row in rows:
        cells = []
        for name in fields:
            value = row[name]
            if value is None:
                cells.append("")
            elif isinstance(value, bool):
                cells.append("true" if value else "false")
            elif isinstance(value, float):
                cells.append(repr(value))
            else:
                cells.append(str(value))
        lines.append(",".join(cells))
    return ("\n".join(lines) + "\n").encode()


# ---------------------------------------------------------------------------
# subcommands


def _fmt_short(value: float) -> str:
    text = f"{value:.6f}".rstrip("0")
    return text + "0" if text.endswith(".") else text


def _cmd_prange(ns) -> int:
    window = p_range(JacobiParams(ns.zeta, ns.eta))
    print(f"lower={_fmt_short(window.lower)}, upper={_fmt_short(window.upper)}")
    return 0


def _cmd_orthocheck(ns) -> int:
    defaults = {"zeta": 0.0, "eta": 0.0, "max_degree": 30, "order": None,
                "tol": 1e-10}
    values = _resolve(ns, defaults)
    params = JacobiParams(values["zeta"], values["eta"])
    m_max = values["max_degree"]
    order = values["order"] or m_max + 1
    rule = gauss_jacobi_rule(params, order)
    basis = orthonormal_basis(params, m_max, rule.nodes)
    gram = (basis * rule.weights) @ basis.T
    dev = np.abs(gram - np.eye(m_max + 1))
    rows = [{"i": i, "j": j, "inner_product": float(gram[i, j]),
             "deviation": float(dev[i, j])}
            for i in range(m_max + 1) for j in range(i, m_max + 1)]
    max_dev = float(dev.max())
    verdict = "pass" if max_dev < values["tol"] else "fail"
    payload = {
        "metadata": _metadata(),
        "config": {"zeta": params.zeta, "eta": params.eta,
                   "max_degree": m_max, "order": order, "tol": values["tol"]},
        "check": "orthonormality",
        "max_deviation": max_dev,
        "verdict": verdict,
    }
    json_bytes = (json.dumps(payload, indent=2) + "\n").encode()
    csv_bytes = _csv_from_rows("i,j,inner_product,deviation", rows,
                               ("i", "j", "inner_product", "deviation"))
    _write_outputs(ns.outdir, json_bytes, csv_bytes,
                   _echo_lines({**values, "order": order}))
    print(f"orthocheck max_deviation={max_dev!r} verdict={verdict}")
    return 0 if verdict == "pass" else 1


def _cmd_samplepaths(ns) -> int:
    defaults = {"chi": 1.5, "scale_c": 1.0, "zeta": 0.0, "eta": 0.0,
                "a": -0.5, "b": 0.5, "n_steps": 4096, "n_paths": 4,
                "seed": 0, "with_y": False}
    values = _resolve(ns, defaults)
    law = StableLaw(values["chi"], values["scale_c"])
    grid = Grid(Interval(values["a"], values["b"]), values["n_steps"])
    params = JacobiParams(values["zeta"], values["eta"])
    os.makedirs(ns.outdir, exist_ok=True)
    for i in range(values["n_paths"]):
        path = simulate_path(law, grid, RngStream(values["seed"], i))
        for label, track in (("x", path),) + (
                (("y", build_y(params, path)),) if values["with_y"] else ()):
            name = os.path.join(ns.outdir, f"{label}_path_{i:03d}.csv")
            with open(name, "w", encoding="utf-8") as fh:
                fh.write("v,value\n")
                for v, val in zip(grid.points, track.values):
                    fh.write(f"{float(v)!r},{float(val)!r}\n")
    with open(os.path.join(ns.outdir, "config.echo"), "w", encoding="utf-8") as fh:
        fh.write(_echo_lines(values))
    print(f"wrote {values['n_paths']} path file(s) to {ns.outdir}")
    return 0


def _cmd_cfcheck(ns) -> int:
    defaults = dict(_EXPERIMENT_DEFAULTS, x=(0.25, 0.5, 1.0, 2.0))
    values = _resolve(ns, defaults)
    config = _experiment_config(values)
    fragment = cf_match_check(config, values["x"], threads=_resolve_threads(ns))
    csv_bytes = _csv_from_rows(
        "x,ecf_re,ecf_im,theory,deviation,band,within", fragment["rows"],
        ("x", "ecf_re", "ecf_im", "theory", "deviation", "band", "within"))
    _write_outputs(ns.outdir, _fragment_json(config, fragment), csv_bytes,
                   _echo_lines(values))
    print(f"cfcheck verdict={fragment['verdict']}")
    return 0 if fragment["verdict"] == "pass" else 1


def _cmd_tailcheck(ns) -> int:
    values = _resolve(ns, dict(_EXPERIMENT_DEFAULTS))
    config = _experiment_config(values)
    fragment = tail_check(config, threads=_resolve_threads(ns))
    csv_bytes = _csv_from_rows(
        "eps,p_hat,se,bound,vacuous,within", fragment["rows"],
        ("eps", "p_hat", "se", "bound", "vacuous", "within"))
    _write_outputs(ns.outdir, _fragment_json(config, fragment), csv_bytes,
                   _echo_lines(values))
    print(f"tailcheck verdict={fragment['verdict']}")
    return 0 if fragment["verdict"] == "pass" else 1


def _cmd_exists(ns) -> int:
    defaults = dict(_EXPERIMENT_DEFAULTS, degrees=(4, 8, 16, 32))
    values = _resolve(ns, defaults)
    config = _experiment_config(values)
    fragment = existence_check(config, values["degrees"],
                               threads=_resolve_threads(ns))
    csv_bytes = _csv_from_rows(
        "n,n_next,eps,p_hat,se,bound,verdict", fragment["rows"],
        ("n", "n_next", "eps", "p_hat", "se", "bound", "verdict"))
    _write_outputs(ns.outdir, _fragment_json(config, fragment), csv_bytes,
                   _echo_lines(values))
    print(f"exists final_p_hat={fragment['final_p_hat']!r} "
          f"verdict={fragment['verdict']}")
    return 0 if fragment["verdict"] == "pass" else 1


def _run_convergence(ns, values: dict) -> int:
    config = _experiment_config(values)
    report = convergence_experiment(config, threads=_resolve_threads(ns),
                                    expect_failure=values["expect_failure"])
    _write_outputs(ns.outdir, report.to_json_bytes(), report.to_csv_bytes(),
                   _echo_lines(values))
    print(f"converge verdict={report.verdict}")
    return 0 if report.verdict == "pass" else 1


def _cmd_converge(ns) -> int:
    values = _resolve(ns, dict(_EXPERIMENT_DEFAULTS, expect_failure=False))
    return _run_convergence(ns, values)


def _cmd_ultra(ns) -> int:
    defaults = dict(_EXPERIMENT_DEFAULTS, expect_failure=False)
    values = _resolve(ns, defaults)
    params, iv = ultraspherical_config(values["zeta"])
    values.update(zeta=params.zeta, eta=params.eta, a=iv.a, b=iv.b)
    return _run_convergence(ns, values)


def _add_experiment_flags(sub):
    for flag, help_text in (
        ("--chi", "stability index, dimensionless, in [1, 2] (default 1.5)"),
        ("--scale-c", "scale constant of the driving process (default 1.0)"),
        ("--zeta", "weight exponent at +1 (default 0)"),
        ("--eta", "weight exponent at -1 (default 0)"),
        ("--a", "left endpoint in [-1, 1) (default -0.5)"),
        ("--b", "right endpoint in (-1, 1] (default 0.5)"),
        ("--p", "integrability exponent (default 2)"),
    ):
        sub.add_argument(flag, type=float, help=help_text)
    sub.add_argument("--g", help="integrand: poly:c0,c1,... | power:s,center "
                                 "(center -1 or 1) | step:x0 | cos:k | "
                                 "const:v (default cos:1)")
    sub.add_argument("--n-paths", "--paths", dest="n_paths", type=int,
                     help="Monte Carlo paths (default 10000)")
    sub.add_argument("--n-steps", type=int,
                     help="grid steps per path (default 4096)")
    sub.add_argument("--m-max", type=int,
                     help="largest truncation degree (default 32)")
    sub.add_argument("--m-ref", type=int,
                     help="reference truncation degree (default 128)")
    sub.add_argument("--seed", type=int, help="master seed (default 0)")
    sub.add_argument("--eps", help="comma-separated thresholds (default 0.1)")
    sub.add_argument("--u-points", help="comma-separated evaluation points "
                                        "(default interior of -0.9..0.9)")
    sub.add_argument("--m-ladder", help="comma-separated truncation degrees "
                                        "(default powers of two up to m-max)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stable-jacobi",
        description="Weighted orthogonal expansions driven by heavy-tailed "
                    "random measures: simulation and verification checks.")
    subs = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sub = subs.add_parser(name, help=help_text)
        sub.set_defaults(func=func)
        sub.add_argument("--config", help="key=value file; flags override")
        sub.add_argument("--outdir", default=".", help="output directory")
        sub.add_argument("--threads", type=int,
                         help="worker threads (or STABLE_JACOBI_THREADS)")
        return sub

    sub = add("orthocheck", _cmd_orthocheck, "basis orthonormality residuals")
    sub.add_argument("--zeta", type=float)
    sub.add_argument("--eta", type=float)
    sub.add_argument("--max-degree", type=int)
    sub.add_argument("--order", type=int)
    sub.add_argument("--tol", type=float)

    sub = add("samplepaths", _cmd_samplepaths, "simulate and dump paths")
    for flag in ("--chi", "--scale-c", "--zeta", "--eta", "--a", "--b"):
        sub.add_argument(flag, type=float)
    sub.add_argument("--n-steps", type=int)
    sub.add_argument("--n-paths", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--with-y", action="store_true",
                     help="also write the weighted cumulative paths")

    sub = add("cfcheck", _cmd_cfcheck, "characteristic function comparison")
    _add_experiment_flags(sub)
    sub.add_argument("--x", help="comma-separated CF arguments")

    sub = add("tailcheck", _cmd_tailcheck, "tail probability envelope check")
    _add_experiment_flags(sub)

    sub = add("exists", _cmd_exists, "Cauchy ladder for truncation integrals")
    _add_experiment_flags(sub)
    sub.add_argument("--degrees", help="comma-separated ladder degrees")

    sub = add("converge", _cmd_converge, "partial-sum convergence ladders")
    _add_experiment_flags(sub)
    sub.add_argument("--expect-failure", action="store_true",
                     help="invert the verdict (for out-of-range p demos)")

    sub = add("ultra", _cmd_ultra, "symmetric-weight convergence run on [-1, 1]")
    _add_experiment_flags(sub)
    sub.add_argument("--expect-failure", action="store_true")

    sub = subs.add_parser("prange", help="admissible integrability window")
    sub.set_defaults(func=_cmd_prange)
    sub.add_argument("--zeta", type=float, required=True)
    sub.add_argument("--eta", type=float, required=True)
    return parser


def run(argv=None) -> int:
    parser = _build_parser()
    ns = parser.parse_args(argv)
    start = time.monotonic()
    try:
        status = ns.func(ns)
    except (HypothesisViolation, NotInSpaceError) as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        elapsed = time.monotonic() - start
        print(f"elapsed_seconds={elapsed:.3f} backend={kernels.BACKEND}",
              file=sys.stderr)
    return status


def main():
    sys.exit(run())
