"""Backend-dispatched draw and reduction kernels.

Two interchangeable backends produce the uniform stream of the counter-based
generator keyed by ``(master_seed, stream_id)``:

* ``native`` — the compiled extension (:mod:`stable_jacobi._native`), which
  reimplements Philox4x64-10 in C;
* ``python`` — ``numpy.random.Philox`` driven through ``numpy.random.Generator``.

Both emit bit-identical uniforms; transformed draws agree to floating-point
noise (the libm/numpy ufunc split).  Selection happens at import time and can
be forced with ``STABLE_JACOBI_BACKEND=native|python``.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

_requested = os.environ.get("STABLE_JACOBI_BACKEND", "auto").strip().lower()
if _requested not in ("auto", "native", "python"):
    raise ValueError(
        f"STABLE_JACOBI_BACKEND must be 'native', 'python', or 'auto', got {_requested!r}"
    )

_native = None
if _requested in ("auto", "native"):
    try:
        from . import _native
    except ImportError:
        if _requested == "native":
            raise ImportError(
                "STABLE_JACOBI_BACKEND=native but the compiled extension is not built"
            )
        _native = None

BACKEND = "native" if _native is not None else "python"

# Number of uniforms consumed per stable draw: one for the Cauchy case, an
# interleaved pair otherwise.  This is part of the reproducibility contract.


def _uniforms_per_draw(chi):
    return 1 if chi == 1.0 else 2


def _generator(master_seed, stream_id):
    key = np.array([master_seed, stream_id], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _transform_py(chi, u):
    """Uniforms -> standard symmetric stable draws with CF exp{-|x|^chi}."""
    if chi == 1.0:
        return np.tan(np.pi * (u - 0.5))
    u1 = u[..., 0::2]
    u2 = u[..., 1::2]
    phi = np.pi * (u1 - 0.5)
    w = -np.log1p(-u2)
    if chi == 2.0:
        return 2.0 * np.sqrt(w) * np.sin(phi)
    inv = 1.0 / chi
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (np.sin(chi * phi) / np.cos(phi) ** inv
               * (np.cos((1.0 - chi) * phi) / w) ** (inv - 1.0))
    return np.where(w > 0.0, val, 0.0)


def raw_uint64(master_seed, stream_id, n):
    """Raw 64-bit words of substream (master_seed, stream_id)."""
    if BACKEND == "native":
        return _native.raw_uint64(master_seed, stream_id, n)
    return np.random.Philox(
        key=np.array([master_seed, stream_id], dtype=np.uint64)
    ).random_raw(n)


def uniforms(master_seed, stream_id, n):
    """Uniform doubles on [0, 1) of substream (master_seed, stream_id)."""
    if BACKEND == "native":
        return _native.uniforms(master_seed, stream_id, n)
    return _generator(master_seed, stream_id).random(n)


def stable_draws(chi, master_seed, stream_id, n):
    """``n`` standard symmetric stable draws from one substream."""
    if BACKEND == "native":
        return _native.stable_draws(chi, master_seed, stream_id, n)
    u = _generator(master_seed, stream_id).random(_uniforms_per_draw(chi) * n)
    return _transform_py(chi, u)


def _weighted_sums_py(chi, master_seed, W, path_lo, path_hi, out):
    n = W.shape[1]
    nu = _uniforms_per_draw(chi) * n
    # Block the paths so the uniform buffer stays cache-sized.
    block = max(1, int(4_000_000 // max(nu, 1)))
    Wt = W.T
    for lo in range(path_lo, path_hi, block):
        hi = min(lo + block, path_hi)
        u = np.empty((hi - lo, nu))
        for p in range(lo, hi):
            u[p - lo] = _generator(master_seed, p).random(nu)
        draws = _transform_py(chi, u)
        np.matmul(draws, Wt, out=out[lo - path_lo:hi - path_lo])
    return out


def weighted_sums(chi, master_seed, W, path_lo, path_hi, out=None):
    """Per-path weighted sums ``sum_i W[k, i] * draw_i(path p)``.

    Returns an array of shape ``(path_hi - path_lo, W.shape[0])`` whose row p
    depends only on (master_seed, path index), never on how the work is split.
    """
    W = np.ascontiguousarray(W, dtype=np.float64)
    if W.ndim != 2:
        raise ValueError("W must be 2-D (one row per weight vector)")
    rows = path_hi - path_lo
    if out is None:
        out = np.empty((rows, W.shape[0]))
    if BACKEND == "native":
        _native.weighted_sums(chi, master_seed, W, path_lo, path_hi, out)
        return out
    return _weighted_sums_py(chi, master_seed, W, path_lo, path_hi, out)


def batch_weighted_sums(chi, master_seed, W, n_paths, threads=1):
    """``weighted_sums`` over paths 0..n_paths-1, optionally multi-threaded.

    The output is identical for every thread count: threads fill disjoint,
    contiguous row blocks of one preallocated array.
    """
    W = np.ascontiguousarray(W, dtype=np.float64)
    out = np.empty((n_paths, W.shape[0]))
    threads = max(1, int(threads))
    if threads == 1 or n_paths < 2 * threads:
        return weighted_sums(chi, master_seed, W, 0, n_paths, out)
    bounds = np.linspace(0, n_paths, threads + 1).astype(int)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [
            pool.submit(weighted_sums, chi, master_seed, W, lo, hi, out[lo:hi])
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        for f in futures:
            f.result()
    return out
