# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: counter-based uniform streams and stable-variate reductions.

The generator is Philox4x64-10 keyed by (master_seed, stream_id), emitting the
same raw 64-bit stream as ``numpy.random.Philox(key=[master_seed, stream_id])``:
the 256-bit counter is bumped before each block, the four lanes are drained in
order, and doubles are ``(word >> 11) * 2**-53``.  The pure-Python backend in
``kernels.py`` consumes numpy's generator directly, so both backends see
identical uniforms.
"""

import numpy as np

from libc.stdlib cimport free, malloc
from libc.math cimport M_PI, cos, log1p, pow, sin, sqrt, tan

cdef extern from *:
    """
    #include <stdint.h>

    typedef struct {
        uint64_t ctr[4];
        uint64_t key[2];
        uint64_t buf[4];
        int pos;
    } ph_state;

    static inline uint64_t ph_mulhi(uint64_t a, uint64_t b)
    {
        return (uint64_t)(((__uint128_t)a * b) >> 64);
    }

    static inline void ph_init(ph_state *s, uint64_t k0, uint64_t k1)
    {
        s->ctr[0] = s->ctr[1] = s->ctr[2] = s->ctr[3] = 0;
        s->key[0] = k0;
        s->key[1] = k1;
        s->pos = 4;
    }

    static inline void ph_block(ph_state *s)
    {
        uint64_t c0 = s->ctr[0], c1 = s->ctr[1], c2 = s->ctr[2], c3 = s->ctr[3];
        uint64_t k0 = s->key[0], k1 = s->key[1];
        int r;
        for (r = 0; r < 10; r++) {
            uint64_t hi0 = ph_mulhi(0xD2E7470EE14C6C93ULL, c0);
            uint64_t lo0 = 0xD2E7470EE14C6C93ULL * c0;
            uint64_t hi1 = ph_mulhi(0xCA5A826395121157ULL, c2);
            uint64_t lo1 = 0xCA5A826395121157ULL * c2;
            c0 = hi1 ^ c1 ^ k0;
            c1 = lo1;
            c2 = hi0 ^ c3 ^ k1;
            c3 = lo0;
            k0 += 0x9E3779B97F4A7C15ULL;
            k1 += 0xBB67AE8584CAA73BULL;
        }
        s->buf[0] = c0;
        s->buf[1] = c1;
        s->buf[2] = c2;
        s->buf[3] = c3;
    }

    static inline uint64_t ph_next64(ph_state *s)
    {
        if (s->pos == 4) {
            /* advance the 256-bit counter, then generate */
            if (++s->ctr[0] == 0)
                if (++s->ctr[1] == 0)
                    if (++s->ctr[2] == 0)
                        ++s->ctr[3];
            ph_block(s);
            s->pos = 0;
        }
        return s->buf[s->pos++];
    }

    static inline double ph_next_double(ph_state *s)
    {
        return (double)(ph_next64(s) >> 11) * (1.0 / 9007199254740992.0);
    }
    """
    ctypedef struct ph_state:
        pass
    void ph_init(ph_state *s, unsigned long long k0, unsigned long long k1) nogil
    unsigned long long ph_next64(ph_state *s) nogil
    double ph_next_double(ph_state *s) nogil


cdef void _fill_uniforms(ph_state *s, Py_ssize_t n, double *out) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = ph_next_double(s)


cdef void _transform(double chi, Py_ssize_t n, const double *u, double *out) noexcept nogil:
    """Map uniforms to standard symmetric stable draws (CF exp{-|x|^chi}).

    chi == 1 consumes one uniform per draw, otherwise the pair
    (u[2i], u[2i+1]).  Formulas mirror the Python backend exactly.
    """
    cdef Py_ssize_t i
    cdef double phi, w, inv
    if chi == 1.0:
        for i in range(n):
            out[i] = tan(M_PI * (u[i] - 0.5))
    elif chi == 2.0:
        for i in range(n):
            phi = M_PI * (u[2 * i] - 0.5)
            w = -log1p(-u[2 * i + 1])
            out[i] = 2.0 * sqrt(w) * sin(phi)
    else:
        inv = 1.0 / chi
        for i in range(n):
            phi = M_PI * (u[2 * i] - 0.5)
            w = -log1p(-u[2 * i + 1])
            if w <= 0.0:
                out[i] = 0.0
            else:
                out[i] = (sin(chi * phi) / pow(cos(phi), inv)
                          * pow(cos((1.0 - chi) * phi) / w, inv - 1.0))


cdef void _draws_for_path(double chi, unsigned long long seed,
                          unsigned long long stream, Py_ssize_t n,
                          double *scratch, double *out) noexcept nogil:
    cdef ph_state s
    cdef Py_ssize_t nu = n if chi == 1.0 else 2 * n
    ph_init(&s, seed, stream)
    _fill_uniforms(&s, nu, scratch)
    _transform(chi, n, scratch, out)


def raw_uint64(unsigned long long seed, unsigned long long stream, Py_ssize_t n):
    """Raw 64-bit words of the (seed, stream) substream; matches numpy's Philox."""
    out = np.empty(n, dtype=np.uint64)
    cdef unsigned long long[::1] view = out
    cdef ph_state s
    cdef Py_ssize_t i
    ph_init(&s, seed, stream)
    for i in range(n):
        view[i] = ph_next64(&s)
    return out


def uniforms(unsigned long long seed, unsigned long long stream, Py_ssize_t n):
    """Uniform doubles on [0, 1) from the (seed, stream) substream."""
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] view = out
    cdef ph_state s
    ph_init(&s, seed, stream)
    if n > 0:
        _fill_uniforms(&s, n, &view[0])
    return out


def stable_draws(double chi, unsigned long long seed, unsigned long long stream,
                 Py_ssize_t n):
    """``n`` standard symmetric stable draws from the (seed, stream) substream."""
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] view = out
    cdef double *scratch
    cdef Py_ssize_t nu = n if chi == 1.0 else 2 * n
    if n == 0:
        return out
    scratch = <double *> malloc(nu * sizeof(double))
    if scratch == NULL:
        raise MemoryError
    try:
        with nogil:
            _draws_for_path(chi, seed, stream, n, scratch, &view[0])
    finally:
        free(scratch)
    return out


def weighted_sums(double chi, unsigned long long seed, double[:, ::1] W,
                  Py_ssize_t path_lo, Py_ssize_t path_hi, double[:, ::1] out):
    """Fill ``out[p - path_lo, k] = sum_i W[k, i] * draw_i(path p)``.

    Each path p is an independent substream keyed (seed, p); draws follow the
    same uniform-consumption contract as ``stable_draws``.  Releases the GIL, so
    disjoint row blocks may be filled from several threads.
    """
    cdef Py_ssize_t K = W.shape[0]
    cdef Py_ssize_t n = W.shape[1]
    cdef Py_ssize_t rows = path_hi - path_lo
    cdef Py_ssize_t nu = n if chi == 1.0 else 2 * n
    cdef Py_ssize_t p, k, i
    cdef double acc
    cdef double *scratch
    cdef double *draws
    if out.shape[0] != rows or out.shape[1] != K:
        raise ValueError("output buffer shape mismatch")
    if rows == 0 or n == 0:
        return
    scratch = <double *> malloc((nu + n) * sizeof(double))
    if scratch == NULL:
        raise MemoryError
    draws = scratch + nu
    try:
        with nogil:
            for p in range(rows):
                _draws_for_path(chi, seed,
                                <unsigned long long> (path_lo + p), n,
                                scratch, draws)
                for k in range(K):
                    acc = 0.0
                    for i in range(n):
                        acc += W[k, i] * draws[i]
                    out[p, k] = acc
    finally:
        free(scratch)
