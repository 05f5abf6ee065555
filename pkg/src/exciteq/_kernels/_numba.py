"""Numba-compiled kernels; signatures mirror ``_numpy``."""

from __future__ import annotations

import numba as nb
import numpy as np

_JIT = dict(cache=True, nogil=True)


@nb.njit(**_JIT)
def _bit_parity(v):
    v ^= v >> 32
    v ^= v >> 16
    v ^= v >> 8
    v ^= v >> 4
    v ^= v >> 2
    v ^= v >> 1
    return v & 1


@nb.njit(**_JIT)
def parity(values):
    out = np.empty(values.shape[0], dtype=np.int64)
    for i in range(values.shape[0]):
        out[i] = _bit_parity(values[i])
    return out


@nb.njit(**_JIT)
def pauli_apply(xs, zs, coefs, psi):
    dim = psi.shape[0]
    out = np.zeros(dim, dtype=np.complex128)
    # term-major order, as in the numpy kernel
    for k in range(xs.shape[0]):
        x = xs[k]
        z = zs[k]
        c = coefs[k]
        for b in range(dim):
            sgn = 1.0 - 2.0 * _bit_parity(z & b)
            out[b ^ x] += c * sgn * psi[b]
    return out


@nb.njit(**_JIT)
def pauli_coo(xs, zs, coefs, nq):
    dim = 1 << nq
    nterms = xs.shape[0]
    rows = np.empty(nterms * dim, dtype=np.int64)
    cols = np.empty(nterms * dim, dtype=np.int64)
    vals = np.empty(nterms * dim, dtype=np.complex128)
    for k in range(nterms):
        x = xs[k]
        z = zs[k]
        c = coefs[k]
        base = k * dim
        for b in range(dim):
            cols[base + b] = b
            rows[base + b] = b ^ x
            vals[base + b] = c * (1.0 - 2.0 * _bit_parity(z & b))
    return rows, cols, vals


@nb.njit(**_JIT)
def apply_1q(state, target, ctrl_mask, ctrl_val, m):
    dim = state.shape[0]
    batch = state.shape[1]
    tbit = np.int64(1) << target
    m00 = m[0, 0]
    m01 = m[0, 1]
    m10 = m[1, 0]
    m11 = m[1, 1]
    for i0 in range(dim):
        if i0 & tbit or (i0 & ctrl_mask) != ctrl_val:
            continue
        i1 = i0 | tbit
        for j in range(batch):
            a = state[i0, j]
            b = state[i1, j]
            state[i0, j] = m00 * a + m01 * b
            state[i1, j] = m10 * a + m11 * b


@nb.njit(**_JIT)
def rotate_pairs(psi, src, dst, sign, c, s):
    for k in range(src.shape[0]):
        i = src[k]
        j = dst[k]
        a = psi[i]
        b = psi[j]
        psi[i] = c * a - s * sign[k] * b
        psi[j] = c * b + s * sign[k] * a


@nb.njit(**_JIT)
def generator_apply(psi, src, dst, sign):
    out = np.zeros_like(psi)
    for k in range(src.shape[0]):
        out[dst[k]] = sign[k] * psi[src[k]]
        out[src[k]] = -sign[k] * psi[dst[k]]
    return out
