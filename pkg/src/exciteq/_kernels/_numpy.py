"""Pure-numpy reference kernels.

Every function here has a twin in ``_numba`` with an identical signature;
results agree to floating-point rounding.  Each backend on its own is
deterministic.  Basis index ``b`` stores the
state of qubit ``q`` in bit ``q`` (little-endian).
"""

from __future__ import annotations

import numpy as np


def parity(values: np.ndarray) -> np.ndarray:
    """Parity (0/1) of the set-bit count of each int64 entry."""
    return (np.bitwise_count(values) & 1).astype(np.int64)


def pauli_apply(xs, zs, coefs, psi):
    """Return ``sum_k coefs[k] * X^xs[k] Z^zs[k] |psi>``.

    ``coefs`` must already carry the ``i**popcount(x & z)`` factor that turns
    ``X^x Z^z`` into the Hermitian Pauli string.
    """
    dim = psi.shape[0]
    basis = np.arange(dim, dtype=np.int64)
    out = np.zeros(dim, dtype=np.complex128)
    for k in range(xs.shape[0]):
        signs = 1.0 - 2.0 * parity(zs[k] & basis)
        out[basis ^ xs[k]] += coefs[k] * signs * psi
    return out


def pauli_coo(xs, zs, coefs, nq):
    dim = 1 << nq
    nterms = xs.shape[0]
    basis = np.arange(dim, dtype=np.int64)
    rows = np.empty(nterms * dim, dtype=np.int64)
    cols = np.empty(nterms * dim, dtype=np.int64)
    vals = np.empty(nterms * dim, dtype=np.complex128)
    for k in range(nterms):
        sl = slice(k * dim, (k + 1) * dim)
        cols[sl] = basis
        rows[sl] = basis ^ xs[k]
        vals[sl] = coefs[k] * (1.0 - 2.0 * parity(zs[k] & basis))
    return rows, cols, vals


def apply_1q(state, target, ctrl_mask, ctrl_val, m):
    """Apply the 2x2 matrix ``m`` to ``target`` on every column of ``state``.

    The gate only fires on basis states with ``b & ctrl_mask == ctrl_val``.
    ``state`` has shape ``(2**nq, batch)`` and is modified in place.
    """
    dim = state.shape[0]
    tbit = np.int64(1) << target
    basis = np.arange(dim, dtype=np.int64)
    sel = ((basis & tbit) == 0) & ((basis & ctrl_mask) == ctrl_val)
    i0 = basis[sel]
    i1 = i0 | tbit
    a = state[i0]
    b = state[i1]
    state[i0] = m[0, 0] * a + m[0, 1] * b
    state[i1] = m[1, 0] * a + m[1, 1] * b


def rotate_pairs(psi, src, dst, sign, c, s):
    """In-place ``exp(theta*G)`` for a generator with ``G|src> = sign|dst>``."""
    a = psi[src]
    b = psi[dst]
    psi[src] = c * a - s * sign * b
    psi[dst] = c * b + s * sign * a


def generator_apply(psi, src, dst, sign):
    out = np.zeros_like(psi)
    out[dst] = sign * psi[src]
    out[src] = -sign * psi[dst]
    return out
