"""Sequency-ordered Walsh functions on [0,1]^d and dyadic arithmetic.

Points are dyadic rationals with ``BITS`` fractional bits, held internally as
integers ``k`` with ``x = k * 2**-BITS``.  Floats are snapped down onto that
grid before evaluation, which makes :func:`dyadic_add` exact.

Bit convention: with ``g = n ^ (n >> 1)`` (Gray code of ``n``), bit ``k`` of
``g`` pairs with the binary digit of ``x`` of weight ``2**-(k+1)``::

    Wal(n, x) = (-1) ** sum_k (n_k + n_{k+1}) x_{k+1}

This is the ordering in which ``Wal(n, .)`` has exactly ``n`` sign changes on
[0, 1).  Negative sequency is not stored: callers apply
``Wal(-n, x) = -Wal(n, x)`` themselves (see :func:`wal_eval_signed`).
"""

import math

import numpy as np

BITS = 53
_ONE = 1 << BITS


def to_dyadic(x):
    """Snap ``x`` in [0, 1) to the ``2**-BITS`` grid, returning integer numerators."""
    arr = np.asarray(x, dtype=np.float64)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr >= 1.0):
        raise ValueError("dyadic points must lie in [0, 1)")
    if arr.ndim == 0:
        return int(math.floor(math.ldexp(float(arr), BITS)))
    return np.floor(np.ldexp(arr, BITS)).astype(np.uint64)


def from_dyadic(k):
    """Inverse of :func:`to_dyadic`."""
    if isinstance(k, (int, np.integer)):
        return math.ldexp(int(k), -BITS)
    return np.ldexp(np.asarray(k, dtype=np.float64), -BITS)


def gray(n):
    return n ^ (n >> 1)


def _bitrev(v, width):
    out = 0
    for _ in range(width):
        out = (out << 1) | (v & 1)
        v >>= 1
    return out


def _check_sequency(n):
    if int(n) != n or n < 0:
        raise ValueError(f"sequency must be a nonnegative integer, got {n!r}")
    n = int(n)
    if n.bit_length() > BITS:
        raise ValueError(f"sequency {n} exceeds {BITS}-bit resolution")
    return n


def wal_eval(n, x):
    """Evaluate ``Wal(n, x)`` for integer ``n >= 0`` and ``x`` in [0, 1).

    ``x`` may be a float or an array of floats; the result is ``+1``/``-1``
    (an int for scalar input, an int8 array otherwise).
    """
    n = _check_sequency(n)
    mask = _bitrev(gray(n), BITS)
    k = to_dyadic(x)
    if isinstance(k, int):
        return -1 if (k & mask).bit_count() & 1 else 1
    parity = np.bitwise_count(k & np.uint64(mask)) & 1
    return (1 - 2 * parity.astype(np.int8)).astype(np.int8)


def wal_eval_signed(n, x):
    """``Wal`` extended to negative sequency by ``Wal(-n, x) = -Wal(n, x)``."""
    if n < 0:
        return -wal_eval(-n, x)
    return wal_eval(n, x)


def wal_eval_d(n, x):
    """Tensor-product Walsh function: product of 1D evaluations over axes.

    ``n`` is a length-d sequence of sequencies; ``x`` has a trailing axis of
    length d (or is itself a length-d point).
    """
    n = tuple(n)
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1:] != (len(n),):
        raise ValueError(f"point dimension {x.shape[-1:]} does not match sequency {n}")
    out = np.ones(x.shape[:-1], dtype=np.int8)
    for axis, nk in enumerate(n):
        out = out * wal_eval(nk, x[..., axis])
    return int(out) if out.ndim == 0 else out


def dyadic_add(x, y):
    """Dyadic (carry-free, bitwise XOR) addition of two points in [0, 1)."""
    kx, ky = to_dyadic(x), to_dyadic(y)
    if isinstance(kx, int) and isinstance(ky, int):
        return from_dyadic(kx ^ ky)
    return from_dyadic(np.bitwise_xor(np.asarray(kx, np.uint64), np.asarray(ky, np.uint64)))


def sign_changes(values):
    """Number of sign changes along the last axis of a +-1 sequence."""
    v = np.asarray(values)
    return np.count_nonzero(v[..., 1:] != v[..., :-1], axis=-1)


def _log2_exact(length):
    k = int(length).bit_length() - 1
    if length < 1 or (1 << k) != length:
        raise ValueError(f"length {length} is not a power of two")
    return k


def sequency_permutation(k):
    """Row ``n`` of the sequency-ordered matrix is natural Hadamard row ``perm[n]``."""
    n = np.arange(1 << k, dtype=np.int64)
    g = n ^ (n >> 1)
    rev = np.zeros_like(g)
    for b in range(k):
        rev |= ((g >> b) & 1) << (k - 1 - b)
    return rev


def _fwht_natural(a, axis):
    a = np.moveaxis(a, axis, -1)
    shape = a.shape
    n = shape[-1]
    h = 1
    out = np.array(a, dtype=np.result_type(a.dtype, np.float64), copy=True)
    while h < n:
        blk = out.reshape(shape[:-1] + (n // (2 * h), 2, h))
        lo = blk[..., 0, :].copy()
        hi = blk[..., 1, :]
        blk[..., 0, :] += hi
        blk[..., 1, :] = lo - hi
        h *= 2
    return np.moveaxis(out, -1, axis)


def fwht_sequency(v, axis=-1):
    """Orthonormal sequency-ordered Walsh-Hadamard transform along ``axis``.

    Entry ``n`` of the output is ``2**(-k/2) * sum_j v[j] Wal(n, j 2**-k)``
    for length ``2**k``.  The transform matrix is symmetric and orthogonal, so
    it is its own inverse.
    """
    v = np.asarray(v)
    k = _log2_exact(v.shape[axis])
    nat = _fwht_natural(v, axis)
    perm = sequency_permutation(k)
    return np.take(nat, perm, axis=axis) * (2.0 ** (-k / 2))


def fwht_sequency_nd(v):
    """Apply :func:`fwht_sequency` along every axis."""
    out = np.asarray(v)
    for axis in range(out.ndim):
        out = fwht_sequency(out, axis=axis)
    return out


def walsh_matrix(size, k=None):
    """Dense ``size x 2**k`` matrix ``[Wal(n, (j + 1/2) 2**-k)]`` (unnormalised).

    Built from :func:`wal_eval` point by point; used as the oracle for the fast
    transform and as the sampling table on coarse grids.
    """
    if k is None:
        k = _log2_exact(size)
    x = (np.arange(1 << k) + 0.5) * 2.0 ** (-k)
    return np.stack([wal_eval(n, x) for n in range(size)]).astype(np.float64)
