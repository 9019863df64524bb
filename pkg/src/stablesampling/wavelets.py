"""Haar and Daubechies bases of V_R on [0,1]^d, rendered on dyadic grids.

Every basis function is carried as its cell averages on a grid of depth ``q``
(see :class:`~stablesampling.grid.FineGridFunction`).  Cell averages of the
Daubechies scaling function are exact: they obey the same two-scale relation
as point values, seeded by the integer-cell integrals.  For the boundary
families the resulting step functions are orthonormalised in the grid inner
product, so every basis handed out is exactly orthonormal on its grid.

Boundary handling for Daubechies of order ``p`` (``p`` vanishing moments,
support ``[0, 2p-1]``) at level ``R``, with ``L = 2**R`` and scaled coordinate
``y = L x``:

* ``"interval"``: interior translates ``phi(y - k)``, ``k = 1 .. L-2p``, plus
  ``p`` functions at each edge spanning ``sum_k k**a phi(y - k)`` restricted
  to ``[0, L]`` over the ``2p-1`` edge translates, ``a < p``.  This space
  reproduces polynomials of degree ``< p`` and is nested in ``R``.
* ``"periodic"``: translates ``k = 0 .. L-1`` wrapped onto the circle.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import comb
from typing import NamedTuple

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .grid import FineGridFunction
from .walsh import fwht_sequency

HAAR_GUARD = 1
DAUBECHIES_GUARD = 12
MAX_DAUBECHIES_ORDER = 12


@dataclass(frozen=True)
class BasisSpec:
    """Which space V_R^{b,d} to build.

    ``ordering="wavelet"`` (Haar only, d <= 2) lists the multiresolution
    functions level by level instead of the level-R scaling functions; the
    span is the same.  When left as ``None`` it resolves to ``"wavelet"`` for
    2D Haar and ``"scaling"`` otherwise.
    """

    family: str = "haar"
    order: int = 1
    d: int = 1
    R: int = 1
    boundary: str | None = None
    ordering: str | None = None

    def __post_init__(self):
        family = self.family.lower()
        order = int(self.order)
        if family == "db" and order == 1:
            family = "haar"
        if family not in ("haar", "db"):
            raise ValueError(f"unknown wavelet family {self.family!r}")
        if self.d < 1 or self.R < 0:
            raise ValueError(f"need d >= 1 and R >= 0, got d={self.d}, R={self.R}")
        boundary = self.boundary
        if family == "haar":
            if order != 1:
                raise ValueError("Haar has order 1")
            boundary = boundary or "none"
            if boundary != "none":
                raise ValueError("Haar needs no boundary correction")
        else:
            if not 2 <= order <= MAX_DAUBECHIES_ORDER:
                raise ValueError(f"unsupported Daubechies order {order}")
            if self.d > 2:
                raise ValueError("Daubechies bases are supported for d <= 2 only")
            boundary = boundary or "interval"
            if boundary not in ("interval", "periodic"):
                raise ValueError(f"unknown boundary rule {boundary!r}")
            need = 2 * order if boundary == "interval" else 2 * order - 1
            if (1 << self.R) < need:
                raise ValueError(f"db{order} with {boundary!r} boundary needs 2**R >= {need}")
        ordering = self.ordering
        if ordering is None:
            ordering = "wavelet" if (family == "haar" and self.d == 2) else "scaling"
        if ordering not in ("scaling", "wavelet"):
            raise ValueError(f"unknown ordering {ordering!r}")
        if ordering == "wavelet" and (family != "haar" or self.d > 2):
            raise ValueError("wavelet ordering is available for Haar in d <= 2 only")
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "boundary", boundary)
        object.__setattr__(self, "ordering", ordering)

    @classmethod
    def from_name(cls, name, **kwargs):
        """``"haar"``, ``"db2"``, ``"db8"``... plus any other field."""
        family, order = parse_wavelet(name)
        return cls(family=family, order=order, **kwargs)

    @property
    def name(self):
        return "haar" if self.family == "haar" else f"db{self.order}"

    @property
    def N(self):
        return 1 << (self.d * self.R)

    @property
    def default_depth(self):
        return self.R + (HAAR_GUARD if self.family == "haar" else DAUBECHIES_GUARD)

    @property
    def min_depth(self):
        return self.R if self.family == "haar" else self.R + 2


def parse_wavelet(name):
    """``"haar"`` -> ``("haar", 1)``, ``"db4"`` -> ``("db", 4)``."""
    name = name.lower()
    if name == "haar":
        return "haar", 1
    if name.startswith("db") and name[2:].isdigit():
        order = int(name[2:])
        return ("haar", 1) if order == 1 else ("db", order)
    raise ValueError(f"unknown wavelet {name!r}")


class BasisFunctionId(NamedTuple):
    level: int
    j: tuple
    kind: object  # "scaling", "wavelet", or 1/2/3 for the 2D Haar wavelets


def enumerate_basis(spec):
    """Ordered identifiers of the ``N`` basis functions of ``spec``."""
    R, d = spec.R, spec.d
    if spec.ordering == "scaling":
        # first axis runs fastest
        return [
            BasisFunctionId(R, tuple(reversed(js)), "scaling")
            for js in product(range(1 << R), repeat=d)
        ]
    ids = [BasisFunctionId(0, (0,) * d, "scaling")]
    for r in range(R):
        if d == 1:
            ids.extend(BasisFunctionId(r, (j,), "wavelet") for j in range(1 << r))
        else:
            for l in (1, 2, 3):
                for j2 in range(1 << r):
                    ids.extend(BasisFunctionId(r, (j1, j2), l) for j1 in range(1 << r))
    return ids


def _factor_kinds(fid):
    """1D (kind, level, j) factors of a basis function id."""
    if fid.kind in ("scaling", "wavelet"):
        return [(fid.kind, fid.level, j) for j in fid.j]
    k1, k2 = {1: ("scaling", "wavelet"), 2: ("wavelet", "scaling"), 3: ("wavelet", "wavelet")}[fid.kind]
    return [(k1, fid.level, fid.j[0]), (k2, fid.level, fid.j[1])]


# -- Daubechies filters and scaling-function tables ---------------------------


@lru_cache(maxsize=None)
def daubechies_filter(p):
    """Extremal-phase Daubechies low-pass filter with ``p`` vanishing moments.

    Normalised to ``sum(h) = sqrt(2)``; length ``2p``.  Computed by spectral
    factorisation, keeping the roots inside the unit circle.
    """
    if p < 1 or p > MAX_DAUBECHIES_ORDER:
        raise ValueError(f"unsupported Daubechies order {p}")
    h = np.array([1.0 + 0j])
    for _ in range(p):
        h = np.convolve(h, [1.0, 1.0])
    if p > 1:
        poly = [comb(p - 1 + k, k) for k in range(p)]
        for y in np.roots(poly[::-1]):
            b = 2.0 - 4.0 * y
            disc = np.sqrt(b * b - 4.0 + 0j)
            z = (b + disc) / 2.0
            if abs(z) >= 1.0:
                z = (b - disc) / 2.0
            h = np.convolve(h, [1.0, -z])
    h = np.real(h)
    h = h * np.sqrt(2.0) / h.sum()
    h.setflags(write=False)
    return h


def _refine(seed, h, levels):
    """Push a table through the two-scale relation ``levels`` times."""
    v = seed
    width = len(seed) if len(seed) % 2 else len(seed) - 1  # cells vs points
    for lev in range(1, levels + 1):
        step = 1 << (lev - 1)
        n = (width << lev) + (len(seed) - width)
        new = np.zeros(n)
        for m, hm in enumerate(h):
            new[m * step : m * step + len(v)] += np.sqrt(2.0) * hm * v
        v = new
    return v


def _eigvec_one(A):
    w, V = np.linalg.eig(A)
    v = np.real(V[:, np.argmin(np.abs(w - 1.0))])
    return v / v.sum()


@lru_cache(maxsize=None)
def _scaling_averages(p, q):
    h = daubechies_filter(p)
    S = 2 * p - 1
    A = np.zeros((S, S))
    for k in range(S):
        for i in range(S):
            for m in (2 * k - i, 2 * k + 1 - i):
                if 0 <= m < len(h):
                    A[k, i] += h[m] / np.sqrt(2.0)
    out = _refine(_eigvec_one(A), h, q)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _scaling_points(p, q):
    h = daubechies_filter(p)
    S = 2 * p  # integer points 0 .. 2p-1
    A = np.zeros((S, S))
    for k in range(S):
        for i in range(S):
            if 0 <= 2 * k - i < len(h):
                A[k, i] = np.sqrt(2.0) * h[2 * k - i]
    out = _refine(_eigvec_one(A), h, q)
    out.setflags(write=False)
    return out


def scaling_samples(family, q, kind="average"):
    """Tabulate the scaling function on its support at resolution ``2**-q``.

    ``family`` is ``"haar"`` or ``"dbP"``.  ``kind="average"`` gives the
    cell averages over ``[k 2**-q, (k+1) 2**-q)`` (length ``(2p-1) 2**q``);
    ``kind="point"`` gives values at ``k 2**-q`` including both support
    endpoints.
    """
    family, order = parse_wavelet(family)
    if q < 0:
        raise ValueError("depth must be nonnegative")
    if order > MAX_DAUBECHIES_ORDER:
        raise ValueError(f"unsupported Daubechies order {order}")
    if family == "haar":
        n = 1 << q
        return np.ones(n) if kind == "average" else np.r_[np.ones(n), 0.0]
    if kind == "average":
        return np.array(_scaling_averages(order, q))
    if kind == "point":
        return np.array(_scaling_points(order, q))
    raise ValueError(f"unknown table kind {kind!r}")


# -- 1D atoms ----------------------------------------------------------------


class Atoms1D:
    """A family of 1D step functions ``raw @ coef`` on the depth-``q`` grid.

    ``raw`` is a sparse ``2**q x K`` matrix of elementary columns; ``coef`` is
    ``K x n`` and mixes them into the ``n`` atoms.  ``labels[i]`` is
    ``(kind, level, j)``.
    """

    def __init__(self, q, raw, coef, labels, family):
        self.q = q
        self.raw = sp.csc_matrix(raw)
        self.coef = np.asarray(coef, dtype=np.float64)
        self.labels = list(labels)
        self.family = family

    @property
    def n(self):
        return self.coef.shape[1]

    def apply(self, x):
        """Grid values of ``sum_i x[i] atom_i`` (leading axis of ``x``)."""
        return self.raw @ (self.coef @ x)

    def adjoint(self, v):
        """Grid inner products ``<v, atom_i>`` (leading axis of ``v``)."""
        return self.coef.T @ (self.raw.T @ v) * 2.0 ** (-self.q)

    def grid(self, depth=None):
        """Dense ``2**depth x n`` matrix of the atoms' cell averages."""
        depth = self.q if depth is None else depth
        if depth <= self.q:
            levels = self.q - depth
            pooling = sp.kron(sp.identity(1 << depth), np.full((1, 1 << levels), 2.0 ** -levels))
            return np.asarray((pooling @ self.raw) @ self.coef)
        return np.repeat(self.grid(self.q), 1 << (depth - self.q), axis=0)

    def walsh_table(self, m):
        """``<atom_i, Wal(n, .)>`` for ``n < m``, exact by grid quadrature."""
        k = max(int(m - 1).bit_length(), 0)
        k = min(k, self.q)
        coarse = self.grid(k)
        table = fwht_sequency(coarse, axis=0) * 2.0 ** (-k / 2)
        out = np.zeros((m, self.n))
        rows = min(m, 1 << k)
        out[:rows] = table[:rows]
        return out

    def fourier_table(self, freqs, depth=None, chunk=8):
        """``<atom_i, s_n>`` for the discrete exponentials of a depth-``depth`` grid.

        ``s_n`` is the step function with value ``exp(2 pi i n x_c)`` at each
        cell centre ``x_c``; these are orthonormal for distinct ``n`` modulo
        ``2**depth``.  ``depth`` defaults to the atoms' own depth and may be
        finer, in which case each atom cell is summed in closed form.
        """
        freqs = np.asarray(freqs, dtype=np.int64)
        depth = self.q if depth is None else depth
        if depth < self.q:
            raise ValueError(f"sampling grid depth {depth} below atom depth {self.q}")
        size = 1 << self.q
        fine = 1 << depth
        sub = 1 << (depth - self.q)
        # sum over the sub cells of one atom cell, relative to its left edge
        t = np.arange(sub)
        phase = np.exp(-2j * np.pi * np.outer(freqs, t + 0.5) / fine).sum(axis=1) / fine
        K = self.raw.shape[1]
        out = np.zeros((len(freqs), K), dtype=np.complex128)
        for start in range(0, K, chunk):
            block = self.raw[:, start : start + chunk].toarray()
            out[:, start : start + chunk] = np.fft.fft(block, axis=0)[freqs % size]
        return (phase[:, None] * out) @ self.coef


def _haar_column(kind, r, j, q):
    width = 1 << (q - r)
    rows = np.arange(j * width, (j + 1) * width)
    vals = np.full(width, 2.0 ** (r / 2))
    if kind == "wavelet":
        vals[width // 2 :] *= -1.0
    return rows, vals


def haar_atoms(labels, q):
    rows, cols, vals = [], [], []
    for c, (kind, r, j) in enumerate(labels):
        if q < r + (kind == "wavelet"):
            raise ValueError(f"depth {q} too small for Haar {kind} at level {r}")
        rr, vv = _haar_column(kind, r, j, q)
        rows.append(rr)
        vals.append(vv)
        cols.append(np.full(len(rr), c))
    n = len(labels)
    raw = sp.csc_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(1 << q, n)
    )
    return Atoms1D(q, raw, np.eye(n), labels, "haar")


def _orthonormalise(raw, E, q):
    """Order-preserving Gram-Schmidt of ``raw @ E`` in the grid inner product."""
    M = (raw.T @ raw).toarray() * 2.0 ** (-q)
    C = np.asarray(E, dtype=np.float64)
    for _ in range(2):
        G = C.T @ M @ C
        Lc = np.linalg.cholesky((G + G.T) / 2.0)
        C = scipy.linalg.solve_triangular(Lc, C.T, lower=True).T
    return C


def daubechies_atoms(p, R, q, boundary="interval"):
    if q < R + 2:
        raise ValueError(f"depth {q} too small for db{p} at level {R}")
    L = 1 << R
    g = q - R
    table = np.asarray(_scaling_averages(p, g)) * 2.0 ** (R / 2)
    span = len(table)
    size = L << g
    if boundary == "interval":
        shifts = np.arange(-(2 * p - 2), L)
    else:
        shifts = np.arange(L)
    rows, cols, vals = [], [], []
    for c, k in enumerate(shifts):
        idx = np.arange(span) + (k << g)
        if boundary == "interval":
            keep = (idx >= 0) & (idx < size)
            idx, v = idx[keep], table[keep]
        else:
            idx, v = idx % size, table
        rows.append(idx)
        vals.append(v)
        cols.append(np.full(len(idx), c))
    raw = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(size, len(shifts)),
    ).tocsc()
    raw.sum_duplicates()

    E = np.zeros((len(shifts), L))
    if boundary == "interval":
        edge = 2 * p - 1
        u = np.linspace(-1.0, 0.0, edge)
        for a in range(p):
            E[:edge, a] = u**a
            E[-edge:, L - p + a] = (u + 1.0) ** a
        for i in range(L - 2 * p):
            E[edge + i, p + i] = 1.0
    else:
        E[:, :] = np.eye(L)
    coef = _orthonormalise(raw, E, q)
    labels = [("scaling", R, j) for j in range(L)]
    return Atoms1D(q, raw, coef, labels, f"db{p}")


# -- d-dimensional bases -----------------------------------------------------


class Basis:
    """Orthonormal basis of V_R^{b,d} rendered at grid depth ``depth``.

    Basis function ``i`` is the tensor product over axes ``k`` of 1D atom
    ``index[i, k]``.
    """

    def __init__(self, spec, depth=None):
        q = spec.default_depth if depth is None else int(depth)
        if q < spec.min_depth:
            raise ValueError(f"depth {q} below minimum {spec.min_depth} for {spec.name} at R={spec.R}")
        self.spec = spec
        self.depth = q
        self.ids = enumerate_basis(spec)
        if spec.family == "db":
            self.atoms = daubechies_atoms(spec.order, spec.R, q, spec.boundary)
            lookup = {lab: i for i, lab in enumerate(self.atoms.labels)}
        else:
            labels = []
            for fid in self.ids:
                labels.extend(f for f in _factor_kinds(fid) if f not in labels)
            self.atoms = haar_atoms(labels, q)
            lookup = {lab: i for i, lab in enumerate(labels)}
        self.index = np.array(
            [[lookup[f] for f in _factor_kinds(fid)] for fid in self.ids], dtype=np.int64
        )

    @property
    def N(self):
        return len(self.ids)

    @property
    def d(self):
        return self.spec.d

    def _scatter(self, coeffs):
        coeffs = np.asarray(coeffs)
        if coeffs.shape != (self.N,):
            raise ValueError(f"expected {self.N} coefficients, got shape {coeffs.shape}")
        T = np.zeros((self.atoms.n,) * self.d, dtype=np.result_type(coeffs.dtype, np.float64))
        T[tuple(self.index.T)] = coeffs
        return T

    def synthesize(self, coeffs, q=None):
        """Render ``sum_i coeffs[i] r_i`` on the grid of depth ``q`` (default: own depth)."""
        T = self._scatter(coeffs)
        for axis in range(self.d):
            T = np.moveaxis(T, axis, 0)
            shape = T.shape
            T = self.atoms.apply(T.reshape(shape[0], -1)).reshape((-1,) + shape[1:])
            T = np.moveaxis(T, 0, axis)
        f = FineGridFunction(T)
        return f if q is None or q == self.depth else f.refine(q)

    def analyze(self, f):
        """Inner products ``<f, r_i>``; ``f`` must be at least as fine as the basis grid."""
        if f.d != self.d:
            raise ValueError(f"grid function has dimension {f.d}, basis has {self.d}")
        if f.q < self.depth:
            raise ValueError(f"grid depth {f.q} is below the basis depth {self.depth}")
        T = f.coarsen(self.depth).values
        for axis in range(self.d):
            T = np.moveaxis(T, axis, 0)
            shape = T.shape
            T = self.atoms.adjoint(T.reshape(shape[0], -1)).reshape((-1,) + shape[1:])
            T = np.moveaxis(T, 0, axis)
        return T[tuple(self.index.T)]

    def project(self, f):
        """Orthogonal projection onto the span, on ``f``'s grid."""
        return self.synthesize(self.analyze(f), q=f.q)

    def grid_matrix(self, max_entries=50_000_000):
        """Dense ``2**(d q) x N`` matrix of basis functions (flattened, C order)."""
        if (1 << (self.d * self.depth)) * self.N > max_entries:
            raise MemoryError("basis grid matrix too large; use synthesize/analyze instead")
        G = self.atoms.grid()
        cols = np.ones((1,) * self.d + (self.N,))
        for axis in range(self.d):
            shape = [1] * self.d + [self.N]
            shape[axis] = G.shape[0]
            cols = cols * G[:, self.index[:, axis]].reshape(shape)
        return cols.reshape(-1, self.N)


def build_basis(spec, depth=None):
    return Basis(spec, depth)
