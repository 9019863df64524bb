"""Cross-Gramians U with u_ij = <r_j, s_i>, subspace angles and the stable sampling rate."""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .sampling import SamplingSpec
from .walsh import _bitrev
from .wavelets import Basis, BasisSpec

DENSE_SVD_LIMIT = 4096


# -- closed-form Haar/Walsh inner products -------------------------------------


def _haar_walsh_1d(kind, R, j, n):
    """Vectorised over ``n``: <phi_{R,j} or psi_{R,j}, Wal(n, .)>."""
    n = np.asarray(n, dtype=np.int64)
    if not 0 <= j < (1 << R):
        raise ValueError(f"translation {j} out of range for level {R}")
    if kind == "scaling":
        band = n < (1 << R)
    elif kind == "wavelet":
        band = ((1 << R) <= n) & (n < (1 << (R + 1)))
    else:
        raise ValueError(f"unknown 1D kind {kind!r}")
    out = np.zeros(n.shape)
    if np.any(band):
        # Wal(n, .) is constant on [j 2^-R, (j+1) 2^-R) (scaling band) or on its two
        # halves with opposite signs (wavelet band); the sign at x = j 2^-R decides.
        # With x's bits reversed into the low end this is a parity of gray(n).
        g = n[band] ^ (n[band] >> 1)
        parity = np.bitwise_count(g & _bitrev(j, R)) & 1
        out[band] = 2.0 ** (-R / 2) * (1.0 - 2.0 * parity)
    return out


def haar_walsh_entry(kind, R, j, n):
    """Exact <r, Wal(n, .)> for a Haar function ``r`` at level ``R``, translation ``j``.

    ``kind`` is ``"scaling"`` or ``"wavelet"`` in 1D (``j``, ``n`` integers), or
    one of 1, 2, 3 for the 2D wavelets ``phi x psi``, ``psi x phi``,
    ``psi x psi`` (``j``, ``n`` pairs).  Magnitudes follow the case tables:
    ``2**(-R/2)`` inside the band per factor, zero outside.
    """
    if kind in ("scaling", "wavelet"):
        if np.ndim(j) == 0:
            return float(_haar_walsh_1d(kind, R, int(j), n))
        kinds = [kind] * len(j)
    elif kind in (1, 2, 3):
        kinds = {1: ("scaling", "wavelet"), 2: ("wavelet", "scaling"), 3: ("wavelet", "wavelet")}[kind]
    else:
        raise ValueError(f"unknown Haar kind {kind!r}")
    if len(j) != len(n) or len(j) != len(kinds):
        raise ValueError("translation and sequency dimensions differ")
    value = 1.0
    for k, jk, nk in zip(kinds, j, n):
        value *= float(_haar_walsh_1d(k, R, int(jk), nk))
    return value


def haar_walsh_band(kind, R, n):
    """True where the case table allows a nonzero entry (1D kinds)."""
    n = np.asarray(n)
    if kind == "scaling":
        return n < (1 << R)
    return ((1 << R) <= n) & (n < (1 << (R + 1)))


# -- assembly ----------------------------------------------------------------


@dataclass(frozen=True)
class CrossGramian:
    """``M x N`` matrix of <r_j, s_i>.

    For tensor bases in scaling order sampled on a box, ``factors`` holds the
    per-axis matrices and the full matrix is their Kronecker product (last
    axis outermost); ``matrix`` is then built only on request.
    """

    sampling: SamplingSpec
    recon: BasisSpec
    provenance: str
    depth: int | None = None
    dense: np.ndarray | None = field(default=None, repr=False)
    factors: tuple | None = field(default=None, repr=False)

    @property
    def M(self):
        return self.sampling.M

    @property
    def N(self):
        return self.recon.N

    @property
    def matrix(self):
        if self.dense is not None:
            return self.dense
        out = np.ones((1, 1))
        for F in reversed(self.factors):
            out = np.kron(out, F)
        return out


def one_axis_table(basis, family, m, depth=None, method="auto"):
    """``m x n_atoms`` table of <atom, s_i> along one axis, plus its provenance."""
    atoms = basis.atoms
    if family == "walsh":
        if method in ("auto", "analytic") and atoms.family == "haar":
            n = np.arange(m)
            cols = [_haar_walsh_1d(kind, r, j, n) for kind, r, j in atoms.labels]
            return np.stack(cols, axis=1), "analytic"
        if method == "analytic":
            raise ValueError("closed forms exist only for Haar/Walsh")
        return atoms.walsh_table(m), "quadrature"
    if method == "analytic":
        raise ValueError("closed forms exist only for Haar/Walsh")
    from .sampling import fourier_frequencies

    return atoms.fourier_table(fourier_frequencies(m), depth=depth), "quadrature"


def _combine(table, rows, index):
    U = None
    for axis in range(index.shape[1]):
        part = table[rows[:, axis]][:, index[:, axis]]
        U = part if U is None else U * part
    return U


def assemble_gramian(sampling, recon, depth=None, method="auto", separable=None):
    """Cross-Gramian between ``sampling`` and the basis ``recon``.

    ``recon`` is a :class:`Basis` or a :class:`BasisSpec` (built at its
    default depth).  Haar/Walsh entries come from closed forms unless
    ``method="quadrature"``.  For Fourier sampling, ``depth`` is the grid of
    the sampling exponentials (default: the basis grid) and must match the
    depth of the signals being sampled.
    """
    basis = recon if isinstance(recon, Basis) else Basis(recon)
    spec = basis.spec
    if sampling.d != spec.d:
        raise ValueError(f"sampling dimension {sampling.d} differs from basis dimension {spec.d}")
    if sampling.family == "fourier":
        depth = basis.depth if depth is None else depth
        if sampling.m > (1 << depth):
            raise ValueError(f"{sampling.m} frequencies per axis exceed grid depth {depth}")
    else:
        depth = None
    table, provenance = one_axis_table(basis, sampling.family, sampling.m, depth, method)
    if separable is None:
        separable = spec.d > 1 and spec.ordering == "scaling"
    if separable:
        if spec.ordering != "scaling":
            raise ValueError("separable form needs a tensor basis in scaling order")
        return CrossGramian(sampling, spec, provenance, depth, factors=(table,) * spec.d)
    U = _combine(table, sampling.row_indices(), basis.index)
    return CrossGramian(sampling, spec, provenance, depth, dense=U)


# -- angles ------------------------------------------------------------------


@dataclass(frozen=True)
class AngleReport:
    sigma_min: float
    sigma_max: float

    @property
    def mu(self):
        return math.inf if self.sigma_min <= 0.0 else 1.0 / self.sigma_min

    @property
    def kappa(self):
        return math.inf if self.sigma_min <= 0.0 else self.sigma_max / self.sigma_min


def _extreme_singular_values(A):
    A = np.asarray(A)
    if A.size == 0:
        raise ValueError("empty matrix")
    if min(A.shape) > DENSE_SVD_LIMIT:
        raise ValueError(f"matrix {A.shape} exceeds the dense SVD limit")
    s = scipy.linalg.svdvals(A)
    smin = 0.0 if A.shape[0] < A.shape[1] else float(s[-1])
    return smin, float(s[0])


def mu_of(g):
    """Extreme singular values of U; ``mu = 1/sigma_min`` is ``1/cos`` of the subspace angle.

    Accepts a :class:`CrossGramian` or a bare matrix.  ``M < N`` gives
    ``sigma_min = 0`` and ``mu = inf``.
    """
    if isinstance(g, CrossGramian) and g.dense is None:
        smin, smax = 1.0, 1.0
        for F in g.factors:
            a, b = _extreme_singular_values(F)
            smin, smax = smin * a, smax * b
        return AngleReport(smin, smax)
    A = g.matrix if isinstance(g, CrossGramian) else g
    return AngleReport(*_extreme_singular_values(A))


# -- stable sampling rate ----------------------------------------------------


@dataclass(frozen=True)
class SSRResult:
    N: int
    theta: float
    Theta: int | None  # None: not reached within the sweep
    mu: float  # mu at Theta, or at the largest M tried


class _Sweep:
    """mu(R_N, S_M) for every admissible M up to ``M_max`` from one table."""

    def __init__(self, family, recon, M_max, depth=None, method="auto"):
        self.basis = recon if isinstance(recon, Basis) else Basis(recon)
        self.spec = self.basis.spec
        self.family = family
        d = self.spec.d
        self.m_max = int(math.floor(M_max ** (1.0 / d) + 1e-9))
        if self.m_max**d > M_max:
            self.m_max -= 1
        if family == "fourier":
            depth = self.basis.depth if depth is None else depth
            self.m_max = min(self.m_max, 1 << depth)
        self.table, self.provenance = one_axis_table(self.basis, family, self.m_max, depth, method)
        self.m_min = 1 << self.spec.R
        self._cache = {}

    def mu(self, m):
        if m not in self._cache:
            if m < self.m_min:
                self._cache[m] = math.inf
            else:
                rows = SamplingSpec(self.family, self.spec.d, m**self.spec.d).row_indices()
                U = _combine(self.table[:m], rows, self.basis.index)
                self._cache[m] = mu_of(U).mu
        return self._cache[m]


def ssr(theta, family, recon, M_max, depth=None, method="auto"):
    """Smallest admissible ``M <= M_max`` with ``mu(R_N, S_M) < theta``.

    Admissible sizes are all integers in 1D and ``m**d`` in ``d`` dimensions.
    The sweep starts at ``M = N`` (below that ``mu`` is infinite) and uses
    bisection, which is exact because ``mu`` is non-increasing in ``M``.
    ``Theta`` is ``None`` when the threshold is not reached.
    """
    if not theta > 1.0:
        raise ValueError("theta must exceed 1")
    sweep = _Sweep(family, recon, M_max, depth, method)
    d = sweep.spec.d
    lo, hi = sweep.m_min, sweep.m_max
    if hi < lo or not sweep.mu(hi) < theta:
        return SSRResult(sweep.spec.N, theta, None, sweep.mu(hi) if hi >= lo else math.inf)
    while lo < hi:
        mid = (lo + hi) // 2
        if sweep.mu(mid) < theta:
            hi = mid
        else:
            lo = mid + 1
    return SSRResult(sweep.spec.N, theta, lo**d, sweep.mu(lo))


def mu_sweep(family, recon, M_max, depth=None, method="auto"):
    """``[(M, mu)]`` for every admissible ``M`` from ``N`` to ``M_max``."""
    sweep = _Sweep(family, recon, M_max, depth, method)
    d = sweep.spec.d
    return [(m**d, sweep.mu(m)) for m in range(sweep.m_min, sweep.m_max + 1)]


# -- export ------------------------------------------------------------------


def gramian_rows(g):
    """``(row, col, real, imag)`` for every entry, row-major."""
    U = g.matrix
    r, c = np.indices(U.shape)
    return zip(r.ravel(), c.ravel(), np.real(U).ravel(), np.imag(U).ravel())


def magnitude_image(g):
    """Entry magnitudes scaled to 0..255 (uint8), rows = samples."""
    A = np.abs(g.matrix)
    peak = A.max()
    if peak == 0:
        return np.zeros(A.shape, dtype=np.uint8)
    return np.rint(A / peak * 255.0).astype(np.uint8)
