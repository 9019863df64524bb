"""Built-in test signals, PGM rasters and truncation-error experiments.

All analytic signals are rendered as exact (or Gauss-Legendre, for the
smooth one) cell averages, so a rendering at depth ``q`` is the orthogonal
projection of the signal onto depth-``q`` step functions.

Signal formulas (versioned; change ``SIGNAL_VERSION`` if any is edited):

* ``haar_wavelet``: ``1`` on ``[0, 1/2)``, ``-1`` on ``[1/2, 1)``.
* ``dyadic_step``: seeded N(0,1) values on the ``2**level`` cells.
* ``jumps``: ``1 + x - x**2`` on ``[0, 0.3)``, ``0.2 + 2 x**2`` on
  ``[0.3, 0.71)``, ``-0.5 + x**3`` on ``[0.71, 1)``.
* ``smooth``: ``exp(x) sin(5 x + 0.3)``.
* ``sobolev``: ``|x - 0.37|**1.5``, in ``H^s`` for every ``s < 2``.
* ``bump2d``: ``exp(-|x - c|^2 / (2 * 0.15**2))``, ``c = (0.5, 0.5)``, plus
  ``0.5`` on the rectangle ``[0.3, 0.55) x [0.6, 0.8)``.
"""

import math
import os
from dataclasses import dataclass, field

import numpy as np
import scipy.special
from numpy.polynomial import Polynomial

from .grid import FineGridFunction, pool
from .walsh import fwht_sequency

SIGNAL_VERSION = 1
MAX_DEPTH = {1: 14, 2: 10}
KINDS = ("haar_wavelet", "dyadic_step", "jumps", "smooth", "sobolev", "bump2d", "raster")

JUMP_POINTS = (0.3, 0.71)
JUMP_PIECES = (Polynomial([1.0, 1.0, -1.0]), Polynomial([0.2, 0.0, 2.0]), Polynomial([-0.5, 0.0, 0.0, 1.0]))
SOBOLEV_CENTRE = 0.37
BUMP_CENTRE = (0.5, 0.5)
BUMP_WIDTH = 0.15
INSET = ((0.3, 0.55), (0.6, 0.8))
INSET_HEIGHT = 0.5


def _edges(q):
    return np.arange((1 << q) + 1) * 2.0 ** (-q)


def _average_from_antiderivative(F, q):
    e = _edges(q)
    return np.diff(F(e)) * (1 << q)


def _jumps_antiderivative(x):
    x = np.asarray(x, dtype=np.float64)
    bounds = (0.0,) + JUMP_POINTS + (1.0,)
    out = np.zeros_like(x)
    for lo, hi, p in zip(bounds[:-1], bounds[1:], JUMP_PIECES):
        P = p.integ()
        out += P(np.clip(x, lo, hi)) - P(lo)
    return out


def _sobolev_antiderivative(x):
    t = np.asarray(x, dtype=np.float64) - SOBOLEV_CENTRE
    return np.sign(t) * np.abs(t) ** 2.5 / 2.5


def _smooth(x):
    return np.exp(x) * np.sin(5.0 * x + 0.3)


def _gauss_legendre_averages(func, q, order=8):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    h = 2.0 ** (-q)
    centres = (np.arange(1 << q) + 0.5) * h
    x = centres[:, None] + 0.5 * h * nodes[None, :]
    return (func(x) * weights).sum(axis=1) / 2.0


def _gaussian_averages(q, centre):
    e = _edges(q)
    s = BUMP_WIDTH * math.sqrt(2.0)
    cdf = 0.5 * scipy.special.erf((e - centre) / s)
    # average of exp(-(x-c)^2 / (2 w^2)) over each cell
    return np.diff(cdf) * (1 << q) * BUMP_WIDTH * math.sqrt(2.0 * math.pi)


def _interval_overlap(q, lo, hi):
    e = _edges(q)
    return np.clip(np.minimum(e[1:], hi) - np.maximum(e[:-1], lo), 0.0, None) * (1 << q)


@dataclass(frozen=True)
class TestSignal:
    """A reproducible signal on [0,1]^d; see the module docstring for formulas."""

    __test__ = False  # not a pytest class

    kind: str
    d: int = 1
    seed: int = 0
    level: int = 4
    image: np.ndarray | None = field(default=None, repr=False, compare=False)
    source: "Raster | None" = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown signal kind {self.kind!r}")
        need = {"bump2d": 2, "raster": 2}.get(self.kind, 1)
        if self.d != need:
            raise ValueError(f"signal {self.kind!r} is {need}-dimensional")
        if self.kind == "raster" and self.image is None:
            raise ValueError("raster signal needs an image")

    def render(self, q):
        """Cell averages on the depth-``q`` grid."""
        if not 0 <= q <= MAX_DEPTH[self.d]:
            raise ValueError(f"depth {q} outside 0..{MAX_DEPTH[self.d]} for d={self.d}")
        kind = self.kind
        if kind == "haar_wavelet":
            v = 2.0 * _interval_overlap(q, 0.0, 0.5) - 1.0
        elif kind == "dyadic_step":
            steps = np.random.default_rng(self.seed).standard_normal(1 << self.level)
            v = _resample(steps, q)
        elif kind == "jumps":
            v = _average_from_antiderivative(_jumps_antiderivative, q)
        elif kind == "smooth":
            v = _gauss_legendre_averages(_smooth, q)
        elif kind == "sobolev":
            v = _average_from_antiderivative(_sobolev_antiderivative, q)
        elif kind == "bump2d":
            v = np.outer(_gaussian_averages(q, BUMP_CENTRE[0]), _gaussian_averages(q, BUMP_CENTRE[1]))
            v += INSET_HEIGHT * np.outer(_interval_overlap(q, *INSET[0]), _interval_overlap(q, *INSET[1]))
        else:
            v = _resample(self.image, q)
        return FineGridFunction(v)


def _resample(values, q):
    """Step function given on its own dyadic grid, re-expressed at depth ``q``."""
    v = np.asarray(values, dtype=np.float64)
    own = v.shape[0].bit_length() - 1
    if q <= own:
        return pool(v, own - q)
    for axis in range(v.ndim):
        v = np.repeat(v, 1 << (q - own), axis=axis)
    return v


# -- truncation error ----------------------------------------------------------


@dataclass(frozen=True)
class DecayReport:
    N: tuple
    epsilon: tuple  # tail sums ||f||^2 - sum_{i<N} |<f, r_i>|^2
    direct: tuple  # ||f - f_N||^2 computed on the grid
    slope: float
    fit_residual: float

    def rows(self):
        return list(zip(self.N, self.epsilon))


def _fit_slope(N, eps, points=4):
    N = np.asarray(N, dtype=np.float64)
    eps = np.asarray(eps, dtype=np.float64)
    dyadic = [i for i, n in enumerate(N) if n >= 1 and 2 ** round(math.log2(n)) == n]
    use = [i for i in dyadic if eps[i] > 0][-points:]
    if len(use) < 2:
        return math.nan, math.nan
    x, y = np.log(N[use]), np.log(eps[use])
    coef, res, *_ = np.polyfit(x, y, 1, full=True)
    return float(coef[0]), float(math.sqrt(res[0] / len(use))) if len(res) else 0.0


def _walsh_truncation(f, N_list):
    coeffs = f.values
    for axis in range(f.d):
        coeffs = fwht_sequency(coeffs, axis=axis)
    coeffs = coeffs * 2.0 ** (-f.d * f.q / 2)
    total = f.norm() ** 2
    eps, direct = [], []
    for N in N_list:
        m = round(N ** (1.0 / f.d))
        if m**f.d != N:
            raise ValueError(f"N={N} is not a {f.d}-th power")
        if m > (1 << f.q):
            raise ValueError(f"depth {f.q} too small for N={N}")
        head = coeffs[(slice(0, m),) * f.d]
        eps.append(max(total - float(np.sum(np.abs(head) ** 2)), 0.0))
        kept = np.zeros_like(coeffs)
        kept[(slice(0, m),) * f.d] = head
        fN = kept * 2.0 ** (f.d * f.q / 2)
        for axis in range(f.d):
            fN = fwht_sequency(fN, axis=axis)
        direct.append((f - FineGridFunction(fN)).norm() ** 2)
    return eps, direct


def _wavelet_truncation(f, template, N_list, depth):
    from .wavelets import Basis, BasisSpec

    total = f.norm() ** 2
    eps, direct = [], []
    for N in N_list:
        R = round(math.log2(N) / f.d)
        if 1 << (f.d * R) != N:
            raise ValueError(f"N={N} is not 2**(d R)")
        spec = BasisSpec(template.family, template.order, f.d, R, template.boundary)
        basis = Basis(spec, depth)
        if f.q < basis.depth:
            raise ValueError(f"signal depth {f.q} below basis depth {basis.depth} for N={N}")
        alpha = basis.analyze(f)
        eps.append(max(total - float(np.sum(np.abs(alpha) ** 2)), 0.0))
        direct.append((f - basis.synthesize(alpha, q=f.q)).norm() ** 2)
    return eps, direct


def truncation_error(f, basis, N_list, depth=None):
    """``eps(N, f) = ||f - f_N||^2`` for the first ``N`` functions of ``basis``.

    ``f`` is a :class:`TestSignal` or a grid function; ``basis`` is
    ``"walsh"`` or a :class:`~stablesampling.wavelets.BasisSpec` whose level
    is replaced by ``log2(N) / d``.  ``depth`` is the grid depth (signal and
    basis); by default the largest basis's guard depth, capped by the signal
    limits.  The slope is fitted over the largest four dyadic ``N``.
    """
    N_list = [int(n) for n in N_list]
    if N_list != sorted(N_list) or not N_list:
        raise ValueError("N_list must be non-empty and ascending")
    if isinstance(f, TestSignal):
        if depth is None:
            if basis == "walsh":
                depth = MAX_DEPTH[f.d]
            else:
                R = round(math.log2(N_list[-1]) / f.d)
                from .wavelets import BasisSpec

                spec = BasisSpec(basis.family, basis.order, f.d, R, basis.boundary)
                depth = min(spec.default_depth, MAX_DEPTH[f.d])
        f = f.render(depth)
    if basis == "walsh":
        eps, direct = _walsh_truncation(f, N_list)
    else:
        eps, direct = _wavelet_truncation(f, basis, N_list, depth if depth is not None else f.q)
    slope, resid = _fit_slope(N_list, eps)
    return DecayReport(tuple(N_list), tuple(eps), tuple(direct), slope, resid)


# -- PGM rasters ---------------------------------------------------------------


class RasterFormatError(ValueError):
    pass


def _pgm_tokens(data):
    """Header tokens and the offset just past the single whitespace after maxval."""
    tokens, pos = [], 0
    while len(tokens) < 4:
        while pos < len(data) and chr(data[pos]).isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not chr(data[pos]).isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise RasterFormatError("truncated PGM header")
        tokens.append(data[start:pos].decode("ascii", "replace"))
    return tokens, pos + 1


@dataclass(frozen=True)
class Raster:
    """Integer PGM pixels with the metadata needed to write them back unchanged."""

    pixels: np.ndarray  # (rows, cols), unpadded
    maxval: int
    magic: str = "P5"


def read_pgm(path):
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        tokens, offset = _pgm_tokens(data)
    except IndexError as exc:
        raise RasterFormatError("malformed PGM header") from exc
    magic = tokens[0]
    if magic not in ("P2", "P5"):
        raise RasterFormatError(f"not a grayscale PGM (magic {magic!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise RasterFormatError("non-integer PGM header field") from exc
    if width <= 0 or height <= 0:
        raise RasterFormatError(f"bad image size {width}x{height}")
    if not 0 < maxval < 65536:
        raise RasterFormatError(f"unsupported bit depth (maxval {maxval})")
    count = width * height
    if magic == "P5":
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        body = data[offset : offset + count * dtype.itemsize]
        if len(body) != count * dtype.itemsize:
            raise RasterFormatError("truncated PGM pixel data")
        pixels = np.frombuffer(body, dtype=dtype).astype(np.int64)
    else:
        try:
            pixels = np.array(data[offset - 1 :].split(), dtype=np.int64)
        except ValueError as exc:
            raise RasterFormatError("non-integer P2 pixel") from exc
        if pixels.size != count:
            raise RasterFormatError(f"expected {count} P2 pixels, found {pixels.size}")
    if pixels.max(initial=0) > maxval:
        raise RasterFormatError("pixel value exceeds maxval")
    return Raster(pixels.reshape(height, width), maxval, magic)


def pgm_bytes(pixels, maxval=255, magic="P5"):
    pixels = np.asarray(pixels)
    height, width = pixels.shape
    head = f"{magic}\n{width} {height}\n{maxval}\n".encode("ascii")
    if magic == "P2":
        lines = "\n".join(" ".join(str(int(v)) for v in row) for row in pixels)
        return head + lines.encode("ascii") + b"\n"
    dtype = ">u2" if maxval > 255 else "u1"
    return head + np.ascontiguousarray(pixels, dtype=dtype).tobytes()


def load_raster(path):
    """2D :class:`TestSignal` from a PGM: values ``pixel / maxval``, zero-padded to ``2**k``.

    Axis 0 is the image row.  The original size and bit depth are kept so
    :func:`save_raster` can write the file back unchanged.
    """
    raster = read_pgm(path)
    h, w = raster.pixels.shape
    side = 1 << max(h - 1, w - 1, 0).bit_length()
    img = np.zeros((side, side))
    img[:h, :w] = raster.pixels / raster.maxval
    if side.bit_length() - 1 > MAX_DEPTH[2]:
        raise RasterFormatError(f"image {h}x{w} exceeds the 2D depth limit")
    return TestSignal("raster", d=2, image=img, source=raster)


def save_raster(path, signal, maxval=None, magic=None):
    """Write a raster signal (or a 2D array of values in [0, 1]) as PGM.

    Rasters from :func:`load_raster` are cropped to their original size and
    keep their bit depth; other inputs are written at full size.
    """
    from .output import atomic_write_bytes

    source = signal.source if isinstance(signal, TestSignal) else None
    values = signal.image if isinstance(signal, TestSignal) else np.asarray(signal, dtype=np.float64)
    if source is not None:
        h, w = source.pixels.shape
        values = values[:h, :w]
        maxval = source.maxval if maxval is None else maxval
        magic = source.magic if magic is None else magic
    maxval = 255 if maxval is None else maxval
    magic = "P5" if magic is None else magic
    pixels = np.clip(np.rint(np.real(values) * maxval), 0, maxval).astype(np.int64)
    atomic_write_bytes(os.fspath(path), pgm_bytes(pixels, maxval, magic))
