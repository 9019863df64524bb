"""Walsh and Fourier sampling of grid functions.

Walsh samples of a step function of depth ``q`` are exact for sequency
``< 2**q``.  Fourier sampling uses the grid's discrete exponentials: the step
function equal to ``exp(2 pi i n x_c)`` on each cell with centre ``x_c``
(cell-midpoint quadrature).  These stay orthonormal on the grid, so sampling,
re-synthesis and re-measurement are mutually consistent to rounding.

In ``d`` dimensions the sampled indices form a box of ``m`` per axis,
``M = m**d``, flattened with the first axis running fastest.
"""

from dataclasses import dataclass, field

import numpy as np

from .grid import FineGridFunction
from .walsh import fwht_sequency


def fourier_frequencies(m):
    """First ``m`` frequencies in the order 0, 1, -1, 2, -2, ..."""
    i = np.arange(m)
    return np.where(i % 2 == 1, (i + 1) // 2, -(i // 2)).astype(np.int64)


def integer_root(M, d):
    m = int(round(M ** (1.0 / d)))
    for cand in (m - 1, m, m + 1):
        if cand >= 0 and cand**d == M:
            return cand
    raise ValueError(f"sample count {M} is not a perfect {d}-th power")


@dataclass(frozen=True)
class SamplingSpec:
    family: str = "walsh"
    d: int = 1
    M: int = 1

    def __post_init__(self):
        family = self.family.lower()
        if family not in ("walsh", "fourier"):
            raise ValueError(f"unknown sampling family {self.family!r}")
        if self.d < 1 or self.M < 1:
            raise ValueError("need d >= 1 and M >= 1")
        integer_root(self.M, self.d)
        object.__setattr__(self, "family", family)

    @property
    def m(self):
        """Samples per axis."""
        return integer_root(self.M, self.d)

    def with_m(self, m):
        return SamplingSpec(self.family, self.d, m**self.d)

    def axis_indices(self):
        """Sequencies (Walsh) or frequencies (Fourier) along one axis."""
        if self.family == "walsh":
            return np.arange(self.m, dtype=np.int64)
        return fourier_frequencies(self.m)

    def row_indices(self):
        """``M x d`` per-axis positions (0 .. m-1) of each sample, first axis fastest."""
        m = self.m
        grids = np.meshgrid(*([np.arange(m)] * self.d), indexing="ij")
        return np.stack([g.ravel(order="F") for g in grids], axis=1)


@dataclass(frozen=True)
class SampleVector:
    values: np.ndarray
    spec: SamplingSpec
    depth: int | None = field(default=None, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.spec.M,):
            raise ValueError(f"sample vector has shape {v.shape}, expected ({self.spec.M},)")
        object.__setattr__(self, "values", v)


def _check_depth(spec, q):
    if spec.m > (1 << q):
        raise ValueError(f"grid depth {q} too small for {spec.m} samples per axis")


def _box(coeffs, spec):
    """Pick the sampled box out of a full per-axis coefficient array."""
    idx = spec.axis_indices() % coeffs.shape[0]
    sub = coeffs[np.ix_(*([idx] * spec.d))]
    return sub.ravel(order="F")


def _signed(size):
    # FFT slot k holds frequency k for k <= size/2, k - size above
    k = np.arange(size)
    return np.where(k > size // 2, k - size, k)


def _fourier_forward(values, q):
    size = 1 << q
    out = np.asarray(values, dtype=np.complex128)
    freqs = _signed(size)
    phase = np.exp(-1j * np.pi * freqs / size) / size
    for axis in range(out.ndim):
        out = np.fft.fft(out, axis=axis)
        shape = [1] * out.ndim
        shape[axis] = size
        out = out * phase.reshape(shape)
    return out


def sample_signal(f, spec):
    """Samples ``l_i(f) = <f, s_i>``, ``i < M``, of a grid function."""
    if f.d != spec.d:
        raise ValueError(f"signal dimension {f.d} does not match sampling dimension {spec.d}")
    _check_depth(spec, f.q)
    if spec.family == "walsh":
        coeffs = f.values
        for axis in range(f.d):
            coeffs = fwht_sequency(coeffs, axis=axis)
        coeffs = coeffs * 2.0 ** (-f.d * f.q / 2)
    else:
        coeffs = _fourier_forward(f.values, f.q)
    return SampleVector(_box(coeffs, spec), spec, f.q)


def render_samples(b, q):
    """Grid function ``sum_i b_i s_i`` on the depth-``q`` grid."""
    spec = b.spec
    _check_depth(spec, q)
    size = 1 << q
    full = np.zeros((size,) * spec.d, dtype=np.result_type(b.values.dtype, np.float64))
    idx = spec.axis_indices() % size
    box = np.asarray(b.values).reshape((spec.m,) * spec.d, order="F")
    full[np.ix_(*([idx] * spec.d))] = box
    if spec.family == "walsh":
        out = full
        for axis in range(spec.d):
            out = fwht_sequency(out, axis=axis)
        return FineGridFunction(out * 2.0 ** (spec.d * q / 2))
    out = full.astype(np.complex128)
    freqs = _signed(size)
    phase = np.exp(1j * np.pi * freqs / size)
    for axis in range(spec.d):
        shape = [1] * spec.d
        shape[axis] = size
        out = np.fft.ifft(out * phase.reshape(shape), axis=axis) * size
    return FineGridFunction(out)


def fourier_closed_form_half_indicator(n):
    """``<chi_[0,1/2), e^{2 pi i n x}>`` exactly: 1/2 at 0, (1 - e^{-i pi n}) / (2 pi i n) else."""
    n = np.asarray(n, dtype=np.float64)
    safe = np.where(n == 0, 1.0, n)
    val = (1.0 - np.exp(-1j * np.pi * safe)) / (2j * np.pi * safe)
    return np.where(n == 0, 0.5, val)
