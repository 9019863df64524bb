"""Piecewise-constant functions on the dyadic grid of [0,1]^d."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FineGridFunction:
    """Cell averages on the uniform dyadic grid of mesh ``2**-q``.

    ``values`` has shape ``(2**q,) * d``; axis ``k`` is coordinate ``x_k``.
    Interpreted as the step function equal to ``values`` on each cell, so the
    discrete inner product below is the exact L2 inner product.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim == 0:
            raise ValueError("grid function needs at least one axis")
        side = v.shape[0]
        if any(s != side for s in v.shape) or side & (side - 1):
            raise ValueError(f"grid shape {v.shape} is not a power-of-two cube")
        object.__setattr__(self, "values", v)

    @property
    def d(self):
        return self.values.ndim

    @property
    def q(self):
        return self.values.shape[0].bit_length() - 1

    @property
    def cell_volume(self):
        return 2.0 ** (-self.d * self.q)

    def inner(self, other):
        if other.values.shape != self.values.shape:
            raise ValueError("grid functions live on different grids")
        return np.vdot(other.values, self.values) * self.cell_volume

    def norm(self):
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.cell_volume))

    def __sub__(self, other):
        return FineGridFunction(self.values - other.values)

    def __add__(self, other):
        return FineGridFunction(self.values + other.values)

    def refine(self, q):
        """Same step function written on the finer grid of depth ``q``."""
        if q < self.q:
            raise ValueError(f"cannot refine depth {self.q} grid to depth {q}")
        v = self.values
        for axis in range(self.d):
            v = np.repeat(v, 1 << (q - self.q), axis=axis)
        return FineGridFunction(v)

    def coarsen(self, q):
        """Cell averages on the coarser grid of depth ``q`` (orthogonal projection)."""
        if q > self.q:
            raise ValueError(f"cannot coarsen depth {self.q} grid to depth {q}")
        return FineGridFunction(pool(self.values, self.q - q))


def pool(values, levels, axes=None):
    """Average blocks of ``2**levels`` cells along ``axes`` (default: all)."""
    v = np.asarray(values)
    if levels == 0:
        return v
    axes = range(v.ndim) if axes is None else axes
    for axis in axes:
        shape = v.shape
        n = shape[axis] >> levels
        v = v.reshape(shape[:axis] + (n, 1 << levels) + shape[axis + 1 :]).mean(axis=axis + 1)
    return v


def cell_centres(q):
    return (np.arange(1 << q) + 0.5) * 2.0 ** (-q)
