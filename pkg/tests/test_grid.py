import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stablesampling.grid import FineGridFunction, cell_centres, pool


def test_rejects_non_power_of_two():
    with pytest.raises(ValueError):
        FineGridFunction(np.zeros(6))
    with pytest.raises(ValueError):
        FineGridFunction(np.zeros((4, 8)))


def test_shape_properties():
    f = FineGridFunction(np.zeros((8, 8)))
    assert (f.d, f.q, f.cell_volume) == (2, 3, 1 / 64)


@given(st.integers(0, 6), st.integers(0, 4), st.integers(0, 2**32 - 1))
def test_refine_preserves_inner_products(q, extra, seed):
    rng = np.random.default_rng(seed)
    f = FineGridFunction(rng.standard_normal(1 << q))
    g = FineGridFunction(rng.standard_normal(1 << q))
    assert np.isclose(f.refine(q + extra).inner(g.refine(q + extra)), f.inner(g))
    np.testing.assert_allclose(f.refine(q + extra).coarsen(q).values, f.values)


@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_coarsen_is_projection(q, seed):
    rng = np.random.default_rng(seed)
    f = FineGridFunction(rng.standard_normal((1 << q, 1 << q)))
    p = f.coarsen(q - 1).refine(q)
    # residual orthogonal to every coarse step function
    g = FineGridFunction(rng.standard_normal((1 << (q - 1),) * 2)).refine(q)
    assert abs((f - p).inner(g)) < 1e-12


def test_pool_and_centres():
    np.testing.assert_allclose(pool(np.arange(8.0), 2), [1.5, 5.5])
    np.testing.assert_allclose(cell_centres(2), [0.125, 0.375, 0.625, 0.875])
