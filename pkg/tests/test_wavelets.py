import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stablesampling.grid import FineGridFunction
from stablesampling.wavelets import (
    Basis,
    BasisSpec,
    daubechies_filter,
    enumerate_basis,
    scaling_samples,
)


def test_haar_scaling_samples():
    np.testing.assert_array_equal(scaling_samples("haar", 6), np.ones(64))


def test_db2_filter_closed_form():
    s3 = np.sqrt(3.0)
    ref = np.array([1 + s3, 3 + s3, 3 - s3, 1 - s3]) / (4 * np.sqrt(2.0))
    np.testing.assert_allclose(daubechies_filter(2), ref, atol=1e-14)


@pytest.mark.parametrize("p", range(2, 13))
def test_filter_conditions(p):
    h = daubechies_filter(p)
    assert np.isclose(h.sum(), np.sqrt(2.0))
    for shift in range(p):
        assert np.isclose(np.dot(h[2 * shift :], h[: len(h) - 2 * shift]), float(shift == 0), atol=1e-10)
    k = np.arange(len(h))
    g = (-1.0) ** k * h[::-1]
    for a in range(p):
        assert abs(np.sum(g * k**a)) < 1e-8 * 10**a


@pytest.mark.parametrize("q", [4, 8])
def test_db2_partition_of_unity(q):
    v = scaling_samples("db2", q, kind="point")
    step = 1 << q
    total = np.zeros(step)
    for shift in range(3):
        total += v[shift * step : (shift + 1) * step]
    np.testing.assert_allclose(total, 1.0, atol=1e-10)


def test_db2_integer_values():
    v = scaling_samples("db2", 0, kind="point")
    s3 = np.sqrt(3.0)
    np.testing.assert_allclose(v, [0.0, (1 + s3) / 2, (1 - s3) / 2, 0.0], atol=1e-12)


@pytest.mark.parametrize("name", ["db2", "db4", "db8"])
def test_scaling_integral(name):
    q = 10
    assert abs(scaling_samples(name, q).sum() * 2.0**-q - 1.0) < 1e-8


def test_unsupported_order():
    with pytest.raises(ValueError):
        scaling_samples("db13", 4)
    with pytest.raises(ValueError):
        BasisSpec.from_name("db40", R=8)


def test_enumeration_sizes():
    assert len(enumerate_basis(BasisSpec("haar", R=3))) == 8
    assert len(enumerate_basis(BasisSpec("haar", d=2, R=2))) == 16


def test_enumeration_2d_order():
    ids = enumerate_basis(BasisSpec("haar", d=2, R=2))
    assert ids[0].kind == "scaling"
    # level-0 block: the three level-0 wavelets follow the scaling function
    assert [(i.level, i.j, i.kind) for i in ids[1:4]] == [(0, (0, 0), 1), (0, (0, 0), 2), (0, (0, 0), 3)]
    level1 = ids[4:]
    assert (level1[0].j, level1[0].kind) == ((0, 0), 1)
    assert [i.j for i in level1[:4]] == [(0, 0), (1, 0), (0, 1), (1, 1)]
    assert [i.kind for i in level1] == [1] * 4 + [2] * 4 + [3] * 4


@pytest.mark.parametrize(
    "spec",
    [
        BasisSpec("haar", R=4),
        BasisSpec("haar", R=3, ordering="wavelet"),
        BasisSpec("haar", d=2, R=2),
        BasisSpec("haar", d=3, R=1),
        BasisSpec.from_name("db2", R=3),
        BasisSpec.from_name("db4", R=4),
        BasisSpec.from_name("db2", R=3, boundary="periodic"),
        BasisSpec.from_name("db2", d=2, R=2),
    ],
    ids=lambda s: f"{s.name}-d{s.d}-R{s.R}-{s.boundary}-{s.ordering}",
)
def test_orthonormal_on_grid(spec):
    B = Basis(spec, spec.min_depth + 3)
    G = B.grid_matrix()
    gram = G.T @ G * 2.0 ** (-spec.d * B.depth)
    np.testing.assert_allclose(np.linalg.eigvalsh(gram), 1.0, atol=1e-8)


def test_haar_values():
    for spec in (BasisSpec("haar", R=4, ordering="wavelet"), BasisSpec("haar", d=2, R=2)):
        B = Basis(spec)
        G = B.grid_matrix()
        for col, fid in enumerate(B.ids):
            level = fid.level if spec.ordering == "wavelet" else spec.R
            top = 2.0 ** (spec.d * level / 2)
            mags = np.abs(G[:, col])
            # exact in 1D; products of two sqrt(2) factors round in 2D
            assert np.all((mags == 0) | (np.abs(mags - top) <= 4e-16 * top))


def test_zero_coefficients():
    B = Basis(BasisSpec.from_name("db2", R=3), 8)
    assert not np.any(B.synthesize(np.zeros(8)).values)


def test_coefficient_length_checked():
    with pytest.raises(ValueError):
        Basis(BasisSpec("haar", R=2)).synthesize(np.zeros(3))


def test_depth_checked():
    B = Basis(BasisSpec.from_name("db2", R=3), 8)
    with pytest.raises(ValueError):
        B.analyze(FineGridFunction(np.zeros(1 << 6)))
    with pytest.raises(ValueError):
        Basis(BasisSpec.from_name("db2", R=3), 4)


@given(st.integers(0, 2**32 - 1), st.integers(0, 3))
def test_haar_reproduces_step_functions(seed, extra):
    R = 4
    f = FineGridFunction(np.random.default_rng(seed).standard_normal(1 << R)).refine(R + extra)
    B = Basis(BasisSpec("haar", R=R), R + extra)
    np.testing.assert_allclose(B.synthesize(B.analyze(f)).values, f.values, atol=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_db2_round_trip(seed):
    B = Basis(BasisSpec.from_name("db2", R=3), 9)
    c = np.random.default_rng(seed).standard_normal(B.N)
    np.testing.assert_allclose(B.analyze(B.synthesize(c)), c, atol=1e-10)


def test_unit_vectors_from_basis_functions():
    B = Basis(BasisSpec.from_name("db4", R=4), 10)
    for k in (0, 5, 15):
        e = np.zeros(B.N)
        e[k] = 1.0
        np.testing.assert_allclose(B.analyze(B.synthesize(e)), e, atol=1e-10)


@given(st.integers(0, 2**32 - 1))
def test_bessel_and_parseval(seed):
    rng = np.random.default_rng(seed)
    B = Basis(BasisSpec.from_name("db2", R=3), 8)
    f = FineGridFunction(rng.standard_normal(1 << 8))
    assert np.linalg.norm(B.analyze(f)) <= f.norm() + 1e-12
    g = B.synthesize(rng.standard_normal(B.N))
    assert np.isclose(np.linalg.norm(B.analyze(g)), g.norm())


def test_haar_half_indicator_coefficients():
    # <chi_[0,1/2), phi_{2,j}> = 2 * 1/4 for j < 2, 0 otherwise
    f = FineGridFunction(np.r_[np.ones(4), np.zeros(4)])
    np.testing.assert_allclose(Basis(BasisSpec("haar", R=2)).analyze(f), [0.5, 0.5, 0, 0], atol=1e-15)
    # wavelet view: phi_00 -> 1/2, psi_00 -> 1/2, level-1 wavelets -> 0
    fw = Basis(BasisSpec("haar", R=2, ordering="wavelet")).analyze(f)
    np.testing.assert_allclose(fw, [0.5, 0.5, 0, 0], atol=1e-15)


def test_multiresolution_consistency():
    rng = np.random.default_rng(0)
    scal = Basis(BasisSpec("haar", R=4), 7)
    wav = Basis(BasisSpec("haar", R=4, ordering="wavelet"), 7)
    for _ in range(100):
        f = FineGridFunction(rng.standard_normal(1 << 7))
        np.testing.assert_allclose(scal.project(f).values, wav.project(f).values, atol=1e-10)


def test_interval_space_is_nested_and_reproduces_polynomials():
    q = 12
    x = (np.arange(1 << q) + 0.5) / (1 << q)
    coarse = Basis(BasisSpec.from_name("db3", R=3), q)
    fine = Basis(BasisSpec.from_name("db3", R=4), q)
    for r in range(coarse.N):
        e = np.zeros(coarse.N)
        e[r] = 1.0
        f = coarse.synthesize(e)
        assert (f - fine.project(f)).norm() < 1e-9
    for a in range(3):
        # cell averages of x**a
        edges = np.arange((1 << q) + 1) / (1 << q)
        avg = np.diff(edges ** (a + 1)) / (a + 1) * (1 << q)
        f = FineGridFunction(avg)
        assert (f - coarse.project(f)).norm() < 1e-9, a
    assert x.size == 1 << q


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(family="haar", boundary="interval"),
        dict(family="db", order=2, R=1),
        dict(family="db", order=2, d=3, R=3),
        dict(family="db", order=2, R=3, ordering="wavelet"),
        dict(family="db", order=2, R=3, boundary="reflect"),
        dict(family="sym", order=2),
    ],
)
def test_invalid_specs(kwargs):
    with pytest.raises(ValueError):
        BasisSpec(**kwargs)
