import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stablesampling.gramian import (
    assemble_gramian,
    haar_walsh_entry,
    magnitude_image,
    mu_of,
    mu_sweep,
    ssr,
)
from stablesampling.grid import FineGridFunction
from stablesampling.sampling import SamplingSpec, sample_signal
from stablesampling.wavelets import Basis, BasisSpec


def test_lemma_examples():
    assert abs(haar_walsh_entry("wavelet", 2, 1, 5)) == 0.5
    assert haar_walsh_entry("wavelet", 2, 1, 2) == 0.0
    assert abs(haar_walsh_entry("scaling", 2, 3, 3)) == 0.5


def test_2d_entries_are_products():
    for l, (k1, k2) in {1: ("scaling", "wavelet"), 2: ("wavelet", "scaling"), 3: ("wavelet", "wavelet")}.items():
        for n in [(0, 2), (3, 5), (5, 1), (6, 7)]:
            v = haar_walsh_entry(l, 2, (1, 3), n)
            assert v == haar_walsh_entry(k1, 2, 1, n[0]) * haar_walsh_entry(k2, 2, 3, n[1])


def test_entry_range_checks():
    with pytest.raises(ValueError):
        haar_walsh_entry("wavelet", 2, 4, 5)
    with pytest.raises(ValueError):
        haar_walsh_entry(1, 2, (0, 0), (1,))


@given(st.integers(0, 7), st.data())
def test_entry_matches_quadrature(R, data):
    j = data.draw(st.integers(0, (1 << R) - 1))
    n = data.draw(st.integers(0, (1 << (R + 2)) - 1))
    B = Basis(BasisSpec("haar", R=R + 1, ordering="wavelet"))
    q = B.depth
    for kind in ("scaling", "wavelet"):
        col = np.zeros(1 << q)
        width = 1 << (q - R)
        col[j * width : (j + 1) * width] = 2.0 ** (R / 2)
        if kind == "wavelet":
            col[j * width + width // 2 : (j + 1) * width] *= -1
        f = FineGridFunction(col).refine(R + 2)
        ref = sample_signal(f, SamplingSpec("walsh", 1, 1 << (R + 2))).values[n]
        assert abs(haar_walsh_entry(kind, R, j, n) - ref) < 1e-12


@pytest.mark.parametrize("R", [2, 4, 6])
def test_square_haar_walsh_is_orthogonal(R):
    g = assemble_gramian(SamplingSpec("walsh", 1, 1 << R), BasisSpec("haar", R=R))
    assert g.provenance == "analytic"
    s = np.linalg.svd(g.matrix, compute_uv=False)
    np.testing.assert_allclose(s, 1.0, atol=1e-12)


def test_db2_walsh_against_finer_quadrature():
    spec = BasisSpec.from_name("db2", R=3)
    B = Basis(spec, 10)
    g = assemble_gramian(SamplingSpec("walsh", 1, 16), B)
    assert g.provenance == "quadrature"
    for j in range(spec.N):
        e = np.zeros(spec.N)
        e[j] = 1.0
        f = B.synthesize(e, q=14)
        x = (np.arange(1 << 14) + 0.5) / (1 << 14)
        from stablesampling.walsh import wal_eval

        ref = [np.sum(f.values * wal_eval(n, x)) / (1 << 14) for n in range(16)]
        np.testing.assert_allclose(g.matrix[:, j], ref, atol=1e-8)


def test_2d_zero_pattern_R1():
    g = assemble_gramian(SamplingSpec("walsh", 2, 4), BasisSpec("haar", d=2, R=1))
    U = g.matrix
    # columns: phi, psi l=1 (phi x psi), l=2 (psi x phi), l=3 (psi x psi); rows n = (n1, n2), n1 fastest
    expected = np.eye(4, dtype=bool)  # (0,0)->phi, (0,1)->l1, (1,0)->l2, (1,1)->l3
    rows = {(0, 0): 0, (1, 0): 1, (0, 1): 2, (1, 1): 3}
    cols = {(0, 0): 0, (0, 1): 1, (1, 0): 2, (1, 1): 3}
    pattern = np.zeros((4, 4), dtype=bool)
    for n, r in rows.items():
        pattern[r, cols[n]] = True
    assert np.array_equal(np.abs(U) > 1e-12, pattern)
    assert expected.sum() == pattern.sum()


def test_mu_examples():
    assert mu_of(np.eye(5)).mu == 1.0
    assert mu_of(np.diag([1.0, 0.5])).mu == pytest.approx(2.0)
    rep = mu_of(np.ones((2, 3)) / 3)
    assert math.isinf(rep.mu) and math.isinf(rep.kappa)
    with pytest.raises(ValueError):
        mu_of(np.zeros((0, 3)))


def test_kappa_never_exceeds_mu():
    g = assemble_gramian(SamplingSpec("walsh", 1, 40), Basis(BasisSpec.from_name("db2", R=5), 10))
    rep = mu_of(g)
    assert rep.sigma_max <= 1 + 1e-8
    assert rep.kappa <= rep.mu + 1e-12


@pytest.mark.parametrize(
    "family,spec",
    [
        ("walsh", BasisSpec.from_name("db2", R=4)),
        ("fourier", BasisSpec("haar", R=4)),
        ("fourier", BasisSpec.from_name("db4", R=4)),
        ("walsh", BasisSpec.from_name("db2", d=2, R=2)),
    ],
    ids=str,
)
def test_mu_monotone_and_bounded(family, spec):
    B = Basis(spec, spec.min_depth + 4)
    sweep = mu_sweep(family, B, 6 * spec.N)
    mus = [mu for _, mu in sweep]
    assert all(b <= a * (1 + 1e-10) for a, b in zip(mus, mus[1:]))
    assert mus[0] >= 1.0 - 1e-12
    for M, _ in sweep[:: max(1, len(sweep) // 4)]:
        g = assemble_gramian(SamplingSpec(family, spec.d, M), B)
        assert mu_of(g).sigma_max <= 1 + 1e-8


def test_separable_matches_dense():
    B = Basis(BasisSpec.from_name("db2", d=2, R=2), 6)
    s = SamplingSpec("fourier", 2, 36)
    a = assemble_gramian(s, B)
    b = assemble_gramian(s, B, separable=False)
    assert a.dense is None and b.dense is not None
    np.testing.assert_allclose(a.matrix, b.matrix, atol=1e-14)
    assert mu_of(a).mu == pytest.approx(mu_of(b).mu, rel=1e-10)


@pytest.mark.parametrize("R", range(1, 7))
def test_haar_ssr_is_N(R):
    res = ssr(2.0, "walsh", BasisSpec("haar", R=R), 4 << R)
    assert res.Theta == 1 << R


def test_ssr_matches_linear_scan():
    B = Basis(BasisSpec.from_name("db2", R=4), 10)
    for theta in (1.2, 1.5, 2.0, 4.0):
        scan = [M for M, mu in mu_sweep("walsh", B, 64) if mu < theta]
        res = ssr(theta, "walsh", B, 64)
        assert res.Theta == (scan[0] if scan else None)


def test_ssr_nonincreasing_in_theta():
    B = Basis(BasisSpec.from_name("db4", R=4), 10)
    values = [ssr(t, "walsh", B, 128).Theta for t in (1.1, 1.3, 1.6, 2.0, 3.0, 10.0)]
    assert all(b <= a for a, b in zip(values, values[1:]))


def test_ssr_not_reached_and_bad_theta():
    B = Basis(BasisSpec.from_name("db4", R=4), 10)
    assert ssr(1.01, "walsh", B, 20).Theta is None
    with pytest.raises(ValueError):
        ssr(1.0, "walsh", B, 20)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        assemble_gramian(SamplingSpec("walsh", 2, 4), BasisSpec("haar", R=2))


def test_magnitude_image_scaling():
    img = magnitude_image(assemble_gramian(SamplingSpec("walsh", 1, 8), BasisSpec("haar", R=3)))
    assert img.dtype == np.uint8 and img.max() == 255
