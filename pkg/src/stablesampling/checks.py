"""Self-checks for the Walsh identities and the Haar/Walsh case tables.

Each check returns ``(name, passed, detail)``; the CLI ``selftest`` command
and the acceptance suite both run them.
"""

import numpy as np

from .gramian import assemble_gramian, haar_walsh_band
from .sampling import SamplingSpec
from .walsh import dyadic_add, fwht_sequency, sign_changes, wal_eval, walsh_matrix
from .wavelets import Basis, BasisSpec


def _points(k):
    return np.arange(1 << k) * 2.0 ** (-k)


def check_sequency(n_max=1024, k=11):
    x = _points(k)
    bad = [n for n in range(n_max + 1) if sign_changes(wal_eval(n, x)) != n]
    return "walsh sequency count", not bad, f"n <= {n_max}, failures: {bad[:5]}"


def check_scaling(n_max=1024, k=12, j_max=3):
    x = _points(k)
    worst = 0
    for j in range(j_max + 1):
        xs = x[x * (1 << j) < 1.0]
        for n in range(n_max + 1):
            lhs = wal_eval(n << j, xs)
            rhs = wal_eval(n, (xs * (1 << j)) % 1.0)
            worst += int(np.count_nonzero(lhs != rhs))
    return "walsh scaling identity", worst == 0, f"mismatches: {worst}"


def check_multiplicative(n_max=1024, points=64, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.integers(0, 1 << 20, points) * 2.0**-20
    y = rng.integers(0, 1 << 20, points) * 2.0**-20
    s = dyadic_add(x, y)
    bad = sum(
        int(np.count_nonzero(wal_eval(n, x) * wal_eval(n, y) != wal_eval(n, s))) for n in range(n_max + 1)
    )
    return "walsh multiplicative identity", bad == 0, f"mismatches: {bad}"


def check_orthonormal(k_max=10):
    worst = 0.0
    for k in range(k_max + 1):
        W = walsh_matrix(1 << k) * 2.0 ** (-k / 2)
        s = np.linalg.svd(W, compute_uv=False)
        worst = max(worst, float(np.abs(s - 1.0).max()))
    return "walsh orthonormality", worst < 1e-12, f"max |sigma - 1| = {worst:.2e}"


def check_fast_transform(k_max=10, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(k_max + 1):
        v = rng.standard_normal(1 << k)
        dense = walsh_matrix(1 << k) @ v * 2.0 ** (-k / 2)
        worst = max(worst, float(np.abs(fwht_sequency(v) - dense).max()))
    return "fast transform vs dense", worst < 1e-12, f"max error {worst:.2e}"


def haar_pattern_error(R, d=1):
    """Worst deviation of the square Haar/Walsh Gramian from the case tables.

    Returns ``(max |entry| outside the bands, max ||entry| - magnitude| inside)``.
    """
    spec = BasisSpec("haar", d=d, R=R, ordering="wavelet")
    basis = Basis(spec)
    U = assemble_gramian(SamplingSpec("walsh", d, spec.N), basis, separable=False).matrix
    m = 1 << R
    n_axis = SamplingSpec("walsh", d, spec.N).row_indices()  # walsh sequency = position
    inband = np.ones(U.shape, dtype=bool)
    magnitude = np.ones(U.shape)
    for axis in range(d):
        n = n_axis[:, axis]
        labels = [basis.atoms.labels[i] for i in basis.index[:, axis]]
        for col, (kind, r, _j) in enumerate(labels):
            inband[:, col] &= haar_walsh_band(kind, r, n)
            # phi_{0,0} is the constant function; its band is n = 0
            magnitude[:, col] *= 2.0 ** (-r / 2)
    assert n_axis.max() < m
    outside = float(np.abs(U[~inband]).max(initial=0.0))
    inside = float(np.abs(np.abs(U[inband]) - magnitude[inband]).max(initial=0.0))
    return outside, inside


def check_haar_lemma(R_max_1d=10, R_max_2d=6):
    worst_out = worst_in = 0.0
    for d, R_max in ((1, R_max_1d), (2, R_max_2d)):
        for R in range(1, R_max + 1):
            out, inside = haar_pattern_error(R, d)
            worst_out, worst_in = max(worst_out, out), max(worst_in, inside)
    ok = worst_out <= 1e-12 and worst_in <= 1e-12
    return "haar/walsh case tables", ok, f"off-band max {worst_out:.1e}, in-band error {worst_in:.1e}"


def walsh_suite():
    return [
        check_sequency(),
        check_scaling(),
        check_multiplicative(),
        check_orthonormal(),
        check_fast_transform(),
    ]


def run_all():
    return walsh_suite() + [check_haar_lemma()]
