"""Generalized sampling, PBDW and the l1-consistent reconstruction."""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .gramian import mu_of
from .grid import FineGridFunction
from .sampling import SampleVector, render_samples, sample_signal  # noqa: F401  (re-export)
from .wavelets import Basis

RANK_TOL = 1e-12


class ReconstructionError(RuntimeError):
    """A solver precondition failed or a solver did not converge."""


@dataclass
class ReconstructionResult:
    coeffs: np.ndarray
    fine: FineGridFunction | None = None
    residual: float = 0.0
    mu: float | None = None
    iterations: int | None = None
    info: dict = field(default_factory=dict)


def _check_data(g, b):
    if not isinstance(b, SampleVector):
        b = SampleVector(np.asarray(b), g.sampling)
    if b.spec.family != g.sampling.family or b.spec.M != g.M or b.spec.d != g.sampling.d:
        raise ValueError(f"samples ({b.spec}) do not match the Gramian's sampling ({g.sampling})")
    return b


def _lstsq_qr(A, y):
    """Least squares by economic QR; raises if ``A`` is numerically rank deficient."""
    report = mu_of(A)
    if report.sigma_min <= RANK_TOL * max(report.sigma_max, 1.0):
        raise ReconstructionError(f"cross-Gramian is rank deficient: sigma_min={report.sigma_min:.3e}")
    Q, Rf = scipy.linalg.qr(A, mode="economic")
    x = scipy.linalg.solve_triangular(Rf, Q.conj().T @ y)
    return x, report


def generalized_sampling(g, b):
    """Coefficients ``alpha`` minimising ``||U alpha - b||_2``.

    Needs ``M >= N`` and ``sigma_min(U) > 0``; a rank-deficient ``U`` raises
    :class:`ReconstructionError` naming ``sigma_min``.  Separable Gramians
    are solved one axis at a time.
    """
    b = _check_data(g, b)
    if g.M < g.N:
        raise ReconstructionError(f"need M >= N, got M={g.M}, N={g.N} (sigma_min=0)")
    y = b.values
    if g.dense is None:
        m = g.sampling.m
        X = y.reshape((m,) * g.sampling.d, order="F")
        smin = smax = 1.0
        for axis, F in enumerate(g.factors):
            X = np.moveaxis(X, axis, 0)
            shape = X.shape
            sol, rep = _lstsq_qr(F, X.reshape(shape[0], -1))
            X = np.moveaxis(sol.reshape((-1,) + shape[1:]), 0, axis)
            smin, smax = smin * rep.sigma_min, smax * rep.sigma_max
        alpha = X.ravel(order="F")
        mu = 1.0 / smin
        fitted = _apply(g, alpha)
    else:
        alpha, rep = _lstsq_qr(g.dense, y)
        mu = rep.mu
        fitted = g.dense @ alpha
    return ReconstructionResult(alpha, residual=float(np.linalg.norm(fitted - y)), mu=mu)


def _apply(g, alpha):
    """``U @ alpha`` without forming a Kronecker product."""
    if g.dense is not None:
        return g.dense @ alpha
    n = g.factors[0].shape[1]
    X = np.asarray(alpha).reshape((n,) * len(g.factors), order="F")
    for axis, F in enumerate(g.factors):
        X = np.moveaxis(np.tensordot(F, np.moveaxis(X, axis, 0), axes=1), 0, axis)
    return X.ravel(order="F")


def _as_basis(recon, g):
    basis = recon if isinstance(recon, Basis) else Basis(recon)
    if basis.spec != g.recon:
        raise ValueError("basis does not match the Gramian's reconstruction space")
    return basis


def pbdw(g, b, recon, q=None):
    """Consistent estimate ``f* = g* + render(b - U alpha)`` on the depth-``q`` grid.

    ``g*`` is the generalized-sampling solution; the correction is the
    sampling-space function whose samples are the residual, so ``f*``
    reproduces ``b`` exactly.  For Fourier sampling ``q`` must be the depth
    the Gramian was assembled for.
    """
    b = _check_data(g, b)
    basis = _as_basis(recon, g)
    if q is None:
        q = g.depth if g.depth is not None else basis.depth
    if q < basis.depth:
        raise ValueError(f"grid depth {q} below the basis depth {basis.depth}")
    if g.sampling.family == "fourier" and q != g.depth:
        raise ValueError(f"Fourier Gramian was assembled at depth {g.depth}, not {q}")
    gs = generalized_sampling(g, b)
    g_star = basis.synthesize(gs.coeffs, q=q)
    correction = render_samples(SampleVector(b.values - _apply(g, gs.coeffs), b.spec), q)
    values = g_star.values + correction.values
    if np.isrealobj(b.values) and g.sampling.family == "walsh":
        values = np.real(values)
    f_star = FineGridFunction(values)
    gap = np.linalg.norm(sample_signal(f_star, b.spec).values - b.values)
    return ReconstructionResult(
        gs.coeffs,
        fine=f_star,
        residual=gs.residual,
        mu=gs.mu,
        info={"g_star": g_star, "consistency": float(gap)},
    )


def pbdw_improved_distance(f, g, recon):
    """``dist(f, R_N + (S_M intersect R_N^perp))`` computed on ``f``'s grid.

    The second summand is spanned by the sampling functions with coefficient
    vectors in the null space of ``U^H``; an orthonormal null-space basis
    gives orthonormal functions, so the distance is a plain residual norm.
    """
    basis = _as_basis(recon, g)
    U = g.matrix
    C = scipy.linalg.null_space(U.conj().T)
    residual = f.values - basis.project(f).values
    if C.shape[1]:
        l = sample_signal(f, g.sampling).values
        comp = render_samples(SampleVector(C @ (C.conj().T @ l), g.sampling), f.q)
        residual = residual - comp.values
    return float(np.sqrt(np.sum(np.abs(residual) ** 2) * f.cell_volume))


# -- l1 ----------------------------------------------------------------------


@dataclass(frozen=True)
class L1Params:
    max_iter: int = 50_000
    feas_tol: float = 1e-8
    obj_tol: float = 1e-6
    rho: float = 1.0
    polish: bool = True


def _real_system(A, b):
    A = np.asarray(A)
    b = np.asarray(b)
    if np.iscomplexobj(A) or np.iscomplexobj(b):
        # real coefficients: equate real and imaginary parts separately
        A = np.vstack([A.real, A.imag])
        b = np.concatenate([np.real(b), np.imag(b)])
    return A.astype(np.float64), b.astype(np.float64)


def _shrink(v, t):
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def l1_consistent(A, b, params=L1Params()):
    """Real ``alpha`` minimising ``||alpha||_1`` subject to ``A alpha = b``.

    ``A`` is the ``M x K`` truncated measurement matrix (``K`` is the working
    bandwidth; a ``scipy.sparse.linalg.LinearOperator`` is materialised) and
    ``b`` the samples.  Complex systems are split into real and imaginary
    parts.  The solver is ADMM with a fixed penalty, where the constraint
    step is an exact projection onto ``{A alpha = b}``; an optional final
    step re-solves the constraints on the detected support and keeps the
    result when it is feasible and no worse in objective.
    """
    if hasattr(A, "matmat") and not isinstance(A, np.ndarray):
        A = A.matmat(np.eye(A.shape[1]))
    if isinstance(b, SampleVector):
        b = b.values
    A, y = _real_system(A, b)
    K = A.shape[1]
    if A.shape[0] != y.shape[0]:
        raise ValueError(f"matrix has {A.shape[0]} rows, data has {y.shape[0]}")
    scale = max(np.linalg.norm(y), 1.0)

    # projection onto the affine constraint set via the row space of A
    Q, Rf, piv = scipy.linalg.qr(A.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(Rf))
    rank = int(np.sum(diag > RANK_TOL * max(diag[0] if diag.size else 0.0, 1.0)))
    Q, Rf, piv = Q[:, :rank], Rf[:rank, :rank], piv[:rank]
    x_min = Q @ scipy.linalg.solve_triangular(Rf, y[piv], trans="T")
    if np.linalg.norm(A @ x_min - y) > params.feas_tol * scale:
        raise ReconstructionError(
            f"constraints are inconsistent: residual {np.linalg.norm(A @ x_min - y):.3e}"
        )

    def project(v):
        return v - Q @ (Q.T @ v) + x_min

    if np.linalg.norm(y) == 0.0:
        return ReconstructionResult(np.zeros(K), residual=0.0, iterations=0)

    rho = params.rho
    z = x_min.copy()
    x = z.copy()
    u = np.zeros(K)
    converged = False
    it = 0
    for it in range(1, params.max_iter + 1):
        z = project(x - u)
        x_old = x
        x = _shrink(z + u, 1.0 / rho)
        u = u + z - x
        primal = np.linalg.norm(z - x)
        dual = rho * np.linalg.norm(x - x_old)
        if primal < params.feas_tol * max(np.linalg.norm(x), 1.0) and dual < params.obj_tol * 1e-2:
            converged = True
            break
    alpha = z
    best = np.abs(alpha).sum()
    if params.polish:
        support = np.flatnonzero(np.abs(x) > 1e-9 * max(np.abs(x).max(), 1e-300))
        if 0 < support.size <= A.shape[0]:
            sub, *_ = scipy.linalg.lstsq(A[:, support], y)
            cand = np.zeros(K)
            cand[support] = sub
            if (
                np.linalg.norm(A @ cand - y) <= params.feas_tol * scale
                and np.abs(cand).sum() <= best + params.obj_tol
            ):
                alpha, best = cand, np.abs(cand).sum()
                converged = True
    feas = float(np.linalg.norm(A @ alpha - y))
    if not converged:
        raise ReconstructionError(
            f"l1 solver did not converge in {params.max_iter} iterations: "
            f"primal gap {np.linalg.norm(z - x):.3e}, feasibility {feas:.3e}"
        )
    return ReconstructionResult(alpha, residual=feas, iterations=it, info={"objective": float(best)})
