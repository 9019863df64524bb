"""Command-line experiments: stable sampling rates, Gramians, reconstructions, decay rates.

Every CSV starts with a header row, followed by a ``# seed=...`` comment line
recording the configuration.  Files are written atomically; if a command
fails, files it already wrote are removed and a single ``error: ...`` line
goes to stderr.
"""

import argparse
import math
import os
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import checks
from .gramian import assemble_gramian, gramian_rows, magnitude_image, mu_of, ssr
from .output import image_from_values, write_csv, write_pgm
from .recon import generalized_sampling, pbdw
from .sampling import SamplingSpec, render_samples, sample_signal
from .signals import KINDS, MAX_DEPTH, TestSignal, load_raster, truncation_error
from .wavelets import Basis, BasisSpec, parse_wavelet

COMMANDS = ("ssr", "gramian", "reconstruct", "approx-rate", "selftest")
WAVELETS = ("haar", "db2", "db4", "db8")
SWEEPS = ("ssr", "approx-rate")


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    sampling: str = "walsh"
    wavelet: str = "haar"
    dim: int = 1
    level: int = 3
    level_min: int = 1
    theta: float = 2.0
    mmax: int | None = None
    depth: int | None = None
    out: str = "."
    seed: int = 0
    signal: str = "jumps"
    input: str | None = None
    basis: str = "wavelet"
    ordering: str | None = None

    def validate(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.sampling not in ("walsh", "fourier"):
            raise ValueError(f"unknown sampling family {self.sampling!r}")
        parse_wavelet(self.wavelet)
        if self.dim not in (1, 2):
            raise ValueError("--dim must be 1 or 2")
        if self.level < 0:
            raise ValueError("--level must be nonnegative")
        if self.command in SWEEPS and not 0 <= self.level_min <= self.level:
            raise ValueError("need 0 <= --level-min <= --level")
        if not self.theta > 1.0:
            raise ValueError("--theta must exceed 1")
        if self.mmax is not None and self.mmax < 1:
            raise ValueError("--mmax must be positive")
        if self.depth is not None and self.depth < 0:
            raise ValueError("--depth must be nonnegative")
        if self.signal not in KINDS + ("zero",):
            raise ValueError(f"unknown signal {self.signal!r}")
        if self.basis not in ("walsh", "wavelet"):
            raise ValueError("--basis must be walsh or wavelet")
        if self.ordering not in (None, "scaling", "wavelet"):
            raise ValueError("--ordering must be scaling or wavelet")
        uses_wavelet = self.command != "selftest" and not (
            self.command == "approx-rate" and self.basis == "walsh"
        )
        if uses_wavelet:
            for R in self.levels():
                self.basis_spec(R)  # raises on an invalid (wavelet, dim, level)
        return self

    def levels(self):
        if self.command in SWEEPS:
            return range(self.level_min, self.level + 1)
        return range(self.level, self.level + 1)

    def basis_spec(self, R=None):
        family, order = parse_wavelet(self.wavelet)
        ordering = self.ordering
        if ordering is None:
            # Haar is listed level by level, which shows the block structure
            ordering = "wavelet" if family == "haar" else "scaling"
        return BasisSpec(family, order, self.dim, self.level if R is None else R, ordering=ordering)

    def comment(self):
        fields = asdict(self)
        return " ".join(f"{k}={fields[k]}" for k in ("seed", "command", "sampling", "wavelet", "dim", "level", "theta", "mmax", "depth"))


class _Outputs:
    """Tracks written files so a failing command can remove them."""

    def __init__(self, directory):
        self.directory = directory
        self.written = []

    def path(self, name):
        p = os.path.join(self.directory, name)
        self.written.append(p)
        return p

    def rollback(self):
        for p in self.written:
            if os.path.exists(p):
                os.unlink(p)


# -- commands ----------------------------------------------------------------


def _fmt_mu(mu):
    return "inf" if math.isinf(mu) else repr(float(mu))


def run_ssr(cfg, out):
    rows = []
    for R in cfg.levels():
        spec = cfg.basis_spec(R)
        basis = Basis(spec, cfg.depth)
        M_max = cfg.mmax if cfg.mmax is not None else 4 * spec.N
        res = ssr(cfg.theta, cfg.sampling, basis, M_max)
        rows.append((spec.N, "NA" if res.Theta is None else res.Theta, _fmt_mu(res.mu)))
    write_csv(out.path("ssr.csv"), ("N", "Theta", "mu"), rows, cfg.comment())


def run_gramian(cfg, out):
    spec = cfg.basis_spec()
    M = cfg.mmax if cfg.mmax is not None else spec.N
    sampling = SamplingSpec(cfg.sampling, cfg.dim, M)
    g = assemble_gramian(sampling, Basis(spec, cfg.depth), separable=False)
    rep = mu_of(g)
    comment = f"{cfg.comment()} provenance={g.provenance} mu={_fmt_mu(rep.mu)} kappa={_fmt_mu(rep.kappa)}"
    write_csv(out.path("gramian.csv"), ("row", "col", "real", "imag"), gramian_rows(g), comment)
    write_pgm(out.path("gramian.pgm"), magnitude_image(g))


def _signal(cfg, q):
    if cfg.input is not None:
        return load_raster(cfg.input).render(q)
    if cfg.signal == "zero":
        from .grid import FineGridFunction

        return FineGridFunction(np.zeros((1 << q,) * cfg.dim))
    return TestSignal(cfg.signal, d=cfg.dim, seed=cfg.seed).render(q)


def run_reconstruct(cfg, out):
    spec = cfg.basis_spec()
    basis = Basis(spec, cfg.depth)
    q = basis.depth
    if q > MAX_DEPTH[cfg.dim]:
        raise ValueError(f"grid depth {q} exceeds the signal limit {MAX_DEPTH[cfg.dim]}; pass --depth")
    M = cfg.mmax if cfg.mmax is not None else (2 * (1 << spec.R)) ** cfg.dim
    sampling = SamplingSpec(cfg.sampling, cfg.dim, M)
    f = _signal(cfg, q)
    b = sample_signal(f, sampling)
    g = assemble_gramian(sampling, basis, depth=q)
    truncated = render_samples(b, q)
    gs = generalized_sampling(g, b)
    gs_fine = basis.synthesize(gs.coeffs)
    pb = pbdw(g, b, basis, q)
    outputs = {"truncated": truncated, "gs": gs_fine, "pbdw": pb.fine}

    summary = []
    for name, est in outputs.items():
        err = (f - est).norm()
        gap = np.linalg.norm(sample_signal(est, sampling).values - b.values)
        summary.append((name, repr(float(err)), repr(float(gap))))
    comment = f"{cfg.comment()} M={M} N={spec.N} mu={_fmt_mu(gs.mu)}"
    if cfg.dim == 1:
        x = (np.arange(1 << q) + 0.5) * 2.0 ** (-q)
        cols = [x, np.real(f.values)] + [np.real(v.values) for v in outputs.values()]
        write_csv(out.path("reconstruct.csv"), ("x", "signal", *outputs), zip(*cols), comment)
    else:
        write_pgm(out.path("signal.pgm"), image_from_values(f.values))
        for name, est in outputs.items():
            write_pgm(out.path(f"{name}.pgm"), image_from_values(est.values))
    write_csv(out.path("errors.csv"), ("method", "l2_error", "sample_residual"), summary, comment)


def run_approx_rate(cfg, out):
    signal = TestSignal(cfg.signal, d=cfg.dim, seed=cfg.seed)
    N_list = [1 << (cfg.dim * R) for R in cfg.levels()]
    if cfg.basis == "walsh":
        rep = truncation_error(signal, "walsh", N_list, cfg.depth)
    else:
        spec = cfg.basis_spec()
        depth = cfg.depth if cfg.depth is not None else min(spec.default_depth, MAX_DEPTH[cfg.dim])
        rep = truncation_error(signal, spec, N_list, depth)
    comment = f"{cfg.comment()} basis={cfg.basis} signal={cfg.signal} slope={rep.slope!r}"
    write_csv(out.path("approx_rate.csv"), ("N", "epsilon"), rep.rows(), comment)


def run_selftest(cfg, out):
    failed = 0
    for name, ok, detail in checks.run_all():
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failed += not ok
    if failed:
        raise RuntimeError(f"{failed} self-check(s) failed")


RUNNERS = {
    "ssr": run_ssr,
    "gramian": run_gramian,
    "reconstruct": run_reconstruct,
    "approx-rate": run_approx_rate,
    "selftest": run_selftest,
}


def run(cfg):
    """Validate ``cfg`` and run it; returns the written paths."""
    cfg.validate()
    os.makedirs(cfg.out, exist_ok=True)
    out = _Outputs(cfg.out)
    try:
        RUNNERS[cfg.command](cfg, out)
    except BaseException:
        out.rollback()
        raise
    return out.written


# -- argument parsing ---------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="stablesampling", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--sampling", choices=("walsh", "fourier"), default="walsh")
        p.add_argument("--wavelet", choices=WAVELETS, default="haar")
        p.add_argument("--dim", type=int, choices=(1, 2), default=1)
        p.add_argument("--level", type=int, default=3, help="level R (largest level for sweeps)")
        p.add_argument("--level-min", type=int, default=1, help="smallest level for sweeps")
        p.add_argument("--theta", type=float, default=2.0)
        p.add_argument("--mmax", type=int, default=None, help="sample count M (cap for ssr)")
        p.add_argument("--depth", type=int, default=None, help="fine grid depth q")
        p.add_argument("--out", default=".")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--signal", choices=KINDS[:-1] + ("zero",), default="jumps")
        p.add_argument("--input", default=None, help="PGM image to reconstruct (2D)")
        p.add_argument("--basis", choices=("walsh", "wavelet"), default="wavelet", help="approx-rate basis")
        p.add_argument("--ordering", choices=("scaling", "wavelet"), default=None, help="basis order (Haar only for wavelet)")
    return parser


def config_from_args(argv=None):
    args = vars(build_parser().parse_args(argv))
    return ExperimentConfig(**args)


def main(argv=None):
    try:
        cfg = config_from_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        run(cfg)
    except Exception as exc:  # single-line, machine-parseable
        msg = " ".join(str(exc).split())
        print(f"error: command={cfg.command} type={type(exc).__name__} message={msg!r}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
