import csv

import numpy as np
import pytest

from stablesampling.cli import ExperimentConfig, main, run
from stablesampling.signals import pgm_bytes, read_pgm


def _rows(path):
    with open(path) as fh:
        lines = [l for l in fh if not l.startswith("#")]
    return list(csv.DictReader(lines))


def test_ssr_haar_walsh(tmp_path):
    assert main(["ssr", "--level", "8", "--out", str(tmp_path)]) == 0
    text = (tmp_path / "ssr.csv").read_text().splitlines()
    assert text[0] == "N,Theta,mu" and text[1].startswith("# seed=0")
    rows = _rows(tmp_path / "ssr.csv")
    assert [int(r["N"]) for r in rows] == [1 << R for R in range(1, 9)]
    assert all(r["N"] == r["Theta"] for r in rows)


def test_gramian_block_diagonal(tmp_path):
    assert main(["gramian", "--level", "6", "--mmax", "64", "--out", str(tmp_path)]) == 0
    img = read_pgm(tmp_path / "gramian.pgm").pixels
    assert img.shape == (64, 64)
    # level-ordered Haar: sequencies [2^r, 2^(r+1)) pair only with level-r wavelets
    block = np.zeros((64, 64), dtype=bool)
    block[0, 0] = True
    for r in range(6):
        block[1 << r : 2 << r, 1 << r : 2 << r] = True
    assert np.array_equal(img > 0, block)
    rows = _rows(tmp_path / "gramian.csv")
    assert len(rows) == 64 * 64


def test_gramian_wavelet_ordering_blocks(tmp_path):
    assert main(["gramian", "--dim", "2", "--level", "3", "--out", str(tmp_path)]) == 0
    img = read_pgm(tmp_path / "gramian.pgm").pixels
    # nonzeros live in the dyadic diagonal blocks of the 2D case table
    assert img[0, 0] == 255 and img[0, 1:].max() == 0


def test_reconstruct_zero_input(tmp_path):
    args = ["reconstruct", "--signal", "zero", "--wavelet", "db2", "--level", "3", "--depth", "9"]
    assert main(args + ["--out", str(tmp_path)]) == 0
    for row in _rows(tmp_path / "errors.csv"):
        assert float(row["l2_error"]) == 0.0 and float(row["sample_residual"]) == 0.0
    for row in _rows(tmp_path / "reconstruct.csv"):
        assert all(float(row[k]) == 0.0 for k in ("truncated", "gs", "pbdw"))


def test_reconstruct_raster(tmp_path):
    img = tmp_path / "in.pgm"
    yy, xx = np.mgrid[0:16, 0:16]
    img.write_bytes(pgm_bytes(((xx + yy) * 7) % 256, 255))
    args = ["reconstruct", "--dim", "2", "--level", "2", "--depth", "4", "--input", str(img)]
    assert main(args + ["--out", str(tmp_path / "o")]) == 0
    assert {p.name for p in (tmp_path / "o").iterdir()} == {
        "signal.pgm", "truncated.pgm", "gs.pgm", "pbdw.pgm", "errors.csv"
    }


def test_approx_rate(tmp_path):
    assert main(["approx-rate", "--basis", "walsh", "--signal", "smooth", "--level", "8", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "approx_rate.csv").read_text().splitlines()
    assert lines[0] == "N,epsilon" and "slope=" in lines[1]


@pytest.mark.parametrize(
    "argv",
    [
        ["ssr", "--sampling", "fourier", "--wavelet", "db8", "--level", "5", "--level-min", "5"],
        ["reconstruct", "--signal", "smooth", "--sampling", "fourier", "--wavelet", "db2", "--level", "4", "--depth", "10"],
        ["gramian", "--wavelet", "db4", "--level", "4", "--mmax", "40", "--sampling", "fourier"],
    ],
)
def test_deterministic_outputs(tmp_path, argv):
    assert main(argv + ["--out", str(tmp_path / "a")]) == 0
    assert main(argv + ["--out", str(tmp_path / "b")]) == 0
    for p in (tmp_path / "a").iterdir():
        assert p.read_bytes() == (tmp_path / "b" / p.name).read_bytes()
        if p.suffix == ".csv":
            assert not p.read_text().startswith("#")


def test_single_line_error_and_cleanup(tmp_path, capsys):
    # the basis is valid, but 20 samples per axis are too many for a depth-4 grid
    argv = ["reconstruct", "--level", "3", "--depth", "4", "--mmax", "20", "--out", str(tmp_path)]
    assert main(argv) == 1
    err = capsys.readouterr().err
    assert err.count("\n") == 1 and err.startswith("error: command=reconstruct type=ValueError")
    assert list(tmp_path.iterdir()) == []


def test_rollback_removes_partial_outputs(tmp_path, monkeypatch):
    import stablesampling.cli as cli

    def boom(*args, **kwargs):
        raise RuntimeError("late failure")

    monkeypatch.setattr(cli, "write_pgm", boom)
    assert main(["gramian", "--level", "2", "--out", str(tmp_path)]) == 1
    assert list(tmp_path.iterdir()) == []


@pytest.mark.parametrize(
    "kwargs",
    [dict(theta=1.0), dict(dim=3), dict(wavelet="db2", level=1), dict(mmax=0), dict(signal="noise")],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        run(ExperimentConfig("ssr", **kwargs))


def test_selftest(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out and all(line.startswith("PASS") for line in out)
