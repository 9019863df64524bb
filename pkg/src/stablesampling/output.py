"""Atomic CSV and PGM writers."""

import csv
import io
import os
import tempfile

import numpy as np


def atomic_write_bytes(path, data):
    """Write ``data`` to a temporary file next to ``path`` and rename it into place."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def csv_bytes(header, rows, comment=None):
    """Header row, optional ``# comment`` line, then the rows; ``repr`` floats."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    if comment:
        buf.write(f"# {comment}\n")
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue().encode("ascii")


def write_csv(path, header, rows, comment=None):
    atomic_write_bytes(path, csv_bytes(header, rows, comment))


def write_pgm(path, image):
    """8-bit P5 image; ``image`` is a 2D uint8 array."""
    from .signals import pgm_bytes

    atomic_write_bytes(path, pgm_bytes(np.asarray(image, dtype=np.uint8), 255, "P5"))


def image_from_values(values):
    """Scale real values linearly to 0..255 (constant arrays map to 0)."""
    v = np.real(np.asarray(values, dtype=np.complex128)).astype(np.float64)
    lo, hi = v.min(), v.max()
    if hi == lo:
        return np.zeros(v.shape, dtype=np.uint8)
    return np.rint((v - lo) / (hi - lo) * 255.0).astype(np.uint8)
