"""CSV traces, landscape grids and 8-bit PGM images.

Numbers are written with 17 significant digits so a float64 survives the
round trip. Stepwise columns are left empty on the final row (n = N), which
only carries V and the masses.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .kl_potential import TrajectoryRecord

DNA_COLUMNS = ("n", "H_q", "H_cross", "D_kl", "V", "dV", "S_n", "w1", "w2")
IMAGE_COLUMNS = ("n", "H_q", "H_cross", "D_kl", "V", "mass_defect")


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _write_rows(path: Path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_dna_trace(rec: TrajectoryRecord, path) -> None:
    dV, S = rec.dV, rec.S
    rows = []
    for n in range(rec.steps + 1):
        w1, w2 = rec.masses[n]
        if n < rec.steps:
            rows.append((n, rec.H_q[n], rec.H_cross[n], rec.D_kl[n], rec.V[n], dV[n], S[n], w1, w2))
        else:
            rows.append((n, None, None, None, rec.V[n], None, None, w1, w2))
    _write_rows(path, DNA_COLUMNS, rows)


def write_image_trace(rec: TrajectoryRecord, path) -> None:
    rows = []
    for n in range(rec.steps + 1):
        if n < rec.steps:
            rows.append((n, rec.H_q[n], rec.H_cross[n], rec.D_kl[n], rec.V[n], rec.mass_defect[n]))
        else:
            rows.append((n, None, None, None, rec.V[n], None))
    _write_rows(path, IMAGE_COLUMNS, rows)


def write_tile_masses(rec: TrajectoryRecord, path) -> None:
    k = len(rec.masses[0])
    header = ("n", *(f"m{b}" for b in range(k)))
    _write_rows(path, header, ((n, *m) for n, m in enumerate(rec.masses)))


def write_coarse_channel(rows, path) -> None:
    _write_rows(path, ("n", "e_AT", "e_GC", "I_bits"), rows)


def write_landscape(grid, path) -> None:
    rows = (
        (grid.xs[ix], grid.ys[iy], grid.values[iy, ix])
        for iy in range(len(grid.ys))
        for ix in range(len(grid.xs))
    )
    _write_rows(path, ("x", "y", "V"), rows)


def read_csv(path) -> dict[str, list]:
    """Columns of a CSV as lists of floats; empty cells become None."""
    with open(path, newline="", encoding="ascii") as fh:
        r = csv.reader(fh)
        header = next(r)
        cols: dict[str, list] = {h: [] for h in header}
        for row in r:
            for h, v in zip(header, row):
                cols[h].append(float(v) if v != "" else None)
    return cols


def reverify_trace(path, tol: float = 1e-10) -> float:
    """Recompute the cumulative production of a written trace.

    Uses the D_kl and V columns only (telescoped form) and, when the file has
    an S_n column, checks its sum against that. Returns the total.
    """
    cols = read_csv(path)
    D = [d for d in cols["D_kl"] if d is not None]
    V = cols["V"]
    if not D:
        return 0.0
    telescoped = math.fsum(D) + V[0] - V[len(D)]
    if "S_n" in cols:
        total = math.fsum(s for s in cols["S_n"] if s is not None)
        if not abs(total - telescoped) <= tol:
            raise ArithmeticError(f"{path}: sum S_n = {total!r}, telescoped = {telescoped!r}")
    return telescoped


def to_gray(values: np.ndarray) -> tuple[np.ndarray, float]:
    """Scale by the maximum to 0..255; returns the bytes and the scale used."""
    values = np.asarray(values, dtype=np.float64)
    vmax = float(values.max())
    if vmax <= 0:
        return np.zeros(values.shape, dtype=np.uint8), vmax
    return np.rint(255.0 * values / vmax).astype(np.uint8), vmax


def write_pgm(path, gray: np.ndarray) -> None:
    gray = np.asarray(gray, dtype=np.uint8)
    h, w = gray.shape
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(gray.tobytes())


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    w, h, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 255:
        raise ValueError(f"{path}: only 8-bit PGM supported")
    # the single whitespace after maxval may be followed by pixel bytes that
    # look like whitespace too, so count from the end instead of splitting
    if len(data) < w * h:
        raise ValueError(f"{path}: truncated pixel data")
    return np.frombuffer(data[len(data) - w * h:], dtype=np.uint8).reshape(h, w)
