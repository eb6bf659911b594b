"""CSV artifacts for runs, written atomically.

Every snapshot becomes ``fields_<k>.csv`` with a header row and one row per
cell::

    t, x1[, x2], rho, u1[, u2], w, v, z_plus, z_minus, udir1[, udir2]

and the run report becomes ``report.csv`` with one row per output time.
Numbers are printed with ``%.17g`` so identical runs give identical bytes.
"""

from __future__ import annotations

import csv
import shutil
import tempfile
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from ..eos import EquationOfState
from ..kinematics import fields_to_symmetric
from .pipeline import TameRunReport, Trajectory

__all__ = ["FAILURE_MARKER", "snapshot_table", "write_trajectory", "write_report", "artifact_dir"]

FAILURE_MARKER = "FAILED"


def _fmt(x) -> str:
    return "%.17g" % float(x)


def snapshot_table(eos: EquationOfState, trajectory: Trajectory, k: int):
    """Header and row array for snapshot ``k``."""
    grid = trajectory.grid
    snap = trajectory.snapshots[k]
    n = grid.n
    zp, zm, ud = fields_to_symmetric(eos, snap.rho, snap.u)
    w = 0.5 * (zp - zm)
    v = 0.5 * (zp + zm)
    x = grid.coordinates()
    cols = [np.full(grid.shape, snap.t)]
    cols += [x[i] for i in range(n)]
    cols += [snap.rho] + [snap.u[i] for i in range(n)]
    cols += [w, v, zp, zm] + [ud[i] for i in range(n)]
    header = (["t"] + [f"x{i + 1}" for i in range(n)] + ["rho"] + [f"u{i + 1}" for i in range(n)]
              + ["w", "v", "z_plus", "z_minus"] + [f"udir{i + 1}" for i in range(n)])
    # C order: the last axis varies fastest
    rows = np.stack([np.asarray(c, dtype=float).reshape(-1) for c in cols], axis=1)
    return header, rows


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for r in rows:
            wr.writerow([_fmt(x) if not isinstance(x, str) else x for x in r])


def write_trajectory(directory: Path, eos: EquationOfState, trajectory: Trajectory) -> list:
    paths = []
    width = max(4, len(str(len(trajectory.snapshots) - 1)))
    for k in range(len(trajectory.snapshots)):
        header, rows = snapshot_table(eos, trajectory, k)
        p = Path(directory) / f"fields_{k:0{width}d}.csv"
        _write_rows(p, header, rows)
        paths.append(p)
    return paths


def write_report(directory: Path, report: TameRunReport) -> Path:
    p = Path(directory) / "report.csv"
    header = list(TameRunReport.SERIES_COLUMNS) + ["kappa", "frame", "grid_motion", "warnings"]
    tail = [report.kappa, report.frame, report.grid_motion, len(report.warnings)]
    rows = [list(r) + tail for r in report.series]
    with open(p, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for r in rows:
            wr.writerow([x if isinstance(x, str) else _fmt(x) for x in r])
    if report.warnings:
        (Path(directory) / "warnings.txt").write_text("\n".join(report.warnings) + "\n")
    return p


@contextmanager
def artifact_dir(out: Path):
    """Stage artifacts in a temporary sibling directory and move them into
    ``out`` only on success.

    On an exception ``out`` is left holding just a failure marker with the
    error message, and the exception propagates.
    """
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    stage = Path(tempfile.mkdtemp(prefix=f".{out.name}.", dir=out.parent))
    try:
        yield stage
    except BaseException as exc:
        shutil.rmtree(stage, ignore_errors=True)
        if out.exists():
            shutil.rmtree(out)
        out.mkdir(parents=True)
        (out / FAILURE_MARKER).write_text(f"{type(exc).__name__}: {exc}\n")
        raise
    if out.exists():
        shutil.rmtree(out)
    stage.chmod(0o755)
    stage.rename(out)
