"""Uniform cell-centred grids and the small stencil helpers used by the solvers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError

__all__ = ["Grid", "pad", "interpolate"]

BOUNDARIES = ("periodic", "vacuum")
MIN_CELLS = 16


@dataclass(frozen=True)
class Grid:
    """Tensor-product grid of ``cells[i]`` equal cells on ``extent[i] = (lo, hi)``.

    ``boundary`` is ``"periodic"`` or ``"vacuum"``; the latter extends the
    edge values outward, which keeps a vacuum margin unchanged.
    """

    extent: tuple
    cells: tuple
    boundary: str = "periodic"

    def __post_init__(self):
        extent = tuple((float(lo), float(hi)) for lo, hi in self.extent)
        cells = tuple(int(c) for c in self.cells)
        if len(extent) != len(cells) or len(cells) not in (1, 2):
            raise DomainError("grid must be 1- or 2-dimensional with one extent per axis")
        if any(c < MIN_CELLS for c in cells):
            raise DomainError(f"each axis needs at least {MIN_CELLS} cells")
        if any(not (hi > lo) for lo, hi in extent):
            raise DomainError("grid extents must satisfy hi > lo")
        if self.boundary not in BOUNDARIES:
            raise DomainError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")
        object.__setattr__(self, "extent", extent)
        object.__setattr__(self, "cells", cells)

    @property
    def n(self) -> int:
        return len(self.cells)

    @property
    def shape(self) -> tuple:
        return self.cells

    @property
    def h(self) -> np.ndarray:
        return np.array([(hi - lo) / c for (lo, hi), c in zip(self.extent, self.cells)])

    @property
    def lengths(self) -> np.ndarray:
        return np.array([hi - lo for lo, hi in self.extent])

    @property
    def periodic(self) -> bool:
        return self.boundary == "periodic"

    def axis(self, i: int) -> np.ndarray:
        lo, _ = self.extent[i]
        return lo + (np.arange(self.cells[i]) + 0.5) * self.h[i]

    def coordinates(self) -> np.ndarray:
        """Cell centres, shape ``(n, *cells)``."""
        return np.stack(np.meshgrid(*[self.axis(i) for i in range(self.n)], indexing="ij"))

    def scaled(self, axis: int, factor: float) -> "Grid":
        """Same cell count with the extent along ``axis`` multiplied by ``factor``."""
        extent = list(self.extent)
        lo, hi = extent[axis]
        extent[axis] = (factor * lo, factor * hi)
        return Grid(tuple(extent), self.cells, self.boundary)

    def cell_volume(self) -> float:
        return float(np.prod(self.h))


def pad(field: np.ndarray, grid: Grid, width: int, axis: int) -> np.ndarray:
    """Add ``width`` ghost cells on both sides of spatial ``axis``.

    ``field`` has any number of leading component axes; the spatial axes are
    the trailing ``grid.n`` axes.
    """
    ax = field.ndim - grid.n + axis
    widths = [(0, 0)] * field.ndim
    widths[ax] = (width, width)
    return np.pad(field, widths, mode="wrap" if grid.periodic else "edge")


def _axis_weights(coord: np.ndarray, lo: float, h: float, m: int, periodic: bool):
    s = (coord - lo) / h - 0.5
    if periodic:
        i0 = np.floor(s).astype(int)
        f = s - i0
        return i0 % m, (i0 + 1) % m, f
    s = np.clip(s, 0.0, m - 1.0)
    i0 = np.minimum(np.floor(s).astype(int), m - 2)
    return i0, i0 + 1, s - i0


def interpolate(grid: Grid, values: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Multilinear interpolation of cell-centred ``values`` at ``points``.

    Parameters
    ----------
    values : array of shape ``(*components, *cells)``
    points : array of shape ``(n, *batch)``

    Returns
    -------
    array of shape ``(*components, *batch)``. Periodic grids wrap; otherwise
    points are clamped to the outermost cell centres.
    """
    points = np.asarray(points, dtype=float)
    lead = values.shape[: values.ndim - grid.n]
    flat = values.reshape((-1,) + grid.cells)
    pts = points.reshape(grid.n, -1)
    idx, wts = [], []
    for i in range(grid.n):
        lo, _ = grid.extent[i]
        i0, i1, f = _axis_weights(pts[i], lo, grid.h[i], grid.cells[i], grid.periodic)
        idx.append((i0, i1))
        wts.append((1.0 - f, f))
    out = np.zeros((flat.shape[0], pts.shape[1]))
    for corner in np.ndindex(*(2,) * grid.n):
        weight = np.ones(pts.shape[1])
        sel = []
        for i, b in enumerate(corner):
            weight = weight * wts[i][b]
            sel.append(idx[i][b])
        out += weight * flat[(slice(None),) + tuple(sel)]
    return out.reshape(lead + points.shape[1:])
