"""Piecewise-constant densities on uniform grids.

Every density in the package lives on a :class:`Grid`: ``n_cells`` cells of
width ``dx`` starting at ``x0``.  Values are heights per cell, so the mass of
a density is ``values.sum() * dx``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage, special

from .errors import DomainCoverageError, InvalidInputError, InvalidParameterError

SQRT_2PI = math.sqrt(2.0 * math.pi)

# Kernel support used by convolve_gaussian, in units of sigma.
TRUNCATE = 5.0


@dataclass(frozen=True)
class Grid:
    x0: float
    dx: float
    n_cells: int

    def __post_init__(self):
        if not (math.isfinite(self.x0) and math.isfinite(self.dx)):
            raise InvalidParameterError("grid origin and spacing must be finite")
        if self.dx <= 0:
            raise InvalidParameterError(f"grid spacing must be positive, got {self.dx}")
        if int(self.n_cells) != self.n_cells or self.n_cells < 1:
            raise InvalidParameterError(f"grid needs at least one cell, got {self.n_cells}")
        object.__setattr__(self, "n_cells", int(self.n_cells))

    @classmethod
    def from_span(cls, lo: float, hi: float, n_cells: int) -> "Grid":
        """Grid of ``n_cells`` equal cells covering ``[lo, hi)``."""
        if not hi > lo:
            raise InvalidParameterError(f"empty span [{lo}, {hi})")
        return cls(float(lo), (float(hi) - float(lo)) / n_cells, n_cells)

    @property
    def x_end(self) -> float:
        return self.x0 + self.n_cells * self.dx

    @property
    def edges(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n_cells + 1)

    @property
    def midpoints(self) -> np.ndarray:
        return self.x0 + self.dx * (np.arange(self.n_cells) + 0.5)

    def cell_of(self, x: float) -> int:
        """Index of the cell containing ``x``, clipped to the grid."""
        k = int(math.floor((x - self.x0) / self.dx))
        return min(max(k, 0), self.n_cells - 1)

    def isclose(self, other: "Grid", rtol: float = 1e-12) -> bool:
        scale = max(abs(self.x0), abs(self.x_end), self.dx)
        return (
            self.n_cells == other.n_cells
            and abs(self.x0 - other.x0) <= rtol * scale
            and abs(self.dx - other.dx) <= rtol * self.dx
        )


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GridDensity:
    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = _readonly(self.values)
        if values.shape != (self.grid.n_cells,):
            raise InvalidInputError(
                f"expected {self.grid.n_cells} values, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("density values must be finite")
        if np.any(values < 0):
            raise InvalidInputError("density values must be nonnegative")
        object.__setattr__(self, "values", values)

    @property
    def mass(self) -> float:
        return float(self.values.sum() * self.grid.dx)

    def normalized(self) -> "GridDensity":
        mass = self.mass
        if mass <= 0:
            raise InvalidInputError("cannot normalize a density with zero mass")
        return GridDensity(self.grid, self.values / mass)

    def reversed(self) -> "GridDensity":
        """Mirror image on the same grid (cell k maps to cell n_cells-1-k)."""
        return GridDensity(self.grid, self.values[::-1])


def gaussian_density(mu: float, sigma: float, grid: Grid) -> GridDensity:
    """Gaussian kernel sampled at cell midpoints, renormalized to unit mass.

    When ``sigma`` is so small that every midpoint underflows, all of the
    mass goes to the cell nearest ``mu``.
    """
    return GridDensity(grid, _gaussian_rows(np.array([mu], dtype=float), sigma, grid)[0])


def _gaussian_rows(mus: np.ndarray, sigma: float, grid: Grid) -> np.ndarray:
    if not sigma > 0 or not math.isfinite(sigma):
        raise InvalidParameterError(f"sigma must be positive, got {sigma}")
    z = (grid.midpoints[None, :] - mus[:, None]) / sigma
    rows = np.exp(-0.5 * z * z) / (sigma * SQRT_2PI)
    totals = rows.sum(axis=1) * grid.dx
    dead = ~(totals > 0)
    if np.any(dead):
        idx = np.clip(np.floor((mus[dead] - grid.x0) / grid.dx).astype(int), 0, grid.n_cells - 1)
        rows[dead] = 0.0
        rows[np.flatnonzero(dead), idx] = 1.0
        totals[dead] = grid.dx
    return rows / totals[:, None]


def kde(sample, h: float, grid: Grid, chunk: int = 4096) -> GridDensity:
    """Gaussian kernel density estimate: the average of per-point kernels."""
    x = np.asarray(sample, dtype=float).ravel()
    if x.size == 0:
        raise InvalidInputError("kernel density estimate of an empty sample")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("sample contains non-finite values")
    acc = np.zeros(grid.n_cells)
    # identical points share a kernel
    pts, counts = np.unique(x, return_counts=True)
    for start in range(0, pts.size, chunk):
        rows = _gaussian_rows(pts[start:start + chunk], h, grid)
        acc += counts[start:start + chunk] @ rows
    acc /= x.size
    return GridDensity(grid, acc / (acc.sum() * grid.dx))


def gaussian_kernel_weights(sigma: float, dx: float) -> np.ndarray:
    """Discrete Gaussian on the lattice ``dx * j``, ``|j| <= 5 sigma / dx``, summing to 1."""
    half = int(math.ceil(TRUNCATE * sigma / dx))
    j = np.arange(-half, half + 1) * dx
    w = np.exp(-0.5 * (j / sigma) ** 2)
    return w / w.sum()


def convolve_gaussian(f: GridDensity, sigma: float) -> GridDensity:
    """Blur ``f`` with a zero-mean Gaussian of width ``sigma``.

    The grid edges reflect, which keeps the total mass exact; cells further
    than ``5 * sigma`` from an edge see an ordinary truncated convolution.
    """
    if not sigma >= 0 or not math.isfinite(sigma):
        raise InvalidParameterError(f"sigma must be nonnegative, got {sigma}")
    if sigma == 0:
        return f
    return GridDensity(f.grid, convolve_values(f.values, sigma, f.grid.dx))


def convolve_values(values: np.ndarray, sigma: float, dx: float) -> np.ndarray:
    """Row-wise :func:`convolve_gaussian` on raw arrays (last axis is space)."""
    kernel = gaussian_kernel_weights(sigma, dx)
    if kernel.size == 1:
        return np.array(values, dtype=float)
    out = ndimage.convolve1d(np.asarray(values, dtype=float), kernel, axis=-1, mode="reflect")
    return np.maximum(out, 0.0)


def entropy(f: GridDensity) -> float:
    """Differential entropy in nats, ``-sum f ln f dx`` with ``0 ln 0 = 0``."""
    return float(special.entr(f.values).sum() * f.grid.dx)


def resample(f: GridDensity, target: Grid) -> GridDensity:
    """Move ``f`` onto ``target`` preserving mass.

    The cumulative mass of ``f`` is piecewise linear in x; it is read off at
    the target edges and differenced.  Aligned coarsenings therefore average
    the fine cells exactly.
    """
    if target.isclose(f.grid):
        return GridDensity(target, f.values)
    nz = np.flatnonzero(f.values > 0)
    if nz.size:
        lo = f.grid.x0 + nz[0] * f.grid.dx
        hi = f.grid.x0 + (nz[-1] + 1) * f.grid.dx
        slack = 1e-9 * max(f.grid.dx, target.dx)
        if lo < target.x0 - slack or hi > target.x_end + slack:
            raise DomainCoverageError(
                f"target grid [{target.x0}, {target.x_end}) does not cover support [{lo}, {hi})"
            )
    cdf = np.concatenate([[0.0], np.cumsum(f.values) * f.grid.dx])
    at_edges = np.interp(target.edges, f.grid.edges, cdf)
    vals = np.maximum(np.diff(at_edges), 0.0) / target.dx
    return GridDensity(target, vals)
