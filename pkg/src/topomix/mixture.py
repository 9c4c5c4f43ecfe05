"""Mixture data model and the Jensen-Shannon divergence."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import InvalidInputError
from .grid_density import Grid, GridDensity


@dataclass(frozen=True)
class Mixture:
    """``M`` weighted components on a shared grid.

    ``weights[m]`` is ``pi_m * p_m`` sampled per cell, so the mixture density
    is the column sum and ``pi_m`` is the mass of row ``m``.
    """

    grid: Grid
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim == 1:
            w = w[None, :]
        if w.ndim != 2 or w.shape[1] != self.grid.n_cells:
            raise InvalidInputError(
                f"weights must have shape (M, {self.grid.n_cells}), got {w.shape}"
            )
        if w.shape[0] < 1:
            raise InvalidInputError("a mixture needs at least one component")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise InvalidInputError("component weights must be finite and nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n_components(self) -> int:
        return self.weights.shape[0]

    @property
    def pi(self) -> np.ndarray:
        return self.weights.sum(axis=1) * self.grid.dx

    @property
    def components(self) -> np.ndarray:
        """Unit-mass component densities ``p_m`` as an (M, N) array."""
        return self.weights / self.pi[:, None]

    @property
    def density(self) -> GridDensity:
        return GridDensity(self.grid, self.weights.sum(axis=0))

    def component(self, m: int) -> GridDensity:
        return GridDensity(self.grid, self.components[m])

    def modes(self) -> np.ndarray:
        """x location of each component's maximum (midpoint of its top plateau)."""
        w = self.weights
        top = w == w.max(axis=1, keepdims=True)
        first = top.argmax(axis=1)
        last = w.shape[1] - 1 - top[:, ::-1].argmax(axis=1)
        return self.grid.x0 + self.grid.dx * ((first + last) / 2.0 + 0.5)

    def merge_last_two(self) -> "Mixture":
        """Replace the last two components by their weighted sum."""
        if self.n_components < 2:
            raise InvalidInputError("need two components to merge")
        w = self.weights
        return Mixture(self.grid, np.vstack([w[:-2], w[-2:].sum(axis=0)]))

    def reversed(self) -> "Mixture":
        return Mixture(self.grid, self.weights[:, ::-1])


def xlogx(x):
    return special.xlogy(x, x)


def js_divergence(m: Mixture) -> float:
    """Entropy of the mixture density minus the pi-average of component entropies.

    Uses ``pi_m H(p_m) = pi_m ln pi_m - sum_k w_mk ln w_mk dx`` so no
    component is divided by its mass.  Returns nats, clamped at zero.
    """
    dx = m.grid.dx
    w = m.weights
    h_mix = -xlogx(w.sum(axis=0)).sum() * dx
    weighted = (xlogx(m.pi) - xlogx(w).sum(axis=1) * dx).sum()
    return max(float(h_mix - weighted), 0.0)
