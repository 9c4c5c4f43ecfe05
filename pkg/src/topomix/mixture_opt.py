"""Information-theoretically optimal unimodal mixtures.

The optimizer starts from the sweep decomposition and repeatedly moves
mass at a single cell from one component to another.  Every move is
*saturating*: as large as it can be while both components stay unimodal.
Of all such moves, the one that raises the Jensen-Shannon divergence the
most is applied, until no move improves it.

Because the mixture density is fixed, ``J = H(f) + sum_m T_m - sum_m phi(pi_m)``
with ``T_m = sum_k phi(w_mk) dx`` and ``phi(x) = x ln x``.  A move touches
one cell of two components, so its effect on ``J`` is a handful of ``phi``
evaluations.  Those are kept in an (M, M, N) table; after each move only
the rows and columns of the two touched components are refreshed.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidInputError, InvalidParameterError
from .grid_density import GridDensity
from .mixture import Mixture, js_divergence, xlogx
from .unimodal import (
    give_bounds,
    is_unimodal,
    reverse_sweep_decompose,
    sweep_decompose,
    take_bounds,
    unimodal_rows,
)

logger = logging.getLogger(__name__)

__all__ = [
    "Mixture",
    "TmeReport",
    "js_divergence",
    "candidate_perturbation",
    "tme",
    "transfer_curve",
]

# A donor must keep at least this much mass (components stay nontrivial).
MIN_MASS = 1e-12


@dataclass(frozen=True)
class TmeReport:
    mixture: Mixture
    j_trace: np.ndarray = field(repr=False)
    iterations: int
    converged: bool

    @property
    def j(self) -> float:
        return float(self.j_trace[-1])


def candidate_perturbation(m: Mixture, donor: int, recipient: int, r: int) -> Optional[Mixture]:
    """Move the largest unimodality-preserving amount at cell ``r`` from donor to recipient.

    Returns ``None`` when nothing can move, when the donor would be emptied,
    or when either changed component fails re-validation.
    """
    n_comp, n_cells = m.weights.shape
    for idx in (donor, recipient):
        if not 0 <= idx < n_comp:
            raise IndexError(f"component {idx} outside 0..{n_comp - 1}")
    if not 0 <= r < n_cells:
        raise IndexError(f"cell {r} outside 0..{n_cells - 1}")
    if donor == recipient:
        raise IndexError("donor and recipient must differ")
    w = np.array(m.weights)
    give = give_bounds(w[donor])[0, r]
    take = take_bounds(w[recipient])[0, r]
    eps = min(give, take)
    if not eps > 0:
        return None
    if m.pi[donor] - eps * m.grid.dx < MIN_MASS:
        return None
    _apply(w, donor, recipient, r, give, take)
    if not (is_unimodal(w[donor]) and is_unimodal(w[recipient])):
        return None
    return Mixture(m.grid, w)


def _neighbors(row: np.ndarray, r: int) -> tuple[float, float]:
    left = row[r - 1] if r > 0 else 0.0
    right = row[r + 1] if r + 1 < row.size else 0.0
    return left, right


def _apply(w: np.ndarray, d: int, c: int, r: int, give: float, take: float) -> None:
    """Apply a saturating move in place, snapping the binding side exactly.

    Snapping keeps the saturated value equal to its neighbour so no
    rounding-sized dip appears; the pointwise sum moves by at most an ulp.
    """
    a, b = w[d, r], w[c, r]
    floor_d = min(_neighbors(w[d], r))
    if give <= take:
        new_a = floor_d
        new_b = b + (a - new_a)
        if math.isfinite(take):
            new_b = min(new_b, max(_neighbors(w[c], r)))
    else:
        new_b = max(_neighbors(w[c], r))
        new_a = max(a - (new_b - b), floor_d)
    w[d, r] = max(new_a, 0.0)
    w[c, r] = new_b


class _Deltas:
    """Table of J gains for every (donor, recipient, cell) saturating move."""

    def __init__(self, w: np.ndarray, dx: float):
        self.w = w
        self.dx = dx
        n_comp = w.shape[0]
        self.give = give_bounds(w)
        self.take = take_bounds(w)
        self.pi = w.sum(axis=1) * dx
        self.table = np.full((n_comp, n_comp, w.shape[1]), -np.inf)
        everyone = np.arange(n_comp)
        self._fill(everyone, everyone)

    def _fill(self, donors: np.ndarray, recipients: np.ndarray) -> None:
        dx = self.dx
        give = self.give[donors][:, None, :]
        take = self.take[recipients][None, :, :]
        eps = np.minimum(give, take)
        a = self.w[donors][:, None, :]
        b = self.w[recipients][None, :, :]
        pd = self.pi[donors][:, None, None]
        pc = self.pi[recipients][None, :, None]
        moved = eps * dx
        with np.errstate(invalid="ignore"):
            gain = dx * (xlogx(np.maximum(a - eps, 0.0)) - xlogx(a) + xlogx(b + eps) - xlogx(b))
            gain -= xlogx(pd - moved) - xlogx(pd) + xlogx(pc + moved) - xlogx(pc)
        ok = (eps > 0) & (pd - moved >= MIN_MASS) & np.isfinite(gain)
        ok &= donors[:, None, None] != recipients[None, :, None]
        self.table[np.ix_(donors, recipients)] = np.where(ok, gain, -np.inf)

    def refresh(self, rows) -> None:
        rows = np.asarray(sorted(set(rows)))
        self.give[rows] = give_bounds(self.w[rows])
        self.take[rows] = take_bounds(self.w[rows])
        self.pi[rows] = self.w[rows].sum(axis=1) * self.dx
        everyone = np.arange(self.w.shape[0])
        self._fill(rows, everyone)
        self._fill(everyone, rows)


def tme(
    f: GridDensity,
    init: Optional[Mixture] = None,
    *,
    rtol: float = 1e-10,
    max_iter: Optional[int] = None,
    callback: Optional[Callable[[Mixture, float], None]] = None,
) -> TmeReport:
    """Topological mixture estimate of ``f``.

    Parameters
    ----------
    f : GridDensity
        Nonnegative density, not identically zero.
    init : Mixture, optional
        Starting decomposition; defaults to the left-to-right sweep.  Must
        consist of ``ucat(f)`` unimodal components summing to ``f``.
    rtol : float
        Stop once the best move improves J by no more than ``rtol * J``.
    max_iter : int, optional
        Cap on accepted moves; defaults to ``50 * M * N``.
    callback : callable, optional
        Called as ``callback(mixture, j)`` after every accepted move.

    Returns
    -------
    TmeReport
        ``j_trace[0]`` is J of the initial mixture and ``j_trace[i]`` J after
        the i-th move.
    """
    mix = sweep_decompose(f) if init is None else init
    if init is not None and not mix.grid.isclose(f.grid):
        raise InvalidInputError("initial mixture lives on a different grid")
    n_comp, n_cells = mix.weights.shape
    cap = 50 * n_comp * n_cells if max_iter is None else int(max_iter)
    j = js_divergence(mix)
    trace = [j]
    if n_comp == 1:
        return TmeReport(mix, np.array(trace), 0, True)

    w = np.array(mix.weights)
    deltas = _Deltas(w, f.grid.dx)
    table = deltas.table
    converged = False
    iterations = 0
    while True:
        flat = int(np.argmax(table))
        gain = table.flat[flat]
        if not gain > rtol * max(j, 1e-300):
            converged = True
            break
        if iterations >= cap:
            break
        d, c, r = np.unravel_index(flat, table.shape)
        before = w[[d, c], r].copy()
        _apply(w, d, c, r, deltas.give[d, r], deltas.take[c, r])
        if not unimodal_rows(w[[d, c]]).all():
            w[[d, c], r] = before
            table[d, c, r] = -np.inf
            logger.debug("discarded move %s", (d, c, r))
            continue
        deltas.refresh([d, c])
        iterations += 1
        current = Mixture(f.grid, w)
        j_new = js_divergence(current)
        j = max(j_new, j)
        trace.append(j_new)
        if callback is not None:
            callback(current, j_new)
    if not converged:
        logger.warning("tme stopped at the iteration cap (%d) before converging", cap)
    return TmeReport(Mixture(f.grid, w), np.array(trace), iterations, converged)


def tme_reverse(f: GridDensity, **kwargs) -> TmeReport:
    """:func:`tme` started from the right-to-left sweep."""
    return tme(f, init=reverse_sweep_decompose(f), **kwargs)


def transfer_curve(m: Mixture, t: float) -> float:
    """J along a transfer of the middle component between its neighbours.

    At ``t`` the mixture is regrouped into ``w1 + (1 - t) w2`` and
    ``t w2 + w3``; ``t = 0`` merges the middle component left, ``t = 1``
    right.  With more than three components, the first ``M - 2`` form the
    left group and the last one the right group.
    """
    if not 0.0 <= t <= 1.0:
        raise InvalidParameterError(f"t must lie in [0, 1], got {t}")
    w = m.weights
    if w.shape[0] < 3:
        raise InvalidInputError("transfer_curve needs at least three components")
    left = w[:-2].sum(axis=0)
    middle, right = w[-2], w[-1]
    pair = np.vstack([left + (1.0 - t) * middle, t * middle + right])
    return js_divergence(Mixture(m.grid, pair))
