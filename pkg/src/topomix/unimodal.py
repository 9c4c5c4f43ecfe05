"""Unimodality, the sweep decomposition and unimodality-saturating bounds."""
from __future__ import annotations

import numpy as np

from .errors import InvalidInputError
from .grid_density import GridDensity
from .mixture import Mixture


def is_unimodal(y) -> bool:
    """True iff ``y`` is nonnegative and nondecreasing-then-nonincreasing.

    Plateaus are allowed anywhere; an all-zero or empty sequence counts.
    """
    y = np.asarray(y, dtype=float)
    if y.size and np.any(y < 0):
        return False
    steps = np.sign(np.diff(y))
    steps = steps[steps != 0]
    down = np.flatnonzero(steps < 0)
    return not (down.size and np.any(steps[down[0]:] > 0))


def unimodal_rows(w: np.ndarray) -> np.ndarray:
    """Vectorized :func:`is_unimodal` over the rows of a 2-D array."""
    w = np.asarray(w, dtype=float)
    d = np.diff(w, axis=1)
    fell = np.maximum.accumulate(d < 0, axis=1)
    rises_after_fall = np.any(fell[:, :-1] & (d[:, 1:] > 0), axis=1) if d.shape[1] > 1 else np.zeros(len(w), bool)
    return ~rises_after_fall & np.all(w >= 0, axis=1)


# Sweep arithmetic runs on integers below 2**53 so every subtraction is exact.
QUANTUM_BITS = 50


def sweep(values) -> np.ndarray:
    """Greedy left-to-right unimodal decomposition of a nonnegative sequence.

    Each pass follows the residual up to its first strict descent, then
    descends only by the residual's decreases and never rises again, so
    every later increase is left for the next pass.  The component is
    subtracted and the pass repeats until nothing is left.  Returns an
    (M, N) array of components.

    Values are quantized to a power-of-two unit near ``max * 2**-50`` first;
    structure below that level is treated as rounding noise.  A power of two
    keeps exact ratios between inputs exact.
    """
    f = np.array(values, dtype=float)
    if f.ndim != 1 or f.size == 0:
        raise InvalidInputError("sweep needs a nonempty 1-D sequence")
    if np.any(f < 0) or not np.all(np.isfinite(f)):
        raise InvalidInputError("sweep needs finite nonnegative values")
    top = f.max()
    if not top > 0:
        raise InvalidInputError("sweep of an all-zero sequence")
    unit = 2.0 ** (np.frexp(top)[1] - QUANTUM_BITS)
    r = np.round(f / unit)
    comps = []
    while np.any(r > 0):
        falls = np.flatnonzero(r[1:] < r[:-1])
        t = falls[0] if falls.size else r.size - 1
        c = r.copy()
        drops = np.maximum(r[t:-1] - r[t + 1:], 0.0)
        c[t + 1:] = np.maximum(r[t] - np.cumsum(drops), 0.0)
        comps.append(c)
        r = r - c
    return np.array(comps) * unit


def sweep_decompose(f: GridDensity) -> Mixture:
    return Mixture(f.grid, sweep(f.values))


def reverse_sweep_decompose(f: GridDensity) -> Mixture:
    """Sweep right-to-left: decompose the mirror image and mirror back."""
    return Mixture(f.grid, sweep(f.values[::-1])[:, ::-1])


def ucat(f) -> int:
    """Unimodal category: size of the minimal unimodal decomposition."""
    values = f.values if isinstance(f, GridDensity) else f
    return len(sweep(values))


def count_local_maxima(y) -> int:
    """Number of strict local maxima, a plateau counting once.

    The sequence is treated as padded with zeros at both ends.
    """
    y = np.concatenate([[0.0], np.asarray(y, dtype=float), [0.0]])
    keep = np.concatenate([[True], y[1:] != y[:-1]])
    z = y[keep]
    return int(np.sum((z[1:-1] > z[:-2]) & (z[1:-1] > z[2:])))


def _check_index(y, r):
    n = len(y) - 1
    if not 1 <= r <= n - 1:
        raise IndexError(f"index {r} outside 1..{n - 1}")


def peak_run(y) -> tuple[int, int]:
    """First and last index attaining the global maximum."""
    y = np.asarray(y)
    top = np.flatnonzero(y == y.max())
    return int(top[0]), int(top[-1])


def eps_minus(y, r: int) -> float:
    """Largest decrement of ``y[r]`` keeping ``y`` nonnegative and unimodal.

    ``y`` must start and end with a zero; ``r`` indexes its interior.
    """
    y = np.asarray(y, dtype=float)
    _check_index(y, r)
    return max(float(y[r] - min(y[r - 1], y[r + 1])), 0.0)


def eps_plus(y, r: int) -> float:
    """Largest increment of ``y[r]`` keeping ``y`` unimodal (may be ``inf``)."""
    y = np.asarray(y, dtype=float)
    _check_index(y, r)
    lo, hi = peak_run(y)
    if lo - 1 <= r <= hi + 1:
        return float("inf")
    return max(float(max(y[r - 1], y[r + 1]) - y[r]), 0.0)


def give_bounds(w: np.ndarray) -> np.ndarray:
    """:func:`eps_minus` for every cell of every row of ``w`` (zero-padded)."""
    w = np.atleast_2d(np.asarray(w, dtype=float))
    p = np.pad(w, ((0, 0), (1, 1)))
    return np.maximum(w - np.minimum(p[:, :-2], p[:, 2:]), 0.0)


def take_bounds(w: np.ndarray) -> np.ndarray:
    """:func:`eps_plus` for every cell of every row of ``w`` (zero-padded)."""
    w = np.atleast_2d(np.asarray(w, dtype=float))
    p = np.pad(w, ((0, 0), (1, 1)))
    out = np.maximum(np.maximum(p[:, :-2], p[:, 2:]) - w, 0.0)
    top = w == w.max(axis=1, keepdims=True)
    n = w.shape[1]
    lo = top.argmax(axis=1)
    hi = n - 1 - top[:, ::-1].argmax(axis=1)
    k = np.arange(n)
    near = (k[None, :] >= lo[:, None] - 1) & (k[None, :] <= hi[:, None] + 1)
    out[near] = np.inf
    return out
