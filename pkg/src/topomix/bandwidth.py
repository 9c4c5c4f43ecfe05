"""Topological density estimation: bandwidth choice by persistence of ucat.

For each proposed bandwidth the unimodal category of the Gaussian KDE is
computed.  The estimated category is the value occupying the most
bandwidth "mass", and the bandwidth is the weighted median of the
bandwidths realizing it.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ContractError, DegenerateSampleError, InvalidInputError, InvalidParameterError
from .grid_density import Grid, GridDensity, convolve_gaussian, kde
from .unimodal import ucat


class MeasureKind(str, enum.Enum):
    COUNTING = "counting"
    INVERSE_LEBESGUE = "inverse-lebesgue"

    def __str__(self):
        return self.value


DEFAULT_MEASURE = MeasureKind.COUNTING
DEFAULT_BANDWIDTH_COUNT = 64
# Proposal range as fractions of the sample range.
DEFAULT_LO_FRACTION = 1e-3
DEFAULT_HI_FRACTION = 0.5
# Scale-adapted evaluation grids: cells per bandwidth and padding in bandwidths.
CELLS_PER_BANDWIDTH = 4
PAD_BANDWIDTHS = 3.0


@dataclass(frozen=True)
class BandwidthGrid:
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size == 0:
            raise InvalidParameterError("bandwidth grid is empty")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise InvalidParameterError("bandwidths must be positive and finite")
        if np.any(np.diff(v) <= 0):
            raise InvalidParameterError("bandwidths must be strictly increasing")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class UcatProfile:
    bandwidths: BandwidthGrid
    ucats: np.ndarray

    def __post_init__(self):
        u = np.array(self.ucats, dtype=int).ravel()
        if u.size != len(self.bandwidths):
            raise InvalidInputError("profile lengths differ")
        if np.any(u < 1):
            raise InvalidInputError("unimodal categories are at least 1")
        u.setflags(write=False)
        object.__setattr__(self, "ucats", u)


@dataclass(frozen=True)
class TdeResult:
    m_hat: int
    h_hat: float
    h_minus: float
    h_sup: float
    blur_budget: float
    measure: MeasureKind = DEFAULT_MEASURE
    profile: Optional[UcatProfile] = field(default=None, repr=False, compare=False)

    def as_dict(self) -> dict:
        return {
            "m_hat": self.m_hat,
            "h_hat": self.h_hat,
            "h_minus": self.h_minus,
            "h_sup": self.h_sup,
            "blur_budget": self.blur_budget,
            "measure": MeasureKind(self.measure).value,
        }


def sample_range(sample) -> float:
    x = np.asarray(sample, dtype=float).ravel()
    if x.size == 0:
        raise InvalidInputError("empty sample")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("sample contains non-finite values")
    span = float(x.max() - x.min())
    if not span > 0:
        raise DegenerateSampleError("sample needs at least two distinct values")
    return span


def default_bandwidth_grid(
    sample,
    count: int = DEFAULT_BANDWIDTH_COUNT,
    lo_fraction: float = 1e-3,
    hi_fraction: float = 1.0,
) -> BandwidthGrid:
    """Log-spaced bandwidths from ``lo_fraction`` to ``hi_fraction`` of the sample range."""
    if count < 2:
        raise InvalidParameterError(f"need at least two bandwidths, got {count}")
    if not 0 < lo_fraction < hi_fraction:
        raise InvalidParameterError("need 0 < lo_fraction < hi_fraction")
    span = sample_range(sample)
    return BandwidthGrid(np.geomspace(lo_fraction * span, hi_fraction * span, int(count)))


def scaled_grid(sample, h: float) -> Grid:
    """Evaluation grid resolving bandwidth ``h``: cells of ``h / 4`` over the sample hull padded by ``3 h``."""
    x = np.asarray(sample, dtype=float)
    lo = float(x.min()) - PAD_BANDWIDTHS * h
    hi = float(x.max()) + PAD_BANDWIDTHS * h
    n = int(math.ceil((hi - lo) / (h / CELLS_PER_BANDWIDTH)))
    return Grid.from_span(lo, hi, n)


def ucat_profile(
    sample,
    grid: BandwidthGrid,
    eval_grid: Optional[Grid] = None,
    threads: int = 1,
) -> UcatProfile:
    """ucat of the KDE at every proposed bandwidth.

    With ``eval_grid`` given, every KDE is evaluated there.  Otherwise each
    bandwidth gets its own :func:`scaled_grid`, so the resolution relative
    to the kernel width is the same at every scale.
    """
    x = np.asarray(sample, dtype=float).ravel()
    if x.size == 0:
        raise InvalidInputError("empty sample")

    def one(h):
        g = eval_grid if eval_grid is not None else scaled_grid(x, h)
        return ucat(kde(x, h, g))

    hs = grid.values
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            ucats = list(pool.map(one, hs))
    else:
        ucats = [one(h) for h in hs]
    return UcatProfile(grid, np.array(ucats))


def measure_weights(grid: BandwidthGrid, mu: MeasureKind) -> np.ndarray:
    """Weight of each proposed bandwidth under ``mu``.

    Inverse-Lebesgue weighs ``h_i`` by the length of its cell in ``1/h``:
    cell boundaries sit halfway between consecutive ``1/h`` values and the
    end cells stop at the first and last ``1/h``.
    """
    mu = MeasureKind(mu)
    h = grid.values
    if mu is MeasureKind.COUNTING or h.size == 1:
        return np.ones(h.size)
    inv = 1.0 / h
    bounds = np.concatenate([[inv[0]], 0.5 * (inv[1:] + inv[:-1]), [inv[-1]]])
    return bounds[:-1] - bounds[1:]


def estimate_ucat(profile: UcatProfile, mu: MeasureKind = DEFAULT_MEASURE) -> int:
    """The ucat value carrying the most measure; ties go to the smaller value."""
    w = measure_weights(profile.bandwidths, mu)
    values = np.unique(profile.ucats)
    mass = np.array([w[profile.ucats == m].sum() for m in values])
    best = mass.max()
    # relative slack so float summation order cannot break a genuine tie
    return int(values[np.flatnonzero(mass >= best * (1 - 1e-12))[0]])


def _persistence_set(profile: UcatProfile, m_hat: int) -> np.ndarray:
    idx = np.flatnonzero(profile.ucats == m_hat)
    if idx.size == 0:
        raise ContractError(f"ucat {m_hat} does not occur in the profile")
    return idx


def weighted_lower_median(values: np.ndarray, weights: np.ndarray) -> float:
    """Smallest value whose cumulative weight reaches half the total."""
    order = np.argsort(values)
    cum = np.cumsum(weights[order])
    k = np.searchsorted(cum, 0.5 * cum[-1] * (1 - 1e-12))
    return float(values[order][min(k, order.size - 1)])


def select_bandwidth(profile: UcatProfile, m_hat: int, mu: MeasureKind = DEFAULT_MEASURE) -> TdeResult:
    """Nominal (median), minimal and maximal bandwidths realizing ``m_hat``."""
    idx = _persistence_set(profile, m_hat)
    h = profile.bandwidths.values
    w = measure_weights(profile.bandwidths, mu)
    h_hat = weighted_lower_median(h[idx], w[idx])
    h_minus, h_sup = float(h[idx].min()), float(h[idx].max())
    budget = math.sqrt(max(h_sup**2 - h_hat**2, 0.0))
    return TdeResult(int(m_hat), h_hat, h_minus, h_sup, budget, MeasureKind(mu), profile)


def topological_blur_budget(profile: UcatProfile, m_hat: int) -> float:
    """Blur tolerated by every bandwidth realizing ``m_hat``: ``sqrt(sup^2 - inf^2)``."""
    idx = _persistence_set(profile, m_hat)
    h = profile.bandwidths.values[idx]
    return math.sqrt(max(h.max() ** 2 - h.min() ** 2, 0.0))


def general_blur_budget(f: GridDensity, grid: BandwidthGrid) -> float:
    """Largest proposed bandwidth whose Gaussian blur leaves ucat(f) unchanged (0 if none)."""
    base = ucat(f)
    ok = [h for h in grid.values if ucat(convolve_gaussian(f, h)) == base]
    return float(max(ok)) if ok else 0.0


def tde(
    sample,
    mu: MeasureKind = DEFAULT_MEASURE,
    bandwidths: Optional[BandwidthGrid] = None,
    eval_grid: Optional[Grid] = None,
    threads: int = 1,
) -> TdeResult:
    """Run the full bandwidth selection on a raw sample."""
    if bandwidths is None:
        bandwidths = default_bandwidth_grid(
            sample, DEFAULT_BANDWIDTH_COUNT, DEFAULT_LO_FRACTION, DEFAULT_HI_FRACTION
        )
    profile = ucat_profile(sample, bandwidths, eval_grid, threads=threads)
    m_hat = estimate_ucat(profile, mu)
    return select_bandwidth(profile, m_hat, mu)
