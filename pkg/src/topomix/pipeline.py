"""Deblur/reblur mixture estimation from a raw sample.

The mixture is optimized on the KDE at the smallest bandwidth consistent
with the estimated unimodal category, then every component is blurred by
``sqrt(h_hat^2 - h_minus^2)`` so the mixture density becomes the KDE at
``h_hat`` again.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bandwidth import (
    DEFAULT_BANDWIDTH_COUNT,
    DEFAULT_HI_FRACTION,
    DEFAULT_LO_FRACTION,
    DEFAULT_MEASURE,
    BandwidthGrid,
    MeasureKind,
    TdeResult,
    default_bandwidth_grid,
    tde,
)
from .grid_density import Grid, GridDensity, convolve_values, kde
from .mixture import Mixture
from .mixture_opt import TmeReport, tme
from .unimodal import sweep_decompose, ucat

logger = logging.getLogger(__name__)

DEFAULT_CELLS = 100
# Working-grid padding in units of h_hat; matches the blur kernel's truncation
# so reflection at the edges never reaches the data.
PAD_BANDWIDTHS = 5.0


@dataclass(frozen=True)
class PipelineConfig:
    measure: MeasureKind = DEFAULT_MEASURE
    n_bandwidths: int = DEFAULT_BANDWIDTH_COUNT
    bandwidths: Optional[BandwidthGrid] = None
    n_cells: int = DEFAULT_CELLS
    rtol: float = 1e-10
    threads: int = 1

    def bandwidth_grid(self, sample) -> BandwidthGrid:
        if self.bandwidths is not None:
            return self.bandwidths
        return default_bandwidth_grid(
            sample, self.n_bandwidths, DEFAULT_LO_FRACTION, DEFAULT_HI_FRACTION
        )


@dataclass(frozen=True)
class PipelineResult:
    tde: TdeResult
    deblurred: TmeReport
    reblurred: Mixture
    delta_h: float
    kde_at_h_hat: GridDensity
    kde_at_h_minus: GridDensity = field(repr=False)

    @property
    def grid(self) -> Grid:
        return self.kde_at_h_hat.grid


def working_grid(sample, h_hat: float, n_cells: int = DEFAULT_CELLS) -> Grid:
    """Sample hull padded by ``5 h_hat`` on each side, ``n_cells`` cells."""
    x = np.asarray(sample, dtype=float)
    pad = PAD_BANDWIDTHS * h_hat
    return Grid.from_span(x.min() - pad, x.max() + pad, n_cells)


def _prepare(sample, config: PipelineConfig):
    x = np.asarray(sample, dtype=float).ravel()
    result = tde(x, config.measure, config.bandwidth_grid(x), threads=config.threads)
    grid = working_grid(x, result.h_hat, config.n_cells)
    f_minus = kde(x, result.h_minus, grid)
    u = ucat(f_minus)
    if u != result.m_hat:
        logger.warning(
            "KDE at h_minus=%g has ucat %d on the working grid (profile says %d)",
            result.h_minus, u, result.m_hat,
        )
    return x, result, grid, f_minus


def deblur_only(sample, config: PipelineConfig = PipelineConfig()) -> TmeReport:
    """TME of the KDE at the minimal persistent bandwidth."""
    _, _, _, f_minus = _prepare(sample, config)
    return tme(f_minus, rtol=config.rtol)


def reblur(mixture: Mixture, delta_h: float) -> Mixture:
    """Blur every weighted component by a Gaussian of width ``delta_h``."""
    if delta_h == 0:
        return mixture
    return Mixture(mixture.grid, convolve_values(mixture.weights, delta_h, mixture.grid.dx))


def reblur_tme(sample, config: PipelineConfig = PipelineConfig()) -> PipelineResult:
    x, result, grid, f_minus = _prepare(sample, config)
    report = tme(f_minus, rtol=config.rtol)
    delta_h = math.sqrt(max(result.h_hat**2 - result.h_minus**2, 0.0))
    return PipelineResult(
        tde=result,
        deblurred=report,
        reblurred=reblur(report.mixture, delta_h),
        delta_h=delta_h,
        kde_at_h_hat=kde(x, result.h_hat, grid),
        kde_at_h_minus=f_minus,
    )


def panels(result: PipelineResult, rtol: float = 1e-10) -> dict[str, Mixture]:
    """The four decompositions: sweep and TME at ``h_hat``, deblurred, reblurred."""
    f_hat = result.kde_at_h_hat
    return {
        "sweep": sweep_decompose(f_hat),
        "tme": tme(f_hat, rtol=rtol).mixture,
        "deblurred": result.deblurred.mixture,
        "reblurred": result.reblurred,
    }
