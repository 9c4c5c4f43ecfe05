"""Topological mixture estimation for one-dimensional densities."""

__version__ = "0.1.0"

from .bandwidth import (
    BandwidthGrid,
    MeasureKind,
    TdeResult,
    UcatProfile,
    default_bandwidth_grid,
    estimate_ucat,
    general_blur_budget,
    select_bandwidth,
    tde,
    topological_blur_budget,
    ucat_profile,
)
from .grid_density import Grid, GridDensity, convolve_gaussian, entropy, gaussian_density, kde, resample
from .mixture import Mixture, js_divergence
from .mixture_opt import TmeReport, candidate_perturbation, tme, transfer_curve
from .pipeline import PipelineConfig, PipelineResult, deblur_only, reblur_tme
from .unimodal import eps_minus, eps_plus, is_unimodal, sweep_decompose, ucat
