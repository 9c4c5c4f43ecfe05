"""Recovery benchmark on the f_km family of equal-weight Gaussian mixtures.

``f_km`` has ``m`` components at ``j / (m + 1)`` with common width
``2**-(k + 2) / (m + 1)**2``; larger ``k`` means narrower, better separated
bumps.
"""
from __future__ import annotations

import csv
import io
import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bandwidth import DEFAULT_MEASURE, MeasureKind, scaled_grid, tde
from .errors import InvalidParameterError
from .grid_density import Grid, GridDensity, gaussian_density, kde
from .unimodal import count_local_maxima, ucat


@dataclass(frozen=True)
class FkmSpec:
    k: int
    m: int

    def __post_init__(self):
        if not (isinstance(self.k, (int, np.integer)) and 1 <= self.k <= 3):
            raise InvalidParameterError(f"k must be an integer in 1..3, got {self.k!r}")
        if not (isinstance(self.m, (int, np.integer)) and 1 <= self.m <= 10):
            raise InvalidParameterError(f"m must be an integer in 1..10, got {self.m!r}")

    @property
    def means(self) -> np.ndarray:
        return np.arange(1, self.m + 1) / (self.m + 1)

    @property
    def sigma(self) -> float:
        return 2.0 ** -(self.k + 2) / (self.m + 1) ** 2


def fkm_density(spec: FkmSpec, grid: Grid) -> GridDensity:
    vals = np.mean([gaussian_density(mu, spec.sigma, grid).values for mu in spec.means], axis=0)
    return GridDensity(grid, vals).normalized()


def sample_fkm(spec: FkmSpec, n: int, seed: int) -> np.ndarray:
    """``n`` draws: a uniformly chosen component, then a Gaussian draw from it."""
    if n < 1:
        raise InvalidParameterError(f"sample size must be positive, got {n}")
    rng = np.random.default_rng(seed)
    j = rng.integers(0, spec.m, size=n)
    return rng.normal(spec.means[j], spec.sigma)


def true_ucat(spec: FkmSpec, n_cells: int = 4000) -> int:
    """ucat of the analytic density on a fine grid over [-0.5, 1.5]."""
    return ucat(fkm_density(spec, Grid.from_span(-0.5, 1.5, n_cells)))


@dataclass(frozen=True)
class RecoveryStats:
    spec: FkmSpec
    n: int
    trials: int
    ucat_hits: int
    ucat_distribution: dict = field(default_factory=dict)
    lmax_distribution: dict = field(default_factory=dict)
    true_ucat: int = 0
    measure: str = DEFAULT_MEASURE.value
    seed: int = 0

    @property
    def hit_rate(self) -> float:
        return self.ucat_hits / self.trials

    def as_dict(self) -> dict:
        return {
            "k": self.spec.k,
            "m": self.spec.m,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "measure": self.measure,
            "true_ucat": self.true_ucat,
            "ucat_hits": self.ucat_hits,
            "hit_rate": self.hit_rate,
            "ucat_distribution": {str(k): v for k, v in sorted(self.ucat_distribution.items())},
            "lmax_distribution": {str(k): v for k, v in sorted(self.lmax_distribution.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)


CSV_FIELDS = ["k", "m", "n", "trials", "hits", "kind", "value", "count"]


def stats_to_csv(rows: list[RecoveryStats]) -> str:
    """One line per histogram bin; ``kind`` is ``ucat`` or ``lmax``."""
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(CSV_FIELDS)
    for s in rows:
        head = [s.spec.k, s.spec.m, s.n, s.trials, s.ucat_hits]
        for kind, hist in (("ucat", s.ucat_distribution), ("lmax", s.lmax_distribution)):
            for value, count in sorted(hist.items()):
                out.writerow(head + [kind, value, count])
    return buf.getvalue()


def _trial(spec: FkmSpec, n: int, mu: MeasureKind, seed: int) -> tuple[int, int]:
    x = sample_fkm(spec, n, seed)
    result = tde(x, mu)
    f_hat = kde(x, result.h_hat, scaled_grid(x, result.h_hat))
    return result.m_hat, count_local_maxima(f_hat.values)


def evaluate_recovery(
    spec: FkmSpec,
    n: int = 500,
    trials: int = 20,
    mu: MeasureKind = DEFAULT_MEASURE,
    seed: int = 0,
    threads: int = 1,
) -> RecoveryStats:
    """Run TDE on ``trials`` independent samples; trial ``i`` uses seed ``seed + i``."""
    if trials < 1:
        raise InvalidParameterError(f"need at least one trial, got {trials}")
    mu = MeasureKind(mu)
    seeds = [seed + i for i in range(trials)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(lambda s: _trial(spec, n, mu, s), seeds))
    else:
        results = [_trial(spec, n, mu, s) for s in seeds]
    truth = true_ucat(spec)
    m_hats = [r[0] for r in results]
    return RecoveryStats(
        spec=spec,
        n=n,
        trials=trials,
        ucat_hits=sum(m == truth for m in m_hats),
        ucat_distribution=dict(Counter(m_hats)),
        lmax_distribution=dict(Counter(r[1] for r in results)),
        true_ucat=truth,
        measure=mu.value,
        seed=seed,
    )
