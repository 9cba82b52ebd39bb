"""Monte Carlo summaries of transformed Dirichlet posteriors.

Everything here flows through one pipeline: draw full probability vectors
from Dir(params), push them through an ambiguity measure, and summarize
the resulting scalar sample. Streams are derived from a single user seed
with explicit spawn keys, so any repeat structure is reproducible without
coordination between callers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .exceptions import DomainError, TooFewSamples
from .measures import MeasureKind, ambiguity_array
from .numerics import DirichletParams, _dirichlet_draws, make_generator

__all__ = [
    "PosteriorSummary",
    "DensityEstimate",
    "MODE_BINS",
    "sample_transformed",
    "summarize",
    "histogram_mode",
    "density_with_uncertainty",
]

# Histogram resolution used for the mode convention. Mode estimates are
# reported as the midpoint of the fullest bin on a fixed [0, 1] grid; a
# fixed bin count keeps the convention stable across sample sizes.
MODE_BINS = 256

DEFAULT_QUANTILE_LEVELS = (0.025, 0.25, 0.5, 0.75, 0.975)

_MIN_SAMPLES = 1000


@dataclass(frozen=True)
class PosteriorSummary:
    """Scalar Monte Carlo summary of a transformed posterior sample.

    mean/sd are plain sample moments; quantiles use linear interpolation
    between order statistics; the credible interval is equal-tailed.
    """

    mean: float
    mode: float
    sd: float
    quantiles: Mapping[float, float]
    credible_interval: tuple[float, float, float]

    def __post_init__(self):
        lo, hi, mass = self.credible_interval
        if not (0.0 < mass < 1.0):
            raise DomainError(f"credible mass {mass!r} outside (0, 1)")
        if lo > hi:
            raise DomainError(f"credible interval [{lo!r}, {hi!r}] inverted")
        levels = sorted(self.quantiles)
        values = [self.quantiles[p] for p in levels]
        if any(b < a for a, b in zip(values, values[1:])):
            raise DomainError("quantile values not monotone in level")


@dataclass(frozen=True)
class DensityEstimate:
    """Histogram density with repeat-to-repeat sampling uncertainty.

    bin_edges has one more entry than the per-bin arrays. median_density
    is the across-repeat median of normalized histogram heights; iqr_lo
    and iqr_hi are the across-repeat quartiles, so the band reflects pure
    Monte Carlo variation at the chosen samples_per_repeat.
    """

    bin_edges: np.ndarray
    median_density: np.ndarray
    iqr_lo: np.ndarray
    iqr_hi: np.ndarray

    def __post_init__(self):
        n_bins = len(self.bin_edges) - 1
        for name in ("median_density", "iqr_lo", "iqr_hi"):
            if len(getattr(self, name)) != n_bins:
                raise DomainError(f"{name} must have {n_bins} entries")


def histogram_mode(values: np.ndarray) -> float:
    """Mode by the fixed-histogram convention: midpoint of the fullest of
    256 equal bins on [0, 1], first bin winning ties.

    A constant sample defeats the convention (every bin but one is empty,
    and which one depends on rounding), so the constant itself is returned.
    """
    values = np.asarray(values, dtype=float)
    low = float(values.min())
    if low == float(values.max()):
        return low
    hist, edges = np.histogram(values, bins=MODE_BINS, range=(0.0, 1.0))
    top = int(np.argmax(hist))
    return float(0.5 * (edges[top] + edges[top + 1]))


def sample_transformed(
    params: DirichletParams,
    measure: MeasureKind,
    count: int,
    seed: int,
) -> np.ndarray:
    """Draw `count` ambiguity values from the pushforward of Dir(params)."""
    if count < 1:
        raise DomainError(f"count must be positive, got {count}")
    rng = make_generator(seed)
    proper, cs = _dirichlet_draws(params, count, rng)
    return ambiguity_array(proper, cs, measure)


def summarize(
    samples: Sequence[float] | np.ndarray,
    credible_mass: float = 0.95,
    quantile_levels: Sequence[float] = DEFAULT_QUANTILE_LEVELS,
) -> PosteriorSummary:
    """Summarize a scalar sample in [0, 1].

    Raises:
        TooFewSamples: below 1000 points, where the histogram mode and the
            tail quantiles are too noisy to report.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1:
        raise DomainError(f"expected a 1-d sample, got shape {x.shape}")
    if x.size < _MIN_SAMPLES:
        raise TooFewSamples(f"need at least {_MIN_SAMPLES} samples, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DomainError("sample contains non-finite values")
    if x.min() < 0.0 or x.max() > 1.0:
        raise DomainError("sample values must lie in [0, 1]")
    if not (0.0 < credible_mass < 1.0):
        raise DomainError(f"credible mass {credible_mass!r} outside (0, 1)")

    mean = float(np.mean(x))
    sd = float(np.std(x))

    levels = tuple(sorted(set(float(p) for p in quantile_levels)))
    if any(not 0.0 <= p <= 1.0 for p in levels):
        raise DomainError("quantile levels must lie in [0, 1]")
    q_values = np.quantile(x, levels) if levels else np.empty(0)
    quantiles = {p: float(v) for p, v in zip(levels, q_values)}

    tail = 0.5 * (1.0 - credible_mass)
    lo, hi = np.quantile(x, [tail, 1.0 - tail])

    mode = histogram_mode(x)

    return PosteriorSummary(
        mean=mean,
        mode=mode,
        sd=sd,
        quantiles=quantiles,
        credible_interval=(float(lo), float(hi), float(credible_mass)),
    )


def density_with_uncertainty(
    params: DirichletParams,
    measure: MeasureKind,
    samples_per_repeat: int = 100_000,
    bins: int = 256,
    repeats: int = 100,
    seed: int = 0,
) -> DensityEstimate:
    """Histogram density of the transformed posterior with an IQR band.

    Repeat r draws from the stream (seed, spawn r), so the repeats are
    independent and individually reproducible. Each repeat's histogram is
    normalized to integrate to one; the returned band summarizes the
    per-bin spread across repeats.
    """
    if samples_per_repeat < 1 or bins < 1 or repeats < 1:
        raise DomainError("samples_per_repeat, bins, and repeats must be positive")
    edges = np.linspace(0.0, 1.0, bins + 1)
    heights = np.empty((repeats, bins))
    for r in range(repeats):
        rng = make_generator(seed, (r,))
        proper, cs = _dirichlet_draws(params, samples_per_repeat, rng)
        values = ambiguity_array(proper, cs, measure)
        heights[r], _ = np.histogram(values, bins=edges, density=True)
    lo, med, hi = np.percentile(heights, [25.0, 50.0, 75.0], axis=0)
    return DensityEstimate(
        bin_edges=edges,
        median_density=med,
        iqr_lo=lo,
        iqr_hi=hi,
    )
