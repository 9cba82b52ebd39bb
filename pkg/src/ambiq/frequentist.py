"""Point estimation of ambiguity from finite annotation samples.

The plug-in estimator applies a measure to the empirical response
frequencies. For the quadratic-entropy measure its expectation under
multinomial sampling has a closed form, so its bias is exact and known
to be negative at every finite sample size: squared frequencies are
biased-up estimates of squared probabilities, and the measure subtracts
them. Bayesian alternatives report the posterior mean or mode under a
symmetric Dirichlet prior; their bias is estimated by Monte Carlo over
repeated count draws.

Everything that enumerates count vectors exhaustively is deliberately
capped at small n and few categories; it exists as an oracle to validate
the closed forms, not as a production path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .exceptions import DomainError, EmptySample, TooLarge
from .measures import (
    MeasureKind,
    ProbabilityVector,
    ambiguity,
    ambiguity_array,
    ambiguity_new,
)
from .numerics import DirichletParams, _dirichlet_draws, ln_gamma, make_generator
from .posterior_analytics import expected_amb, expected_amb_modified, posterior_update
from .posterior_sampling import histogram_mode

__all__ = [
    "CountVector",
    "BiasSeries",
    "ESTIMATOR_NAMES",
    "plugin_estimate",
    "expected_plugin",
    "bias_plugin",
    "exhaustive_expected_estimator",
    "bayes_point_estimates",
    "bias_curve",
]

# Exhaustive enumeration caps: the count simplex has C(n + M - 1, M - 1)
# points, and the oracle is only ever needed where that stays tiny.
_EXHAUSTIVE_MAX_N = 12
_EXHAUSTIVE_MAX_CATEGORIES = 4

ESTIMATOR_NAMES = ("plugin", "bayes_mean", "bayes_mode")

_DEFAULT_MODE_SAMPLES = 20_000


@dataclass(frozen=True)
class CountVector:
    """Response counts: one integer per proper category plus can't-solve."""

    proper: tuple[int, ...]
    cs: int = 0

    def __post_init__(self):
        for v in tuple(self.proper) + (self.cs,):
            if not isinstance(v, (int, np.integer)):
                raise DomainError(f"counts must be integers; got {v!r}")
        object.__setattr__(self, "proper", tuple(int(v) for v in self.proper))
        object.__setattr__(self, "cs", int(self.cs))
        if len(self.proper) < 1:
            raise DomainError("need at least one proper category")
        if any(v < 0 for v in self.proper) or self.cs < 0:
            raise DomainError("counts must be nonnegative")

    @property
    def n_proper(self) -> int:
        return len(self.proper)

    @property
    def total(self) -> int:
        return sum(self.proper) + self.cs

    def as_probability_vector(self) -> ProbabilityVector:
        """Empirical frequencies.

        Raises:
            EmptySample: with no responses there is no frequency vector.
        """
        n = self.total
        if n == 0:
            raise EmptySample("cannot form frequencies from zero responses")
        return ProbabilityVector(
            proper=tuple(v / n for v in self.proper), cs=self.cs / n
        )


@dataclass(frozen=True)
class BiasSeries:
    """Bias of several estimators across sample sizes.

    bias and stderr map an estimator label to one value per entry of
    n_values; stderr is zero wherever the expectation was computed
    exactly rather than by Monte Carlo.
    """

    n_values: tuple[int, ...]
    labels: tuple[str, ...]
    bias: Mapping[str, tuple[float, ...]]
    stderr: Mapping[str, tuple[float, ...]]
    measure: MeasureKind = field(default=MeasureKind.NEW)

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise DomainError("n_values must be strictly increasing")
        if any(n < 1 for n in self.n_values):
            raise DomainError("n_values must be positive")
        for label in self.labels:
            for table in (self.bias, self.stderr):
                if label not in table or len(table[label]) != len(self.n_values):
                    raise DomainError(f"missing or misshaped series for {label!r}")


def plugin_estimate(counts: CountVector, measure: MeasureKind = MeasureKind.NEW) -> float:
    """Measure applied to the empirical frequencies.

    Equals 1 whenever every response was can't-solve, and raises
    EmptySample when there are no responses at all.
    """
    return ambiguity(counts.as_probability_vector(), measure)


def expected_plugin(q: ProbabilityVector, n: int) -> float:
    """Exact sampling expectation of the quadratic-entropy plug-in.

    With S = sum_k q_k^2 over proper categories and c = q_cs,

        E = [1 - (1 - c^n)/n] - [1/(1-c) - (1 - c^n)/(n (1-c)^2)] S,

    degenerating to 1 when c = 1. Other measures have no comparably
    simple form; use exhaustive_expected_estimator or Monte Carlo.
    """
    if n < 1:
        raise DomainError(f"sample size must be positive, got {n}")
    if q.is_degenerate:
        return 1.0
    c = q.cs
    survival = (1.0 - c**n) / n
    s2 = math.fsum(v * v for v in q.proper)
    one_minus = 1.0 - c
    factor = 1.0 / one_minus - survival / one_minus**2
    return (1.0 - survival) - factor * s2


def bias_plugin(q: ProbabilityVector, n: int) -> float:
    """expected_plugin minus the true value; strictly negative unless the
    true value is an endpoint case, and shrinking like 1/n."""
    return expected_plugin(q, n) - ambiguity_new(q)


def _compositions(total: int, parts: int):
    """All nonnegative integer vectors of the given length summing to total."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


def exhaustive_expected_estimator(
    q: ProbabilityVector,
    n: int,
    estimator: Callable[[CountVector], float],
) -> float:
    """Exact E[estimator(counts)] by enumerating the whole count simplex.

    Multinomial probabilities come from log-gamma factorials, so the sum
    is exact to rounding even at the enumeration caps.

    Raises:
        TooLarge: beyond n = 12 or 4 total categories, where enumeration
            stops being an oracle and starts being a production path.
    """
    if n < 1:
        raise DomainError(f"sample size must be positive, got {n}")
    m = q.n_proper + 1
    if n > _EXHAUSTIVE_MAX_N or m > _EXHAUSTIVE_MAX_CATEGORIES:
        raise TooLarge(
            f"exhaustive enumeration capped at n <= {_EXHAUSTIVE_MAX_N} and "
            f"{_EXHAUSTIVE_MAX_CATEGORIES} categories; got n = {n}, M = {m}"
        )
    probs = (*q.proper, q.cs)
    ln_n_fact = ln_gamma(n + 1.0)
    terms = []
    for combo in _compositions(n, m):
        if any(k > 0 and p == 0.0 for k, p in zip(combo, probs)):
            continue
        ln_pmf = ln_n_fact - math.fsum(ln_gamma(k + 1.0) for k in combo)
        ln_pmf += math.fsum(k * math.log(p) for k, p in zip(combo, probs) if k > 0)
        value = estimator(CountVector(proper=combo[:-1], cs=combo[-1]))
        terms.append(math.exp(ln_pmf) * value)
    return math.fsum(terms)


def _posterior_for(counts: CountVector, prior_beta: float) -> DirichletParams:
    if prior_beta <= 0.0:
        raise DomainError(f"prior concentration must be positive, got {prior_beta!r}")
    prior = DirichletParams.symmetric(counts.n_proper, prior_beta)
    return posterior_update(prior, counts)


def _bayes_mean(post: DirichletParams, measure: MeasureKind, values) -> float:
    if measure is MeasureKind.NEW:
        return expected_amb(post)
    if measure is MeasureKind.MODIFIED:
        return expected_amb_modified(post)
    return float(np.mean(values))


def bayes_point_estimates(
    counts: CountVector,
    prior_beta: float = 1.0,
    measure: MeasureKind = MeasureKind.NEW,
    seed: int = 0,
    mc_samples: int = _DEFAULT_MODE_SAMPLES,
) -> tuple[float, float]:
    """(posterior mean, posterior mode) of the measure under a symmetric
    Dirichlet prior.

    The mean is closed-form for the quadratic measures and Monte Carlo
    for total variation; the mode always comes from the histogram-mode
    convention on an MC sample, since the pushforward mode has no closed
    form for any measure.
    """
    post = _posterior_for(counts, prior_beta)
    rng = make_generator(seed)
    proper, cs = _dirichlet_draws(post, mc_samples, rng)
    values = ambiguity_array(proper, cs, measure)
    return _bayes_mean(post, measure, values), histogram_mode(values)


def _estimator_label(name: str, prior_beta: float) -> str:
    if name == "plugin":
        return "plugin"
    return f"{name}({prior_beta:g})"


def bias_curve(
    q: ProbabilityVector,
    n_values: Sequence[int],
    estimators: Sequence[str] = ESTIMATOR_NAMES,
    prior_beta: float = 1.0,
    measure: MeasureKind = MeasureKind.NEW,
    mc_repeats: int = 200,
    seed: int = 0,
    mc_samples_mode: int = _DEFAULT_MODE_SAMPLES,
) -> BiasSeries:
    """Bias of the requested estimators at each sample size.

    The plug-in column is exact wherever possible (closed form for the
    quadratic-entropy measure, exhaustive enumeration for small problems
    otherwise) and falls back to Monte Carlo beyond the enumeration caps.
    Bayesian columns are always Monte Carlo: counts are redrawn
    mc_repeats times per sample size from streams (seed, n-index), and
    each mode estimate uses its own substream, so the whole curve is
    reproducible from the single seed.
    """
    for name in estimators:
        if name not in ESTIMATOR_NAMES:
            raise DomainError(f"unknown estimator {name!r}; choose from {ESTIMATOR_NAMES}")
    if not estimators:
        raise DomainError("need at least one estimator")
    n_tuple = tuple(int(n) for n in n_values)
    truth = ambiguity(q, measure)
    pvals = np.array([*q.proper, q.cs])
    pvals = pvals / pvals.sum()
    n_cat = q.n_proper
    labels = tuple(_estimator_label(name, prior_beta) for name in estimators)

    bias: dict[str, list[float]] = {label: [] for label in labels}
    stderr: dict[str, list[float]] = {label: [] for label in labels}
    need_draws = [name for name in estimators if name != "plugin"]
    plugin_exact_mc = "plugin" in estimators and measure is not MeasureKind.NEW

    for n_index, n in enumerate(n_tuple):
        if n < 1:
            raise DomainError(f"sample sizes must be positive, got {n}")
        can_enumerate = n <= _EXHAUSTIVE_MAX_N and n_cat + 1 <= _EXHAUSTIVE_MAX_CATEGORIES
        draws = None
        if need_draws or (plugin_exact_mc and not can_enumerate):
            rng = make_generator(seed, (n_index,))
            draws = rng.multinomial(n, pvals, size=mc_repeats)

        for name, label in zip(estimators, labels):
            if name == "plugin":
                if measure is MeasureKind.NEW:
                    bias[label].append(expected_plugin(q, n) - truth)
                    stderr[label].append(0.0)
                elif can_enumerate:
                    expectation = exhaustive_expected_estimator(
                        q, n, lambda cv: plugin_estimate(cv, measure)
                    )
                    bias[label].append(expectation - truth)
                    stderr[label].append(0.0)
                else:
                    values = np.array(
                        [
                            plugin_estimate(_row_counts(row, n_cat), measure)
                            for row in draws
                        ]
                    )
                    bias[label].append(float(values.mean()) - truth)
                    stderr[label].append(float(values.std() / math.sqrt(len(values))))
                continue

            estimates = np.empty(mc_repeats)
            for r, row in enumerate(draws):
                cv = _row_counts(row, n_cat)
                post = _posterior_for(cv, prior_beta)
                if name == "bayes_mean" and measure is not MeasureKind.OLD:
                    estimates[r] = _bayes_mean(post, measure, None)
                else:
                    sub = make_generator(seed, (n_index, r))
                    proper, cs = _dirichlet_draws(post, mc_samples_mode, sub)
                    values = ambiguity_array(proper, cs, measure)
                    if name == "bayes_mean":
                        estimates[r] = float(values.mean())
                    else:
                        estimates[r] = histogram_mode(values)
            bias[label].append(float(estimates.mean()) - truth)
            stderr[label].append(float(estimates.std() / math.sqrt(mc_repeats)))

    return BiasSeries(
        n_values=n_tuple,
        labels=labels,
        bias={k: tuple(v) for k, v in bias.items()},
        stderr={k: tuple(v) for k, v in stderr.items()},
        measure=measure,
    )


def _row_counts(row: np.ndarray, n_cat: int) -> CountVector:
    return CountVector(proper=tuple(int(v) for v in row[:n_cat]), cs=int(row[n_cat]))
