"""Ambiguity measures over soft labels with a can't-solve category.

A soft label assigns probability q_k to each of C proper answer categories
and q_cs to a designated "can't solve" response. Three scalar measures of
task ambiguity are computed from such a vector:

* ``ambiguity_new`` -- the probability that an annotator abstains, or that
  two annotators who both judge the task solvable disagree on the answer:
  ``amb(q) = 1`` when ``q_cs = 1``, else ``1 - (sum_k q_k^2) / (1 - q_cs)``.
* ``ambiguity_modified`` -- same event structure, but the conditional
  disagreement probability is rescaled by its maximum (C-1)/C so a uniform
  conditional distribution scores 1 even without abstention mass:
  ``q_cs + C/(C-1) * [(1 - q_cs) - (sum_k q_k^2)/(1 - q_cs)]``.
* ``ambiguity_old`` -- an earlier total-variation-based alternative:
  ``1 - (1-q_cs)/2 * C/(C-1) * sum_k |p_k - 1/C|`` with p the conditional
  vector; kept for comparison studies.

All three live in [0, 1], are invariant under permutations of the proper
categories, and treat q_cs asymmetrically: abstention mass always pushes
ambiguity up. The functions here are pure and operate on immutable values;
batch (array) variants used by the samplers are provided alongside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .exceptions import (
    DegenerateCsMass,
    DomainError,
    InternalConsistencyError,
    SingleCategoryUnsupported,
)

__all__ = [
    "DEGENERACY_THRESHOLD",
    "SIMPLEX_TOLERANCE",
    "CategorySchema",
    "ProbabilityVector",
    "ConditionalVector",
    "MeasureKind",
    "conditional_vector",
    "ambiguity_new",
    "ambiguity_modified",
    "modified_from_new",
    "ambiguity_old",
    "ambiguity",
    "normalized_entropy",
    "ambiguity_new_array",
    "ambiguity_modified_array",
    "ambiguity_old_array",
    "ambiguity_array",
]

# q_cs at or above this is treated as total unsolvability: the conditional
# vector would divide by ~0, so the measures take their degenerate value 1.
DEGENERACY_THRESHOLD = 1.0 - 1e-12

# Probability vectors must sum to 1 within this tolerance. Inputs outside it
# are rejected, never renormalized: silent renormalization masks data bugs.
SIMPLEX_TOLERANCE = 1e-9

# Results may violate [0, 1] by at most this much (rounding noise) before we
# call it a bug rather than noise.
_CLAMP_TOLERANCE = 1e-12


class MeasureKind(Enum):
    """The three ambiguity measures, as a closed enumeration."""

    NEW = "new"
    MODIFIED = "modified"
    OLD = "old"

    @classmethod
    def parse(cls, name: str) -> "MeasureKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise DomainError(f"unknown measure {name!r}; expected one of: {valid}") from None


@dataclass(frozen=True)
class CategorySchema:
    """Names of the C proper categories plus the can't-solve label.

    The can't-solve label is a separate field, not a member of ``labels``,
    so its position in serialized data is never ambiguous.
    """

    labels: tuple[str, ...]
    cs_label: str = "cs"

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        if len(self.labels) < 1:
            raise DomainError("schema needs at least one proper category")
        if len(set(self.labels)) != len(self.labels):
            raise DomainError(f"duplicate category labels in {self.labels}")
        if self.cs_label in self.labels:
            raise DomainError(
                f"can't-solve label {self.cs_label!r} collides with a proper label"
            )

    @property
    def n_proper(self) -> int:
        return len(self.labels)


def _check_simplex(entries: Sequence[float], what: str) -> None:
    for v in entries:
        if not (math.isfinite(v) and -0.0 <= v <= 1.0):
            raise DomainError(f"{what} entries must lie in [0, 1]; got {v}")
    total = math.fsum(entries)
    if abs(total - 1.0) > SIMPLEX_TOLERANCE:
        raise DomainError(
            f"{what} must sum to 1 within {SIMPLEX_TOLERANCE:g}; got sum {total!r}"
        )


@dataclass(frozen=True)
class ProbabilityVector:
    """Soft label: probabilities over C proper categories plus q_cs.

    Entries must be in [0, 1] and sum to 1 within ``SIMPLEX_TOLERANCE``.

    Examples:
        >>> q = ProbabilityVector((0.4, 0.4), 0.2)
        >>> q.n_proper
        2
    """

    proper: tuple[float, ...]
    cs: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "proper", tuple(float(v) for v in self.proper))
        object.__setattr__(self, "cs", float(self.cs))
        if len(self.proper) < 1:
            raise DomainError("need at least one proper category")
        _check_simplex(self.proper + (self.cs,), "probability vector")

    @property
    def n_proper(self) -> int:
        return len(self.proper)

    @property
    def is_degenerate(self) -> bool:
        """True when effectively all mass sits on can't-solve."""
        return self.cs >= DEGENERACY_THRESHOLD


@dataclass(frozen=True)
class ConditionalVector:
    """Distribution over proper categories after removing can't-solve mass.

    Construct via :func:`conditional_vector`; direct construction still
    validates the simplex constraint.
    """

    p: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        if len(self.p) < 1:
            raise DomainError("need at least one proper category")
        _check_simplex(self.p, "conditional vector")

    @property
    def n_proper(self) -> int:
        return len(self.p)


def conditional_vector(q: ProbabilityVector) -> ConditionalVector:
    """Conditional distribution over proper categories: p_k = q_k / (1 - q_cs).

    Raises:
        DegenerateCsMass: when q_cs is numerically 1, in which case no
            conditional distribution exists and callers must special-case.
    """
    if q.cs >= DEGENERACY_THRESHOLD:
        raise DegenerateCsMass(
            f"conditional vector undefined: q_cs = {q.cs!r} is numerically 1"
        )
    scale = 1.0 - q.cs
    p = tuple(v / scale for v in q.proper)
    total = math.fsum(p)
    # Renormalize the last ulps so the constructor's simplex check passes on
    # inputs that are valid but sit at the tolerance edge.
    if total != 1.0 and abs(total - 1.0) <= SIMPLEX_TOLERANCE:
        p = tuple(v / total for v in p)
    return ConditionalVector(p)


def _finalize(value: float, what: str) -> float:
    """Clamp sub-tolerance [0,1] violations; larger ones are bugs."""
    if value < -_CLAMP_TOLERANCE or value > 1.0 + _CLAMP_TOLERANCE:
        raise InternalConsistencyError(f"{what} = {value!r} outside [0, 1]")
    return min(1.0, max(0.0, value))


def ambiguity_new(q: ProbabilityVector) -> float:
    """Ambiguity: abstention probability plus conditional disagreement.

    ``amb(q) = 1`` if q_cs is (numerically) 1, else
    ``1 - (sum_k q_k^2) / (1 - q_cs)``.

    Equals q_cs for C = 1; equals ``1 - (1 - q_cs)/C`` for a uniform
    conditional distribution. Maximum 1 is reached only at q_cs = 1.

    Examples:
        >>> ambiguity_new(ProbabilityVector((1.0, 0.0), 0.0))
        0.0
        >>> round(ambiguity_new(ProbabilityVector((0.25, 0.25), 0.5)), 6)
        0.75
    """
    if q.cs >= DEGENERACY_THRESHOLD:
        return 1.0
    sq = math.fsum(v * v for v in q.proper)
    return _finalize(1.0 - sq / (1.0 - q.cs), "ambiguity_new")


def ambiguity_modified(q: ProbabilityVector) -> float:
    """Modified ambiguity: conditional disagreement rescaled by its maximum.

    ``q_cs + C/(C-1) * [(1 - q_cs) - (sum_k q_k^2)/(1 - q_cs)]`` with the
    degenerate branch returning 1. Reaches 1 whenever the conditional
    distribution is uniform, regardless of q_cs.

    Raises:
        SingleCategoryUnsupported: for C = 1 (the C/(C-1) rescaling is
            undefined).

    Examples:
        >>> ambiguity_modified(ProbabilityVector((0.5, 0.5), 0.0))
        1.0
        >>> round(ambiguity_modified(ProbabilityVector((0.8, 0.2), 0.0)), 6)
        0.64
    """
    n_cat = q.n_proper
    if n_cat < 2:
        raise SingleCategoryUnsupported(
            "modified ambiguity needs C >= 2 (C/(C-1) rescaling)"
        )
    if q.cs >= DEGENERACY_THRESHOLD:
        return 1.0
    one_minus = 1.0 - q.cs
    sq = math.fsum(v * v for v in q.proper)
    flip = one_minus - sq / one_minus
    return _finalize(q.cs + n_cat / (n_cat - 1.0) * flip, "ambiguity_modified")


def modified_from_new(amb: float, q_cs: float, n_proper: int) -> float:
    """Modified ambiguity from the plain one: ``(C*amb - q_cs) / (C - 1)``.

    This is an algebraic identity, so it holds exactly for any valid pair
    produced by the two measure functions on the same vector.

    Raises:
        SingleCategoryUnsupported: for C = 1.
        DomainError: when amb or q_cs is outside [0, 1].
    """
    if n_proper < 2:
        raise SingleCategoryUnsupported("relation needs C >= 2")
    if not (0.0 <= amb <= 1.0):
        raise DomainError(f"amb must lie in [0, 1]; got {amb}")
    if not (0.0 <= q_cs <= 1.0):
        raise DomainError(f"q_cs must lie in [0, 1]; got {q_cs}")
    return (n_proper * amb - q_cs) / (n_proper - 1.0)


def ambiguity_old(q: ProbabilityVector) -> float:
    """Total-variation-based ambiguity of earlier work, for comparison.

    ``1 - (1-q_cs)/2 * C/(C-1) * sum_k |p_k - 1/C|`` with p the conditional
    vector; 1 on the degenerate branch. Saturates at 1 for any distribution
    whose conditional part is uniform, and more broadly compresses the upper
    range compared to the other two measures.

    Raises:
        SingleCategoryUnsupported: for C = 1.
    """
    n_cat = q.n_proper
    if n_cat < 2:
        raise SingleCategoryUnsupported("old ambiguity needs C >= 2")
    if q.cs >= DEGENERACY_THRESHOLD:
        return 1.0
    one_minus = 1.0 - q.cs
    uniform = 1.0 / n_cat
    tv = math.fsum(abs(v / one_minus - uniform) for v in q.proper)
    return _finalize(1.0 - 0.5 * one_minus * n_cat / (n_cat - 1.0) * tv, "ambiguity_old")


_MEASURE_FUNCS = {
    MeasureKind.NEW: ambiguity_new,
    MeasureKind.MODIFIED: ambiguity_modified,
    MeasureKind.OLD: ambiguity_old,
}


def ambiguity(q: ProbabilityVector, kind: MeasureKind) -> float:
    """Dispatch to the measure named by `kind`."""
    return _MEASURE_FUNCS[kind](q)


def _entries(p) -> tuple[float, ...]:
    if isinstance(p, ConditionalVector):
        return p.p
    if isinstance(p, ProbabilityVector):
        return p.proper + (p.cs,)
    entries = tuple(float(v) for v in p)
    _check_simplex(entries, "probability vector")
    return entries


def normalized_entropy(p) -> float:
    """Shannon entropy divided by its maximum ln M, in [0, 1].

    Accepts a :class:`ConditionalVector` (M = C), a
    :class:`ProbabilityVector` (M = C + 1, the can't-solve entry counts as a
    category), or any simplex sequence. Uses the convention 0 ln(1/0) = 0.

    Raises:
        SingleCategoryUnsupported: for M = 1 (ln 1 = 0 normalization).
    """
    entries = _entries(p)
    m = len(entries)
    if m < 2:
        raise SingleCategoryUnsupported("normalized entropy needs M >= 2")
    h = -math.fsum(v * math.log(v) for v in entries if v > 0.0)
    return _finalize(h / math.log(m), "normalized_entropy")


# ---------------------------------------------------------------------------
# Array fast paths
# ---------------------------------------------------------------------------
#
# The Monte-Carlo layers evaluate measures on millions of sampled vectors;
# these operate on (n, C) proper blocks plus (n,) cs columns in one pass.
# Inputs are trusted to be rows of a simplex (as produced by the samplers).


def _check_array_range(values: np.ndarray, what: str) -> np.ndarray:
    lo = float(values.min(initial=0.0))
    hi = float(values.max(initial=1.0))
    if lo < -_CLAMP_TOLERANCE or hi > 1.0 + _CLAMP_TOLERANCE:
        raise InternalConsistencyError(f"{what} outside [0, 1]: range [{lo!r}, {hi!r}]")
    return np.clip(values, 0.0, 1.0)


def ambiguity_new_array(proper: np.ndarray, cs: np.ndarray) -> np.ndarray:
    """Vectorized ``ambiguity_new`` over rows of (proper, cs)."""
    proper = np.asarray(proper, dtype=float)
    cs = np.asarray(cs, dtype=float)
    one_minus = 1.0 - cs
    sq = np.einsum("ij,ij->i", proper, proper)
    out = np.ones_like(cs)
    live = one_minus > 1.0 - DEGENERACY_THRESHOLD
    out[live] = 1.0 - sq[live] / one_minus[live]
    return _check_array_range(out, "ambiguity_new")


def ambiguity_modified_array(proper: np.ndarray, cs: np.ndarray) -> np.ndarray:
    """Vectorized ``ambiguity_modified``; requires C >= 2."""
    proper = np.asarray(proper, dtype=float)
    cs = np.asarray(cs, dtype=float)
    n_cat = proper.shape[1]
    if n_cat < 2:
        raise SingleCategoryUnsupported("modified ambiguity needs C >= 2")
    one_minus = 1.0 - cs
    sq = np.einsum("ij,ij->i", proper, proper)
    out = np.ones_like(cs)
    live = one_minus > 1.0 - DEGENERACY_THRESHOLD
    flip = one_minus[live] - sq[live] / one_minus[live]
    out[live] = cs[live] + n_cat / (n_cat - 1.0) * flip
    return _check_array_range(out, "ambiguity_modified")


def ambiguity_old_array(proper: np.ndarray, cs: np.ndarray) -> np.ndarray:
    """Vectorized ``ambiguity_old``; requires C >= 2."""
    proper = np.asarray(proper, dtype=float)
    cs = np.asarray(cs, dtype=float)
    n_cat = proper.shape[1]
    if n_cat < 2:
        raise SingleCategoryUnsupported("old ambiguity needs C >= 2")
    one_minus = 1.0 - cs
    out = np.ones_like(cs)
    live = one_minus > 1.0 - DEGENERACY_THRESHOLD
    p = proper[live] / one_minus[live, None]
    tv = np.abs(p - 1.0 / n_cat).sum(axis=1)
    out[live] = 1.0 - 0.5 * one_minus[live] * n_cat / (n_cat - 1.0) * tv
    return _check_array_range(out, "ambiguity_old")


_MEASURE_ARRAY_FUNCS = {
    MeasureKind.NEW: ambiguity_new_array,
    MeasureKind.MODIFIED: ambiguity_modified_array,
    MeasureKind.OLD: ambiguity_old_array,
}


def ambiguity_array(proper: np.ndarray, cs: np.ndarray, kind: MeasureKind) -> np.ndarray:
    """Vectorized measure dispatch over rows of (proper, cs)."""
    return _MEASURE_ARRAY_FUNCS[kind](proper, cs)
