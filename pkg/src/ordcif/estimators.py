"""Unrestricted cumulative incidence estimators.

Two pathways produce the per-cause CIF estimates:

* no censoring: the empirical sub-distribution functions (count of cause-j
  failures by t over n);
* right censoring present: the product-limit plug-in, integrating the
  left-continuous Kaplan-Meier survival curve against the per-cause
  Nelson-Aalen increments.

A sample containing any cause-0 record is routed through the censored
pathway for every cause, which keeps the identity ``sum_j F_j = 1 - S``
intact at all event times.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CifSet, Sample, StepFunction, stieltjes_accumulate
from .errors import BadCauseIndexError, CensoringPresentError

__all__ = [
    "SurvivalCurve",
    "CumulativeHazard",
    "EventTable",
    "event_table",
    "ecdf_cif",
    "kaplan_meier",
    "censoring_km",
    "nelson_aalen",
    "censored_cif",
    "estimate_cifs",
]


@dataclass(frozen=True)
class SurvivalCurve:
    """Kaplan-Meier estimate of the lifetime survival function plus the
    companion estimate for the censoring distribution (roles swapped)."""

    survival: StepFunction
    censoring: StepFunction


@dataclass(frozen=True)
class CumulativeHazard:
    """Nelson-Aalen cumulative hazard for one cause."""

    cause: int
    cumhaz: StepFunction


@dataclass(frozen=True, eq=False)
class EventTable:
    """Per-distinct-time counts shared by every estimator.

    ``times`` are the distinct observed times; ``events[j-1, m]`` counts
    cause-j failures at times[m]; ``censored[m]`` counts cause-0 records;
    ``at_risk[m]`` is the number of subjects with observed time >= times[m].
    """

    times: np.ndarray
    events: np.ndarray
    censored: np.ndarray
    at_risk: np.ndarray
    n: int

    @property
    def total_events(self) -> np.ndarray:
        return self.events.sum(axis=0)


def event_table(sample: Sample) -> EventTable:
    """Tabulate distinct times, per-cause event counts, and risk sets."""
    times, inverse, counts = np.unique(
        sample.times, return_inverse=True, return_counts=True
    )
    m = times.size
    events = np.zeros((sample.k, m), dtype=np.int64)
    for j in range(1, sample.k + 1):
        events[j - 1] = np.bincount(inverse[sample.causes == j], minlength=m)
    censored = np.bincount(inverse[sample.causes == 0], minlength=m)
    at_risk = sample.n - np.concatenate(([0], np.cumsum(counts)[:-1]))
    return EventTable(times, events, censored, at_risk, sample.n)


def _check_cause(sample: Sample, j: int) -> None:
    if not isinstance(j, (int, np.integer)) or isinstance(j, bool) or not 1 <= j <= sample.k:
        raise BadCauseIndexError(f"cause index must be in 1..{sample.k}, got {j!r}")


def _ecdf_from_table(table: EventTable, j: int) -> StepFunction:
    mask = table.events[j - 1] > 0
    if not mask.any():
        return StepFunction.zero()
    jumps = table.events[j - 1, mask] / table.n
    return StepFunction(table.times[mask], np.cumsum(jumps), 0.0)


def _km_from_counts(times, deaths, at_risk) -> StepFunction:
    """Product-limit curve over the times where ``deaths > 0``."""
    mask = deaths > 0
    if not mask.any():
        return StepFunction.constant(1.0)
    factors = 1.0 - deaths[mask] / at_risk[mask]
    return StepFunction(times[mask], np.cumprod(factors), 1.0)


def _survival_from_table(table: EventTable) -> StepFunction:
    return _km_from_counts(table.times, table.total_events, table.at_risk)


def _censoring_from_table(table: EventTable) -> StepFunction:
    # Events precede censorings at ties, so subjects failing at u have left
    # the risk set of the censoring curve by u.
    return _km_from_counts(
        table.times, table.censored, table.at_risk - table.total_events
    )


def _na_from_table(table: EventTable, j: int) -> StepFunction:
    mask = table.events[j - 1] > 0
    if not mask.any():
        return StepFunction.zero()
    increments = table.events[j - 1, mask] / table.at_risk[mask]
    return StepFunction(table.times[mask], np.cumsum(increments), 0.0)


def _censored_cif_from_table(table: EventTable, survival: StepFunction, j: int) -> StepFunction:
    cumhaz = _na_from_table(table, j)
    if cumhaz.knots.size == 0:
        return StepFunction.zero()
    return stieltjes_accumulate(survival, cumhaz)


def ecdf_cif(sample: Sample, j: int) -> StepFunction:
    """Empirical CIF for cause j: jump of (count at u)/n at each cause-j time.

    Valid only when the sample has no censored records.
    """
    _check_cause(sample, j)
    if sample.has_censoring:
        raise CensoringPresentError(
            "sample contains censored records; use censored_cif"
        )
    return _ecdf_from_table(event_table(sample), j)


def kaplan_meier(sample: Sample) -> SurvivalCurve:
    """Kaplan-Meier estimates of the lifetime and censoring survival curves.

    At tied times events precede censorings: a subject censored at u is still
    at risk for the failure at u, while a subject failing at u is removed
    from the censoring-curve risk set at u.
    """
    table = event_table(sample)
    return SurvivalCurve(_survival_from_table(table), _censoring_from_table(table))


def censoring_km(sample: Sample) -> StepFunction:
    """Kaplan-Meier estimate of the censoring survival function alone."""
    return _censoring_from_table(event_table(sample))


def nelson_aalen(sample: Sample, j: int) -> CumulativeHazard:
    """Nelson-Aalen cumulative hazard for cause j: sum of d_j(u)/Y(u)."""
    _check_cause(sample, j)
    return CumulativeHazard(j, _na_from_table(event_table(sample), j))


def censored_cif(sample: Sample, j: int) -> StepFunction:
    """Product-limit CIF for cause j under right censoring.

    Accumulates S(u-) * dA_j(u) over the cause-j event times, with S the
    Kaplan-Meier survival curve taken at left limits and A_j the
    Nelson-Aalen cumulative hazard.  On a sample without censoring this
    reproduces ``ecdf_cif`` jump for jump.
    """
    _check_cause(sample, j)
    table = event_table(sample)
    return _censored_cif_from_table(table, _survival_from_table(table), j)


def estimate_cifs(sample: Sample) -> CifSet:
    """Unrestricted CIF estimates for every cause, plus their pointwise sum.

    Dispatches on the presence of censored records: any cause-0 record sends
    all causes through the censored pathway.
    """
    table = event_table(sample)
    if sample.has_censoring:
        survival = _survival_from_table(table)
        cifs = [
            _censored_cif_from_table(table, survival, j)
            for j in range(1, sample.k + 1)
        ]
    else:
        cifs = [_ecdf_from_table(table, j) for j in range(1, sample.k + 1)]
    return CifSet.from_cifs(cifs, restricted=False)
