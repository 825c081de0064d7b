"""Covariance functions of the limiting Gaussian processes, pointwise
confidence intervals for the restricted estimates, and band tightening.

The censored-case covariance is a plug-in: the hazard/incidence integrands
are evaluated at the sample estimates and the integrals become jump-sums over
observed event times.  Confidence intervals center on the restricted point
estimate but use the unrestricted plug-in variance, which by the stochastic
dominance of the restricted errors makes them conservative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .core import CifSet, Sample, StepFunction
from .errors import BadLevelError, BadQueryError, EmptyRiskSetError, OutOfRangeError
from .estimators import estimate_cifs, event_table

__all__ = [
    "CovQuery",
    "Band",
    "cov_uncensored",
    "cov_censored_plugin",
    "pointwise_ci",
    "tighten_bands",
]


@dataclass(frozen=True)
class CovQuery:
    """Covariance query: causes i, j at times s <= t."""

    i: int
    j: int
    s: float
    t: float

    def __post_init__(self):
        if not (0 <= self.s <= self.t):
            raise BadQueryError(f"need 0 <= s <= t, got s={self.s!r}, t={self.t!r}")


def cov_uncensored(fi_s: float, fj_t: float, same_cause: bool) -> float:
    """Limit covariance without censoring: F_i(s) * (1{i=j} - F_j(t)).

    Arguments are the CIF values themselves, so the caller fixes s <= t by
    passing F_i(s) and F_j(t).
    """
    for value in (fi_s, fj_t):
        if not 0.0 <= value <= 1.0:
            raise OutOfRangeError(f"CIF values must lie in [0, 1], got {value!r}")
    return fi_s * ((1.0 if same_cause else 0.0) - fj_t)


class _PluginTables:
    """Event-time tables reused across covariance queries on one sample."""

    def __init__(self, sample: Sample):
        table = event_table(sample)
        cifset = estimate_cifs(sample)
        mask = table.total_events > 0
        self.k = sample.k
        self.n = sample.n
        self.tau = float(sample.times[-1])
        self.times = table.times[mask]
        at_risk = table.at_risk[mask]
        if np.any(at_risk <= 0):
            raise EmptyRiskSetError("event time with empty risk set")
        self.at_risk_frac = at_risk / sample.n
        self.haz_jumps = table.events[:, mask] / at_risk  # (k, M)
        self.cifs = cifset.cifs
        if self.times.size:
            self.cif_left = np.vstack([f.left_limit(self.times) for f in self.cifs])
        else:
            self.cif_left = np.zeros((sample.k, 0))
        self.cif_left_sum = self.cif_left.sum(axis=0)
        self.haz_jumps_sum = self.haz_jumps.sum(axis=0)

    def covariance(self, i: int, j: int, s: float, t: float) -> float:
        upto = int(np.searchsorted(self.times, s, side="right"))
        if upto == 0:
            return 0.0
        sl = slice(0, upto)
        weight = 1.0 / self.at_risk_frac[sl]
        fi = self.cifs[i - 1]
        fj = self.cifs[j - 1]
        fi_s, fi_t = fi(s), fi(t)
        if i == j:
            others_left = self.cif_left_sum[sl] - self.cif_left[i - 1, sl]
            own = (1.0 - fi_s - others_left) * (1.0 - fi_t - others_left)
            term1 = float(np.sum(own * self.haz_jumps[i - 1, sl] * weight))
            dev = self.cif_left[i - 1, sl]
            cross = (dev - fi_s) * (dev - fi_t)
            other_haz = self.haz_jumps_sum[sl] - self.haz_jumps[i - 1, sl]
            term2 = float(np.sum(cross * other_haz * weight))
            return term1 + term2
        fj_s, fj_t = fj(s), fj(t)
        fi_left = self.cif_left[i - 1, sl]
        fj_left = self.cif_left[j - 1, sl]
        not_i = self.cif_left_sum[sl] - fi_left
        not_j = self.cif_left_sum[sl] - fj_left
        term1 = float(
            np.sum(
                (1.0 - fi_s - not_i) * (fj_left - fj_t) * self.haz_jumps[i - 1, sl] * weight
            )
        )
        term2 = float(
            np.sum(
                (1.0 - fj_t - not_j) * (fi_left - fi_s) * self.haz_jumps[j - 1, sl] * weight
            )
        )
        rest_haz = (
            self.haz_jumps_sum[sl]
            - self.haz_jumps[i - 1, sl]
            - self.haz_jumps[j - 1, sl]
        )
        term3 = float(
            np.sum((fj_s - fj_left) * (fi_t - fi_left) * rest_haz * weight)
        )
        return term1 + term2 + term3


def cov_censored_plugin(sample: Sample, query: CovQuery) -> float:
    """Plug-in evaluation of the censored-case limit covariance.

    Replaces the true CIFs, cause-specific hazards, and at-risk probability
    by their sample estimates; the integrals become jump-sums over event
    times up to s, with the time-varying integrand terms taken at left
    limits.
    """
    tables = _PluginTables(sample)
    _validate_query(tables, query)
    return tables.covariance(query.i, query.j, query.s, query.t)


def _validate_query(tables: _PluginTables, query: CovQuery) -> None:
    for idx in (query.i, query.j):
        if not isinstance(idx, (int, np.integer)) or isinstance(idx, bool) or not 1 <= idx <= tables.k:
            raise BadQueryError(f"cause index must be in 1..{tables.k}, got {idx!r}")
    if query.t > tables.tau:
        raise BadQueryError(
            f"t={query.t!r} lies beyond the largest observed time {tables.tau!r}"
        )


@dataclass(frozen=True)
class Band:
    """Per-cause lower/upper step functions at a common confidence level."""

    lower: tuple[StepFunction, ...]
    upper: tuple[StepFunction, ...]
    level: float

    @property
    def k(self) -> int:
        return len(self.lower)


def pointwise_ci(cifset: CifSet, sample: Sample, level: float, times) -> Band:
    """Normal-approximation pointwise intervals for the restricted estimates.

    Centers on the restricted value; the variance is the unrestricted
    plug-in (censored-case jump-sum, or F(1-F) without censoring), so the
    intervals are conservative at points where CIFs tie.  Bounds are clipped
    to [0, 1].
    """
    if not (isinstance(level, float) and 0.0 < level < 1.0):
        raise BadLevelError(f"confidence level must be in (0, 1), got {level!r}")
    if not cifset.restricted:
        raise ValueError("pointwise_ci expects a restricted CifSet")
    grid = np.unique(np.asarray(times, dtype=np.float64))
    if grid.size == 0:
        raise ValueError("empty time grid")
    if grid[0] < 0:
        raise ValueError("grid times must be >= 0")
    tau = float(sample.times[-1])
    if grid[-1] > tau:
        raise ValueError(f"grid times must not exceed the largest observed time {tau!r}")
    z = float(ndtri(0.5 * (1.0 + level)))
    if sample.has_censoring:
        tables = _PluginTables(sample)
        variances = np.array(
            [[tables.covariance(i, i, t, t) for t in grid] for i in range(1, cifset.k + 1)]
        )
    else:
        unrestricted = estimate_cifs(sample)
        values = unrestricted.values_matrix(grid)
        variances = values * (1.0 - values)
    halfwidth = z * np.sqrt(np.maximum(variances, 0.0) / sample.n)
    centers = cifset.values_matrix(grid)
    lower = np.clip(centers - halfwidth, 0.0, 1.0)
    upper = np.clip(centers + halfwidth, 0.0, 1.0)
    return Band(
        lower=tuple(StepFunction(grid, row, 0.0) for row in lower),
        upper=tuple(StepFunction(grid, row, 0.0) for row in upper),
        level=level,
    )


def tighten_bands(band: Band) -> Band:
    """Ordering-aware tightening: running max of lowers, running min (from
    the right) of uppers, applied pointwise.

    Never widens any interval and is idempotent; under the ordered model the
    simultaneous coverage statement of the input bands is preserved.
    """
    knots = [f.knots for f in band.lower + band.upper if f.knots.size]
    grid = np.unique(np.concatenate(knots)) if knots else np.empty(0)
    low = np.vstack([f(grid) for f in band.lower]) if grid.size else np.zeros((band.k, 0))
    up = np.vstack([f(grid) for f in band.upper]) if grid.size else np.zeros((band.k, 0))
    low_init = np.array([f.initial_value for f in band.lower])
    up_init = np.array([f.initial_value for f in band.upper])
    low = np.maximum.accumulate(low, axis=0)
    low_init = np.maximum.accumulate(low_init)
    up = np.minimum.accumulate(up[::-1], axis=0)[::-1]
    up_init = np.minimum.accumulate(up_init[::-1])[::-1]
    return Band(
        lower=tuple(
            StepFunction(grid, low[i], low_init[i]) for i in range(band.k)
        ),
        upper=tuple(
            StepFunction(grid, up[i], up_init[i]) for i in range(band.k)
        ),
        level=band.level,
    )
