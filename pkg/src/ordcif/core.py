"""Domain types and step-function calculus.

Everything downstream (estimators, tests, confidence bands) manipulates
right-continuous piecewise-constant functions, so this module provides a
single carrier type, :class:`StepFunction`, together with exact evaluation,
left limits, suprema over knot unions, and Stieltjes jump-sums.  It also
defines the validated competing-risks sample and the container for a set of
cumulative incidence estimates.

All types are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    AlreadyRestrictedError,
    BadKError,
    CauseOutOfRangeError,
    EmptyInputError,
    NonPositiveTimeError,
)

__all__ = [
    "Observation",
    "Sample",
    "StepFunction",
    "CifSet",
    "build_sample",
    "step_sup_diff",
    "stieltjes_integral",
    "stieltjes_accumulate",
]


class Observation(NamedTuple):
    """One subject's record: failure/censoring time and cause code.

    Cause 0 encodes censoring; codes 1..k are the competing failure causes.
    """

    time: float
    cause: int


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class StepFunction:
    """Right-continuous piecewise-constant function with left-limit access.

    The function equals ``initial_value`` on ``[-inf, knots[0])`` and
    ``values[m]`` on ``[knots[m], knots[m+1])``.  Knots must be strictly
    increasing; ``values`` has one entry per knot (the post-jump value).
    """

    __slots__ = ("initial_value", "knots", "values", "_padded")

    def __init__(self, knots, values, initial_value: float = 0.0):
        knots = np.ascontiguousarray(knots, dtype=np.float64)
        values = np.ascontiguousarray(values, dtype=np.float64)
        if knots.ndim != 1 or values.ndim != 1 or knots.shape != values.shape:
            raise ValueError("knots and values must be 1-d arrays of equal length")
        if knots.size and not np.all(np.diff(knots) > 0):
            raise ValueError("knots must be strictly increasing")
        self.knots = _frozen(knots)
        self.values = _frozen(values)
        self.initial_value = float(initial_value)
        self._padded = _frozen(np.concatenate(([self.initial_value], values)))

    def __call__(self, t):
        """Evaluate right-continuously at scalar or array ``t``."""
        idx = np.searchsorted(self.knots, t, side="right")
        out = self._padded[idx]
        if np.isscalar(t):
            return float(out)
        return out

    def left_limit(self, t):
        """Value just before ``t`` (the limit from the left)."""
        idx = np.searchsorted(self.knots, t, side="left")
        out = self._padded[idx]
        if np.isscalar(t):
            return float(out)
        return out

    def jump_sizes(self) -> np.ndarray:
        """Jump at each knot: value[m] - value[m-1], first against initial."""
        if self.knots.size == 0:
            return np.empty(0)
        return np.diff(self.values, prepend=self.initial_value)

    def final_value(self) -> float:
        return float(self.values[-1]) if self.values.size else self.initial_value

    def __eq__(self, other) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return (
            self.initial_value == other.initial_value
            and np.array_equal(self.knots, other.knots)
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.initial_value, self.knots.tobytes(), self.values.tobytes()))

    def __repr__(self) -> str:
        return (
            f"StepFunction(n_knots={self.knots.size}, "
            f"initial={self.initial_value!r}, final={self.final_value()!r})"
        )

    @classmethod
    def zero(cls) -> "StepFunction":
        return cls(np.empty(0), np.empty(0), 0.0)

    @classmethod
    def constant(cls, value: float) -> "StepFunction":
        return cls(np.empty(0), np.empty(0), value)


def step_sup_diff(f: StepFunction, g: StepFunction, upper: float) -> tuple[float, float]:
    """Exact supremum of ``f - g`` over ``[0, upper]`` and its earliest argmax.

    Piecewise-constant differences attain every value they take at 0 or at a
    knot of f or g, so scanning that finite grid is exact; no discretization.
    """
    if upper < 0:
        raise ValueError("upper must be >= 0")
    grid = np.concatenate(([0.0], f.knots, g.knots))
    grid = np.unique(grid[grid <= upper])
    diffs = f(grid) - g(grid)
    best = int(np.argmax(diffs))  # first occurrence -> earliest time
    return float(diffs[best]), float(grid[best])


def stieltjes_integral(g: StepFunction, integrator: StepFunction, t: float) -> float:
    """Jump-sum ``sum_{u <= t} g(u-) * d integrator(u)``.

    The integrand is taken at left limits, matching the predictable-weight
    convention used throughout the estimators.
    """
    knots = integrator.knots
    m = int(np.searchsorted(knots, t, side="right"))
    if m == 0:
        return 0.0
    deltas = integrator.jump_sizes()[:m]
    weights = g.left_limit(knots[:m])
    return float(np.dot(np.atleast_1d(weights), deltas))


def stieltjes_accumulate(g: StepFunction, integrator: StepFunction) -> StepFunction:
    """Running Stieltjes integral of ``g(u-)`` against ``integrator``.

    Returns a step function with the integrator's knots whose value at t is
    ``stieltjes_integral(g, integrator, t)``.
    """
    knots = integrator.knots
    if knots.size == 0:
        return StepFunction.zero()
    contrib = np.atleast_1d(g.left_limit(knots)) * integrator.jump_sizes()
    return StepFunction(knots, np.cumsum(contrib), 0.0)


@dataclass(frozen=True, eq=False)
class Sample:
    """Validated, sorted competing-risks sample.

    ``times`` is ascending; at tied times, event records (cause >= 1) come
    before censored ones, which is what makes the product-limit estimators
    well defined under ties.
    """

    times: np.ndarray
    causes: np.ndarray
    k: int

    @property
    def n(self) -> int:
        return int(self.times.size)

    @property
    def has_censoring(self) -> bool:
        return bool(np.any(self.causes == 0))

    def records(self) -> list[Observation]:
        return [Observation(float(t), int(c)) for t, c in zip(self.times, self.causes)]

    @classmethod
    def from_arrays(cls, times, causes, k: int) -> "Sample":
        """Validate and sort raw arrays into a Sample."""
        if not isinstance(k, (int, np.integer)) or isinstance(k, bool) or k < 2:
            raise BadKError(f"k must be an integer >= 2, got {k!r}")
        times = np.asarray(times, dtype=np.float64)
        causes = np.asarray(causes)
        if times.size == 0:
            raise EmptyInputError("a sample needs at least one observation")
        if times.shape != causes.shape or times.ndim != 1:
            raise ValueError("times and causes must be 1-d arrays of equal length")
        if not np.all(np.isfinite(times)) or np.any(times <= 0):
            bad = times[~(np.isfinite(times) & (times > 0))][0]
            raise NonPositiveTimeError(f"times must be finite and > 0, got {bad!r}")
        if not np.all(causes == np.floor(causes)):
            raise CauseOutOfRangeError("cause codes must be integers")
        causes = causes.astype(np.int64)
        if np.any(causes < 0) or np.any(causes > k):
            bad = causes[(causes < 0) | (causes > k)][0]
            raise CauseOutOfRangeError(f"cause code {bad} outside 0..{k}")
        # Stable sort: time ascending, events before censorings at ties.
        order = np.lexsort((causes == 0, times))
        return cls(_frozen(times[order].copy()), _frozen(causes[order].copy()), int(k))


def build_sample(records: Iterable[tuple[float, int]], k: int) -> Sample:
    """Build a validated Sample from (time, cause-code) pairs."""
    records = list(records)
    if not records:
        raise EmptyInputError("a sample needs at least one observation")
    times = np.array([r[0] for r in records], dtype=np.float64)
    causes = np.array([r[1] for r in records])
    return Sample.from_arrays(times, causes, k)


def _union_grid(functions: Sequence[StepFunction]) -> np.ndarray:
    knots = [f.knots for f in functions if f.knots.size]
    if not knots:
        return np.empty(0)
    return np.unique(np.concatenate(knots))


@dataclass(frozen=True)
class CifSet:
    """k cumulative incidence estimates plus their pointwise sum.

    ``total`` lives on the union of all component knots and equals the
    floating-point sum of the components there by construction.
    """

    k: int
    cifs: tuple[StepFunction, ...]
    total: StepFunction
    restricted: bool

    def __post_init__(self):
        if len(self.cifs) != self.k:
            raise ValueError(f"expected {self.k} step functions, got {len(self.cifs)}")
        grid = self.total.knots
        for idx, f in enumerate(self.cifs, start=1):
            if f.initial_value != 0.0:
                raise ValueError(f"cif {idx} does not start at 0")
            if f.values.size and np.any(np.diff(f.values, prepend=0.0) < 0):
                raise ValueError(f"cif {idx} is not nondecreasing")
        if grid.size:
            stacked = self.values_matrix(grid)
            if not np.array_equal(stacked.sum(axis=0), self.total(grid)):
                raise ValueError("total is not the exact pointwise sum of the cifs")
            if np.any(self.total.values > 1.0 + 1e-12):
                raise ValueError("total exceeds 1")
            if self.restricted:
                if np.any(np.diff(stacked, axis=0) < 0):
                    raise ValueError("restricted cif set is not ordered at every knot")

    def values_matrix(self, grid: np.ndarray) -> np.ndarray:
        """(k, len(grid)) matrix of component values on ``grid``."""
        return np.vstack([f(grid) for f in self.cifs])

    def grid(self) -> np.ndarray:
        return self.total.knots

    @classmethod
    def from_cifs(cls, cifs: Sequence[StepFunction], restricted: bool) -> "CifSet":
        cifs = tuple(cifs)
        grid = _union_grid(cifs)
        if grid.size:
            total_values = np.vstack([f(grid) for f in cifs]).sum(axis=0)
            total = StepFunction(grid, total_values, 0.0)
        else:
            total = StepFunction.zero()
        return cls(len(cifs), cifs, total, restricted)


def check_not_restricted(cifset: CifSet) -> None:
    """Raise if a CifSet has already been through the isotonic projection."""
    if cifset.restricted:
        raise AlreadyRestrictedError("CifSet is already restricted")
