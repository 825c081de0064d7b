"""Equal-weight isotonic projection and the restricted CIF estimator.

The production projection is pool-adjacent-violators, served by a compiled
kernel when available (``ordcif._kernels``) with a pure-Python fallback
selected at import.  ``maxmin_reference`` evaluates the defining max-min of
averages formula directly and is kept as an independent oracle; the two must
agree and the test suite verifies that they do.
"""

from __future__ import annotations

import os

import numpy as np

from .core import CifSet, StepFunction, check_not_restricted
from .errors import EmptyVectorError

__all__ = [
    "isotonic_project",
    "maxmin_reference",
    "maxmin_reference_matrix",
    "restrict_cifs",
    "kernel_backend",
]

_FORCE_PURE = os.environ.get("ORDCIF_PURE_PYTHON", "").strip() not in ("", "0")

if _FORCE_PURE:
    from . import _kernels_py as _kernels
else:
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _kernels


def kernel_backend() -> str:
    """Name of the active projection kernel: 'compiled' or 'python'."""
    return _kernels.BACKEND


def isotonic_project(values) -> np.ndarray:
    """Least-squares projection onto {x1 <= ... <= xk} with equal weights.

    Ties between adjacent entries are not violations and are left unpooled.
    The output is nondecreasing and preserves the input sum.
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    if values.size == 0:
        raise EmptyVectorError("cannot project an empty vector")
    if values.ndim != 1:
        raise ValueError("expected a 1-d vector")
    if not np.all(np.isfinite(values)):
        raise ValueError("entries must be finite")
    return _kernels.pava_vector(values)


def maxmin_reference(values) -> np.ndarray:
    """Literal max-min-of-averages evaluation of the projection (oracle).

    For each i returns max over r <= i of min over s >= i of the average of
    values[r..s].  O(k^3) by design; used to cross-check the pooled kernel.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise EmptyVectorError("cannot project an empty vector")
    k = values.size
    prefix = [0.0] * (k + 1)
    for i in range(k):
        prefix[i + 1] = prefix[i] + float(values[i])
    out = np.empty(k)
    for i in range(k):
        best_r = -np.inf
        for r in range(i + 1):
            best_s = np.inf
            for s in range(i, k):
                avg = (prefix[s + 1] - prefix[r]) / (s - r + 1)
                if avg < best_s:
                    best_s = avg
            if best_s > best_r:
                best_r = best_s
        out[i] = best_r
    return out


def maxmin_reference_matrix(values) -> np.ndarray:
    """Column-wise max-min oracle for a (k, m) matrix, vectorized over columns.

    Computes the same quantity as ``maxmin_reference`` applied per column
    (asserted by the tests); exists so large oracle sweeps stay cheap.
    """
    x = np.asarray(values, dtype=np.float64)
    k, m = x.shape
    prefix = np.vstack([np.zeros(m), np.cumsum(x, axis=0)])
    # averages[r, s, :] = mean of rows r..s (valid for r <= s)
    averages = np.full((k, k, m), np.inf)
    for r in range(k):
        for s in range(r, k):
            averages[r, s] = (prefix[s + 1] - prefix[r]) / (s - r + 1)
    # min over s >= i, then max over r <= i
    suffix_min = np.minimum.accumulate(averages[:, ::-1, :], axis=1)[:, ::-1, :]
    out = np.empty((k, m))
    for i in range(k):
        out[i] = suffix_min[: i + 1, i, :].max(axis=0)
    return out


def restrict_cifs(unrestricted: CifSet) -> CifSet:
    """Pointwise isotonic projection of a CifSet onto the ordered cone.

    Projects the k-vector of CIF values at every knot in the union of the
    component knot sets.  Between knots all inputs are constant, so the
    projection is too, and the union grid loses nothing.  The pointwise sum
    is preserved, so the total carries over unchanged.
    """
    check_not_restricted(unrestricted)
    grid = unrestricted.grid()
    if grid.size == 0:
        return CifSet(unrestricted.k, unrestricted.cifs, unrestricted.total, True)
    matrix = np.ascontiguousarray(unrestricted.values_matrix(grid))
    projected = _kernels.pava_matrix(matrix)
    cifs = tuple(StepFunction(grid, row, 0.0) for row in projected)
    total_values = projected.sum(axis=0)
    total = StepFunction(grid, total_values, 0.0)
    return CifSet(unrestricted.k, cifs, total, True)
