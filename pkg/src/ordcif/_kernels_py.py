"""Pure-Python pool-adjacent-violators kernels.

Fallback for environments where the compiled extension is unavailable (or
when ``ORDCIF_PURE_PYTHON=1``).  Implements exactly the algorithm of
``_kernels.pyx`` -- same strict-violation comparison, same division order --
so results are bit-identical to the compiled backend.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def _pava_list(col: list[float]) -> list[float]:
    sums: list[float] = []
    counts: list[int] = []
    for v in col:
        sums.append(v)
        counts.append(1)
        while len(sums) > 1 and sums[-2] / counts[-2] > sums[-1] / counts[-1]:
            s = sums.pop()
            c = counts.pop()
            sums[-1] += s
            counts[-1] += c
    out: list[float] = []
    for s, c in zip(sums, counts):
        out.extend([s / c] * c)
    return out


def pava_vector(x) -> np.ndarray:
    """Isotonic projection of a 1-d vector (equal weights)."""
    col = np.asarray(x, dtype=np.float64).tolist()
    return np.asarray(_pava_list(col), dtype=np.float64)


def pava_matrix(x) -> np.ndarray:
    """Column-wise isotonic projection of a (k, m) matrix."""
    x = np.asarray(x, dtype=np.float64)
    k, m = x.shape
    if k == 0 or m == 0:
        return np.empty((k, m), dtype=np.float64)
    cols = x.T.tolist()
    out = [_pava_list(col) for col in cols]
    return np.asarray(out, dtype=np.float64).T
