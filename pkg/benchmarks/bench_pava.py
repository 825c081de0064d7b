"""Benchmark: compiled isotonic kernel vs the pure-Python fallback.

Times the projection kernels on the workloads that dominate the Monte Carlo
studies (column-wise projection over a knot grid, and large batches of small
vectors), plus the end-to-end ``restrict_cifs`` pipeline.

Run from the repository root:

    python benchmarks/bench_pava.py
"""

import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from ordcif import _kernels_py  # noqa: E402
from ordcif.estimators import estimate_cifs  # noqa: E402
from ordcif.isotonic import restrict_cifs  # noqa: E402
from ordcif.simulate import SimConfig, simulate_sample  # noqa: E402

try:
    from ordcif import _kernels as _compiled
except ImportError:
    _compiled = None


def _time(fn, *args, repeats=7):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_kernels():
    rng = np.random.default_rng(0)
    workloads = [
        ("projection grid, k=3, m=1000", (3, 1_000)),
        ("projection grid, k=5, m=5000", (5, 5_000)),
        ("oracle batch,    k=8, m=100000", (8, 100_000)),
    ]
    print(f"{'workload':34s} {'python':>12s} {'compiled':>12s} {'speedup':>9s}")
    for label, (k, m) in workloads:
        mat = np.ascontiguousarray(rng.normal(size=(k, m)))
        t_py = _time(_kernels_py.pava_matrix, mat)
        if _compiled is None:
            print(f"{label:34s} {t_py * 1e3:10.2f}ms {'absent':>12s} {'-':>9s}")
            continue
        t_c = _time(_compiled.pava_matrix, mat)
        assert np.array_equal(_compiled.pava_matrix(mat), _kernels_py.pava_matrix(mat))
        print(
            f"{label:34s} {t_py * 1e3:10.2f}ms {t_c * 1e3:10.2f}ms "
            f"{t_py / t_c:8.1f}x"
        )


def bench_pipeline():
    cfg = SimConfig(
        k=4, cause_hazards=(0.5, 1.0, 1.0, 1.5), n=2000, replicates=1, seed=3,
        censor_rate=0.5,
    )
    cifset = estimate_cifs(simulate_sample(cfg, 0))

    import ordcif.isotonic as iso

    results = {}
    backends = [("python", _kernels_py)]
    if _compiled is not None:
        backends.append(("compiled", _compiled))
    original = iso._kernels
    try:
        for name, module in backends:
            iso._kernels = module
            results[name] = _time(restrict_cifs, cifset)
    finally:
        iso._kernels = original
    line = f"{'restrict_cifs, k=4, n=2000':34s} {results['python'] * 1e3:10.2f}ms"
    if "compiled" in results:
        line += (
            f" {results['compiled'] * 1e3:10.2f}ms"
            f" {results['python'] / results['compiled']:8.1f}x"
        )
    else:
        line += f" {'absent':>12s} {'-':>9s}"
    print(line)


if __name__ == "__main__":
    backend = "compiled" if _compiled is not None else "python (fallback)"
    print(f"active kernel backend: {backend}\n")
    bench_kernels()
    bench_pipeline()
