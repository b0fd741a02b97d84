"""Compiled-vs-fallback kernel benchmark.

Runs every hot kernel under the active backend, then re-executes itself
with ``REFCAST_PURE_PYTHON=1`` and prints both timing columns side by
side. Invoke as ``python benchmarks/bench_kernels.py``.
"""

import json
import os
import subprocess
import sys
import time

import numpy as np


def _bench_once(repeats: int) -> dict[str, float]:
    from refcast._kernels import BACKEND, ecdf_sorted, ks_statistic, loo_coverage_count, quantile_sorted_many

    rng = np.random.default_rng(12345)
    xs = np.sort(rng.lognormal(-1.0, 0.6, 5000))
    ys = np.sort(rng.lognormal(-0.9, 0.7, 4000))
    ps = rng.uniform(0.0, 1.0, 20000)
    points = rng.uniform(0.0, 2.0, 20000)

    def timed(fn, *args) -> float:
        best = float("inf")
        for _ in range(repeats):
            start = time.perf_counter()
            fn(*args)
            best = min(best, time.perf_counter() - start)
        return best

    return {
        "backend": BACKEND,
        "quantile_sorted_many (5k values, 20k probes)": timed(quantile_sorted_many, xs, ps),
        "ecdf_sorted (5k values, 20k probes)": timed(lambda a, b: [ecdf_sorted(a, float(x)) for x in b], xs, points),
        "ks_statistic (5k vs 4k)": timed(ks_statistic, xs, ys),
        "loo_coverage_count (5k values)": timed(loo_coverage_count, xs, 0.8),
    }


def main() -> None:
    repeats = int(sys.argv[1]) if len(sys.argv) > 1 else 5
    if os.environ.get("REFCAST_BENCH_CHILD"):
        print(json.dumps(_bench_once(repeats)))
        return

    results = []
    for pure in ("", "1"):
        env = dict(os.environ, REFCAST_BENCH_CHILD="1")
        if pure:
            env["REFCAST_PURE_PYTHON"] = pure
        else:
            env.pop("REFCAST_PURE_PYTHON", None)
        out = subprocess.run(
            [sys.executable, os.path.abspath(__file__), str(repeats)],
            env=env,
            capture_output=True,
            text=True,
            check=True,
        )
        results.append(json.loads(out.stdout))

    first, second = results
    if first["backend"] == second["backend"]:
        print("note: compiled extension unavailable; both runs used the python fallback")
    width = max(len(k) for k in first if k != "backend")
    print(f"{'kernel':<{width}}  {first['backend']:>12}  {second['backend']:>12}  speedup")
    for key in first:
        if key == "backend":
            continue
        a, b = first[key], second[key]
        ratio = b / a if a > 0 else float("inf")
        print(f"{key:<{width}}  {a * 1e3:>10.3f}ms  {b * 1e3:>10.3f}ms  {ratio:>6.1f}x")


if __name__ == "__main__":
    main()
