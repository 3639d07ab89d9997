"""Compare the numba and pure-numpy backends on the hot counting kernels.

Run as `python3 benchmarks/bench_kernels.py [--repeat N]`.  Each kernel is
timed under both backends on a fixed mid-size workload and the outputs are
cross-checked for equality before the table is printed.  A warmup call
absorbs numba's compile time so the numbers reflect steady-state throughput.
"""

import argparse
import math
import time

from matstat import kernels


def _workloads():
    h3 = 3
    return [
        ("charpoly2_scan H=48", lambda: kernels.charpoly2_scan(48)),
        ("det_trace3 H=3 (full)", lambda: kernels.det_trace3(h3, 0, 0)),
        ("det_trace3_t2 H=3", lambda: kernels.det_trace3_t2(h3, 0, 0, 2)),
        ("bordered3 K=2", lambda: kernels.bordered3(2)),
        ("census3 U=60 K=8", lambda: kernels.census3(60, 3600, 64)),
    ]


def _same(a, b) -> bool:
    """Exact on integers and arrays; 1e-9 relative on floats.

    The two backends accumulate float norm sums in different orders (numpy
    reduces pairwise, the jit loop runs sequentially), so the last bits of
    those sums may legitimately differ.
    """
    import numpy as np

    if isinstance(a, np.ndarray):
        if np.issubdtype(a.dtype, np.floating):
            return np.allclose(a, b, rtol=1e-9, atol=0.0)
        return np.array_equal(a, b)
    if isinstance(a, tuple):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, float):
        return math.isclose(a, b, rel_tol=1e-9, abs_tol=0.0)
    return a == b


def bench(repeat: int):
    backends = ["numpy"] + (["numba"] if kernels.HAVE_NUMBA else [])
    rows = []
    for name, fn in _workloads():
        timings = {}
        results = {}
        for backend in backends:
            with kernels.use_backend(backend):
                fn()  # warmup (numba compiles here)
                best = min(
                    _timed(fn) for _ in range(repeat)
                )
            timings[backend] = best
            with kernels.use_backend(backend):
                results[backend] = fn()
        if len(backends) == 2 and not _same(results["numpy"], results["numba"]):
            raise AssertionError(f"backend outputs differ for {name}")
        rows.append((name, timings))
    return backends, rows


def _timed(fn) -> float:
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3, help="timed runs per backend")
    args = parser.parse_args()

    backends, rows = bench(args.repeat)
    if "numba" not in backends:
        print("numba unavailable: timing the numpy fallback only")
    header = f"{'kernel':28s}" + "".join(f"{b + ' (ms)':>14s}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    print("-" * len(header))
    for name, timings in rows:
        line = f"{name:28s}" + "".join(f"{1e3 * timings[b]:14.2f}" for b in backends)
        if len(backends) == 2:
            line += f"{timings['numpy'] / timings['numba']:9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
