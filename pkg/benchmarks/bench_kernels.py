"""Benchmark the compiled kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Times the two hot kernels (translation-set supremum scan and the
truncated decaying convolution) on representative sizes and reports the
speedup plus the largest numerical deviation between the lanes.
"""

import argparse
import time

import numpy as np

from qzap._kernels import available_backends, get_backend


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_translation_sup(repeat):
    rng = np.random.default_rng(7)
    window_len, n_shifts, dim = 1001, 401, 3
    values = np.ascontiguousarray(rng.standard_normal(
        (window_len + n_shifts - 1, dim)))
    weights = np.ones(n_shifts)
    results = {}
    times = {}
    for name in available_backends():
        kern = get_backend(name)
        out = np.empty(n_shifts)
        times[name] = _time(
            lambda: kern.translation_sup(values, window_len, 0, 0, weights, out),
            repeat,
        )
        results[name] = out.copy()
    return times, results


def bench_trunc_conv(repeat):
    rng = np.random.default_rng(11)
    n_out, tail = 4000, 60
    decay = rng.uniform(0.3, 0.7, size=n_out + tail - 1)
    g = rng.standard_normal(n_out + tail - 1)
    results = {}
    times = {}
    for name in available_backends():
        kern = get_backend(name)
        out = np.empty(n_out)
        times[name] = _time(lambda: kern.trunc_conv(decay, g, tail, out), repeat)
        results[name] = out.copy()
    return times, results


def _report(label, times, results):
    print(f"\n{label}")
    base = times.get("pure")
    for name, t in times.items():
        speedup = f"  ({base / t:5.1f}x vs pure)" if base and name != "pure" else ""
        print(f"  {name:9s} {t * 1e3:9.3f} ms{speedup}")
    if len(results) == 2:
        a, b = results["pure"], results["compiled"]
        scale = np.maximum(np.abs(a), 1.0)
        print(f"  max relative deviation between lanes: "
              f"{np.max(np.abs(a - b) / scale):.3e}")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    print(f"backends: {', '.join(available_backends())}")
    times, results = bench_translation_sup(args.repeat)
    _report("translation_sup (1001-point window, 401 shifts, dim 3)",
            times, results)
    times, results = bench_trunc_conv(args.repeat)
    _report("trunc_conv (4000 outputs, tail 60)", times, results)


if __name__ == "__main__":
    main()
