#!/usr/bin/env python3
"""Time the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--n 256 2048] [--repeat 20]
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from loojam import _pykernels

try:
    from loojam import _ckernels
except ImportError:
    _ckernels = None


def _inputs(n, rng, oversample=8, window=3):
    spec = rng.standard_normal(oversample * n) + 1j * rng.standard_normal(oversample * n)
    bins = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    offs = np.arange(-window * oversample, window * oversample + 1) / oversample
    local = _pykernels.geometric_sums(offs, n) / n
    active = np.ones(n, dtype=np.uint8)
    cand = rng.choice(oversample * n, 16, replace=False).astype(np.int64)
    return {
        "geometric_sums": (rng.uniform(-2 * n, 2 * n, 4 * n), n),
        "psi_counts": (rng.integers(0, n, 32), rng.uniform(-n, n, 32), n, 1e-6 * n),
        "glrt_scan": (spec, bins, local, active, oversample, window, cand),
    }


def _time(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def _trial_time(n, pure):
    code = (
        "import time; from loojam.sim import TrialConfig, run_trial;"
        f"cfg = TrialConfig(n_fft={n}, trials=20); run_trial(cfg, 0); t = time.perf_counter();"
        "[run_trial(cfg, i) for i in range(20)]; print((time.perf_counter() - t) / 20)"
    )
    env = dict(os.environ, LOOJAM_PURE_PYTHON="1" if pure else "")
    return float(subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                                check=True).stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[256, 2048])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled extension not available; only the fallback can run", file=sys.stderr)
    rng = np.random.default_rng(0)
    print(f"{'kernel':<16}{'N':>6}{'python ms':>12}{'cython ms':>12}{'speedup':>9}")
    for n in args.n:
        for name, fargs in _inputs(n, rng).items():
            tp = _time(getattr(_pykernels, name), fargs, args.repeat) * 1e3
            if _ckernels is None:
                print(f"{name:<16}{n:>6}{tp:>12.3f}{'-':>12}{'-':>9}")
                continue
            tc = _time(getattr(_ckernels, name), fargs, args.repeat) * 1e3
            print(f"{name:<16}{n:>6}{tp:>12.3f}{tc:>12.3f}{tp / tc:>8.1f}x")
        tp = _trial_time(n, True) * 1e3
        tc = _trial_time(n, False) * 1e3 if _ckernels is not None else float("nan")
        print(f"{'full trial':<16}{n:>6}{tp:>12.3f}{tc:>12.3f}{tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()
