"""Time the compiled grid kernels against the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Workloads match the solver and the Stein operator: cubic interpolation of a
4096-node grid at 10^6 points, and a 128-shift quadrature sum at 2*10^4 points.
"""

import argparse
import timeit

import numpy as np

from tstein import _pykernels

try:
    from tstein import _ckernels
except ImportError:
    _ckernels = None


def workloads(rng):
    n = 4096
    x0, dx = -20.0, 40.0 / (n - 1)
    v = np.exp(-np.linspace(-20, 20, n) ** 2)
    pts = rng.uniform(-25, 25, 10 ** 6)
    xs = rng.uniform(-4, 4, 20000)
    sh = rng.uniform(-10, 10, 128)
    w = rng.normal(size=128)
    return {
        "cubic_eval 1e6 pts": lambda m: m.cubic_eval(x0, dx, v, pts),
        "shifted_sum 2e4 x 128": lambda m: m.shifted_sum(x0, dx, v, xs, sh, w),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    backends = [("python", _pykernels)] + ([("compiled", _ckernels)] if _ckernels else [])
    print(f"{'kernel':<24}" + "".join(f"{name:>12}" for name, _ in backends) + "     speedup   max|diff|")
    for label, fn in workloads(rng).items():
        times, outs = [], []
        for _, mod in backends:
            outs.append(fn(mod))
            times.append(min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)))
        row = f"{label:<24}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>11.1f}x{np.max(np.abs(outs[0] - outs[1])):>12.1e}"
        print(row)
    if _ckernels is None:
        print("compiled kernels not built; only the fallback was timed")


if __name__ == "__main__":
    main()
