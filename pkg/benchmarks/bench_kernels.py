"""Time the numba and numpy kernels on the same composed-shear state.

    python benchmarks/bench_kernels.py [--L 64] [--steps 500]

Prints per-call times for the flow right-hand side, the monitor fields and a
block of Heun steps, plus the largest difference between the two backends.
Compilation is excluded (one warm-up call per kernel).
"""

import argparse
import time

import numpy as np

from pinchflow import _accel, _kernels
from pinchflow.torus import make_map


def clock(fn, repeat):
    fn()  # warm-up / compile
    t0 = time.perf_counter()
    for _ in range(repeat):
        out = fn()
    return (time.perf_counter() - t0) / repeat, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--L", type=int, default=64)
    ap.add_argument("--steps", type=int, default=500)
    ap.add_argument("--order", type=int, default=2, choices=(2, 4))
    args = ap.parse_args()
    if not _accel.NUMBA_IMPORTABLE:
        raise SystemExit("numba is not installed; nothing to compare")
    m = make_map("composed_shears", args.L, 0.1, 2)
    dt = 0.2 * m.h**2
    cases = {
        "rhs": lambda b: clock(lambda: _kernels.rhs(m.w, m.B, m.h, args.order, b), 200),
        "fields": lambda b: clock(lambda: _kernels.fields(m.w, m.B, m.h, args.order, b), 50),
        f"advance x{args.steps}": lambda b: clock(
            lambda: _kernels.advance(m.w, m.B, m.h, dt, args.steps, args.order, b), 2),
    }
    print(f"L={args.L} order={args.order}")
    print(f"{'kernel':<16}{'numba [s]':>12}{'numpy [s]':>12}{'speed-up':>10}{'max |diff|':>12}")
    for name, run in cases.items():
        tn, a = run("numba")
        tp, b = run("numpy")
        diff = max(float(np.max(np.abs(np.asarray(x) - np.asarray(y)))) for x, y in zip(
            a if isinstance(a, tuple) else (a,), b if isinstance(b, tuple) else (b,)))
        print(f"{name:<16}{tn:>12.3e}{tp:>12.3e}{tp / tn:>10.1f}{diff:>12.1e}")


if __name__ == "__main__":
    main()
