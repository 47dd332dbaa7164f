"""Time the numpy and numba kernels side by side.

    python3 benchmarks/bench_backends.py [--repeat 7]

Prints one line per kernel with the best-of-``repeat`` wall time of each
backend and the speedup.  JIT compilation is triggered before timing.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from symtanh._accel import NUMBA_KERNELS, NUMPY_KERNELS


def cases():
    rng = np.random.default_rng(0)
    z = rng.uniform(-40.0, 40.0, 200_000)
    a, b = rng.normal(size=200_000), rng.normal(size=200_000)
    tau = np.linspace(0.0, 2.0, 200_001) ** 2
    return {
        "density_values": (z, 1.3, 0.7),
        "symmetrized_values": (z, 1.3, 0.7),
        "compensated_dot": (a, b),
        "caputo_weights": (tau, 0.4),
        # a typical operator call: ~40 lattice weights
        "compensated_dot[small]": (a[:40].copy(), b[:40].copy()),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=7)
    args = parser.parse_args(argv)
    if not NUMBA_KERNELS:
        print("numba is not installed; nothing to compare")
        return 0
    print(f"{'kernel':<24}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for label, inputs in cases().items():
        name = label.split("[")[0]
        np_fn, nb_fn = NUMPY_KERNELS[name], NUMBA_KERNELS[name]
        nb_fn(*inputs)  # compile
        number = 200 if "small" in label else 3
        t_np = min(timeit.repeat(lambda: np_fn(*inputs), number=number, repeat=args.repeat)) / number
        t_nb = min(timeit.repeat(lambda: nb_fn(*inputs), number=number, repeat=args.repeat)) / number
        print(f"{label:<24}{t_np * 1e3:>12.4f}{t_nb * 1e3:>12.4f}{t_np / t_nb:>10.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
