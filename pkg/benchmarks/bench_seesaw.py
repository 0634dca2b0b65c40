#!/usr/bin/env python3
"""Benchmark the see-saw kernel: numba @njit versus the pure-numpy fallback.

The workload mirrors the product/low-rank expectation minimizer: for each
dimension pair and rank bound, run a batch of restarts of the alternating
eigensolve on random Hermitian operators and time both backends on
identical inputs.  Run after `pip install -e .`:

    python3 benchmarks/bench_seesaw.py [--restarts 32] [--iters 200]
"""

import argparse
import time

import numpy as np

from conekit import _kernels
from conekit.bipartite import BipartiteDims
from conekit.sampling import ginibre


def workload(kernel, wx, wy, m, n, k, inits, iters):
    best = np.inf
    for y0 in inits:
        val, _, _ = kernel(m, n, k, wx, wy, y0, iters, 1e-13)
        best = min(best, val)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--restarts", type=int, default=32)
    parser.add_argument("--iters", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if not _kernels.NUMBA_ENABLED:
        print("numba backend unavailable (CONEKIT_NO_NUMBA set or numba missing);")
        print("timing the numpy path only.\n")

    cases = [(2, 2), (2, 3), (3, 3), (4, 4)]
    rng = np.random.default_rng(args.seed)
    header = f"{'dims':>6} {'k':>3} {'numpy[s]':>10} {'numba[s]':>10} {'speedup':>8}  agreement"
    print(header)
    print("-" * len(header))
    for m, n in cases:
        dims = BipartiteDims(m, n)
        g = ginibre(rng, dims.total, dims.total)
        w = (g + g.conj().T) / 2
        wx, wy = _kernels.prepare_layouts(w, m, n)
        for k in range(1, dims.d + 1):
            inits = [np.ascontiguousarray(ginibre(rng, n, k)) for _ in range(args.restarts)]

            t0 = time.perf_counter()
            val_np = workload(
                _kernels.seesaw_minimize_numpy, wx, wy, m, n, k, inits, args.iters
            )
            t_np = time.perf_counter() - t0

            if _kernels.NUMBA_ENABLED:
                # Warm the JIT outside the timed region.
                workload(_kernels.seesaw_minimize_numba, wx, wy, m, n, k, inits[:1], 2)
                t0 = time.perf_counter()
                val_nb = workload(
                    _kernels.seesaw_minimize_numba, wx, wy, m, n, k, inits, args.iters
                )
                t_nb = time.perf_counter() - t0
                agreement = abs(val_np - val_nb)
                print(
                    f"{f'{m}x{n}':>6} {k:>3} {t_np:>10.4f} {t_nb:>10.4f} "
                    f"{t_np / t_nb:>7.1f}x  |dv|={agreement:.2e}"
                )
            else:
                print(f"{f'{m}x{n}':>6} {k:>3} {t_np:>10.4f} {'-':>10} {'-':>8}")
    print(f"\nactive backend for library calls: {_kernels.backend_name()}")


if __name__ == "__main__":
    main()
