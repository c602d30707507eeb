"""Time the numba kernels against their numpy counterparts.

    python3 benchmarks/bench_kernels.py [--repeat N]

Compilation happens in a warm-up call and is not counted.
"""
import argparse
import time

import numpy as np

from loqc import kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    a8 = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    key = kernels.stream_key(1, 0)
    return [
        ("permanent 8x8", lambda: kernels.permanent_nb(a8), lambda: kernels.permanent_np(a8)),
        ("bs block, 12 photons", lambda: kernels.bs_block_nb(12, 0.7, 0.3),
         lambda: kernels.bs_block_np(12, 0.7, 0.3)),
        ("MC recovery, 1e5 trials", lambda: kernels.mc_recovery_nb(np.uint64(key), 0.3, 100_000, 200),
         lambda: kernels.mc_recovery_np(key, 0.3, 100_000, 200)),
        ("MC retry, 1e5 trials", lambda: kernels.mc_retry_nb(np.uint64(key), 0.3, 100_000, 200),
         lambda: kernels.mc_retry_np(key, 0.3, 100_000, 200)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    print(f"{'kernel':<26}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, nb, npy in cases():
        assert np.array_equal(nb(), npy()), name  # the two flavours agree bit for bit
        t_nb = best_of(nb, args.repeat)
        t_np = best_of(npy, args.repeat)
        print(f"{name:<26}{t_nb * 1e3:>12.3f}{t_np * 1e3:>12.3f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
