"""Time the compiled and numpy paths of each hot kernel on the same inputs.

Run with ``python benchmarks/bench_kernels.py``.  Both paths are called
directly, so one process covers both; results are checked for equality
before timing is reported.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from sensilab import kernels as K
from sensilab._accel import HAVE_NUMBA


def _time(fn, repeat):
    fn()  # warm-up (and JIT compile)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(rng):
    mask = K.word_mask(64)
    theta = rng.integers(0, 2**63, size=(64, 3), dtype=np.uint64)
    alpha = rng.integers(0, 2**63, size=64, dtype=np.uint64)
    starts = rng.integers(0, 2**63, size=(65, 2), dtype=np.uint64)
    a = np.uint64(0x6A09E667F3BCC908)
    flags = (rng.random(200_000) < 0.01).astype(np.uint8)
    centers = np.arange(0, 200_000, 7, dtype=np.int64)
    close = np.zeros(2 * 3 * 12 + 1, dtype=np.uint8)
    close[36] = 1  # only time 0 is close: no witness, full scan
    yield ("skew_step_batch n=2000", lambda: K._skew_step_batch_nb(theta.copy(), alpha, 2000, mask),
           lambda: K._skew_step_batch_np(theta.copy(), alpha, 2000, mask))
    yield ("skew_orbit d=3 count=1e6", lambda: K._skew_orbit_nb(theta[0], a, 1_000_000, mask),
           lambda: K._skew_orbit_np(theta[0], a, 1_000_000, 64))
    yield ("sample_diameters 65x1e5", lambda: K._sample_diameters_nb(starts, a, 100_000, mask),
           lambda: K._sample_diameters_np(starts, a, 100_000, 64))
    yield ("nearest_flag r=64", lambda: K._nearest_flag_nb(flags, centers, 64),
           lambda: K._nearest_flag_np(flags, centers, 64))
    yield ("rp_scan d=3 B=12", lambda: K._rp_scan_nb(close, 36, 3, 12),
           lambda: K._rp_scan_np(close, 36, 3, 12))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba disabled or missing: only the numpy path is available")
    print(f"{'kernel':28s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for name, nb, npf in cases(np.random.default_rng(0)):
        t_np, out_np = _time(npf, args.repeat)
        if HAVE_NUMBA:
            t_nb, out_nb = _time(nb, args.repeat)
            assert np.array_equal(np.asarray(out_nb), np.asarray(out_np)), name
            print(f"{name:28s} {t_nb * 1e3:10.2f} {t_np * 1e3:10.2f} {t_np / t_nb:8.1f}x")
        else:
            print(f"{name:28s} {'-':>10s} {t_np * 1e3:10.2f}")


if __name__ == "__main__":
    main()
