"""Compare the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from intlat import _pykernels
from intlat import painleve as pv

try:
    from intlat import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_transfer(repeat):
    rng = np.random.default_rng(0)
    rows = []
    for n, width in [(2, 8), (3, 5), (3, 7), (4, 5)]:
        wv = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        wh = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        t_py = best_of(lambda: _pykernels.transfer_fill(wv, wh, n, width), repeat)
        t_c = best_of(lambda: _kernels.transfer_fill(wv, wh, n, width, 0), repeat) if _kernels else float("nan")
        t_c1 = best_of(lambda: _kernels.transfer_fill(wv, wh, n, width, 1), repeat) if _kernels else float("nan")
        rows.append((f"transfer_fill N={n} L={width} dim={n**width}", t_py, t_c1, t_c))
    return rows


def bench_rk4(repeat):
    u0, du0 = pv.asymptote(12.0)
    rows = []
    for n_steps in (10_000, 100_000):
        h = -11.0 / n_steps
        args = (0.0, 0.0, 1.0, -1.0, 12.0, u0, du0, h, n_steps)
        t_py = best_of(lambda: _pykernels.rk4_painleve(*args), max(1, repeat // 2))
        t_c = best_of(lambda: _kernels.rk4_painleve(*args), repeat) if _kernels else float("nan")
        rows.append((f"rk4_painleve steps={n_steps}", t_py, t_c, t_c))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _kernels is None:
        print("compiled extension not built; only the fallback is timed")
    print(f"{'kernel':<40} {'python [s]':>12} {'cy 1 thr [s]':>13} {'cy all [s]':>12} {'speedup':>9}")
    for label, t_py, t_c1, t_c in bench_transfer(args.repeat) + bench_rk4(args.repeat):
        print(f"{label:<40} {t_py:12.5f} {t_c1:13.5f} {t_c:12.5f} {t_py / t_c:9.1f}x")


if __name__ == "__main__":
    main()
