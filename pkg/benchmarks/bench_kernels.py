"""Time the numba and numpy kernel flavours side by side.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is called once before timing so numba compilation is excluded.
The LAPACK calls that dominate an entropy evaluation are timed too, for scale.
"""

import argparse
import timeit

import numpy as np

from entropy_lab import _kernels
from entropy_lab.blocks import Configuration, canonicalize
from entropy_lab.spectral import correlation_matrix


def _cases(rng):
    n = 2048
    starts = np.array([0, 700, 1500], dtype=np.int64)
    lengths = np.array([300, 200, 250], dtype=np.int64)
    x = np.sort(rng.choice(n, 1024, replace=False)).astype(np.int64)
    table = _kernels.NUMPY["dirichlet_table"](n, starts, lengths)
    n_fock = 14
    modes = np.array([0, 1, 2, 5, 8, 9, 13], dtype=np.int64)
    masks, amps = _kernels.NUMPY["slater_amplitudes"](n_fock, modes)
    in_a = np.zeros(n_fock, dtype=np.bool_)
    in_a[[0, 1, 2, 3, 7, 8, 9]] = True
    return {
        "dirichlet_table n=2048": ("dirichlet_table", (n, starts, lengths)),
        "gather 1024x1024": ("gather", (table, x, n)),
        "slater_amplitudes n=14 M=7": ("slater_amplitudes", (n_fock, modes)),
        "schmidt_matrix n=14 L=7": ("schmidt_matrix", (n_fock, masks, amps, in_a)),
    }


def _best(fn, args, repeat):
    fn(*args)
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)

    print(f"{'kernel':32s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speedup':>8s}")
    for label, (name, kargs) in _cases(rng).items():
        t_np = _best(_kernels.NUMPY[name], kargs, args.repeat)
        if _kernels.NUMBA:
            t_nb = _best(_kernels.NUMBA[name], kargs, args.repeat)
            print(f"{label:32s} {t_np * 1e3:12.3f} {t_nb * 1e3:12.3f} {t_np / t_nb:8.2f}")
        else:
            print(f"{label:32s} {t_np * 1e3:12.3f} {'n/a':>12s} {'':>8s}")

    n = 2048
    c = Configuration(n, canonicalize([[0, 1024]], n), canonicalize([[0, 300], [700, 900], [1500, 1750]], n))
    m = correlation_matrix(c)
    t_eig = _best(np.linalg.eigvalsh, (m,), args.repeat)
    print(f"{'eigvalsh 1024 (for scale)':32s} {t_eig * 1e3:12.3f}")


if __name__ == "__main__":
    main()
