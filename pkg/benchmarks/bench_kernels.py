"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py --sizes 20 60 120 --repeat 5
"""
import argparse
import timeit

import numpy as np

from irkprec import kernels
from irkprec.smalldense import hessenberg, to_band


def hessenberg_case(n, rng):
    H, _ = hessenberg(rng.standard_normal((n, n)))
    H = np.ascontiguousarray(H, dtype=complex)
    return lambda mod: mod.hessenberg_qr(H.copy())


def schur_case(n, rng):
    H, _ = hessenberg(rng.standard_normal((n, n)))
    T = np.ascontiguousarray(H, dtype=complex)
    kernels.hessenberg_qr(T, wantt=True)
    return lambda mod: mod.triu_eigvecs(T)


def tridiag_case(n, rng):
    d = rng.standard_normal(n)
    e = rng.standard_normal(n)
    return lambda mod: mod.tridiag_ql(d.copy(), e.copy(), np.eye(n))


def band_case(n, rng, p=2):
    A = np.diag(np.full(n, 2.0 * p + 2.0))
    for q in range(1, p + 1):
        A -= np.eye(n, k=q) + np.eye(n, k=-q)
    ab = to_band(A, p)
    b = rng.standard_normal(n)

    def go(mod):
        mod.band_solve(mod.band_cholesky(ab), b)

    return go


CASES = {
    "hessenberg_qr": (hessenberg_case, 1),
    "triu_eigvecs": (schur_case, 1),
    "tridiag_ql": (tridiag_case, 1),
    "band_cholesky+solve": (band_case, 50),
}


def best_time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[20, 60, 120])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    backends = kernels.available_backends()
    names = sorted(backends)
    print("%-20s %6s " % ("kernel", "n") + " ".join("%12s" % b for b in names) + "  speedup")
    for kernel, (make, scale) in CASES.items():
        for n in args.sizes:
            run = make(n * scale, np.random.default_rng(args.seed))
            times = {b: best_time(lambda: run(backends[b]), args.repeat) for b in names}
            ratio = times["python"] / times["cython"] if "cython" in times else float("nan")
            print("%-20s %6d " % (kernel, n * scale)
                  + " ".join("%10.3f ms" % (1e3 * times[b]) for b in names) + "  %6.1fx" % ratio)


if __name__ == "__main__":
    main()
