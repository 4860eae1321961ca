"""Time the numba and pure-numpy kernel implementations side by side.

    python benchmarks/bench_kernels.py [--repeat 5]

Numba timings exclude the first (compiling) call.
"""
import argparse
import timeit

import numpy as np

from ptentropy import _kernels
from ptentropy._backend import HAVE_NUMBA


def workloads(rng):
    x = np.linspace(-70, 70, 4097)
    fx = (np.exp(-np.abs(x) / 2) + 0j).astype(np.complex128)
    p = np.linspace(-12, 12, 801)
    nstates, npts, ntimes = 30, 400, 400
    basis = rng.normal(size=(nstates, npts))
    coeffs = rng.normal(size=nstates) + 1j * rng.normal(size=nstates)
    energies = (np.arange(nstates) + 2.0) ** 2
    times = np.linspace(0, 2 * np.pi, ntimes)
    return {
        "fourier_sum": (x, fx, p, -1.0),
        "gegenbauer_table": (80, 2.0, np.linspace(-1, 1, 20001)),
        "superposition_density": (basis, coeffs, energies, times),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    print(f"{'kernel':<24}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for name, call_args in workloads(rng).items():
        best = {}
        for backend in backends:
            func = _kernels.IMPLEMENTATIONS[backend][name]
            func(*call_args)
            best[backend] = min(timeit.repeat(lambda: func(*call_args), number=1,
                                              repeat=args.repeat))
        ratio = best["numpy"] / best["numba"] if "numba" in best else float("nan")
        print(f"{name:<24}" + "".join(f"{best[b] * 1e3:>10.2f}ms" for b in backends)
              + f"{ratio:>9.1f}x")


if __name__ == "__main__":
    main()
