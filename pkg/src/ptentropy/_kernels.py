"""Hot inner loops, each in a numba form and a vectorised numpy form.

The public names at the bottom are bound to one implementation according
to :mod:`ptentropy._backend`. Both variants stay importable through
``IMPLEMENTATIONS`` so tests and the benchmark can compare them.
"""
import math

import numpy as np

from ._backend import USE_NUMBA, njit

# Upper bound on the size of a temporary (p, x) phase matrix in the numpy path.
_CHUNK_ELEMENTS = 1 << 21


# --- Fourier sums -----------------------------------------------------------

def _fourier_sum_numpy(x, fx, p, sign):
    out = np.empty(p.shape[0], dtype=np.complex128)
    step = max(1, _CHUNK_ELEMENTS // max(1, x.shape[0]))
    for start in range(0, p.shape[0], step):
        pk = p[start:start + step]
        phase = np.exp((sign * 1j) * np.outer(pk, x))
        out[start:start + step] = phase @ fx
    return out


@njit
def _fourier_sum_loop(x, fx, p, sign):
    out = np.empty(p.shape[0], dtype=np.complex128)
    for k in range(p.shape[0]):
        pk = sign * p[k]
        acc_re = 0.0
        acc_im = 0.0
        for j in range(x.shape[0]):
            arg = pk * x[j]
            c = math.cos(arg)
            s = math.sin(arg)
            a = fx[j].real
            b = fx[j].imag
            acc_re += a * c - b * s
            acc_im += a * s + b * c
        out[k] = complex(acc_re, acc_im)
    return out


# --- Gegenbauer recurrence --------------------------------------------------

def _gegenbauer_table_numpy(nmax, rho, x):
    table = np.empty((nmax + 1, x.shape[0]))
    table[0] = 1.0
    if nmax >= 1:
        table[1] = 2.0 * rho * x
    for n in range(1, nmax):
        table[n + 1] = (2.0 * (n + rho) * x * table[n]
                        - (n + 2.0 * rho - 1.0) * table[n - 1]) / (n + 1.0)
    return table


@njit
def _gegenbauer_table_loop(nmax, rho, x):
    npts = x.shape[0]
    table = np.empty((nmax + 1, npts))
    for j in range(npts):
        table[0, j] = 1.0
    if nmax >= 1:
        for j in range(npts):
            table[1, j] = 2.0 * rho * x[j]
    for n in range(1, nmax):
        # Same operation order as the numpy form, so both round identically.
        a = 2.0 * (n + rho)
        b = n + 2.0 * rho - 1.0
        for j in range(npts):
            table[n + 1, j] = (a * x[j] * table[n, j] - b * table[n - 1, j]) / (n + 1.0)
    return table


# --- Coherent-state density on a (t, x) grid --------------------------------

def _superposition_density_numpy(basis, coeffs, energies, times):
    weighted = coeffs[:, None] * basis
    rows = np.empty((times.shape[0], basis.shape[1]))
    step = max(1, _CHUNK_ELEMENTS // max(1, basis.shape[0]))
    for start in range(0, times.shape[0], step):
        tk = times[start:start + step]
        phases = np.exp(-1j * np.outer(tk, energies))
        amp = phases @ weighted
        rows[start:start + step] = amp.real ** 2 + amp.imag ** 2
    return rows


@njit
def _superposition_density_loop(basis, coeffs, energies, times):
    nstates = basis.shape[0]
    npts = basis.shape[1]
    rows = np.empty((times.shape[0], npts))
    re = np.empty(npts)
    im = np.empty(npts)
    for i in range(times.shape[0]):
        re[:] = 0.0
        im[:] = 0.0
        for n in range(nstates):
            arg = -energies[n] * times[i]
            c = math.cos(arg)
            s = math.sin(arg)
            pr = coeffs[n].real * c - coeffs[n].imag * s
            pi = coeffs[n].real * s + coeffs[n].imag * c
            for j in range(npts):
                re[j] += pr * basis[n, j]
                im[j] += pi * basis[n, j]
        for j in range(npts):
            rows[i, j] = re[j] * re[j] + im[j] * im[j]
    return rows


IMPLEMENTATIONS = {
    "numpy": {
        "fourier_sum": _fourier_sum_numpy,
        "gegenbauer_table": _gegenbauer_table_numpy,
        "superposition_density": _superposition_density_numpy,
    },
    "numba": {
        "fourier_sum": _fourier_sum_loop,
        "gegenbauer_table": _gegenbauer_table_loop,
        "superposition_density": _superposition_density_loop,
    },
}

_active = IMPLEMENTATIONS["numba" if USE_NUMBA else "numpy"]


def fourier_sum(x, fx, p, sign=-1.0):
    """Return ``sum_j fx[j] * exp(sign * 1j * p[k] * x[j])`` for every ``p[k]``."""
    return _active["fourier_sum"](
        np.ascontiguousarray(x, dtype=np.float64),
        np.ascontiguousarray(fx, dtype=np.complex128),
        np.ascontiguousarray(p, dtype=np.float64),
        float(sign),
    )


def gegenbauer_table(nmax, rho, x):
    """Rows ``C_0 .. C_nmax`` of the Gegenbauer recurrence evaluated at ``x``."""
    return _active["gegenbauer_table"](
        int(nmax), float(rho), np.ascontiguousarray(x, dtype=np.float64))


def superposition_density(basis, coeffs, energies, times):
    """``|sum_n coeffs[n] exp(-i E_n t) basis[n, x]|**2`` for each time row."""
    return _active["superposition_density"](
        np.ascontiguousarray(basis, dtype=np.float64),
        np.ascontiguousarray(coeffs, dtype=np.complex128),
        np.ascontiguousarray(energies, dtype=np.float64),
        np.ascontiguousarray(times, dtype=np.float64),
    )
