"""Gamma-family special functions and Gegenbauer polynomials.

Everything here accepts scalars or numpy arrays and returns the same shape.
Log-gamma uses a Lanczos sum (g = 7, nine coefficients) with the
reflection formula for arguments left of Re z = 1/2. On the real axis
between 1/2 and 5/2, where ln Gamma has its zeros at 1 and 2, a Taylor
series about 2 replaces Lanczos to keep the relative error small. Digamma
shifts the argument up to 8 and finishes with the asymptotic Bernoulli
series.
"""
import math

import numpy as np

from . import _kernels
from .errors import DomainError

LANCZOS_G = 7.0
LANCZOS_COEFFS = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_LN_PI = math.log(math.pi)

# B_2k / (2k) for k = 1..7, used in psi(x) ~ ln x - 1/(2x) - sum B_2k/(2k x^2k).
_DIGAMMA_ASYMPTOTIC = np.array([
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
])
_DIGAMMA_SHIFT = 8.0
_EULER_GAMMA = 0.57721566490153286061


def _zeta_minus_one(kmax, cutoff=64):
    """zeta(k) - 1 for k = 2..kmax by direct sum plus an Euler-Maclaurin tail."""
    m = np.arange(cutoff, 1, -1, dtype=np.float64)
    out = np.empty(kmax + 1)
    out[:2] = np.nan
    big = float(cutoff)
    for k in range(2, kmax + 1):
        head = np.sum(m ** -k)  # smallest terms first
        tail = (big ** (1 - k) / (k - 1) - 0.5 * big ** -k
                + k * big ** (-k - 1) / 12.0
                - k * (k + 1) * (k + 2) * big ** (-k - 3) / 720.0
                + k * (k + 1) * (k + 2) * (k + 3) * (k + 4) * big ** (-k - 5) / 30240.0)
        out[k] = head + tail
    return out


# Taylor coefficients of ln Gamma(2 + e) = (1 - euler) e + sum_k (-1)^k (zeta(k)-1)/k e^k.
_LNGAMMA_AT_2 = np.zeros(40)
_LNGAMMA_AT_2[1] = 1.0 - _EULER_GAMMA
_LNGAMMA_AT_2[2:] = [(-1) ** k * z / k for k, z in enumerate(_zeta_minus_one(39)[2:], start=2)]


def _scalar_out(value, like):
    if np.ndim(like) == 0:
        return value.item() if isinstance(value, np.ndarray) else value
    return value


def _lanczos_log(z):
    """log Gamma(z) for Re z >= 1/2 (works for real or complex arrays)."""
    zm = z - 1.0
    acc = np.full_like(zm, LANCZOS_COEFFS[0])
    for k in range(1, LANCZOS_COEFFS.size):
        acc = acc + LANCZOS_COEFFS[k] / (zm + k)
    t = zm + LANCZOS_G + 0.5
    return _LN_SQRT_2PI + (zm + 0.5) * np.log(t) - t + np.log(acc)


def _ln_gamma_near_two(x):
    eps = x - 2.0
    acc = np.zeros_like(eps)
    for c in _LNGAMMA_AT_2[:0:-1]:
        acc = (acc + c) * eps
    return acc


def _ln_gamma_positive(xa):
    out = np.empty_like(xa)
    # Lanczos is only accurate in absolute terms; near the zeros of ln Gamma
    # at 1 and 2 the Taylor series about 2 keeps the relative error small.
    lanczos = (xa > 2.5) | (xa < 0.5)
    out[lanczos & (xa >= 0.5)] = _lanczos_log(xa[lanczos & (xa >= 0.5)])
    mid = (xa >= 1.5) & (xa <= 2.5)
    out[mid] = _ln_gamma_near_two(xa[mid])
    low = (xa >= 0.5) & (xa < 1.5)
    out[low] = _ln_gamma_near_two(xa[low] + 1.0) - np.log(xa[low])
    tiny = xa < 0.5
    if np.any(tiny):
        xs = xa[tiny]
        out[tiny] = _LN_PI - np.log(np.sin(np.pi * xs)) - _ln_gamma_positive(1.0 - xs)
    return out


def ln_gamma_real(x):
    """Natural log of Gamma(x) for real x > 0."""
    xa = np.array(x, dtype=np.float64, ndmin=1)
    if not np.all(np.isfinite(xa)) or np.any(xa <= 0.0):
        raise DomainError("ln_gamma_real requires finite x > 0")
    out = _ln_gamma_positive(xa)
    if np.ndim(x) == 0:
        return float(out[0])
    return out.reshape(np.shape(x))


def ln_gamma_complex(z):
    """Principal branch of log Gamma(z).

    The branch is the one analytic off the negative real axis that is real
    on the positive axis (the same convention as ``scipy.special.loggamma``).
    """
    za = np.asarray(z, dtype=np.complex128)
    if not np.all(np.isfinite(za)):
        raise DomainError("ln_gamma_complex requires a finite argument")
    pole = (za.imag == 0.0) & (za.real <= 0.0) & (za.real == np.round(za.real))
    if np.any(pole):
        raise DomainError("Gamma has a pole at non-positive integers")
    out = np.empty_like(za)
    right = za.real >= 0.5
    out[right] = _lanczos_log(za[right])
    left = ~right
    if np.any(left):
        zl = za[left]
        # Branch bookkeeping so the result continues the principal branch.
        turns = np.copysign(2.0 * np.pi, zl.imag) * np.floor(0.5 * zl.real + 0.25)
        out[left] = (_LN_PI + 1j * turns - np.log(np.sin(np.pi * zl))
                     - _lanczos_log(1.0 - zl))
    return _scalar_out(out, z)


def digamma(x):
    """Psi(x) = d/dx ln Gamma(x) for real x > 0."""
    xa = np.array(x, dtype=np.float64, ndmin=1)
    if not np.all(np.isfinite(xa)) or np.any(xa <= 0.0):
        raise DomainError("digamma requires finite x > 0")
    shift = np.zeros_like(xa)
    w = xa.copy()
    low = w < _DIGAMMA_SHIFT
    while np.any(low):
        shift[low] -= 1.0 / w[low]
        w[low] += 1.0
        low = w < _DIGAMMA_SHIFT
    inv2 = 1.0 / (w * w)
    series = np.zeros_like(w)
    for coeff in _DIGAMMA_ASYMPTOTIC[::-1]:
        series = (series + coeff) * inv2
    out = shift + np.log(w) - 0.5 / w - series
    if np.ndim(x) == 0:
        return float(out[0])
    return out.reshape(np.shape(x))


def ln_beta_real(a, b):
    """log B(a, b) for a, b > 0."""
    return ln_gamma_real(a) + ln_gamma_real(b) - ln_gamma_real(np.add(a, b))


def beta_real(a, b):
    """Euler Beta function B(a, b) for positive real arguments."""
    return np.exp(ln_beta_real(a, b))


def ln_beta_complex_symmetric(n, p):
    """log B(n/2 + ip, n/2 - ip) = 2 Re log Gamma(n/2 + ip) - log Gamma(n)."""
    if np.any(np.asarray(n) <= 0.0):
        raise DomainError("beta_complex_symmetric requires n > 0")
    # |Gamma| is even in p; evaluating at |p| makes the symmetry exact.
    z = 0.5 * np.asarray(n, dtype=np.float64) + 1j * np.abs(np.asarray(p, dtype=np.float64))
    out = 2.0 * np.real(ln_gamma_complex(z)) - ln_gamma_real(n)
    return _scalar_out(out, np.add(n, p))


def beta_complex_symmetric(n, p):
    """B(n/2 + ip, n/2 - ip), which is real and positive.

    This is the p-dependence of the Fourier transform of sech^n(x/2).
    """
    return np.exp(ln_beta_complex_symmetric(n, p))


def gegenbauer(n, rho, x):
    """Gegenbauer polynomial C_n^rho(x) by forward recurrence in n."""
    if int(n) != n or n < 0:
        raise DomainError("Gegenbauer degree must be a non-negative integer")
    if rho <= 0:
        raise DomainError("Gegenbauer parameter rho must be positive")
    xa = np.array(x, dtype=np.float64, ndmin=1)
    if np.any(np.abs(xa) > 1.0):
        raise DomainError("Gegenbauer argument must satisfy |x| <= 1")
    row = _kernels.gegenbauer_table(int(n), rho, xa.ravel())[int(n)]
    if np.ndim(x) == 0:
        return float(row[0])
    return row.reshape(np.shape(x))


def gegenbauer_table(nmax, rho, x):
    """All of C_0^rho .. C_nmax^rho at the points ``x`` as a (nmax+1, len(x)) array."""
    if int(nmax) != nmax or nmax < 0:
        raise DomainError("Gegenbauer degree must be a non-negative integer")
    if rho <= 0:
        raise DomainError("Gegenbauer parameter rho must be positive")
    xa = np.asarray(x, dtype=np.float64).ravel()
    if np.any(np.abs(xa) > 1.0):
        raise DomainError("Gegenbauer argument must satisfy |x| <= 1")
    return _kernels.gegenbauer_table(int(nmax), rho, xa)
