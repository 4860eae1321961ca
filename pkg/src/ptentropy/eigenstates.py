"""Closed-form eigenstates of the hyperbolic and trigonometric Poschl-Teller wells.

Units are hbar = 2m = 1. The hyperbolic well is

    V(x) = -n(n+1)/4 * sech^2(x/2),

and the symmetric trigonometric well is

    V(y) = alpha^2 rho(rho-1) / cos^2(alpha y),   |y| < pi/(2 alpha),

with spectrum alpha^2 (n + rho)^2. Powers of sech and cos are formed in
log space so large n or rho do not underflow intermediate factors.
"""
import math
import threading
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import DomainError
from .numerics import integrate_real_line

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class HyperbolicPTSpec:
    """Well-strength parameter n of the sech^2(x/2) well; n bound states."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError("hyperbolic well strength n must be an integer >= 1")
        object.__setattr__(self, "n", int(self.n))

    def require_excited(self):
        if self.n < 2:
            raise DomainError("first excited state requires n >= 2")


@dataclass(frozen=True)
class TrigPTSpec:
    """Barrier strength ``rho`` (> 1) and inverse length ``alpha`` (> 0)."""

    rho: float
    alpha: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.rho) and self.rho > 1.0):
            raise DomainError("trigonometric well needs rho > 1")
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise DomainError("trigonometric well needs alpha > 0")

    @property
    def half_width(self):
        """Half-width pi/(2 alpha) of the well."""
        return 0.5 * math.pi / self.alpha


def _as_spec(spec):
    return spec if isinstance(spec, HyperbolicPTSpec) else HyperbolicPTSpec(spec)


def log_sech(u):
    """log sech(u), stable for any real u."""
    a = np.abs(np.asarray(u, dtype=np.float64))
    return _LN2 - a - np.log1p(np.exp(-2.0 * a))


def _finish(values, like):
    return float(values) if np.ndim(like) == 0 else values


# --- hyperbolic well ----------------------------------------------------------

def hpt_ground_energy(spec):
    """Ground-state energy -n^2/4."""
    n = _as_spec(spec).n
    return -0.25 * n * n


def hpt_ground_position(spec, x):
    """Normalised ground state sech^n(x/2) / sqrt(2 B(1/2, n))."""
    n = _as_spec(spec).n
    log_norm = -0.5 * (_LN2 + specfun.ln_beta_real(0.5, n))
    return _finish(np.exp(log_norm + n * log_sech(0.5 * np.asarray(x, dtype=np.float64))), x)


def hpt_excited_position(spec, x):
    """Normalised first excited state N sech^(n-1)(x/2) tanh(x/2), n >= 2."""
    spec = _as_spec(spec)
    spec.require_excited()
    n = spec.n
    # B(1/2, n-1) - B(1/2, n) = B(1/2, n-1) / (2n - 1): no cancellation.
    log_norm = -0.5 * (_LN2 + specfun.ln_beta_real(0.5, n - 1) - math.log(2 * n - 1))
    half = 0.5 * np.asarray(x, dtype=np.float64)
    return _finish(np.exp(log_norm + (n - 1) * log_sech(half)) * np.tanh(half), x)


_momentum_scale_cache = {}
_momentum_scale_lock = threading.Lock()


def ground_momentum_scale(spec):
    """The prefactor A of A 2^n B(n/2 + ip, n/2 - ip), fixed by unit norm.

    Computed once per n by quadrature. Concurrent first callers block on
    a lock so the value is computed exactly once.
    """
    n = _as_spec(spec).n
    cached = _momentum_scale_cache.get(n)
    if cached is not None:
        return cached
    with _momentum_scale_lock:
        cached = _momentum_scale_cache.get(n)
        if cached is None:
            # Integrate (2^n B)^2 in log space; A = norm^(-1/2).
            shape = lambda p: np.exp(2.0 * (n * _LN2 + specfun.ln_beta_complex_symmetric(n, p)))
            norm, _ = integrate_real_line(shape, tol=1e-12)
            cached = norm ** -0.5
            _momentum_scale_cache[n] = cached
    return cached


def hpt_ground_momentum(spec, p):
    """Momentum-space ground state A 2^n B(n/2 + ip, n/2 - ip), real and even."""
    n = _as_spec(spec).n
    log_amp = (math.log(ground_momentum_scale(n)) + n * _LN2
               + specfun.ln_beta_complex_symmetric(n, np.asarray(p, dtype=np.float64)))
    return _finish(np.exp(log_amp), p)


def hpt_analytic_ground_entropy(spec):
    """Closed-form position entropy of the ground state, in nats:

    -(2n-1) ln 2 + ln B(1/2, n) + 2n [psi(2n) - psi(n)].
    """
    n = _as_spec(spec).n
    return (-(2 * n - 1) * _LN2 + specfun.ln_beta_real(0.5, n)
            + 2 * n * (specfun.digamma(2.0 * n) - specfun.digamma(float(n))))


# --- trigonometric well ---------------------------------------------------------

def _check_level(n):
    if int(n) != n or n < 0:
        raise DomainError("level index n must be a non-negative integer")
    return int(n)


def spt_energy(spec, n):
    """Energy alpha^2 (n + rho)^2 of level n."""
    n = _check_level(n)
    return spec.alpha ** 2 * (n + spec.rho) ** 2


def spt_log_norm(spec, n):
    """log of the normalisation constant of level n (square-normalised in y)."""
    rho = spec.rho
    return 0.5 * (math.log(spec.alpha) + specfun.ln_gamma_real(n + 1.0) + math.log(n + rho)
                  + specfun.ln_gamma_real(rho) + specfun.ln_gamma_real(2.0 * rho)
                  - 0.5 * math.log(math.pi) - specfun.ln_gamma_real(rho + 0.5)
                  - specfun.ln_gamma_real(n + 2.0 * rho))


def _check_inside(spec, y):
    y = np.asarray(y, dtype=np.float64)
    if np.any(~np.isfinite(y)) or np.any(np.abs(y) >= spec.half_width):
        raise DomainError("y must lie strictly inside the well |y| < pi/(2 alpha)")
    return y


def spt_basis(spec, nmax, y):
    """Eigenfunctions 0..nmax-1 at the points ``y`` as a (nmax, len(y)) array."""
    if int(nmax) != nmax or nmax < 1:
        raise DomainError("need at least one basis state")
    y = _check_inside(spec, y).ravel()
    s = np.sin(spec.alpha * y)
    log_envelope = spec.rho * np.log(np.cos(spec.alpha * y))
    poly = specfun.gegenbauer_table(int(nmax) - 1, spec.rho, s)
    log_norms = np.array([spt_log_norm(spec, k) for k in range(int(nmax))])
    return poly * np.exp(log_norms[:, None] + log_envelope[None, :])


def spt_eigenfunction(spec, n, y):
    """Level-n eigenfunction (1 - x^2)^(rho/2) C_n^rho(x) with x = sin(alpha y)."""
    n = _check_level(n)
    values = spt_basis(spec, n + 1, np.atleast_1d(y))[n]
    if np.ndim(y) == 0:
        return float(values[0])
    return values.reshape(np.shape(y))
