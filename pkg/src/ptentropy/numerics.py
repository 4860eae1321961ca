"""Quadrature on the real line and on intervals, and the unitary Fourier transform.

Integrals use double-exponential variable transforms (sinh-sinh on the
real line, tanh-sinh on a finite interval) with dyadic step halving. The
error estimate is the change between the last two levels, floored at a
multiple of the rounding noise of the sum.

The position-to-momentum transform uses

    psi~(p) = (2 pi)^(-1/2) * integral psi(x) exp(-i p x) dx,

evaluated point by point with the trapezoid rule on a truncated domain.
For integrands analytic in a strip the trapezoid error is set by aliasing
(psi~ at p +/- 2 pi / h), so halving h converges geometrically.
"""
import math
import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import ConvergenceError, DomainError

NORM_TOL = 1e-10
ENTROPY_TOL = 1e-9
FOURIER_TOL = 1e-12
MAX_EVALUATIONS = 1 << 20
TOL_ENV_VAR = "PTENTROPY_TOL"

_EPS = np.finfo(float).eps
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def default_tol(kind="norm"):
    """Default quadrature tolerance, overridable through ``PTENTROPY_TOL``."""
    override = os.environ.get(TOL_ENV_VAR)
    if override:
        return float(override)
    return {"norm": NORM_TOL, "entropy": ENTROPY_TOL, "fourier": FOURIER_TOL}[kind]


class QuadResult(NamedTuple):
    value: float
    err_estimate: float


@dataclass(frozen=True)
class Grid1D:
    """Strictly increasing, finite sample points."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 1 or pts.size < 2:
            raise DomainError("a grid needs at least two points")
        if not np.all(np.isfinite(pts)):
            raise DomainError("grid points must be finite")
        if np.any(np.diff(pts) <= 0.0):
            raise DomainError("grid points must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def lo(self):
        return float(self.points[0])

    @property
    def hi(self):
        return float(self.points[-1])

    def __len__(self):
        return self.points.size

    @classmethod
    def linspace(cls, lo, hi, count):
        if count < 2 or not hi > lo:
            raise DomainError("need lo < hi and count >= 2")
        return cls(np.linspace(lo, hi, int(count)))

    @classmethod
    def parse(cls, text):
        """Build a uniform grid from ``"lo:hi:count"``."""
        try:
            lo, hi, count = text.split(":")
            return cls.linspace(float(lo), float(hi), int(count))
        except ValueError as exc:
            raise DomainError(f"bad grid specification {text!r}: {exc}") from None

    def is_uniform(self, rtol=1e-9):
        d = np.diff(self.points)
        return bool(np.all(np.abs(d - d[0]) <= rtol * abs(d[0])))


@dataclass(frozen=True)
class ComplexField:
    """Complex samples on a grid, e.g. a momentum-space wavefunction."""

    grid: Grid1D
    values: np.ndarray
    err_estimate: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (len(self.grid),):
            raise DomainError("field length does not match its grid")
        if not np.all(np.isfinite(vals)):
            raise DomainError("field values must be finite")
        object.__setattr__(self, "values", vals)


# --- double-exponential quadrature -------------------------------------------

def _sinh_sinh(t, scale):
    u = 0.5 * math.pi * np.sinh(t)
    x = scale * np.sinh(u)
    w = scale * 0.5 * math.pi * np.cosh(t) * np.cosh(u)
    return x, w


def _tanh_sinh(a, b):
    half = 0.5 * (b - a)

    def transform(t):
        u = 0.5 * math.pi * np.sinh(t)
        # Distance to the nearer endpoint, computed without cancellation.
        gap = 2.0 * half / (np.exp(2.0 * np.abs(u)) + 1.0)
        x = np.where(t >= 0.0, b - gap, a + gap)
        w = half * 0.5 * math.pi * np.cosh(t) / np.cosh(u) ** 2
        keep = (x > a) & (x < b) & (w > 0.0)
        return x, w, keep

    return transform


def _weighted_sum(f, transform, t):
    x, w, keep = transform(t)
    x, w = x[keep], w[keep]
    if x.size == 0:
        return 0.0, 0.0, 0
    fx = np.asarray(f(x), dtype=np.float64)
    if fx.shape != x.shape:
        fx = np.broadcast_to(fx, x.shape)
    terms = w * fx
    if not np.all(np.isfinite(terms)):
        raise ConvergenceError("integrand is not finite at a quadrature node")
    return float(np.sum(terms)), float(np.sum(np.abs(terms))), x.size


def _de_quadrature(f, transform, tol, tmax, max_evals, h0=0.5):
    if not tol > 0.0:
        raise DomainError("tolerance must be positive")
    h = h0
    m = int(math.ceil(tmax / h))
    total, abs_total, evals = _weighted_sum(f, transform, h * np.arange(-m, m + 1))
    estimate = h * total
    errors = []
    while True:
        h *= 0.5
        m = int(math.ceil(tmax / h))
        k = np.arange(-m, m + 1)
        odd = k[k % 2 != 0]
        s_new, a_new, n_new = _weighted_sum(f, transform, h * odd)
        total += s_new
        abs_total += a_new
        evals += n_new
        new_estimate = h * total
        err = max(abs(new_estimate - estimate), 64.0 * _EPS * h * abs_total)
        estimate = new_estimate
        errors.append(err)
        if len(errors) >= 2 and err <= tol:
            return QuadResult(float(estimate), float(err))
        stalled = len(errors) >= 6 and err >= errors[-3]
        if stalled or evals >= max_evals:
            reason = "stalled at its rounding floor" if stalled else "hit the evaluation cap"
            raise ConvergenceError(
                f"quadrature {reason}: estimate {estimate!r}, error {err:.3g} > tol {tol:.3g}",
                value=estimate, err_estimate=err)


def _exp_sinh(a, direction):
    def transform(t):
        offset = np.exp(0.5 * math.pi * np.sinh(t))
        x = a + direction * offset
        w = 0.5 * math.pi * np.cosh(t) * offset
        keep = np.isfinite(x) & np.isfinite(w) & (w > 0.0) & (x != a)
        return x, w, keep

    return transform


def _add(results):
    return QuadResult(float(sum(r.value for r in results)),
                      float(sum(r.err_estimate for r in results)))


def integrate_real_line(f, tol=None, scale=1.0, breakpoints=(), max_evals=MAX_EVALUATIONS):
    """Integrate a vectorised ``f`` over the whole real line.

    ``f`` should decay at least exponentially. ``scale`` sets the width of the
    region the nodes concentrate on. Points where ``f`` is not analytic (for
    instance ``x**2 log x**2`` at a wavefunction node) belong in
    ``breakpoints``; the line is then split there so each piece keeps
    double-exponential convergence.

    Returns
    -------
    QuadResult
        ``(value, err_estimate)``.

    Raises
    ------
    ConvergenceError
        When the error estimate cannot be pushed below ``tol``; the exception
        carries the last estimate.
    """
    tol = default_tol("norm") if tol is None else tol
    if breakpoints:
        cuts = sorted(float(c) for c in breakpoints)
        share = tol / (len(cuts) + 1)
        pieces = [_de_quadrature(f, _exp_sinh(cuts[0], -1.0), share, 3.5, max_evals)]
        pieces += [integrate_interval(f, lo, hi, share, max_evals)
                   for lo, hi in zip(cuts[:-1], cuts[1:])]
        pieces.append(_de_quadrature(f, _exp_sinh(cuts[-1], 1.0), share, 3.5, max_evals))
        return _add(pieces)

    def transform(t):
        x, w = _sinh_sinh(t, scale)
        return x, w, np.isfinite(x) & np.isfinite(w) & (w > 0.0)

    return _de_quadrature(f, transform, tol, tmax=3.5, max_evals=max_evals)


def integrate_interval(f, a, b, tol=None, max_evals=MAX_EVALUATIONS, breakpoints=()):
    """Integrate a vectorised ``f`` over ``[a, b]`` with tanh-sinh nodes.

    Nodes never land on the endpoints, so integrable endpoint singularities
    are fine as long as ``f`` is finite in the open interval. Interior
    breakpoints split the interval.
    """
    tol = default_tol("norm") if tol is None else tol
    if not (np.isfinite(a) and np.isfinite(b)) or not b > a:
        raise DomainError("integrate_interval needs finite a < b")
    cuts = [float(a)] + sorted(float(c) for c in breakpoints if a < c < b) + [float(b)]
    share = tol / (len(cuts) - 1)
    return _add([_de_quadrature(f, _tanh_sinh(lo, hi), share, 3.5, max_evals)
                 for lo, hi in zip(cuts[:-1], cuts[1:])])


def trapezoid_profile(values, points):
    """Trapezoid integral of samples, with an estimate from the half-density rule."""
    values = np.asarray(values, dtype=np.float64)
    value = float(np.trapezoid(values, points))
    if values.size >= 5 and values.size % 2 == 1:
        coarse = float(np.trapezoid(values[::2], points[::2]))
        err = abs(value - coarse)
    else:
        err = abs(value) * 1e-3
    return QuadResult(value, max(err, 16.0 * _EPS * abs(value)))


# --- Fourier transform ---------------------------------------------------------

def support_half_width(psi, tail=1e-15, start=4.0, limit=1e6):
    """Half-width X beyond which ``|psi(x)| < tail`` (sampled check)."""
    half = start
    while half <= limit:
        x = np.linspace(0.5 * half, half, 65)
        mag = np.maximum(np.abs(psi(x)), np.abs(psi(-x)))
        if np.max(mag) < tail:
            # Trim back to the last sample that still exceeds the tail.
            x = np.linspace(0.0, half, 513)
            mag = np.maximum(np.abs(psi(x)), np.abs(psi(-x)))
            above = np.nonzero(mag >= tail)[0]
            return float(x[min(above[-1] + 1, x.size - 1)]) if above.size else half
        half *= 2.0
    raise ConvergenceError(f"wavefunction does not decay below {tail:g} within |x| <= {limit:g}")


class FourierTransform:
    """Point-by-point unitary Fourier transform of a position-space wavefunction.

    Parameters
    ----------
    psi : callable
        Vectorised wavefunction of x, real or complex valued.
    tol : float
        Target absolute accuracy of each transformed amplitude.
    tail : float
        Amplitude below which the position tails are discarded.
    sign : float
        Sign of the exponent in the kernel; -1 is the physics convention.
    """

    def __init__(self, psi, tol=None, tail=1e-15, sign=-1.0, max_halvings=14):
        self.psi = psi
        self.tol = default_tol("fourier") if tol is None else tol
        self.sign = sign
        self.max_halvings = max_halvings
        self.half_width = support_half_width(psi, tail)
        self.err_estimate = 0.0

    def __call__(self, p):
        p = np.asarray(p, dtype=np.float64)
        flat = p.ravel()
        if flat.size == 0:
            return np.zeros(p.shape, dtype=np.complex128)
        pmax = float(np.max(np.abs(flat)))
        X = self.half_width
        h = min(0.5, math.pi / pmax) if pmax > 0 else 0.5
        npts = int(math.ceil(X / h))
        h = X / npts
        x = h * np.arange(-npts, npts + 1)
        total = _kernels.fourier_sum(x, np.asarray(self.psi(x), dtype=np.complex128),
                                     flat, self.sign)
        current = h * total / _SQRT_2PI
        for _ in range(self.max_halvings):
            h *= 0.5
            x_new = h * np.arange(-2 * npts + 1, 2 * npts, 2)
            npts *= 2
            total = total + _kernels.fourier_sum(
                x_new, np.asarray(self.psi(x_new), dtype=np.complex128), flat, self.sign)
            refined = h * total / _SQRT_2PI
            err = float(np.max(np.abs(refined - current)))
            current = refined
            if err <= self.tol:
                self.err_estimate = err
                return current.reshape(p.shape)
        raise ConvergenceError("Fourier sum did not converge", value=current, err_estimate=err)

    def density(self, p):
        amp = self(p)
        return amp.real ** 2 + amp.imag ** 2

    def extent(self, tail=1e-14, start=4.0, limit=1e4):
        """Momentum cutoff P with ``|psi~(p)|^2 < tail`` on ``P/2 <= |p| <= P``."""
        cutoff = start
        while cutoff <= limit:
            p = np.linspace(0.5 * cutoff, cutoff, 33)
            if np.max(np.maximum(self.density(p), self.density(-p))) < tail:
                return cutoff
            cutoff *= 2.0
        raise ConvergenceError(f"momentum density does not fall below {tail:g} within |p| <= {limit:g}")


def fourier_to_momentum(psi, p_grid, tol=None, sign=-1.0):
    """Transform ``psi`` onto ``p_grid`` and return a :class:`ComplexField`."""
    transform = FourierTransform(psi, tol=tol, sign=sign)
    values = transform(p_grid.points)
    return ComplexField(p_grid, values, transform.err_estimate)
