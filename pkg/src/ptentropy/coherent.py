"""Annihilation-operator coherent states of the trigonometric well and their entropy carpets.

The coherent state is the superposition

    chi(y, t) = sum_n c_n exp(-i E_n t) psi_n(y),
    c_n ~ gamma^n / sqrt(n! (n + rho) Gamma(2 rho + n)),

truncated to ``n_states`` terms and renormalised so sum |c_n|^2 = 1. The
constant factors in the weight (Gamma(rho + 1/2), sqrt(pi), alpha) drop
out in that renormalisation. Time evolution uses the exact eigenphases.
"""
import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels, eigenstates, specfun
from .entropy import entropy_density
from .errors import DomainError
from .numerics import Grid1D, integrate_interval

TRUNCATION_WARN_LEVEL = 1e-8
# Terms whose log-weight falls this far below the peak are ignored in the tail sum.
_LOG_NEGLIGIBLE = 80.0


@dataclass(frozen=True)
class CoherentStateSpec:
    well: eigenstates.TrigPTSpec
    gamma: complex
    n_states: int

    def __post_init__(self):
        gamma = complex(self.gamma)
        if not cmath.isfinite(gamma):
            raise DomainError("coherence parameter gamma must be finite")
        if int(self.n_states) != self.n_states or self.n_states < 1:
            raise DomainError("n_states must be a positive integer")
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "n_states", int(self.n_states))

    def energies(self):
        n = np.arange(self.n_states)
        return self.well.alpha ** 2 * (n + self.well.rho) ** 2


@dataclass(frozen=True)
class CoefficientVector:
    coeffs: np.ndarray
    tail_mass: float

    @property
    def truncation_warning(self):
        return self.tail_mass > TRUNCATION_WARN_LEVEL


@dataclass(frozen=True)
class CarpetField:
    """Entropy density -rho ln rho on a (t, x) grid; rows are times."""

    x_grid: Grid1D
    t_grid: Grid1D
    values: np.ndarray
    gamma: complex
    n_states: int

    def __post_init__(self):
        if self.values.shape != (len(self.t_grid), len(self.x_grid)):
            raise DomainError("carpet shape does not match its grids")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("carpet contains non-finite entries")


def _log_weights(rho, count, log_abs_gamma):
    n = np.arange(count, dtype=np.float64)
    return (n * log_abs_gamma
            - 0.5 * (specfun.ln_gamma_real(n + 1.0) + np.log(n + rho)
                     + specfun.ln_gamma_real(n + 2.0 * rho)))


def coherent_coefficients(spec):
    """Normalised expansion coefficients c_0 .. c_{n_states-1}.

    ``tail_mass`` is the share of the untruncated norm carried by the
    discarded terms n >= n_states.
    """
    rho, gamma, count = spec.well.rho, spec.gamma, spec.n_states
    if gamma == 0:
        coeffs = np.zeros(count, dtype=np.complex128)
        coeffs[0] = 1.0
        return CoefficientVector(coeffs, 0.0)
    log_abs = math.log(abs(gamma))
    kept = _log_weights(rho, count, log_abs)
    # Extend past the truncation until the terms are negligible.
    total = count
    while True:
        extra = _log_weights(rho, 2 * total, log_abs)
        peak = extra.max()
        if extra[-1] < peak - _LOG_NEGLIGIBLE and np.all(np.diff(extra[total:]) < 0):
            break
        total *= 2
    log_mass = 2.0 * extra
    shift = log_mass.max()
    mass = np.exp(log_mass - shift)
    tail_mass = float(mass[count:].sum() / mass.sum())

    log_kept = 2.0 * kept
    norm = np.exp(log_kept - log_kept.max()).sum()
    mags = np.exp(kept - 0.5 * log_kept.max()) / math.sqrt(norm)
    phases = np.exp(1j * cmath.phase(gamma) * np.arange(count))
    return CoefficientVector(mags * phases, tail_mass)


def _basis(spec, y):
    return eigenstates.spt_basis(spec.well, spec.n_states, y)


def coherent_amplitude(spec, coeffs, y, t):
    """chi(y, t) = sum_n c_n exp(-i E_n t) psi_n(y) at the points ``y``."""
    y_arr = np.atleast_1d(np.asarray(y, dtype=np.float64))
    phases = coeffs.coeffs * np.exp(-1j * spec.energies() * float(t))
    values = phases @ _basis(spec, y_arr.ravel())
    if np.ndim(y) == 0:
        return complex(values[0])
    return values.reshape(np.shape(y))


def coherent_density(spec, coeffs, y, times):
    """|chi|^2 on the grid times x y, one row per time."""
    y = np.asarray(y, dtype=np.float64).ravel()
    times = np.atleast_1d(np.asarray(times, dtype=np.float64))
    return _kernels.superposition_density(_basis(spec, y), coeffs.coeffs,
                                          spec.energies(), times)


def default_x_grid(well, points=400):
    """Interior grid with a margin of 1e-3/alpha from each wall."""
    eps = 1e-3 / well.alpha
    return Grid1D.linspace(-well.half_width + eps, well.half_width - eps, points)


def default_t_grid(well, points=400, t_max=None):
    """Times from 0 to ``t_max`` (one revival time 2 pi / alpha^2 by default)."""
    t_max = 2.0 * math.pi / well.alpha ** 2 if t_max is None else t_max
    return Grid1D.linspace(0.0, t_max, points)


def entropy_carpet(spec, x_grid=None, t_grid=None):
    """Entropy density -rho ln rho of the evolving coherent state on a (t, x) grid."""
    x_grid = default_x_grid(spec.well) if x_grid is None else x_grid
    t_grid = default_t_grid(spec.well) if t_grid is None else t_grid
    coeffs = coherent_coefficients(spec)
    rho = coherent_density(spec, coeffs, x_grid.points, t_grid.points)
    return CarpetField(x_grid, t_grid, entropy_density(rho), spec.gamma, spec.n_states)


def norm_at(spec, coeffs, t, tol=1e-10):
    """Integral of |chi(y, t)|^2 over the well."""
    w = spec.well.half_width
    return integrate_interval(
        lambda y: coherent_density(spec, coeffs, y, [t])[0], -w, w, tol=tol)


class RevivalReport(NamedTuple):
    period: Optional[float]
    max_density_deviation: float


def revival_report(spec, x_grid=None, max_multiple=4, tol=1e-8):
    """Smallest verified revival time of the density, when one is guaranteed.

    Relative phases at t = k pi / alpha^2 are k pi (n^2 + 2 n rho), which
    are all multiples of 2 pi for k = 2 whenever 2 rho is an integer. The
    candidates k = 1 .. max_multiple are scanned and the first whose
    density matches t = 0 within ``tol`` is reported. Without an integer
    2 rho no period is claimed; the deviation at 2 pi / alpha^2 is
    returned as a diagnostic.
    """
    x_grid = default_x_grid(spec.well, 201) if x_grid is None else x_grid
    coeffs = coherent_coefficients(spec)
    unit = math.pi / spec.well.alpha ** 2
    twice_rho = 2.0 * spec.well.rho
    candidates = np.arange(1, max_multiple + 1) * unit
    rows = coherent_density(spec, coeffs, x_grid.points, np.concatenate([[0.0], candidates]))
    deviations = np.max(np.abs(rows[1:] - rows[0]), axis=1)
    if abs(twice_rho - round(twice_rho)) > 1e-12:
        return RevivalReport(None, float(deviations[1]))
    for k, dev in enumerate(deviations, start=1):
        if dev < tol:
            return RevivalReport(k * unit, float(dev))
    return RevivalReport(None, float(deviations.min()))
