"""Self-test suite run by ``ptentropy selftest``.

Each check recomputes its quantities and compares them against an
independent route, such as a closed form or the reference Table 1 values
shipped in ``data/table1_reference.csv``. Failures, including
convergence failures, are returned as data rather than raised.
"""
import csv
import io
import math
import time
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import coherent, eigenstates, entropy, numerics, specfun
from .errors import ConvergenceError, DomainError

_CHECKS = []


def check(name):
    def register(func):
        _CHECKS.append((name, func))
        return func
    return register


@dataclass
class CheckResult:
    name: str
    passed: bool
    seconds: float
    detail: dict = field(default_factory=dict)
    error: str = None

    def as_dict(self):
        out = {"name": self.name, "passed": self.passed,
               "seconds": round(self.seconds, 4), "detail": self.detail}
        if self.error:
            out["error"] = self.error
        return out


class Context:
    """Shared settings and memoised state reports for one suite run."""

    def __init__(self, tol=None, ft_sign=-1.0):
        self.tol = tol
        self.ft_sign = ft_sign
        self._reports = {}

    def report(self, n, state):
        key = (n, state)
        if key not in self._reports:
            self._reports[key] = entropy.hpt_entropy_report(n, state, tol=self.tol)
        return self._reports[key]


def reference_table1():
    text = resources.files("ptentropy").joinpath("data/table1_reference.csv").read_text()
    return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(io.StringIO(text))]


def excited_momentum_closed_form(n, p):
    """Momentum amplitude of the first excited state from the derivative identity

    sech^(n-1)(x/2) tanh(x/2) = -2/(n-1) d/dx sech^(n-1)(x/2),

    so its transform is -i p (2/(n-1)) times that of sech^(n-1)(x/2).
    """
    m = n - 1
    log_norm = -0.5 * (math.log(2.0) + specfun.ln_beta_real(0.5, m) - math.log(2 * n - 1))
    mag = np.exp(log_norm + m * math.log(2.0) + specfun.ln_beta_complex_symmetric(m, p))
    return -1j * (2.0 / m) * p * mag / math.sqrt(2.0 * math.pi)


# --- acceptance criteria ------------------------------------------------------

@check("A1 ground state n=1 exact entropies")
def _ground_n1(ctx):
    start = time.perf_counter()
    r = entropy.hpt_entropy_report(1, "ground", tol=ctx.tol)
    elapsed = time.perf_counter() - start
    exact_mom = 2.0 - math.log(2.0 * math.pi)
    ok = (abs(r.s_pos - 2.0) < 1e-9 and abs(r.s_mom - exact_mom) < 1e-8
          and r.sum >= entropy.BBM_BOUND and elapsed < 1.0)
    return ok, {"s_pos": r.s_pos, "s_mom": r.s_mom, "sum": r.sum, "seconds": elapsed}


@check("A2 closed-form ground entropy equals quadrature, n=1..20")
def _ground_formula(ctx):
    start = time.perf_counter()
    worst = 0.0
    for n in range(1, 21):
        analytic = eigenstates.hpt_analytic_ground_entropy(n)
        worst = max(worst, abs(analytic - ctx.report(n, "ground").s_pos))
    elapsed = time.perf_counter() - start
    exact2 = 10.0 / 3.0 - math.log(6.0)
    gap2 = abs(eigenstates.hpt_analytic_ground_entropy(2) - exact2)
    ok = worst < 1e-8 and gap2 <= 4 * np.finfo(float).eps * exact2 and elapsed < 10.0
    return ok, {"max_abs_difference": worst, "n2_gap": gap2, "seconds": elapsed}


@check("A3 first excited state reproduces Table 1")
def _table1(ctx):
    start = time.perf_counter()
    worst_s, worst_sum = 0.0, 0.0
    for row in reference_table1():
        r = ctx.report(int(row["n"]), "excited")
        worst_s = max(worst_s, abs(r.s_pos - row["s_pos"]), abs(r.s_mom - row["s_mom"]))
        worst_sum = max(worst_sum, abs(r.sum - row["sum"]))
    elapsed = time.perf_counter() - start
    ok = worst_s < 1e-3 and worst_sum < 2e-3 and elapsed < 60.0
    return ok, {"max_entropy_gap": worst_s, "max_sum_gap": worst_sum, "seconds": elapsed}


@check("A4 entropy-sum trends and the BBM bound")
def _trends(ctx):
    ground = [ctx.report(n, "ground").sum for n in range(1, 21)]
    excited = [ctx.report(n, "excited").sum for n in range(2, 14)]
    ok = (all(np.diff(ground) < 0) and min(ground) > entropy.BBM_BOUND
          and all(np.diff(excited) < 0) and min(excited) > entropy.BBM_BOUND
          and excited[-1] > ctx.report(13, "ground").sum)
    return ok, {"ground_min_sum": min(ground), "excited_min_sum": min(excited)}


@check("A5 position and momentum densities are normalised")
def _norms(ctx):
    worst_pos, worst_mom = 0.0, 0.0
    for state, first in (("ground", 1), ("excited", 2)):
        for n in range(first, 14):
            d = entropy.hpt_densities(n, state, ft_sign=ctx.ft_sign)
            pos, _ = numerics.integrate_real_line(d.position, tol=1e-12, breakpoints=d.nodes)
            if d.momentum_domain is None:
                mom, _ = numerics.integrate_real_line(d.momentum, tol=1e-12)
            else:
                mom, _ = numerics.integrate_interval(d.momentum, *d.momentum_domain,
                                                     tol=1e-12, breakpoints=d.nodes)
            worst_pos = max(worst_pos, abs(pos - 1.0))
            worst_mom = max(worst_mom, abs(mom - 1.0))
    return worst_pos < 1e-10 and worst_mom < 1e-8, {"position": worst_pos, "momentum": worst_mom}


def dip_flags(n, space):
    grid = numerics.Grid1D.linspace(-12.0, 12.0, 2401)
    if space == "position":
        f = lambda x: eigenstates.hpt_ground_position(n, x) ** 2
    else:
        f = lambda p: eigenstates.hpt_ground_momentum(n, p) ** 2
    return entropy.dip_criterion(entropy.DensityProfile.from_callable(f, grid))


@check("A6 entropy-density dip at the peak")
def _dips(ctx):
    pos = {n: dip_flags(n, "position") for n in (1, 3, 5)}
    mom = {n: dip_flags(n, "momentum") for n in (1, 3, 5)}
    ok = not pos[1] and pos[3] and pos[5]
    return ok, {"position": pos, "momentum": mom}


@check("A7 coherent state normalisation and revival")
def _coherent(ctx):
    start = time.perf_counter()
    spec = coherent.CoherentStateSpec(eigenstates.TrigPTSpec(2.0, 1.0), 5.0, 40)
    c = coherent.coherent_coefficients(spec)
    coeff_norm = float(np.sum(np.abs(c.coeffs) ** 2))
    norm, _ = coherent.norm_at(spec, c, 0.0)
    x = coherent.default_x_grid(spec.well, 400).points
    rows = coherent.coherent_density(spec, c, x, [0.0, 2.0 * math.pi])
    revival = float(np.max(np.abs(rows[1] - rows[0])))
    elapsed = time.perf_counter() - start
    ok = (abs(coeff_norm - 1) < 1e-12 and abs(norm - 1) < 1e-9 and revival < 1e-8
          and elapsed < 30.0)
    return ok, {"coeff_norm": coeff_norm, "density_norm": norm,
                "revival_deviation": revival, "seconds": elapsed}


@check("A8 carpet is deterministic and finite within the time limit")
def _carpet(ctx):
    spec = coherent.CoherentStateSpec(eigenstates.TrigPTSpec(2.0, 1.0), 15.0, 30)
    xg = coherent.default_x_grid(spec.well, 200)
    tg = coherent.default_t_grid(spec.well, 200)
    start = time.perf_counter()
    first = coherent.entropy_carpet(spec, xg, tg).values
    elapsed = time.perf_counter() - start
    second = coherent.entropy_carpet(spec, xg, tg).values
    identical = first.tobytes() == second.tobytes()
    ok = identical and bool(np.all(np.isfinite(first))) and elapsed < 60.0
    return ok, {"identical": identical, "seconds": elapsed}


@check("A9 entropy does not exceed the Gaussian bound for its variance")
def _variance(ctx):
    worst = -math.inf
    for state, first in (("ground", 1), ("excited", 2)):
        for n in range(first, 14):
            d = entropy.hpt_densities(n, state, ft_sign=ctx.ft_sign)
            for dens, dom in ((d.position, None), (d.momentum, d.momentum_domain)):
                vb = entropy.variance_entropy_bound(dens, tol=ctx.tol, domain=dom,
                                                    breakpoints=d.nodes)
                worst = max(worst, vb.entropy - vb.bound)
    gauss = lambda x: np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    g = entropy.variance_entropy_bound(gauss, tol=ctx.tol)
    saturation = abs(g.entropy - g.bound)
    return worst <= 1e-9 and saturation < 1e-10, {"max_excess": worst, "gaussian_gap": saturation}


# --- invariants ---------------------------------------------------------------------

@check("I1 numerical transform matches closed-form momentum amplitudes")
def _fourier_pointwise(ctx):
    p = np.linspace(-10.0, 10.0, 201)
    worst = 0.0
    for n in range(2, 6):
        psi = lambda x, n=n: eigenstates.hpt_excited_position(n, x)
        ft = numerics.FourierTransform(psi, sign=ctx.ft_sign)
        worst = max(worst, float(np.max(np.abs(ft(p) - excited_momentum_closed_form(n, p)))))
    for n in range(1, 9):
        psi = lambda x, n=n: eigenstates.hpt_ground_position(n, x)
        ft = numerics.FourierTransform(psi, sign=ctx.ft_sign)
        worst = max(worst, float(np.max(np.abs(ft(p) - eigenstates.hpt_ground_momentum(n, p)))))
    return worst < 1e-8, {"max_abs_difference": worst}


@check("I2 transform parity and linearity")
def _fourier_structure(ctx):
    p = np.linspace(-8.0, 8.0, 161)
    even = numerics.FourierTransform(lambda x: eigenstates.hpt_ground_position(3, x),
                                     sign=ctx.ft_sign)(p)
    odd = numerics.FourierTransform(lambda x: eigenstates.hpt_excited_position(3, x),
                                    sign=ctx.ft_sign)(p)
    mix = numerics.FourierTransform(
        lambda x: 0.6 * eigenstates.hpt_ground_position(3, x)
        - 0.8j * eigenstates.hpt_excited_position(3, x), sign=ctx.ft_sign)(p)
    detail = {
        "even_imag": float(np.max(np.abs(even.imag))),
        "odd_real": float(np.max(np.abs(odd.real))),
        "even_symmetry": float(np.max(np.abs(even - even[::-1]))),
        "odd_symmetry": float(np.max(np.abs(odd + odd[::-1]))),
        "linearity": float(np.max(np.abs(mix - (0.6 * even - 0.8j * odd)))),
    }
    ok = (max(detail["even_imag"], detail["odd_real"], detail["even_symmetry"],
              detail["odd_symmetry"]) < 1e-12 and detail["linearity"] < 1e-10)
    return ok, detail


@check("I3 special-function identities")
def _specfun(ctx):
    x = np.linspace(0.01, 1000.0, 5001)
    recurrence = float(np.max(np.abs(specfun.digamma(x + 1) - specfun.digamma(x) - 1 / x)))
    n = np.arange(1, 60, dtype=float)
    b = specfun.beta_real(0.5, n)
    beta_rec = float(np.max(np.abs(specfun.beta_real(0.5, n + 1) / (b * n / (n + 0.5)) - 1)))
    z = (np.linspace(0.3, 20, 40)[:, None] + 1j * np.linspace(-15, 15, 31)[None, :]).ravel()
    lhs = specfun.ln_gamma_complex(2 * z)
    rhs = ((2 * z - 1) * math.log(2.0) + specfun.ln_gamma_complex(z)
           + specfun.ln_gamma_complex(z + 0.5) - 0.5 * math.log(math.pi))
    duplication = float(np.max(np.abs(np.exp(lhs - rhs) - 1)))
    ok = recurrence < 1e-13 and beta_rec < 1e-12 and duplication < 1e-11
    return ok, {"digamma_recurrence": recurrence, "beta_recurrence": beta_rec,
                "duplication": duplication}


@check("I4 trigonometric eigenfunctions are orthonormal")
def _spt_gram(ctx):
    spec = eigenstates.TrigPTSpec(2.0, 1.0)
    w = spec.half_width
    gram = np.empty((12, 12))
    for i in range(12):
        for j in range(i, 12):
            f = lambda y: (eigenstates.spt_eigenfunction(spec, i, y)
                           * eigenstates.spt_eigenfunction(spec, j, y))
            gram[i, j] = gram[j, i] = numerics.integrate_interval(f, -w, w, tol=1e-12).value
    worst = float(np.max(np.abs(gram - np.eye(12))))
    return worst < 1e-9, {"max_gram_error": worst}


@check("I5 entropy scaling law and reflection invariance")
def _scaling(ctx):
    base = lambda x: eigenstates.hpt_ground_position(4, x) ** 2
    squeezed = lambda x: 2.0 * base(2.0 * x)
    s0 = entropy.shannon_entropy(base, tol=ctx.tol).value
    s2 = entropy.shannon_entropy(squeezed, tol=ctx.tol).value
    grid = numerics.Grid1D.linspace(-30.0, 30.0, 6001)
    prof = entropy.DensityProfile.from_callable(
        lambda x: eigenstates.hpt_excited_position(4, x) ** 2, grid)
    shifted = entropy.DensityProfile.from_callable(
        lambda x: eigenstates.hpt_excited_position(4, x - 1.0) ** 2, grid)
    a = entropy.shannon_entropy(shifted).value
    b = entropy.shannon_entropy(shifted.reflected()).value
    c = entropy.shannon_entropy(prof).value
    ok = abs(s2 - (s0 - math.log(2.0))) < 1e-9 and abs(a - b) < 1e-12 and abs(a - c) < 1e-9
    return ok, {"scaling_gap": s2 - (s0 - math.log(2.0)), "reflection_gap": a - b}


@check("I6 coherent-state coefficient ordering and norm conservation")
def _coherent_invariants(ctx):
    well = eigenstates.TrigPTSpec(2.0, 1.0)
    peaks = [int(np.argmax(np.abs(coherent.coherent_coefficients(
        coherent.CoherentStateSpec(well, g, 40)).coeffs))) for g in (5, 10, 15, 30)]
    spec = coherent.CoherentStateSpec(well, 5.0, 40)
    c = coherent.coherent_coefficients(spec)
    norms = [coherent.norm_at(spec, c, t).value for t in (0.3, 1.7, 4.2)]
    e40 = float(entropy.entropy_density(coherent.coherent_density(spec, c, [0.0], [0.0])[0, 0]))
    spec80 = coherent.CoherentStateSpec(well, 5.0, 80)
    c80 = coherent.coherent_coefficients(spec80)
    e80 = float(entropy.entropy_density(coherent.coherent_density(spec80, c80, [0.0], [0.0])[0, 0]))
    ok = (all(np.diff(peaks) >= 0) and max(abs(v - 1) for v in norms) < 1e-8
          and abs(e40 - e80) < 1e-6 and c.tail_mass < 1e-12)
    return ok, {"peak_index": peaks, "norms": norms, "truncation_change": abs(e40 - e80)}


def run_selftest(tol=None, inject_fault=None):
    """Run every registered check; returns a list of :class:`CheckResult`."""
    ft_sign = -1.0
    if inject_fault == "ft-sign":
        ft_sign = 1.0
    elif inject_fault is not None:
        raise DomainError(f"unknown fault {inject_fault!r}")
    ctx = Context(tol=tol, ft_sign=ft_sign)
    results = []
    for name, func in _CHECKS:
        start = time.perf_counter()
        try:
            passed, detail = func(ctx)
            results.append(CheckResult(name, bool(passed), time.perf_counter() - start, detail))
        except (ConvergenceError, DomainError, FloatingPointError) as exc:
            detail = {"exception": type(exc).__name__}
            if isinstance(exc, ConvergenceError):
                detail.update(last_value=exc.value if np.isscalar(exc.value) else None,
                              err_estimate=exc.err_estimate)
            results.append(CheckResult(name, False, time.perf_counter() - start,
                                       detail, error=str(exc)))
    return results
