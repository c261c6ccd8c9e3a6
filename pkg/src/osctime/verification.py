"""Acceptance suite shared by ``osc-time verify`` and the test-suite.

Every check returns a :class:`CheckResult`; thresholds are fixed here and
nowhere else.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .analysis import (
    blowup_scan,
    dense_scan_minimum,
    find_min_alpha,
    fit_period_coefficient,
    loglog_slope,
    sweep,
)
from .integrator import DEFAULT_TOL
from .io import csv_text
from .models import Nonlinearity, damped_frequency, linear_tau
from .oscillation import (
    fd_sensitivity,
    half_oscillation_time,
    sensitivity_at,
    tau_half_polar,
    v2_closed_form,
    varpar_residual,
    x1_closed_form,
)

LINEAR = Nonlinearity.linear()
SINE = Nonlinearity.sine()
DUFFING = Nonlinearity.duffing(1.0)
DUFFING_HARD = Nonlinearity.duffing(-1.0)

BOUND_X0 = (0.1, 0.3, 0.5)
BOUND_ALPHA = (0.0, 0.2, 0.4, 0.6)


@dataclass(frozen=True)
class CheckResult:
    key: str
    title: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.key} {self.title}: {self.detail}"


def agm(a: float, b: float) -> float:
    while abs(a - b) > 1e-15 * a:
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def elliptic_k(k: float) -> float:
    """Complete elliptic integral of the first kind, modulus ``k``."""
    return math.pi / (2.0 * agm(1.0, math.sqrt((1.0 - k) * (1.0 + k))))


def pendulum_period(x0: float) -> float:
    """Exact period of ``x'' + sin(x) = 0`` released at rest from ``x0``."""
    return 4.0 * elliptic_k(math.sin(0.5 * x0))


def check_linear_exactness() -> CheckResult:
    worst, spread = 0.0, 0.0
    for k in range(9):
        alpha = k / 10
        taus = [half_oscillation_time(LINEAR, x0, alpha).tau for x0 in (0.01, 0.1, 0.5)]
        worst = max(worst, max(abs(t - linear_tau(alpha)) for t in taus))
        spread = max(spread, max(taus) - min(taus))
    ok = worst <= 1e-8 and spread <= 1e-10
    return CheckResult("C1", "linear exactness", ok, f"max |tau - tau_l| = {worst:.2e} (<= 1e-8), x0 spread = {spread:.2e} (<= 1e-10)")


def check_bounds() -> CheckResult:
    failures = []
    margin = math.inf
    for model in (SINE, DUFFING):
        for x0 in BOUND_X0:
            for alpha in BOUND_ALPHA:
                res = half_oscillation_time(model, x0, alpha)
                w = damped_frequency(alpha)
                gap = min(res.tau_half - math.pi / w, res.tau - 2 * math.pi / w)
                margin = min(margin, gap)
                if gap <= 0:
                    failures.append((model.label, x0, alpha))
    reverse = math.inf
    for x0 in BOUND_X0:
        for alpha in BOUND_ALPHA:
            gap = linear_tau(alpha) - half_oscillation_time(DUFFING_HARD, x0, alpha).tau
            reverse = min(reverse, gap)
            if gap <= 0:
                failures.append((DUFFING_HARD.label, x0, alpha))
    return CheckResult(
        "C2", "lower bounds and reversal", not failures,
        f"min margin (a>0) = {margin:.3e}, min reversal margin (a=-1) = {reverse:.3e}, failures = {failures}",
    )


def check_pendulum_period() -> CheckResult:
    errs = {x0: abs(half_oscillation_time(SINE, x0, 0.0).tau - pendulum_period(x0)) for x0 in (0.1, 0.5, 1.0)}
    worst = max(errs.values())
    return CheckResult("C3", "pendulum period vs 4K(sin(x0/2))", worst <= 1e-8,
                       ", ".join(f"x0={x0}: {e:.2e}" for x0, e in errs.items()) + " (<= 1e-8)")


def check_expansion_coefficient() -> CheckResult:
    parts, ok = [], True
    for model, target in ((SINE, 0.0625), (DUFFING, 0.375)):
        fit = fit_period_coefficient(model)
        rel = abs(fit.c - target) / target
        ok &= rel <= 0.02
        parts.append(
            f"{model.label}: c = {fit.c:.8f} vs 3a/8 = {target} (rel {rel:.1e}); "
            f"alternative a/8 = {fit.c_alt:.6g} misses by {abs(fit.c - fit.c_alt) / fit.c_alt:.0%}"
        )
    return CheckResult("C4", "period expansion coefficient", ok, "; ".join(parts))


def check_sensitivity() -> CheckResult:
    worst = 0.0
    for model in (SINE, DUFFING):
        for x0 in (0.1, 0.3):
            for alpha in (0.0, 0.3):
                t_half = half_oscillation_time(model, x0, alpha).tau_half
                for t in (1.0, 2.0, math.pi, t_half):
                    X, V = sensitivity_at(model, x0, alpha, t)
                    fx, fv = fd_sensitivity(model, x0, alpha, t, 1e-5)
                    worst = max(worst, abs(X - fx), abs(V - fv))
    lin = 0.0
    for x0 in (0.1, 0.3):
        for t in (1.0, 2.0, math.pi, 2 * math.pi):
            X, V = sensitivity_at(LINEAR, x0, 0.0, t)
            lin = max(lin, abs(X - x1_closed_form(x0, t)), abs(V - x0 * t * math.sin(t)))
    ok = worst <= 1e-5 and lin <= 1e-8
    return CheckResult("C5", "alpha-sensitivities", ok,
                       f"max |sens - FD| = {worst:.2e} (<= 1e-5), linear closed form err = {lin:.2e} (<= 1e-8)")


def check_heavy_lifting() -> CheckResult:
    x0s = (0.05, 0.1, 0.2)
    parts, ok = [], True
    for model in (SINE, DUFFING):
        vs = []
        for x0 in x0s:
            t_half = half_oscillation_time(model, x0, 0.0).tau_half
            vs.append(sensitivity_at(model, x0, 0.0, t_half)[1])
        slope = loglog_slope(x0s, vs)
        good = all(v > 0 for v in vs) and 2.7 <= slope <= 3.3
        ok &= good
        parts.append(f"{model.label}: V(tau_half) = {', '.join(f'{v:.3e}' for v in vs)}, slope {slope:.3f}")
    a, x0 = 1.0, 0.1
    closed = v2_closed_form(a, x0, math.pi)
    integral, _ = quad(lambda s: math.cos(math.pi - s) * math.cos(s) ** 2 * x1_closed_form(x0, s),
                       0.0, math.pi, epsabs=1e-14, epsrel=1e-13)
    integral *= 3 * a * x0 ** 2
    expected = 9 * a * x0 ** 3 * math.pi ** 2 / 16
    ok &= abs(closed - integral) <= 1e-8 and abs(closed - 5.55165e-3) <= 1e-8
    parts.append(f"V2(pi) = {closed:.10e}, quadrature = {integral:.10e}, 9a x0^3 pi^2/16 = {expected:.10e}")
    return CheckResult("C6", "sensitivity positivity and cubic scaling", ok, "; ".join(parts))


def check_minimum() -> CheckResult:
    parts = []
    res = find_min_alpha(DUFFING, 0.2)
    oracle_alpha, _ = dense_scan_minimum(DUFFING, 0.2, 0.0, 0.3, 1e-3)
    ok = res.found and res.alpha_star > 1e-3 and res.dip > 1e-7 and abs(res.alpha_star - oracle_alpha) <= 2e-3
    parts.append(
        f"a=1: alpha* = {res.alpha_star}, dip = {res.dip:.3e}, dense-scan alpha = {oracle_alpha}" if res.found
        else f"a=1: no minimum ({res.reason})"
    )
    for model in (DUFFING_HARD, LINEAR):
        r = find_min_alpha(model, 0.2)
        ok &= not r.found
        parts.append(f"{model.label}: interior minimum {'found' if r.found else 'absent'}")
    rep = blowup_scan(DUFFING, 0.2, (0.9, 0.99, 0.999))
    t90, t99, t999 = (math.inf if t is None else t for t in rep.taus)
    ok &= t999 > t99 > t90 and t99 > 44.5 and rep.above_linear
    parts.append(f"tau(0.9, 0.99, 0.999) = {t90:.6f}, {t99:.6f}, {t999:.6f}")
    return CheckResult("C7", "interior minimum and blow-up", ok, "; ".join(parts))


def check_polar() -> CheckResult:
    worst = 0.0
    for model in (SINE, DUFFING):
        for x0 in BOUND_X0:
            for alpha in BOUND_ALPHA:
                worst = max(worst, abs(tau_half_polar(model, x0, alpha) - half_oscillation_time(model, x0, alpha).tau_half))
    return CheckResult("C8", "polar route agreement", worst <= 1e-6, f"max diff = {worst:.2e} (<= 1e-6)")


def check_varpar() -> CheckResult:
    worst = 0.0
    for model in (SINE, DUFFING):
        for x0 in BOUND_X0:
            for alpha in BOUND_ALPHA:
                t_half = half_oscillation_time(model, x0, alpha).tau_half
                for t in (0.5 * math.pi, math.pi, t_half):
                    worst = max(worst, varpar_residual(model, x0, alpha, t))
    return CheckResult("C9", "variation-of-parameters residual", worst <= 1e-8, f"max residual = {worst:.2e} (<= 1e-8)")


def check_determinism() -> CheckResult:
    alphas = np.round(np.linspace(0.0, 0.9, 10), 12)
    first = csv_text(sweep(SINE, (0.1, 0.5), alphas, DEFAULT_TOL, workers=1).rows)
    second = csv_text(sweep(SINE, (0.1, 0.5), alphas, DEFAULT_TOL, workers=2).rows)
    return CheckResult("C10", "sweep determinism", first == second, f"{len(first)} bytes, identical = {first == second}")


CHECKS = (
    check_linear_exactness,
    check_bounds,
    check_pendulum_period,
    check_expansion_coefficient,
    check_sensitivity,
    check_heavy_lifting,
    check_minimum,
    check_polar,
    check_varpar,
    check_determinism,
)


def run_all(stream=None) -> bool:
    ok = True
    for check in CHECKS:
        try:
            res = check()
        except Exception as exc:  # a crash is a failed check, not an aborted suite
            res = CheckResult(check.__name__, "crashed", False, f"{type(exc).__name__}: {exc}")
        ok &= res.passed
        if stream is not None:
            print(res.line(), file=stream, flush=True)
    return ok
