"""Numerical experiments built on the oscillation-time primitives."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .exceptions import FitError, NoOscillationError, OscTimeError
from .integrator import DEFAULT_TOL, Tolerances
from .models import Nonlinearity, base_system, linear_tau
from .integrator import integrate
from .oscillation import dtau_dalpha, half_oscillation_time, oscillation_time

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
DIP_THRESHOLD = 1e-7


# -- expansion coefficient ---------------------------------------------------

@dataclass(frozen=True)
class PeriodFit:
    """Quadratic coefficient ``c`` in ``tau_half(x0, 0) ~ pi*(1 + c*x0**2)``."""

    c: float
    x0_list: tuple
    raw: tuple  # c(x0) per amplitude
    tableau: tuple  # Neville rows, row k extrapolates k+1 consecutive amplitudes
    c_classical: float  # 3a/8
    c_alt: float  # a/8

    def report(self) -> str:
        lines = [f"fitted c = {self.c:.10g}"]
        lines.append(f"classical 3a/8 = {self.c_classical:.10g}  (rel. diff {_rel(self.c, self.c_classical):.2e})")
        lines.append(
            f"alternative a/8 = {self.c_alt:.10g}  (rel. diff {_rel(self.c, self.c_alt):.2e}); "
            "the a/8 value disagrees with the fitted coefficient, which follows 3a/8"
        )
        return "\n".join(lines)


def _rel(value, ref):
    if ref == 0:
        return abs(value)
    return abs(value - ref) / abs(ref)


def period_coefficient_samples(model, x0_list, tol=DEFAULT_TOL):
    return [
        (half_oscillation_time(model, x0, 0.0, tol).tau_half / math.pi - 1.0) / (x0 * x0)
        for x0 in x0_list
    ]


def richardson_to_zero(h, values):
    """Neville tableau of polynomial extrapolation in ``h`` to ``h = 0``.

    Returns the list of columns; column ``k`` has ``len(h) - k`` entries and
    its last entry uses the ``k + 1`` smallest ``h``.
    """
    h = list(map(float, h))
    cols = [list(map(float, values))]
    for k in range(1, len(h)):
        prev = cols[-1]
        cols.append([
            (h[i] * prev[i + 1] - h[i + k] * prev[i]) / (h[i] - h[i + k])
            for i in range(len(prev) - 1)
        ])
    return cols


def fit_period_coefficient(model: Nonlinearity, x0_list=(0.2, 0.1, 0.05, 0.025), tol: Tolerances = DEFAULT_TOL) -> PeriodFit:
    """Extrapolate ``(tau_half/pi - 1)/x0**2`` to vanishing amplitude.

    The per-amplitude estimates carry an ``O(x0**2)`` bias, removed by
    Richardson extrapolation in ``x0**2``.

    Raises
    ------
    FitError
        If fewer than three amplitudes are given or the successive
        extrapolants move apart instead of settling.
    """
    x0_list = tuple(float(x) for x in x0_list)
    if len(x0_list) < 3:
        raise FitError("need at least three amplitudes")
    if any(b >= a for a, b in zip(x0_list, x0_list[1:])) or x0_list[-1] <= 0:
        raise FitError("amplitudes must be positive and strictly decreasing")
    raw = period_coefficient_samples(model, x0_list, tol)
    cols = richardson_to_zero([x * x for x in x0_list], raw)
    best = [col[-1] for col in cols]
    floor = 1e-9 * max(1.0, abs(best[-1]))
    for seq in (raw, best):
        steps = [abs(b - a) for a, b in zip(seq, seq[1:])]
        for prev, cur in zip(steps, steps[1:]):
            if cur > prev and cur > floor:
                raise FitError(f"extrapolation not settling: successive changes {steps}")
    a = model.a
    return PeriodFit(
        c=best[-1],
        x0_list=x0_list,
        raw=tuple(raw),
        tableau=tuple(tuple(col) for col in cols),
        c_classical=3.0 * a / 8.0,
        c_alt=a / 8.0,
    )


# -- minimum over alpha --------------------------------------------------------

@dataclass(frozen=True)
class MinResult:
    found: bool
    alpha_star: float | None
    tau_star: float | None
    bracket: tuple | None
    dip: float
    tau0: float
    scan_alpha: tuple = field(repr=False, default=())
    scan_tau: tuple = field(repr=False, default=())
    reason: str = ""


def golden_section(fun, lo, hi, width=1e-6, max_iter=200):
    """Minimize a unimodal ``fun`` on ``[lo, hi]``.

    Returns ``(x_best, f_best, (lo, hi))`` with the final bracket no wider
    than ``width``.
    """
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = fun(x1), fun(x2)
    for _ in range(max_iter):
        if hi - lo <= width:
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = fun(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = fun(x2)
    if f1 <= f2:
        return x1, f1, (lo, hi)
    return x2, f2, (lo, hi)


def find_min_alpha(
    model: Nonlinearity,
    x0: float,
    tol: Tolerances = DEFAULT_TOL,
    scan_step: float = 0.01,
    alpha_max: float = 0.95,
    width: float = 1e-6,
) -> MinResult:
    """Interior minimizer of ``tau(alpha)`` at fixed amplitude.

    A coarse scan brackets the smallest sampled value, golden-section search
    refines it.  If the scan minimum sits at ``alpha = 0`` the first scan
    cell is rescanned a hundred times finer before giving up.  A minimum is
    reported only when ``tau(0) - tau_star`` exceeds ``DIP_THRESHOLD``.
    """
    def tau(alpha):
        return oscillation_time(model, x0, alpha, tol)

    n = int(round(alpha_max / scan_step))
    grid = [round(k * scan_step, 12) for k in range(n + 1)]
    taus = [tau(a) for a in grid]
    tau0 = taus[0]
    i = int(np.argmin(taus))
    if i == 0:
        fine = [round(k * scan_step / 100, 14) for k in range(101)]
        fine_taus = [tau0] + [tau(a) for a in fine[1:]]
        j = int(np.argmin(fine_taus))
        if j == 0:
            return MinResult(False, None, None, None, 0.0, tau0, tuple(grid), tuple(taus),
                             "tau increases from alpha = 0")
        grid, taus, i = fine, fine_taus, j
    if i == len(grid) - 1:
        return MinResult(False, None, None, None, 0.0, tau0, tuple(grid), tuple(taus),
                         "tau still decreasing at the end of the scan")
    lo, hi = grid[i - 1], grid[i + 1]
    alpha_star, tau_star, bracket = golden_section(tau, lo, hi, width)
    dip = tau0 - tau_star
    if not (tau_star <= taus[i - 1] and tau_star <= taus[i + 1]):
        return MinResult(False, None, None, None, dip, tau0, tuple(grid), tuple(taus),
                         "refined value exceeds bracket ends")
    if dip <= DIP_THRESHOLD:
        return MinResult(False, alpha_star, tau_star, bracket, dip, tau0, tuple(grid), tuple(taus),
                         f"dip {dip:.2e} below threshold {DIP_THRESHOLD:g}")
    return MinResult(True, alpha_star, tau_star, bracket, dip, tau0, tuple(grid), tuple(taus))


def dense_scan_minimum(model, x0, lo=0.0, hi=0.3, step=1e-3, tol=DEFAULT_TOL):
    """Brute-force argmin of ``tau`` on a uniform grid (oracle for the search)."""
    n = int(round((hi - lo) / step))
    grid = [round(lo + k * step, 12) for k in range(n + 1)]
    taus = [oscillation_time(model, x0, a, tol) for a in grid]
    i = int(np.argmin(taus))
    return grid[i], taus[i]


def derivative_sign_change(model, x0, bracket, tol=DEFAULT_TOL) -> bool:
    lo, hi = bracket
    return dtau_dalpha(model, x0, lo, tol) < 0.0 < dtau_dalpha(model, x0, hi, tol)


# -- sweeps --------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    x0: float
    alpha: float
    tau_half: float
    tau: float
    x_hat0: float
    tau_linear: float
    error: str | None = None


@dataclass(frozen=True)
class SweepTable:
    model: Nonlinearity
    rows: tuple
    x0_list: tuple
    alpha_grid: tuple

    def series(self):
        """Rows grouped by ``x0`` in ascending order."""
        out = {}
        for row in self.rows:
            out.setdefault(row.x0, []).append(row)
        return out


def _row(args):
    model, x0, alpha, tol = args
    try:
        tau_lin = linear_tau(alpha)
    except OscTimeError:
        tau_lin = math.nan
    try:
        res = half_oscillation_time(model, x0, alpha, tol)
    except (OscTimeError, ValueError) as exc:
        return SweepRow(x0, alpha, math.nan, math.nan, math.nan, tau_lin, f"{type(exc).__name__}: {exc}")
    return SweepRow(x0, alpha, res.tau_half, res.tau, res.x_hat0, tau_lin)


def default_workers() -> int:
    env = os.environ.get("OSC_TIME_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def sweep(model: Nonlinearity, x0_list, alpha_grid, tol: Tolerances = DEFAULT_TOL, workers: int = 1) -> SweepTable:
    """Evaluate every ``(x0, alpha)`` pair; failures are kept as flagged rows."""
    x0s = tuple(sorted(set(float(x) for x in x0_list)))
    alphas = tuple(sorted(set(float(a) for a in alpha_grid)))
    jobs = [(model, x0, a, tol) for x0 in x0s for a in alphas]
    if workers > 1 and len(jobs) > 8:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_row, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = [_row(job) for job in jobs]
    return SweepTable(model, tuple(rows), x0s, alphas)


# -- alpha -> 1 ------------------------------------------------------------------

@dataclass(frozen=True)
class BlowupReport:
    alphas: tuple
    taus: tuple  # None where the time cap was hit
    tau_linear: tuple
    monotone: bool
    above_linear: bool
    exceeded_cap: tuple


def blowup_scan(model: Nonlinearity, x0: float, alpha_list=(0.9, 0.99, 0.999), tol: Tolerances = DEFAULT_TOL) -> BlowupReport:
    """Check that ``tau`` grows along ``alpha_list`` and stays above the linear value.

    Hitting ``tol.t_max`` is recorded rather than raised: it already shows
    the oscillation time outgrowing the cap.
    """
    alphas = tuple(float(a) for a in alpha_list)
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alpha_list must be strictly increasing")
    taus, capped = [], []
    for a in alphas:
        try:
            taus.append(oscillation_time(model, x0, a, tol))
            capped.append(False)
        except NoOscillationError:
            taus.append(None)
            capped.append(True)
    tau_lin = tuple(linear_tau(a) for a in alphas)
    effective = [math.inf if t is None else t for t in taus]
    monotone = all(b > a for a, b in zip(effective, effective[1:]))
    if model.a > 0:
        above = all(t > tl for t, tl in zip(effective, tau_lin))
    elif model.a < 0:
        above = all(t < tl for t, tl in zip(effective, tau_lin))
    else:
        above = True
    return BlowupReport(alphas, tuple(taus), tau_lin, monotone, above, tuple(capped))


# -- small-amplitude deviation -------------------------------------------------

def harmonic_deviation(model: Nonlinearity, x0: float, tol: Tolerances = DEFAULT_TOL, samples: int = 4001) -> float:
    """``max |x(t) - x0*cos(t)|`` over one undamped oscillation."""
    tau = oscillation_time(model, x0, 0.0, tol)
    traj = integrate(base_system(model, 0.0, x0), [1.0, 0.0], (0.0, tau), tol)
    t = np.linspace(0.0, tau, samples)
    x = x0 * traj(t)[:, 0]
    return float(np.max(np.abs(x - x0 * np.cos(t))))


def loglog_slope(xs, ys) -> float:
    return float(np.polyfit(np.log(xs), np.log(np.abs(ys)), 1)[0])
