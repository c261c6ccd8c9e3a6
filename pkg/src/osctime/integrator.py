"""Dormand-Prince 5(4) integration with dense output and zero-crossing events.

Only small nonstiff systems are targeted (dimension 2 or 4 here), so the
stepper works on plain numpy vectors and keeps every accepted step so the
solution can be queried anywhere in the integrated span.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .exceptions import DivergenceError, NoOscillationError, StepSizeError

LOCAL_MAX = "LocalMax"
LOCAL_MIN = "LocalMin"

# Butcher tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B = _A[6]
# b - bhat
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# Hairer's continuous extension
_D = np.array([
    -12715105075 / 11282082432, 0.0, 87487479700 / 32700410799,
    -10690763975 / 1880347072, 701980252875 / 199316789632,
    -1453857185 / 822651844, 69997945 / 29380423,
])

_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 10.0
_H_MIN = 1e-14
# event detection stays disarmed until the tracked component leaves zero
_ARM_TIME = 1e-9


@dataclass(frozen=True)
class Tolerances:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = 0.1
    t_max: float = 1000.0

    def __post_init__(self):
        for name in ("rtol", "atol", "max_step", "t_max"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if self.rtol < 1e-14:
            raise ValueError("rtol below 1e-14 is not attainable in double precision")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class Step:
    """One accepted step with its continuous extension."""

    t0: float
    t1: float
    y0: np.ndarray
    y1: np.ndarray
    k: np.ndarray  # stage derivatives, shape (7, n)
    rcont: np.ndarray  # interpolation coefficients, shape (5, n)

    @property
    def h(self) -> float:
        return self.t1 - self.t0

    def interpolate(self, t):
        theta = (np.asarray(t, dtype=float) - self.t0) / self.h
        theta1 = 1.0 - theta
        r = self.rcont
        theta = theta[..., None]
        theta1 = theta1[..., None]
        return r[0] + theta * (r[1] + theta1 * (r[2] + theta * (r[3] + theta1 * r[4])))


@dataclass(frozen=True)
class Event:
    """Refined zero of the tracked component.

    ``kind`` is ``"LocalMin"`` when the component crosses upward (a velocity
    going from negative to positive marks a minimum of the position) and
    ``"LocalMax"`` otherwise.
    """

    t_star: float
    state_star: np.ndarray
    kind: str
    bracket: tuple
    step_index: int


class DenseTrajectory:
    """Sequence of contiguous accepted steps, queryable at any covered time."""

    def __init__(self, steps, dim):
        self.steps = list(steps)
        self.dim = dim
        self._t_starts = np.array([s.t0 for s in self.steps])

    @property
    def t0(self) -> float:
        return self.steps[0].t0

    @property
    def t_end(self) -> float:
        return self.steps[-1].t1

    @property
    def ts(self) -> np.ndarray:
        return np.append(self._t_starts, self.t_end)

    @property
    def ys(self) -> np.ndarray:
        return np.vstack([self.steps[0].y0] + [s.y1 for s in self.steps])

    def __len__(self):
        return len(self.steps)

    def __call__(self, t):
        """Evaluate the interpolant; ``t`` may be a scalar or an array."""
        t_arr = np.asarray(t, dtype=float)
        lo, hi = self.t0, self.t_end
        span = hi - lo
        if np.any(t_arr < lo - 1e-12 * span) or np.any(t_arr > hi + 1e-12 * span):
            raise ValueError(f"t outside integrated span [{lo}, {hi}]")
        flat = t_arr.reshape(-1)
        idx = np.clip(np.searchsorted(self._t_starts, flat, side="right") - 1, 0, len(self.steps) - 1)
        out = np.empty((flat.size, self.dim))
        for i in np.unique(idx):
            mask = idx == i
            out[mask] = self.steps[i].interpolate(flat[mask])
        return out.reshape(t_arr.shape + (self.dim,))


class _DormandPrince:
    def __init__(self, fun, t0, y0, tol: Tolerances, direction=1.0, fixed_step=None):
        self.fun = fun
        self.t = float(t0)
        self.y = np.array(y0, dtype=float)
        self.tol = tol
        self.fixed_step = fixed_step
        self.f = np.asarray(fun(self.t, self.y), dtype=float)
        self.h = fixed_step if fixed_step is not None else self._initial_step()

    def _initial_step(self):
        tol = self.tol
        y, f = self.y, self.f
        scale = tol.atol + tol.rtol * np.abs(y)
        d0 = np.sqrt(np.mean((y / scale) ** 2))
        d1 = np.sqrt(np.mean((f / scale) ** 2))
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h0 = min(h0, tol.max_step)
        y1 = y + h0 * f
        f1 = np.asarray(self.fun(self.t + h0, y1), dtype=float)
        d2 = np.sqrt(np.mean(((f1 - f) / scale) ** 2)) / h0
        if max(d1, d2) <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** (1 / 5)
        return min(100 * h0, h1, tol.max_step)

    def stages(self, h):
        """Stage derivatives and 5th-order solution for a step of size ``h``."""
        fun, t, y = self.fun, self.t, self.y
        K = np.empty((7, y.size))
        K[0] = self.f
        for i in range(1, 6):
            K[i] = fun(t + _C[i] * h, y + h * (_A[i] @ K[:i]))
        y_new = y + h * (_B @ K[:6])
        return K, y_new

    def attempt(self, t_limit):
        """Take one accepted step not past ``t_limit``; returns a :class:`Step`."""
        tol = self.tol
        while True:
            h = min(self.h, t_limit - self.t)
            if h < _H_MIN and t_limit - self.t >= _H_MIN:
                raise StepSizeError(f"step size {h:.3e} underflow at t={self.t:.17g}")
            K, y_new = self.stages(h)
            if not np.all(np.isfinite(y_new)):
                if self.fixed_step is not None:
                    raise DivergenceError(f"non-finite state at t={self.t + h:.17g}")
                self.h = 0.25 * h
                if self.h < _H_MIN:
                    raise DivergenceError(f"non-finite state near t={self.t:.17g}")
                continue
            K[6] = self.fun(self.t + h, y_new)
            if self.fixed_step is not None:
                break
            scale = tol.atol + tol.rtol * np.maximum(np.abs(self.y), np.abs(y_new))
            err = np.max(np.abs(h * (_E @ K) / scale))
            if err <= 1.0:
                fac = _FAC_MAX if err == 0 else min(_FAC_MAX, _SAFETY * err ** -0.2)
                h_next = min(tol.max_step, h * max(1.0, fac))
                break
            self.h = h * max(_FAC_MIN, _SAFETY * err ** -0.2)
            if self.h < _H_MIN:
                raise StepSizeError(f"step size {self.h:.3e} underflow at t={self.t:.17g}")
        y0 = self.y
        dy = y_new - y0
        bspl = h * K[0] - dy
        rcont = np.array([y0, dy, bspl, dy - h * K[6] - bspl, h * (_D @ K)])
        step = Step(self.t, self.t + h, y0, y_new, K, rcont)
        self.t = self.t + h if self.t + h < t_limit else t_limit
        self.y = y_new
        self.f = K[6]
        if self.fixed_step is None:
            self.h = h_next
        return step


def substep(fun, step: Step, t: float) -> np.ndarray:
    """Fifth-order state at ``t`` inside ``step`` by re-stepping from its start.

    Unlike the degree-4 interpolant this keeps the full order of the method,
    which is what event refinement relies on.
    """
    h = t - step.t0
    if h == 0.0:
        return step.y0.copy()
    if t == step.t1:
        return step.y1.copy()
    K = np.empty_like(step.k[:6])
    K[0] = step.k[0]
    for i in range(1, 6):
        K[i] = fun(step.t0 + _C[i] * h, step.y0 + h * (_A[i] @ K[:i]))
    return step.y0 + h * (_B @ K)


def integrate(fun: Callable, y0, t_span, tol: Tolerances = DEFAULT_TOL, fixed_step=None) -> DenseTrajectory:
    """Integrate ``y' = fun(t, y)`` over ``t_span`` and keep dense output.

    Parameters
    ----------
    fun : callable
        ``fun(t, y) -> ndarray``.
    y0 : array_like
        Initial state.
    t_span : (float, float)
        Integration interval; ``t1 > t0``.
    tol : Tolerances
        Error control.  ``t_max`` is not consulted here; the span is explicit.
    fixed_step : float, optional
        Disable error control and use this step size (convergence studies).

    Returns
    -------
    DenseTrajectory
    """
    t0, t1 = map(float, t_span)
    if not t1 > t0:
        raise ValueError("t_span must satisfy t1 > t0")
    y0 = np.array(y0, dtype=float)
    if not np.all(np.isfinite(y0)):
        raise DivergenceError("non-finite initial state")
    solver = _DormandPrince(fun, t0, y0, tol, fixed_step=fixed_step)
    steps = []
    while solver.t < t1:
        steps.append(solver.attempt(t1))
    return DenseTrajectory(steps, y0.size)


def _component(j):
    def event(y):
        return y[j]

    return event


def _locate(fun, step: Step, event: Callable):
    def g(t):
        return event(substep(fun, step, t))

    a, b = step.t0, step.t1
    ga, gb = event(step.y0), event(step.y1)
    if ga == 0.0:
        return a
    if gb == 0.0:
        return b
    return brentq(g, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def integrate_to_events(
    fun: Callable,
    y0,
    event_component: int = 1,
    n: int = 2,
    tol: Tolerances = DEFAULT_TOL,
    t0: float = 0.0,
    event: Callable | None = None,
):
    """Integrate until ``n`` zero crossings of ``y[event_component]`` are found.

    ``event(y) -> float`` replaces the component when given.  The crossing
    search is armed only after the event value has left zero, so a start at
    rest (``v(0) = 0``) is not reported.

    Returns
    -------
    trajectory : DenseTrajectory
        Steps up to and including the one holding the last event.
    events : list of Event
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    y0 = np.array(y0, dtype=float)
    if not np.all(np.isfinite(y0)):
        raise DivergenceError("non-finite initial state")
    if event is None:
        event = _component(event_component)
    solver = _DormandPrince(fun, t0, y0, tol)
    t_limit = t0 + tol.t_max
    steps: list[Step] = []
    events: list[Event] = []
    armed = False
    g_prev = event(y0)
    while len(events) < n:
        if solver.t >= t_limit:
            raise NoOscillationError(
                f"found {len(events)} of {n} crossings before t_max={tol.t_max:g}"
            )
        step = solver.attempt(t_limit)
        steps.append(step)
        ga, gb = g_prev, event(step.y1)
        g_prev = gb
        if not armed:
            if step.t1 > t0 + _ARM_TIME and abs(gb) > tol.atol:
                armed = True
            continue
        if ga == 0.0 or (ga < 0.0) == (gb < 0.0) and gb != 0.0:
            continue
        t_star = _locate(fun, step, event)
        state = substep(fun, step, t_star)
        kind = LOCAL_MIN if ga < 0.0 else LOCAL_MAX
        events.append(Event(t_star, state, kind, (step.t0, step.t1), len(steps) - 1))
    return DenseTrajectory(steps, y0.size), events


def find_events(fun: Callable, y0, event_component: int = 1, n: int = 2, tol: Tolerances = DEFAULT_TOL):
    """First ``n`` strictly positive zero crossings of one state component."""
    return integrate_to_events(fun, y0, event_component, n, tol)[1]


def refine_event(fun, trajectory: DenseTrajectory, event: Event, component: int = 1, event_fn=None) -> float:
    """Re-run the root finder on an event's bracket."""
    return _locate(fun, trajectory.steps[event.step_index], event_fn or _component(component))
