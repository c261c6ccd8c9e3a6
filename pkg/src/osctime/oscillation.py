"""Oscillation times, alpha-sensitivities and their closed-form companions.

All integrations run in amplitude-normalized coordinates ``u = x/x0`` so the
error control sees an O(1) state whatever the starting amplitude.  Event
location additionally strips the linear decay factor ``exp(-alpha t)`` (see
:func:`~osctime.models.envelope_system`).  Results are mapped back to
physical units before they are returned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateInputError, DomainError, PhaseStallError, SingularDenominatorError
from .integrator import (
    DEFAULT_TOL,
    LOCAL_MAX,
    LOCAL_MIN,
    Event,
    Tolerances,
    integrate,
    integrate_to_events,
)
from .models import (
    Nonlinearity,
    augmented_system,
    base_system,
    damped_frequency,
    envelope_system,
    linear_solution,
)

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(10)


@dataclass(frozen=True)
class OscillationResult:
    """Half and full oscillation times of one run started at rest.

    Attributes
    ----------
    tau_half : float
        Time to the first extremum after ``t = 0`` (a minimum when ``x0 > 0``).
    x_hat0 : float
        ``-x(tau_half)``, the amplitude the second half-swing starts from.
    tau : float
        Time to the second extremum, i.e. one complete oscillation.
    events : tuple of Event
        The two extrema, with states in physical units.
    """

    x0: float
    alpha: float
    tau_half: float
    x_hat0: float
    tau: float
    events: tuple


def _check_inputs(x0, alpha):
    if x0 == 0 or not math.isfinite(x0):
        raise DegenerateInputError("x0 must be finite and non-zero")
    damped_frequency(alpha)


def _from_envelope(ev: Event, alpha: float) -> Event:
    w, p = ev.state_star
    decay = math.exp(-alpha * ev.t_star)
    state = np.array([decay * w, decay * (p - alpha * w)])
    return Event(ev.t_star, state, ev.kind, ev.bracket, ev.step_index)


def _physical_event(ev: Event, scale: float) -> Event:
    kind = ev.kind
    if scale < 0:
        kind = LOCAL_MAX if kind == LOCAL_MIN else LOCAL_MIN
    return Event(ev.t_star, ev.state_star * scale, kind, ev.bracket, ev.step_index)


def half_oscillation_time(model: Nonlinearity, x0: float, alpha: float, tol: Tolerances = DEFAULT_TOL) -> OscillationResult:
    """Locate the next two extrema of ``x(t)`` after a start at rest from ``x0``.

    Raises
    ------
    DegenerateInputError
        If ``x0 == 0``.
    DomainError
        If ``|alpha| >= 1``.
    NoOscillationError
        If two extrema are not reached before ``tol.t_max``.
    """
    _check_inputs(x0, alpha)
    _, events = integrate_to_events(
        envelope_system(model, alpha, x0), [1.0, alpha], n=2, tol=tol,
        event=lambda y: y[1] - alpha * y[0],
    )
    first, second = (_physical_event(_from_envelope(ev, alpha), x0) for ev in events)
    return OscillationResult(
        x0=x0,
        alpha=alpha,
        tau_half=first.t_star,
        x_hat0=-first.state_star[0],
        tau=second.t_star,
        events=(first, second),
    )


def oscillation_time(model: Nonlinearity, x0: float, alpha: float, tol: Tolerances = DEFAULT_TOL) -> float:
    return half_oscillation_time(model, x0, alpha, tol).tau


def tau_half_polar(model: Nonlinearity, x0: float, alpha: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """Half oscillation time from the polar form of the phase-plane flow.

    With ``theta = atan2(x, v)`` and ``r = hypot(x, v)`` the angle obeys
    ``theta' = 1 + alpha*sin(2*theta) + sin(theta)**2 * f(x)`` and the next
    extremum is reached once ``theta`` has advanced by ``pi`` from its initial
    value ``pi/2``.  The angle is integrated relative to that target so the
    stopping condition is a plain zero crossing.
    """
    if not x0 > 0:
        raise DegenerateInputError("polar route requires x0 > 0")
    _check_inputs(x0, alpha)
    f = model.f

    def fun(t, y):
        theta = y[0] + 1.5 * math.pi
        rho = y[1]
        s, c = math.sin(theta), math.cos(theta)
        u, w = rho * s, rho * c
        fx = f(x0 * u)
        dtheta = 1.0 + alpha * 2.0 * s * c + s * s * fx
        if dtheta <= 0.0:
            raise PhaseStallError(f"angular velocity {dtheta:.3e} lost its sign")
        return np.array([dtheta, -c * (2.0 * alpha * w + u * fx)])

    _, events = integrate_to_events(fun, [-math.pi, 1.0], 0, 1, tol)
    return events[0].t_star


def sensitivity_trajectory(model: Nonlinearity, x0: float, alpha: float, t_end: float, tol: Tolerances = DEFAULT_TOL):
    """Dense solution of ``(x, v, X, V)/x0`` on ``[0, t_end]``."""
    _check_inputs(x0, alpha)
    return integrate(augmented_system(model, alpha, x0), [1.0, 0.0, 0.0, 0.0], (0.0, t_end), tol)


def sensitivity_at(model: Nonlinearity, x0: float, alpha: float, t: float, tol: Tolerances = DEFAULT_TOL):
    """``(X, V) = d(x, v)/dalpha`` at time ``t``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    _check_inputs(x0, alpha)
    if t == 0:
        return 0.0, 0.0
    y = sensitivity_trajectory(model, x0, alpha, t, tol).steps[-1].y1
    return x0 * y[2], x0 * y[3]


def state_at(model: Nonlinearity, x0: float, alpha: float, t: float, tol: Tolerances = DEFAULT_TOL):
    """``(x, v)`` at time ``t`` from a start at rest."""
    _check_inputs(x0, alpha)
    if t == 0:
        return x0, 0.0
    y = integrate(base_system(model, alpha, x0), [1.0, 0.0], (0.0, t), tol).steps[-1].y1
    return x0 * y[0], x0 * y[1]


def fd_sensitivity(model: Nonlinearity, x0: float, alpha: float, t: float, h: float = 1e-5, tol: Tolerances = DEFAULT_TOL):
    """Central finite difference of ``(x, v)(t)`` in alpha."""
    xp, vp = state_at(model, x0, alpha + h, t, tol)
    xm, vm = state_at(model, x0, alpha - h, t, tol)
    return (xp - xm) / (2 * h), (vp - vm) / (2 * h)


def _extremum_derivative(model, x0, alpha, which, tol):
    _check_inputs(x0, alpha)
    _, events = integrate_to_events(augmented_system(model, alpha, x0), [1.0, 0.0, 0.0, 0.0], 1, which, tol)
    u, _, _, V = events[-1].state_star
    denom = model.scaled_force(u, x0)
    if denom == 0.0 or not math.isfinite(denom):
        raise SingularDenominatorError("x*(1 + f(x)) vanishes at the extremum")
    return V / denom


def dtau_half_dalpha(model: Nonlinearity, x0: float, alpha: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """``d tau_half / d alpha`` from the implicit function theorem.

    ``v(tau_half(alpha), alpha) = 0`` differentiates to
    ``tau_half' = V / (x*(1 + f(x)))`` evaluated at the extremum.
    """
    return _extremum_derivative(model, x0, alpha, 1, tol)


def dtau_dalpha(model: Nonlinearity, x0: float, alpha: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """Same implicit-function quotient, taken at the end of the full oscillation."""
    return _extremum_derivative(model, x0, alpha, 2, tol)


def v2_closed_form(a: float, x0: float, t):
    """Third-order correction to ``V`` at ``alpha = 0`` for ``f = -a*x**2 + ...``.

    Equals ``3*a*x0**2 * int_0^t cos(t - s) cos(s)**2 X1(s) ds`` with
    ``X1(s) = x0*(sin(s) - s*cos(s))``.
    """
    t = np.asarray(t, dtype=float)
    bracket = (
        -(6.0 * t * t + 5.0) * np.cos(t) / 32.0
        - 3.0 * t * np.sin(3.0 * t) / 32.0
        - t * np.sin(t) / 16.0
        - 17.0 * np.cos(3.0 * t) / 128.0
        + 37.0 * np.cos(t) / 128.0
    )
    out = 3.0 * a * x0 ** 3 * bracket
    return float(out) if out.ndim == 0 else out


def v1_closed_form(x0: float, t):
    """Leading term ``x0*t*sin(t)`` of ``V`` at ``alpha = 0``."""
    return x0 * t * np.sin(t)


def x1_closed_form(x0: float, t):
    return x0 * (np.sin(t) - t * np.cos(t))


def varpar_residual(model: Nonlinearity, x0: float, alpha: float, t: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """Defect of the variation-of-parameters representation of ``x(t)``.

    Computes ``|x(t) - x_lin(t) + (1/w) int_0^t exp(-alpha*(t-s)) sin(w*(t-s)) x f(x) ds|``
    with the convolution evaluated by Gauss-Legendre quadrature on each
    accepted solver step.
    """
    _check_inputs(x0, alpha)
    if t <= 0:
        return 0.0
    w = damped_frequency(alpha)
    traj = integrate(base_system(model, alpha, x0), [1.0, 0.0], (0.0, t), tol)
    total = 0.0
    for step in traj.steps:
        half = 0.5 * step.h
        s = step.t0 + half * (_GAUSS_NODES + 1.0)
        xs = x0 * step.interpolate(s)[:, 0]
        kernel = np.exp(-alpha * (t - s)) * np.sin(w * (t - s))
        total += half * np.dot(_GAUSS_WEIGHTS, kernel * xs * model.f(xs))
    x_t = x0 * traj.steps[-1].y1[0]
    x_lin, _ = linear_solution(x0, alpha, t)
    return abs(x_t - x_lin + total / w)
