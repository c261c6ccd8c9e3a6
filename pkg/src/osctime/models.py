"""Restoring nonlinearities and right-hand sides of the damped pendulum.

The oscillator is ``x'' + 2*alpha*x' + x*(1 + f(x)) = 0`` written in the phase
plane ``(x, v)``.  The augmented system additionally carries the parameter
sensitivities ``X = dx/dalpha`` and ``V = dv/dalpha``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError

LINEAR = "linear"
DUFFING = "duffing"
SINE = "sine"
POLY = "poly"

KINDS = (LINEAR, DUFFING, SINE, POLY)

# Taylor coefficients of sin(x)/x - 1 in powers of x**2 (x**2, x**4, ..., x**14)
_SINC_SERIES = tuple((-1) ** k / math.factorial(2 * k + 1) for k in range(1, 8))
_SINC_SWITCH = 0.5


def _sinc_minus_one(x):
    x2 = x * x
    acc = 0.0
    for c in reversed(_SINC_SERIES):
        acc = (acc + c) * x2
    return acc


@dataclass(frozen=True)
class Nonlinearity:
    """Even restoring nonlinearity ``f`` with ``f(x) = -a*x**2 + O(x**4)``.

    Use the named constructors :meth:`linear`, :meth:`duffing`, :meth:`sine`
    and :meth:`even_poly` rather than the raw initializer.

    Attributes
    ----------
    kind : str
        One of ``"linear"``, ``"duffing"``, ``"sine"``, ``"poly"``.
    coeffs : tuple of float
        Coefficients of ``x**2, x**4, ...`` in ``f``.  Only even powers can be
        expressed, so evenness holds by construction.  Unused for ``"sine"``.
    """

    kind: str
    coeffs: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown nonlinearity kind {self.kind!r}")
        coeffs = tuple(float(c) for c in self.coeffs)
        if not all(math.isfinite(c) for c in coeffs):
            raise ValueError("nonlinearity coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def linear(cls) -> Nonlinearity:
        return cls(LINEAR)

    @classmethod
    def duffing(cls, a: float) -> Nonlinearity:
        """Unforced Duffing term ``f(x) = -a*x**2``."""
        return cls(DUFFING, (-float(a),))

    @classmethod
    def sine(cls) -> Nonlinearity:
        """Mathematical pendulum, ``x*(1 + f(x)) = sin(x)``."""
        return cls(SINE)

    @classmethod
    def even_poly(cls, coeffs) -> Nonlinearity:
        """``f(x) = c2*x**2 + c4*x**4 + ...`` for ``coeffs = (c2, c4, ...)``."""
        return cls(POLY, tuple(coeffs))

    @property
    def a(self) -> float:
        """Leading softening coefficient, ``f(x) = -a*x**2 + O(x**4)``."""
        if self.kind == SINE:
            return 1.0 / 6.0
        if self.kind == LINEAR or not self.coeffs:
            return 0.0
        return -self.coeffs[0]

    @property
    def label(self) -> str:
        if self.kind == DUFFING:
            return f"duffing(a={self.a:g})"
        if self.kind == POLY:
            return "poly(" + ",".join(f"{c:g}" for c in self.coeffs) + ")"
        return self.kind

    def f(self, x):
        """Evaluate ``f(x)``; accepts scalars or arrays."""
        if self.kind == LINEAR:
            return 0.0 * x
        if self.kind == SINE:
            if np.ndim(x) == 0:
                if abs(x) < _SINC_SWITCH:
                    return _sinc_minus_one(x)
                return math.sin(x) / x - 1.0
            x = np.asarray(x, dtype=float)
            small = np.abs(x) < _SINC_SWITCH
            with np.errstate(divide="ignore", invalid="ignore"):
                direct = np.sin(x) / x - 1.0
            return np.where(small, _sinc_minus_one(x), direct)
        x2 = x * x
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = (acc + c) * x2
        return acc

    def restoring_force(self, x):
        """``x*(1 + f(x))``; computed as ``sin(x)`` for the pendulum."""
        if self.kind == SINE:
            return math.sin(x) if np.ndim(x) == 0 else np.sin(x)
        if self.kind == LINEAR:
            return x
        return x * (1.0 + self.f(x))

    def scaled_force(self, u, scale):
        """``restoring_force(scale*u)/scale``, exact in ``u`` for the linear model."""
        if self.kind == SINE:
            return math.sin(scale * u) / scale if np.ndim(u) == 0 else np.sin(scale * u) / scale
        if self.kind == LINEAR:
            return u
        return u * (1.0 + self.f(scale * u))

    def G(self, x):
        """``G(x) = -d/dx (x*f(x))``."""
        if self.kind == LINEAR:
            return 0.0 * x
        if self.kind == SINE:
            # 1 - cos(x) without cancellation near zero
            s = math.sin(0.5 * x) if np.ndim(x) == 0 else np.sin(0.5 * np.asarray(x, dtype=float))
            return 2.0 * s * s
        x2 = x * x
        acc = 0.0
        for k, c in reversed(list(enumerate(self.coeffs, start=1))):
            acc = (acc - (2 * k + 1) * c) * x2
        return acc


def restoring_force(model: Nonlinearity, x):
    return model.restoring_force(x)


def eval_f(model: Nonlinearity, x):
    return model.f(x)


def eval_G(model: Nonlinearity, x):
    return model.G(x)


@dataclass(frozen=True)
class PendulumConfig:
    """Initial amplitude and damping of a single run."""

    x0: float
    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.x0) and math.isfinite(self.alpha)):
            raise ValueError("x0 and alpha must be finite")

    @property
    def omega(self) -> float:
        return damped_frequency(self.alpha)


def damped_frequency(alpha: float) -> float:
    if not abs(alpha) < 1.0:
        raise DomainError(f"alpha={alpha!r} is not underdamped (|alpha| < 1 required)")
    return math.sqrt((1.0 - alpha) * (1.0 + alpha))


def rhs_base(model: Nonlinearity, alpha: float, state) -> np.ndarray:
    """Phase-plane vector field ``(v, -2*alpha*v - x*(1 + f(x)))``."""
    x, v = state[0], state[1]
    return np.array([v, -2.0 * alpha * v - model.restoring_force(x)])


def rhs_augmented(model: Nonlinearity, alpha: float, state) -> np.ndarray:
    """Vector field of ``(x, v, X, V)`` including the alpha-sensitivities."""
    x, v, X, V = state[0], state[1], state[2], state[3]
    return np.array([
        v,
        -2.0 * alpha * v - model.restoring_force(x),
        V,
        -2.0 * alpha * V - X - 2.0 * v + model.G(x) * X,
    ])


def base_system(model: Nonlinearity, alpha: float, scale: float = 1.0):
    """Return ``fun(t, y)`` for the integrator.

    With ``scale != 1`` the state is ``(x, v)/scale``; the oscillation time is
    unaffected and the linear model becomes exactly amplitude independent.
    """
    two_alpha = 2.0 * alpha
    if scale == 1.0:
        force = model.restoring_force
    else:
        def force(u):
            return model.scaled_force(u, scale)

    def fun(t, y):
        v = y[1]
        return np.array([v, -two_alpha * v - force(y[0])])

    return fun


def envelope_system(model: Nonlinearity, alpha: float, scale: float = 1.0):
    """Vector field of ``(w, p)`` with ``w = exp(alpha t) x / scale`` and ``p = w'``.

    The factor ``exp(alpha t)`` removes the linear decay exactly, so the
    state stays O(1) over a whole oscillation and the absolute tolerance
    never dominates the error control, even under heavy damping.  The linear
    model reduces to ``w'' = -(1 - alpha^2) w``.  Extrema of ``x`` are the
    zeros of ``p - alpha w``.
    """
    omega2 = (1.0 - alpha) * (1.0 + alpha)
    f = model.f

    def fun(t, y):
        w = y[0]
        return np.array([y[1], -omega2 * w - w * f(scale * math.exp(-alpha * t) * w)])

    return fun


def augmented_system(model: Nonlinearity, alpha: float, scale: float = 1.0):
    """Vector field of ``(x, v, X, V)``, optionally divided through by ``scale``."""
    G = model.G
    two_alpha = 2.0 * alpha
    if scale == 1.0:
        force = model.restoring_force
    else:
        def force(u):
            return model.scaled_force(u, scale)

    def fun(t, y):
        x, v, X, V = y
        return np.array([
            v,
            -two_alpha * v - force(x),
            V,
            -two_alpha * V - X - 2.0 * v + G(scale * x) * X,
        ])

    return fun


def linear_solution(x0: float, alpha: float, t):
    """Closed-form ``(x, v)`` of the linear damped oscillator started at rest."""
    if not 0.0 <= alpha < 1.0:
        raise DomainError(f"alpha={alpha!r} outside [0, 1)")
    w = damped_frequency(alpha)
    decay = np.exp(-alpha * t) / w
    wt = w * t
    x = decay * (w * np.cos(wt) + alpha * np.sin(wt)) * x0
    v = -decay * np.sin(wt) * x0
    return x, v


def linear_tau(alpha: float) -> float:
    """Oscillation time ``2*pi/sqrt(1 - alpha**2)`` of the linear oscillator."""
    return 2.0 * math.pi / damped_frequency(alpha)


def linear_sensitivity(x0: float, t):
    """``(X, V)`` of the undamped linear oscillator at ``alpha = 0``."""
    return x0 * (np.sin(t) - t * np.cos(t)), x0 * t * np.sin(t)


def energy(model: Nonlinearity, x, v):
    """``v**2/2 + int_0^x s*(1 + f(s)) ds`` for the closed-form families."""
    if model.kind == SINE:
        s = np.sin(0.5 * np.asarray(x, dtype=float))
        return 0.5 * v * v + 2.0 * s * s
    x2 = x * x
    potential = 0.5 * x2
    power = x2
    for k, c in enumerate(model.coeffs, start=1):
        power = power * x2
        potential = potential + c * power / (2 * k + 2)
    return 0.5 * v * v + potential
