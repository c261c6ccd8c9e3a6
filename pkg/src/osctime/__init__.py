"""Oscillation time of the damped nonlinear pendulum ``x'' + 2*alpha*x' + x*(1 + f(x)) = 0``."""
from .analysis import (
    BlowupReport,
    MinResult,
    PeriodFit,
    SweepRow,
    SweepTable,
    blowup_scan,
    find_min_alpha,
    fit_period_coefficient,
    golden_section,
    sweep,
)
from .exceptions import (
    DegenerateInputError,
    DivergenceError,
    DomainError,
    FitError,
    IntegrationError,
    NoOscillationError,
    OscTimeError,
    PhaseStallError,
    SingularDenominatorError,
    StepSizeError,
)
from .integrator import DenseTrajectory, Event, Tolerances, find_events, integrate, integrate_to_events
from .models import (
    Nonlinearity,
    PendulumConfig,
    eval_f,
    eval_G,
    linear_solution,
    linear_tau,
    restoring_force,
    rhs_augmented,
    rhs_base,
)
from .oscillation import (
    OscillationResult,
    dtau_dalpha,
    dtau_half_dalpha,
    half_oscillation_time,
    oscillation_time,
    sensitivity_at,
    tau_half_polar,
    v2_closed_form,
    varpar_residual,
)

__version__ = "0.1.0"
