import math

import numpy as np
import pytest
from scipy.integrate import quad

from osctime import (
    DegenerateInputError,
    DomainError,
    Nonlinearity,
    OscTimeError,
    PhaseStallError,
    dtau_half_dalpha,
    half_oscillation_time,
    oscillation_time,
    sensitivity_at,
    tau_half_polar,
    v2_closed_form,
    varpar_residual,
)
from osctime.analysis import harmonic_deviation, loglog_slope
from osctime.integrator import LOCAL_MAX, LOCAL_MIN
from osctime.models import linear_tau
from osctime.oscillation import (
    dtau_dalpha,
    fd_sensitivity,
    sensitivity_trajectory,
    state_at,
    x1_closed_form,
)
from osctime.verification import pendulum_period


def test_linear_half_and_full(linear):
    res = half_oscillation_time(linear, 0.3, 0.0)
    assert res.tau_half == pytest.approx(math.pi, abs=1e-10)
    assert res.tau == pytest.approx(2 * math.pi, abs=1e-10)
    assert res.x_hat0 == pytest.approx(0.3, abs=1e-10)
    assert [e.kind for e in res.events] == [LOCAL_MIN, LOCAL_MAX]


def test_linear_damped_half(linear):
    res = half_oscillation_time(linear, 0.3, 0.6)
    assert res.tau_half == pytest.approx(3.926990817, abs=1e-9)
    assert res.x_hat0 == pytest.approx(0.3 * math.exp(-0.6 * math.pi / 0.8), abs=1e-11)


def test_sine_period_matches_elliptic_oracle(sine):
    assert oscillation_time(sine, 0.1, 0.0) == pytest.approx(pendulum_period(0.1), abs=1e-9)
    assert oscillation_time(sine, 0.1, 0.0) == pytest.approx(6.2871145, abs=1e-7)


def test_softening_and_hardening_order(duffing, hard_duffing):
    assert oscillation_time(duffing, 0.2, 0.0) > 2 * math.pi
    assert oscillation_time(hard_duffing, 0.2, 0.0) < 2 * math.pi


@pytest.mark.parametrize("x0", [0.01, 0.2, 0.7, -0.4])
def test_linear_amplitude_independent(linear, x0):
    assert oscillation_time(linear, x0, 0.6) == pytest.approx(7.853981634, abs=1e-9)


def test_negative_amplitude_mirrors(sine):
    pos = half_oscillation_time(sine, 0.4, 0.2)
    neg = half_oscillation_time(sine, -0.4, 0.2)
    assert neg.tau == pytest.approx(pos.tau, abs=1e-10)
    assert neg.x_hat0 == pytest.approx(-pos.x_hat0, abs=1e-12)
    assert [e.kind for e in neg.events] == [LOCAL_MAX, LOCAL_MIN]


def test_negative_damping_not_rejected(sine):
    # amplitude grows under negative damping, so the softening spring slows down further
    assert oscillation_time(sine, 0.2, -0.1) > oscillation_time(sine, 0.2, 0.1) > linear_tau(-0.1)


def test_bad_inputs(linear):
    with pytest.raises(DegenerateInputError):
        half_oscillation_time(linear, 0.0, 0.1)
    with pytest.raises(DomainError):
        half_oscillation_time(linear, 0.3, 1.0)


@pytest.mark.parametrize("alpha", [0.0, 0.1, 0.5])
def test_result_invariants(sine, alpha):
    res = half_oscillation_time(sine, 0.4, alpha)
    assert res.tau > res.tau_half > 0
    assert 0 < res.x_hat0 <= 0.4 + 1e-10
    if alpha == 0:
        assert res.x_hat0 == pytest.approx(0.4, abs=1e-10)
    else:
        assert res.x_hat0 < 0.4


def test_unbounded_motion_fails_loudly(duffing):
    # beyond the saddle at |x| = 1 the softening spring lets the mass escape
    with pytest.raises(OscTimeError):
        oscillation_time(duffing, 1.2, 0.0)


# -- polar route -------------------------------------------------------------

def test_polar_linear(linear):
    assert tau_half_polar(linear, 0.5, 0.0) == pytest.approx(math.pi, abs=1e-10)
    assert tau_half_polar(linear, 0.5, 0.6) == pytest.approx(math.pi / 0.8, abs=1e-9)


def test_polar_quadrature_identity():
    val, _ = quad(lambda th: 1.0 / (1.0 + 0.6 * math.sin(2 * th)), 0.0, math.pi, epsabs=1e-13)
    assert val == pytest.approx(math.pi / 0.8, abs=1e-10)


@pytest.mark.parametrize("model", [Nonlinearity.sine(), Nonlinearity.duffing(1.0), Nonlinearity.duffing(-1.0)],
                         ids=lambda m: m.label)
def test_polar_matches_events(model):
    assert tau_half_polar(model, 0.3, 0.1) == pytest.approx(half_oscillation_time(model, 0.3, 0.1).tau_half, abs=1e-6)


def test_polar_phase_stall(duffing):
    with pytest.raises(PhaseStallError):
        tau_half_polar(duffing, 1.2, 0.0)


def test_polar_requires_positive_amplitude(sine):
    with pytest.raises(DegenerateInputError):
        tau_half_polar(sine, -0.2, 0.0)


# -- sensitivities -------------------------------------------------------------

def test_linear_sensitivity_at_pi(linear):
    X, V = sensitivity_at(linear, 1.0, 0.0, math.pi)
    assert X == pytest.approx(math.pi, abs=1e-8)
    assert V == pytest.approx(0.0, abs=1e-8)


def test_sensitivity_initial(sine):
    assert sensitivity_at(sine, 0.3, 0.2, 0.0) == (0.0, 0.0)


def test_linear_sensitivity_closed_form(linear):
    traj = sensitivity_trajectory(linear, 0.4, 0.0, 2 * math.pi)
    t = np.linspace(0, 2 * math.pi, 300)
    y = 0.4 * traj(t)
    np.testing.assert_allclose(y[:, 2], x1_closed_form(0.4, t), atol=1e-8)
    np.testing.assert_allclose(y[:, 3], 0.4 * t * np.sin(t), atol=1e-8)


def test_third_derivative_of_X_at_zero(duffing):
    x0 = 0.3
    expected = 2 * x0 * (1 + duffing.f(x0))

    def est(h):
        return 6 * sensitivity_at(duffing, x0, 0.2, h)[0] / h**3

    h = 0.02
    extrapolated = 2 * est(h / 2) - est(h)
    assert extrapolated == pytest.approx(expected, rel=1e-3)


def test_heavy_lifting_sign(duffing):
    t_half = half_oscillation_time(duffing, 0.1, 0.0).tau_half
    assert sensitivity_at(duffing, 0.1, 0.0, t_half)[1] > 0


def test_X_positive_on_first_half_swing(sine):
    traj = sensitivity_trajectory(sine, 0.1, 0.0, math.pi)
    t = np.linspace(0.1, math.pi, 500)
    assert np.all(traj(t)[:, 2] > 0)


@pytest.mark.parametrize("model", [Nonlinearity.sine(), Nonlinearity.duffing(1.0), Nonlinearity.linear()],
                         ids=lambda m: m.label)
@pytest.mark.parametrize("x0,alpha", [(0.1, 0.0), (0.3, 0.3)])
def test_sensitivity_vs_finite_difference(model, x0, alpha):
    t_half = half_oscillation_time(model, x0, alpha).tau_half
    for t in (1.0, 2.0, math.pi, t_half):
        X, V = sensitivity_at(model, x0, alpha, t)
        fx, fv = fd_sensitivity(model, x0, alpha, t, 1e-5)
        assert abs(X - fx) <= 1e-5 and abs(V - fv) <= 1e-5


def test_sensitivity_scaling_is_cubic(sine, duffing):
    x0s = (0.05, 0.1, 0.2)
    for model in (sine, duffing):
        vs = [sensitivity_at(model, x0, 0.0, half_oscillation_time(model, x0, 0.0).tau_half)[1] for x0 in x0s]
        assert all(v > 0 for v in vs)
        assert 2.7 <= loglog_slope(x0s, vs) <= 3.3


# -- implicit-function derivative ----------------------------------------------

def test_dtau_half_linear(linear):
    assert dtau_half_dalpha(linear, 0.3, 0.0) == pytest.approx(0.0, abs=1e-9)
    expected = math.pi * 0.5 / 0.75**1.5
    assert expected == pytest.approx(2.418399, abs=1e-6)
    assert dtau_half_dalpha(linear, 0.3, 0.5) == pytest.approx(expected, abs=1e-8)


def test_dtau_half_negative_at_zero_damping(duffing, sine):
    assert dtau_half_dalpha(duffing, 0.1, 0.0) < 0
    assert dtau_half_dalpha(sine, 0.3, 0.0) < 0


@pytest.mark.parametrize("model", [Nonlinearity.sine(), Nonlinearity.duffing(1.0), Nonlinearity.duffing(-1.0)],
                         ids=lambda m: m.label)
@pytest.mark.parametrize("x0,alpha", [(0.1, 0.0), (0.3, 0.2), (0.5, 0.6)])
def test_dtau_half_vs_finite_difference(model, x0, alpha):
    h = 1e-5
    value = dtau_half_dalpha(model, x0, alpha)
    fd = (half_oscillation_time(model, x0, alpha + h).tau_half - half_oscillation_time(model, x0, alpha - h).tau_half) / (2 * h)
    assert abs(value - fd) <= max(1e-6, 1e-3 * abs(value))


def test_dtau_full_vs_finite_difference(duffing):
    h = 1e-5
    value = dtau_dalpha(duffing, 0.2, 0.03)
    fd = (oscillation_time(duffing, 0.2, 0.03 + h) - oscillation_time(duffing, 0.2, 0.03 - h)) / (2 * h)
    assert abs(value - fd) <= max(1e-6, 1e-3 * abs(value))
    assert dtau_dalpha(Nonlinearity.linear(), 0.2, 0.5) == pytest.approx(2 * math.pi * 0.5 / 0.75**1.5, abs=1e-8)


# -- closed forms ----------------------------------------------------------------

def test_v2_at_zero():
    assert v2_closed_form(1.0, 0.3, 0.0) == pytest.approx(0.0, abs=1e-17)
    assert -5 / 32 - 17 / 128 + 37 / 128 == pytest.approx(0.0, abs=1e-16)


def test_v2_at_pi():
    expected = 9 * math.pi**2 * 1e-3 / 16
    assert expected == pytest.approx(5.55165e-3, abs=1e-8)
    assert v2_closed_form(1.0, 0.1, math.pi) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0, math.pi, 3.5])
def test_v2_matches_defining_quadrature(t):
    a, x0 = 1.0, 0.1
    integral, _ = quad(lambda s: math.cos(t - s) * math.cos(s) ** 2 * x1_closed_form(x0, s), 0.0, t, epsabs=1e-15)
    assert v2_closed_form(a, x0, t) == pytest.approx(3 * a * x0**2 * integral, abs=1e-10)


def test_v2_vectorized():
    t = np.linspace(0, 4, 9)
    np.testing.assert_array_equal(v2_closed_form(0.5, 0.2, t), [v2_closed_form(0.5, 0.2, float(s)) for s in t])


# -- variation of parameters -------------------------------------------------------

def test_varpar_linear(linear):
    assert varpar_residual(linear, 0.3, 0.4, 5.0) <= 1e-10


def test_varpar_nonlinear(sine, duffing):
    t_half = half_oscillation_time(sine, 0.3, 0.2).tau_half
    assert varpar_residual(sine, 0.3, 0.2, t_half) <= 1e-8
    assert varpar_residual(duffing, 0.2, 0.0, math.pi) <= 1e-8


def test_varpar_detects_wrong_trajectory(duffing):
    # the residual is not trivially small: the linear solution alone misses x(t)
    x, _ = state_at(duffing, 0.5, 0.0, 3.0)
    from osctime.models import linear_solution

    assert abs(x - linear_solution(0.5, 0.0, 3.0)[0]) > 1e-3


# -- small-amplitude deviation from harmonic motion -----------------------------------

@pytest.mark.parametrize("model", [Nonlinearity.sine(), Nonlinearity.duffing(1.0)], ids=lambda m: m.label)
def test_harmonic_deviation_is_cubic(model):
    x0s = (0.05, 0.1, 0.2, 0.4)
    devs = [harmonic_deviation(model, x0) for x0 in x0s]
    assert 2.7 <= loglog_slope(x0s, devs) <= 3.3


def test_harmonic_deviation_vanishes_for_linear(linear):
    assert harmonic_deviation(linear, 0.3) <= 1e-9
