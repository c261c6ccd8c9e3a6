import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from osctime import DomainError, Nonlinearity, PendulumConfig
from osctime.models import (
    base_system,
    envelope_system,
    energy,
    eval_f,
    eval_G,
    linear_solution,
    linear_tau,
    restoring_force,
    rhs_augmented,
    rhs_base,
)

from conftest import ALL_MODELS

unit_floats = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)


def test_restoring_force_examples(linear, sine, duffing):
    assert restoring_force(linear, 0.3) == 0.3
    assert restoring_force(sine, 0.5) == pytest.approx(0.4794255386, abs=1e-10)
    assert restoring_force(sine, 0.5) == math.sin(0.5)
    assert restoring_force(duffing, 0.2) == pytest.approx(0.192, abs=1e-15)


def test_eval_f_examples(sine, duffing):
    assert eval_f(duffing, 0.3) == pytest.approx(-0.09, abs=1e-15)
    for model in ALL_MODELS:
        assert eval_f(model, 0.0) == 0.0
    assert eval_f(sine, 0.1) == pytest.approx(math.sin(0.1) / 0.1 - 1.0, abs=1e-15)
    assert eval_f(sine, 0.1) == pytest.approx(-0.0016658335, abs=1e-10)


def test_eval_G_examples(linear, sine, duffing):
    assert eval_G(duffing, 0.2) == pytest.approx(0.12, abs=1e-15)
    assert eval_G(linear, 0.7) == 0.0
    assert eval_G(sine, 0.1) == pytest.approx(1.0 - math.cos(0.1), rel=1e-12)
    assert eval_G(sine, 0.1) == pytest.approx(0.0049958347, abs=1e-10)


def test_leading_coefficients(linear, sine, duffing):
    assert linear.a == 0.0
    assert sine.a == pytest.approx(1 / 6)
    assert duffing.a == 1.0
    assert Nonlinearity.even_poly([-0.25, 3.0]).a == 0.25


@pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: m.label)
def test_leading_behaviour_bounded(model):
    x = np.linspace(-0.5, 0.5, 2001)
    x = x[x != 0]
    ratio = np.abs(eval_f(model, x) + model.a * x**2) / x**4
    assert np.all(np.isfinite(ratio))
    assert ratio.max() < 10.0


@pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: m.label)
def test_odd_restoring_force_vectorized(model):
    rng = np.random.default_rng(12345)
    x = rng.uniform(-1.0, 1.0, 1_000_000)
    fx = restoring_force(model, x)
    assert np.max(np.abs(restoring_force(model, -x) + fx)) <= 4 * np.finfo(float).eps


@pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: m.label)
@given(x=unit_floats)
def test_f_even(model, x):
    assert eval_f(model, -x) == eval_f(model, x)
    assert eval_G(model, -x) == eval_G(model, x)


@pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: m.label)
def test_force_consistent_with_f(model):
    x = np.concatenate([np.linspace(-1.0, -1e-3, 5000), np.linspace(1e-3, 1.0, 5000)])
    force = restoring_force(model, x)
    via_f = x * (1.0 + eval_f(model, x))
    # relative to |x|: Duffing(a=1) has a zero of the force at |x| = 1
    assert np.max(np.abs(force - via_f) / np.abs(x)) <= 1e-12


@pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: m.label)
def test_G_matches_finite_difference(model):
    h = 1e-6
    x = np.linspace(-0.8, 0.8, 1601)

    def xf(z):
        return z * eval_f(model, z)

    fd = -(xf(x + h) - xf(x - h)) / (2 * h)
    assert np.max(np.abs(eval_G(model, x) - fd)) <= 1e-8


def test_sine_f_switch_is_continuous(sine):
    below = np.nextafter(0.5, 0.0)
    assert eval_f(sine, below) == pytest.approx(eval_f(sine, 0.5), abs=1e-15)


def test_scalar_and_array_paths_agree(sine):
    xs = np.array([-0.9, -0.4, 0.0, 0.2, 0.6])
    assert np.array_equal(eval_f(sine, xs), [eval_f(sine, float(x)) for x in xs])


def test_rhs_base_examples(linear, duffing, sine):
    np.testing.assert_array_equal(rhs_base(linear, 0.0, (1.0, 0.0)), [0.0, -1.0])
    np.testing.assert_allclose(rhs_base(duffing, 0.5, (0.2, -0.1)), [-0.1, -0.092], atol=1e-15)
    np.testing.assert_allclose(rhs_base(sine, 0.0, (0.5, 0.0)), [0.0, -0.4794255386], atol=1e-10)
    for model in ALL_MODELS:
        np.testing.assert_array_equal(rhs_base(model, 0.3, (0.0, 0.0)), [0.0, 0.0])


def test_rhs_augmented_examples(linear, duffing):
    x0 = 0.4
    np.testing.assert_array_equal(rhs_augmented(linear, 0.0, (x0, 0.0, 0.0, 0.0)), [0.0, -x0, 0.0, 0.0])
    np.testing.assert_allclose(
        rhs_augmented(duffing, 0.0, (0.2, -0.1, 0.05, 0.01)),
        [-0.1, -0.192, 0.01, 0.156],
        atol=1e-15,
    )


def test_linear_solution_examples():
    assert linear_solution(0.7, 0.3, 0.0) == pytest.approx((0.7, 0.0), abs=1e-15)
    x, v = linear_solution(1.0, 0.0, math.pi / 2)
    assert x == pytest.approx(0.0, abs=1e-15) and v == pytest.approx(-1.0, abs=1e-15)
    x, v = linear_solution(1.0, 0.6, math.pi / 0.8)
    assert x == pytest.approx(-math.exp(-0.6 * math.pi / 0.8), abs=1e-15)
    assert x == pytest.approx(-0.0947802248, abs=1e-10)
    assert v == pytest.approx(0.0, abs=1e-15)


def test_linear_solution_domain():
    with pytest.raises(DomainError):
        linear_solution(1.0, 1.0, 0.5)


@pytest.mark.parametrize("alpha", [0.0, 0.3, 0.8])
def test_linear_solution_satisfies_ode(linear, alpha):
    h = 1e-6
    for t in np.linspace(0.1, 8.0, 40):
        xp, vp = linear_solution(0.6, alpha, t + h)
        xm, vm = linear_solution(0.6, alpha, t - h)
        x, v = linear_solution(0.6, alpha, t)
        deriv = np.array([(xp - xm) / (2 * h), (vp - vm) / (2 * h)])
        np.testing.assert_allclose(deriv, rhs_base(linear, alpha, (x, v)), atol=1e-6)


def test_linear_tau_examples():
    assert linear_tau(0.0) == pytest.approx(2 * math.pi, abs=1e-15)
    assert linear_tau(0.0) == pytest.approx(6.283185307, abs=1e-9)
    assert linear_tau(0.6) == pytest.approx(7.853981634, abs=1e-9)
    assert linear_tau(0.99) == pytest.approx(2 * math.pi / math.sqrt(1 - 0.99**2), rel=1e-15)
    assert linear_tau(0.99) == pytest.approx(44.5403197, abs=1e-7)
    alphas = np.linspace(0.0, 0.999, 200)
    assert np.all(np.diff([linear_tau(a) for a in alphas]) > 0)
    with pytest.raises(DomainError):
        linear_tau(1.0)


@given(st.floats(min_value=-0.999, max_value=0.999))
def test_config_frequency(alpha):
    cfg = PendulumConfig(0.2, alpha)
    assert cfg.omega**2 + alpha**2 == pytest.approx(1.0, abs=4e-16)


def test_poly_matches_duffing():
    poly = Nonlinearity.even_poly([-1.0])
    duff = Nonlinearity.duffing(1.0)
    x = np.linspace(-1, 1, 101)
    np.testing.assert_array_equal(poly.f(x), duff.f(x))
    np.testing.assert_array_equal(poly.G(x), duff.G(x))


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        Nonlinearity("cubic")


@pytest.mark.parametrize("model", ALL_MODELS, ids=lambda m: m.label)
def test_energy_matches_potential_quadrature(model):
    from scipy.integrate import quad

    for x in (-0.7, 0.3, 0.9):
        pot, _ = quad(lambda s: restoring_force(model, s), 0.0, x, epsabs=1e-14)
        assert energy(model, x, 0.0) == pytest.approx(pot, abs=1e-13)


def test_envelope_linear_is_harmonic():
    fun = envelope_system(Nonlinearity.linear(), 0.6, 0.3)
    dw = fun(1.7, np.array([0.4, -0.2]))
    assert dw[0] == -0.2 and dw[1] == pytest.approx(-0.64 * 0.4, rel=1e-15)


@pytest.mark.parametrize("alpha", [0.0, 0.3, -0.2])
def test_envelope_matches_base_field(sine, alpha):
    # map (x, v) -> (w, p) and compare p' with the chain rule applied to the base field
    x0, t = 0.8, 1.3
    x, v = 0.5, -0.4
    e = math.exp(alpha * t)
    w, p = e * x, e * (v + alpha * x)
    _, a = base_system(sine, alpha, x0)(t, np.array([x, v]))
    _, dp = envelope_system(sine, alpha, x0)(t, np.array([w, p]))
    assert dp == pytest.approx(e * (a + 2 * alpha * v + alpha**2 * x), abs=1e-14)
