import math

import numpy as np
import pytest
from scipy.linalg import expm

from helpers import constant, growth, time_poly
from resnet_ode.dataset import sample_domain
from resnet_ode.integrators import (
    NonFiniteStateError, SCHEMES, euler_step, get_scheme, reference_step, rk2_step, rk4_38_step, step,
)
from resnet_ode.metrics import fit_order
from resnet_ode.systems import Domain, OdeSystem, get_system

STEPPERS = [euler_step, rk2_step, rk4_38_step]


def test_scheme_table():
    assert [(SCHEMES[k].kind, SCHEMES[k].formal_order) for k in ("euler", "rk2", "rk4")] == [
        ("euler", 1), ("rk2", 2), ("rk4_38", 4)]
    assert [SCHEMES[k].target_order for k in ("euler", "rk2", "rk4")] == [2, 3, 5]
    with pytest.raises(ValueError):
        get_scheme("rk45")


def test_scalar_growth_values():
    s = growth()
    x = np.array([1.0])
    assert euler_step(s, x, 0.0, 0.1)[0] == pytest.approx(1.1, abs=1e-15)
    assert rk2_step(s, x, 0.0, 0.1)[0] == pytest.approx(1.105, abs=1e-15)
    taylor = 1 + 0.1 + 0.005 + 0.1**3 / 6 + 0.1**4 / 24
    assert rk4_38_step(s, x, 0.0, 0.1)[0] == pytest.approx(taylor, abs=1e-15)
    assert reference_step(s, x, 0.0, 0.1)[0] == pytest.approx(1.1051709180756477, abs=1e-13)


def test_saddle_euler_step():
    out = euler_step(get_system("saddle"), np.array([1.5, 0.0]), 0.0, 0.1)
    np.testing.assert_allclose(out, [1.45, 0.15], atol=1e-15)


@pytest.mark.parametrize("fn", STEPPERS)
def test_constant_rhs_is_exact(fn):
    s = constant()
    x = np.array([0.2, 0.4])
    np.testing.assert_allclose(fn(s, x, 0.0, 0.1), x + 0.1 * np.array([0.7, -1.3]), rtol=0, atol=1e-15)


@pytest.mark.parametrize("fn", STEPPERS)
def test_rejects_nonpositive_dt(fn):
    with pytest.raises(ValueError):
        fn(get_system("saddle"), np.zeros(2), 0.0, 0.0)
    with pytest.raises(ValueError):
        fn(get_system("saddle"), np.zeros(2), 0.0, -0.1)


def _affine_taylor(A, b, x, dt, degree):
    # x + sum_{m=1..degree} dt^m A^(m-1) (A x + b) / m!
    f = x @ A.T + b
    out = x.copy()
    for m in range(1, degree + 1):
        out = out + dt**m / math.factorial(m) * f @ np.linalg.matrix_power(A, m - 1).T
    return out


@pytest.mark.parametrize("name", ["saddle", "nodal_sink", "improper_node", "star", "center", "spiral"])
def test_linear_taylor_polynomials(name):
    s = get_system(name)
    A, b = s.linear
    x = sample_domain(s.domain, 20, 5)
    np.testing.assert_allclose(rk2_step(s, x, 0, 0.1), _affine_taylor(A, b, x, 0.1, 2), rtol=0, atol=1e-14)
    np.testing.assert_allclose(rk4_38_step(s, x, 0, 0.1), _affine_taylor(A, b, x, 0.1, 4), rtol=0, atol=1e-13)


def test_reference_one_substep_is_rk4():
    s = get_system("pendulum")
    x = sample_domain(s.domain, 10, 0)
    np.testing.assert_array_equal(reference_step(s, x, 0.0, 0.1, substeps=1), rk4_38_step(s, x, 0.0, 0.1))


def test_reference_richardson_consistency():
    s = get_system("nodal_sink")
    x = np.array([0.0, -0.5])
    a = reference_step(s, x, 0.0, 0.1, 1000)
    b = reference_step(s, x, 0.0, 0.1, 2000)
    assert np.max(np.abs(a - b)) < 1e-12


def test_reference_matches_matrix_exponential():
    s = get_system("center")
    A, _ = s.linear
    x = sample_domain(s.domain, 50, 9)
    np.testing.assert_allclose(reference_step(s, x, 0.0, 0.1), x @ expm(0.1 * A).T, rtol=0, atol=1e-12)


def test_rk2_exact_for_linear_time_rhs():
    s = time_poly([0.3, -1.7])
    x = np.array([0.25])
    t, dt = 0.4, 0.1
    exact = x + 0.3 * dt - 1.7 * ((t + dt) ** 2 - t**2) / 2
    np.testing.assert_allclose(rk2_step(s, x, t, dt), exact, rtol=0, atol=1e-15)


def test_rk4_exact_for_cubic_time_rhs():
    c = [0.5, -1.0, 2.0, 3.0]
    s = time_poly(c)
    x = np.array([-0.75])
    t, dt = 0.2, 0.3
    antider = lambda u: sum(ci * u ** (i + 1) / (i + 1) for i, ci in enumerate(c))
    exact = x + antider(t + dt) - antider(t)
    np.testing.assert_allclose(rk4_38_step(s, x, t, dt), exact, rtol=0, atol=1e-15)
    # a quartic term breaks exactness
    s4 = time_poly(c + [5.0])
    exact4 = exact + 5.0 * ((t + dt) ** 5 - t**5) / 5
    assert abs(rk4_38_step(s4, x, t, dt)[0] - exact4[0]) > 1e-8


@pytest.mark.parametrize("fn", STEPPERS + [reference_step])
def test_autonomous_steppers_ignore_t(fn):
    s = get_system("van_der_pol")
    x = sample_domain(s.domain, 30, 2)
    assert np.array_equal(fn(s, x, 0.0, 0.05), fn(s, x, 17.25, 0.05))


@pytest.mark.parametrize("fn", STEPPERS)
def test_deterministic_and_batch_consistent(fn):
    s = get_system("four_critical")
    x = sample_domain(s.domain, 40, 3)
    a = fn(s, x, 0.0, 0.05)
    assert np.array_equal(a, fn(s, x, 0.0, 0.05))
    np.testing.assert_allclose(fn(s, x[7], 0.0, 0.05), a[7], rtol=1e-15, atol=1e-15)


def test_step_dispatch():
    s = get_system("saddle")
    x = np.array([1.0, 0.5])
    assert np.array_equal(step("rk4", s, x, 0, 0.1), rk4_38_step(s, x, 0, 0.1))
    assert np.array_equal(step("euler", s, x, 0, 0.1), euler_step(s, x, 0, 0.1))


def test_non_finite_state_reports_index():
    blow = OdeSystem("blow", 1, lambda x, t: np.where(x > 0.5, np.inf, x), Domain.box((0, 1)), 0.1)
    x = np.array([[0.1], [0.2], [0.9], [0.3]])
    with pytest.raises(NonFiniteStateError) as info:
        euler_step(blow, x, 0.0, 0.1)
    assert info.value.index == 2


@pytest.mark.parametrize("name", ["nodal_sink", "pendulum"])
def test_order_of_accuracy(name):
    s = get_system(name)
    x = sample_domain(s.domain, 100, 11)
    dts = [0.2, 0.1, 0.05, 0.025]
    ref = {dt: reference_step(s, x, 0.0, dt) for dt in dts}
    expected = {"euler": (2, 0.3), "rk2": (3, 0.3), "rk4": (5, 0.3)}
    for scheme, (order, tol) in expected.items():
        errs = [np.mean(np.linalg.norm(step(scheme, s, x, 0.0, dt) - ref[dt], axis=1)) for dt in dts]
        assert abs(fit_order(dts, errs) - order) <= tol, scheme
