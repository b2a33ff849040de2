import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from resnet_ode.dataset import generate_pairs, generate_reference_pairs
from resnet_ode.metrics import error_report, fit_order, max_linf_error, mean_l2_error, target_mean_l2_error
from resnet_ode.systems import get_system


def test_examples():
    assert max_linf_error([[0, 0]], [[0, 0]]) == 0
    assert max_linf_error([[0, 0]], [[1, -2]]) == 2
    assert max_linf_error([[0, 0], [0, 0]], [[1, 0], [0, 3]]) == 3
    assert mean_l2_error([[0, 0]], [[3, 4]]) == 5
    assert mean_l2_error([[0, 0], [0, 0]], [[3, 4], [0, 0]]) == 2.5


def test_mean_of_norms_not_rms():
    # RMS would give sqrt(25 / 2)
    assert mean_l2_error([[0, 0], [0, 0]], [[3, 4], [0, 0]]) != pytest.approx(np.sqrt(12.5))


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        mean_l2_error(np.zeros((0, 2)), np.zeros((0, 2)))
    with pytest.raises(ValueError):
        max_linf_error(np.zeros((3, 2)), np.zeros((2, 2)))


finite = st.floats(-1e6, 1e6, allow_nan=False)


@settings(max_examples=150, deadline=None)
@given(arrays(float, (7, 3), elements=finite), arrays(float, (7, 3), elements=finite),
       arrays(float, (7, 3), elements=finite), st.one_of(st.just(0.0), st.floats(1e-6, 100)))
def test_properties(a, b, c, k):
    assert mean_l2_error(a, b) == mean_l2_error(b, a)
    assert max_linf_error(a, b) == max_linf_error(b, a)
    assert mean_l2_error(a, c) <= mean_l2_error(a, b) + mean_l2_error(b, c) + 1e-9 * (1 + mean_l2_error(a, c))
    r = error_report(a, b)
    assert r.max_linf >= 0 and r.mean_l2 >= 0 and r.count == 7
    assert r.mean_l2 <= np.sqrt(3) * r.max_linf * (1 + 1e-12)
    d = b - a
    np.testing.assert_allclose(mean_l2_error(k * d, 0 * d), k * mean_l2_error(d, 0 * d), rtol=1e-12)
    np.testing.assert_allclose(max_linf_error(k * d, 0 * d), k * max_linf_error(d, 0 * d), rtol=1e-12)


def test_target_error():
    s = get_system("nodal_sink")
    ref = generate_reference_pairs(s, 0.1, 500, 0)
    assert target_mean_l2_error(ref, ref) == 0
    e_euler = target_mean_l2_error(generate_pairs(s, "euler", 0.1, 500, 0), ref)
    e_rk4 = target_mean_l2_error(generate_pairs(s, "rk4", 0.1, 500, 0), ref)
    assert 3e-3 < e_euler < 3e-2
    assert 3e-6 < e_rk4 < 3e-5
    with pytest.raises(ValueError):
        target_mean_l2_error(generate_pairs(s, "euler", 0.1, 500, 1), ref)
    with pytest.raises(ValueError):
        target_mean_l2_error(generate_pairs(s, "euler", 0.05, 500, 0), ref)


def test_fit_order_exact_power_laws():
    dts = np.array([0.2, 0.1, 0.05, 0.025])
    assert fit_order(dts, dts**2) == pytest.approx(2.0, abs=1e-12)
    assert fit_order(dts, 3.7 * dts**5) == pytest.approx(5.0, abs=1e-12)


def test_fit_order_preconditions():
    with pytest.raises(ValueError):
        fit_order([0.1], [0.01])
    with pytest.raises(ValueError):
        fit_order([0.2, 0.1], [0.04, 0.01])
    with pytest.raises(ValueError):
        fit_order([0.2, 0.1, 0.05], [0.04, 0.0, 0.01])
    with pytest.raises(ValueError):
        fit_order([0.05, 0.1, 0.2], [1, 2, 3])
