import numpy as np
import pytest
from hypothesis import given, strategies as st

from hopfcap import dual as du

finite = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)


def fd(f, x, h=1e-6):
    return (f(x + h) - f(x - h)) / (2 * h)


@pytest.mark.parametrize(
    "func,dfunc_name",
    [
        (du.sqrt, "sqrt"),
        (du.sin, "sin"),
        (du.cos, "cos"),
    ],
)
def test_unary_matches_finite_differences(func, dfunc_name):
    x = np.linspace(0.2, 2.5, 17)
    out = func(du.Dual(x, np.ones_like(x)))
    ref = fd(lambda v: du.value(func(v)), x)
    assert np.allclose(out.eps, ref, atol=1e-8)


def test_arccos_derivative_interior():
    x = np.linspace(-0.9, 0.9, 11)
    out = du.arccos(du.Dual(x, np.ones_like(x)))
    assert np.allclose(out.eps, -1.0 / np.sqrt(1 - x**2), atol=1e-12)


def test_arccos_clips_and_stays_finite():
    out = du.arccos(du.Dual(np.array([1.0 + 1e-15, -1.0]), np.array([1.0, 1.0])))
    assert np.all(np.isfinite(out.val))
    assert np.all(np.isfinite(out.eps))


def test_arctan2_derivative():
    y = np.array([0.3, -0.7])
    x = np.array([0.9, 0.4])
    out = du.arctan2(du.Dual(y, np.ones_like(y)), x)
    assert np.allclose(out.eps, x / (x**2 + y**2), atol=1e-12)


@given(finite, finite, finite, finite)
def test_product_rule(a, ae, b, be):
    p = du.Dual(a, ae) * du.Dual(b, be)
    assert p.val == pytest.approx(a * b)
    assert p.eps == pytest.approx(a * be + ae * b)


@given(finite, finite, finite, finite)
def test_quotient_rule(a, ae, b, be):
    if abs(b) < 1e-3:
        return
    q = du.Dual(a, ae) / du.Dual(b, be)
    assert q.val == pytest.approx(a / b)
    assert q.eps == pytest.approx((ae * b - a * be) / b**2, rel=1e-9, abs=1e-9)


def test_reflected_ops_with_ndarray():
    x = np.array([1.0, 2.0])
    d = du.Dual(np.array([3.0, 4.0]), np.array([1.0, 1.0]))
    s = x - d
    assert isinstance(s, du.Dual)
    assert np.allclose(s.val, [-2.0, -2.0])
    assert np.allclose(s.eps, [-1.0, -1.0])
    p = x * d
    assert isinstance(p, du.Dual)
    assert np.allclose(p.eps, x)


def test_relu_gate():
    d = du.relu(du.Dual(np.array([-1.0, 2.0]), np.array([5.0, 5.0])))
    assert np.allclose(d.val, [0.0, 2.0])
    assert np.allclose(d.eps, [0.0, 5.0])


def test_integer_power():
    d = du.Dual(np.array([2.0]), np.array([1.0])) ** 3
    assert np.allclose(d.val, 8.0)
    assert np.allclose(d.eps, 12.0)
    with pytest.raises(ValueError):
        du.Dual(1.0, 1.0) ** 0.5


def test_vdot_and_normalize():
    x = np.array([[3.0, 4.0, 0.0, 0.0]])
    d = du.Dual(x, np.array([[1.0, 0.0, 0.0, 0.0]]))
    n = du.normalize(d)
    assert np.allclose(du.value(n), [[0.6, 0.8, 0.0, 0.0]])
    # derivative of x/|x| along e0 at (3,4,0,0)
    h = 1e-7
    ref = (x + h * np.eye(4)[0]) / np.linalg.norm(x + h * np.eye(4)[0])
    ref = (ref - (x - h * np.eye(4)[0]) / np.linalg.norm(x - h * np.eye(4)[0])) / (2 * h)
    assert np.allclose(n.eps, ref, atol=1e-6)
