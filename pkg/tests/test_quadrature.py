import mpmath
import numpy as np
import pytest

from deltawave.quadrature import (
    TimeJumpData,
    composite,
    dh2_increment,
    dh4_increment,
    legendre_q3,
    quadrature_experiment,
    toy_function,
    toy_integral,
    toy_jumps,
)


def test_dh2_smooth_reduction():
    assert dh2_increment(1.0, 1.0, 0.1) == pytest.approx(0.1)


def test_dh2_midpoint_jump():
    dt, c, cp = 0.2, 3.0, -5.0
    inc = dh2_increment(0.0, 0.0, dt, TimeJumpData(dt / 2, (c, 0.0)))
    assert inc == pytest.approx(0.0, abs=1e-16)
    inc = dh2_increment(0.0, 0.0, dt, TimeJumpData(dt / 2, (0.0, cp)))
    assert inc == pytest.approx(-cp * dt**2 / 8)


def test_dh4_reductions():
    assert dh4_increment(2.0, 2.0, 0.0, 0.0, 0.3) == pytest.approx(0.6)
    zero = TimeJumpData(0.1, (0.0, 0.0, 0.0, 0.0))
    assert dh4_increment(1.0, 2.0, 0.5, -1.0, 0.3, zero) == dh4_increment(1.0, 2.0, 0.5, -1.0, 0.3)


def test_jump_validation():
    with pytest.raises(ValueError):
        dh2_increment(0, 0, 0.1, TimeJumpData(0.0, (1.0, 1.0)))
    with pytest.raises(ValueError):
        dh2_increment(0, 0, 0.1, TimeJumpData(0.1, (1.0, 1.0)))
    with pytest.raises(ValueError):
        dh4_increment(0, 0, 0, 0, 0.1, TimeJumpData(0.05, (1.0, 1.0)))


def _piecewise(left, right, tc):
    L, R = np.polynomial.Polynomial(left), np.polynomial.Polynomial(right)
    K = [(R.deriv(k)(tc) if k else R(tc)) - (L.deriv(k)(tc) if k else L(tc)) for k in range(4)]
    f = lambda t: R(t) if t > tc else L(t)
    df = lambda t: R.deriv()(t) if t > tc else L.deriv()(t)
    exact = L.integ()(tc) - L.integ()(0.0) + R.integ()(1.0) - R.integ()(tc)
    return f, df, K, exact


def test_dh2_exact_for_piecewise_linear():
    tc = 0.37
    f, _, K, exact = _piecewise([1.0, 2.0], [-0.5, 0.25], tc)
    inc = dh2_increment(f(0.0), f(1.0), 1.0, TimeJumpData(tc, K[:2]))
    assert inc == pytest.approx(exact, rel=1e-12)


def test_dh4_exact_for_piecewise_cubic():
    tc = 0.61
    f, df, K, exact = _piecewise([1.0, 2.0, -3.0, 0.5], [-0.5, 0.25, 1.0, -2.0], tc)
    inc = dh4_increment(f(0.0), f(1.0), df(0.0), df(1.0), 1.0, TimeJumpData(tc, K))
    assert inc == pytest.approx(exact, rel=1e-12)


def test_time_symmetry_of_smooth_rules():
    f1, f2, d1, d2, dt = 0.3, -1.2, 2.0, 0.7, 0.05
    assert dh2_increment(f1, f2, dt) == -dh2_increment(f2, f1, -dt)
    assert dh4_increment(f1, f2, d1, d2, dt) == pytest.approx(-dh4_increment(f2, f1, d2, d1, -dt), rel=1e-15)


def test_toy_jumps_and_values():
    assert toy_jumps() == pytest.approx((-2 / 3, 15 / 8, 8.0, -105 / 2))
    assert legendre_q3(0.0) == pytest.approx(2 / 3)
    p5 = mpmath.legendre(5, mpmath.mpf("0.49"))
    assert toy_function(0.49) == pytest.approx(float(p5), rel=1e-14)
    q3 = mpmath.legenq(3, 0, mpmath.mpf("-0.5"), type=2)
    assert toy_function(-0.5) == pytest.approx(float(mpmath.re(q3)), rel=1e-13)


def test_toy_domain():
    with pytest.raises(ValueError):
        toy_function(-1.0)


def test_toy_integral_value():
    assert toy_integral() == pytest.approx(0.294859, abs=5e-7)


def test_composite_rejects_non_dividing_step():
    with pytest.raises(ValueError):
        composite(0.3, "dh2")


def test_experiment_columns():
    t = quadrature_experiment([0.05, 0.025])
    assert t.shape == (2, 5)
    assert np.all(t[:, 2] < t[:, 1])
