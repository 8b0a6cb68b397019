import numpy as np
import pytest

from deltawave.jets import Jet, compose_taylor, jet_polyval


def fd_derivs(f, x, kmax, h=1e-2):
    """Richardson-extrapolated central differences of orders 1..kmax."""
    from math import comb

    def central(k, hh):
        return sum((-1) ** j * comb(k, j) * f(x + (k / 2 - j) * hh) for j in range(k + 1)) / hh**k

    return [(4 * central(k, h / 2) - central(k, h)) / 3 for k in range(1, kmax + 1)]


@pytest.mark.parametrize("name,f,x", [
    ("exp", lambda t: t.exp() if isinstance(t, Jet) else np.exp(t), 0.3),
    ("log", lambda t: t.log() if isinstance(t, Jet) else np.log(t), 1.7),
    ("sin", lambda t: t.sin() if isinstance(t, Jet) else np.sin(t), 0.4),
    ("cos", lambda t: t.cos() if isinstance(t, Jet) else np.cos(t), -0.8),
    ("atanh", lambda t: t.atanh() if isinstance(t, Jet) else np.arctanh(t), 0.2),
    ("recip", lambda t: 1.0 / (1.0 + t * t), 0.6),
    ("mix", lambda t: (t**3 - 2 * t) * (1.0 + t).log() / (t + 2.0) if isinstance(t, Jet)
     else (t**3 - 2 * t) * np.log(1 + t) / (t + 2.0), 0.5),
])
def test_jet_vs_finite_differences(name, f, x):
    jet = f(Jet.variable(x, 4))
    ref = fd_derivs(f, x, 3)
    np.testing.assert_allclose(jet.derivatives()[1:4], ref, rtol=1e-7, atol=1e-7)


def test_truncation_and_differentiate():
    a = Jet.from_derivatives([1.0, 2.0, 6.0, 24.0])
    assert a.order == 3
    np.testing.assert_allclose(a.differentiate().derivatives(), [2.0, 6.0, 24.0])
    b = Jet.variable(0.0, 1)
    assert (a * b).order == 1


def test_integer_power_and_polyval():
    x = Jet.variable(0.7, 3)
    np.testing.assert_allclose((x**3).derivatives(), [0.343, 3 * 0.49, 6 * 0.7, 6.0])
    p = jet_polyval([1.0, -2.0, 0.5], x)
    np.testing.assert_allclose(p.derivatives(), [1 - 1.4 + 0.245, -2 + 0.7, 1.0, 0.0])


def test_compose_taylor_matches_direct():
    x = Jet.variable(0.3, 4) * 2.0
    derivs = lambda x0, k: np.array([np.exp(x0)] * (k + 1))
    np.testing.assert_allclose(compose_taylor(derivs, x).c, x.exp().c, rtol=1e-14)


def test_batch_axes():
    x = Jet(np.array([[0.1, 0.2], [1.0, 1.0]]))
    y = x.sin()
    np.testing.assert_allclose(y.value, np.sin([0.1, 0.2]))
    np.testing.assert_allclose(y.deriv(1), np.cos([0.1, 0.2]))
