import math

import numpy as np
import pytest

from deltawave.collocation import (
    SpatialJumps,
    delta_correction,
    correction_from_kappa,
    derivative_correction,
    disc_derivative,
    heaviside,
    interpolate,
    kappa,
)
from deltawave.spectral_grid import SpectralGrid


def piecewise_poly(left, right, xi):
    """Callable for a function equal to polynomial ``left``/``right`` on each side of ``xi``."""
    L, R = np.polynomial.Polynomial(left), np.polynomial.Polynomial(right)

    def f(x, k=0):
        x = np.asarray(x, float)
        return np.where(x > xi, R.deriv(k)(x) if k else R(x), L.deriv(k)(x) if k else L(x))

    jumps = np.array([(R.deriv(m)(xi) if m else R(xi)) - (L.deriv(m)(xi) if m else L(xi))
                      for m in range(max(len(left), len(right)))])
    return f, jumps


def test_kappa_examples():
    assert kappa([1.0], 0.3) == 1.0
    assert kappa([1.0, 2.0], 0.5) == 2.0
    assert kappa([0.0, 0.0, 0.0], 0.7) == 0.0
    d = np.linspace(-1, 1, 5)
    J = np.array([0.5, -1.0, 3.0, 2.0])
    direct = sum(J[m] * d**m / math.factorial(m) for m in range(4))
    np.testing.assert_allclose(kappa(J, d), direct, rtol=1e-15, atol=1e-15)


def test_kappa_batches_over_trailing_axes():
    J = np.arange(12.0).reshape(4, 3)
    d = np.array([0.1, -0.2])[:, None]
    out = kappa(J[:, None, :], d)
    assert out.shape == (2, 3)
    for j in range(3):
        np.testing.assert_allclose(out[:, j], kappa(J[:, j], d[:, 0]))


def test_heaviside_half_at_zero():
    np.testing.assert_array_equal(heaviside([-1.0, 0.0, 2.0]), [0.0, 0.5, 1.0])


def test_delta_correction_cases():
    xi = 0.0
    assert delta_correction(0.5, 0.7, xi, 3.0) == 0.0
    assert delta_correction(-0.5, 0.7, xi, 3.0) == 3.0
    assert delta_correction(0.5, -0.7, xi, 3.0) == -3.0
    assert delta_correction(0.5, -0.7, xi, 3.0) == -delta_correction(-0.7, 0.5, xi, 3.0)


def test_interpolation_without_jumps_is_lagrange():
    g = SpectralGrid(9, -1.0, 1.0)
    f = np.cos(g.nodes)
    x = np.linspace(-1, 1, 31)
    lag = np.polynomial.Polynomial.fit(g.nodes, f, 9)(x)
    np.testing.assert_allclose(interpolate(f, g, None, x), lag, atol=1e-12)
    np.testing.assert_allclose(interpolate(f, g, SpatialJumps.none(0.1), x), lag, atol=1e-12)


def test_interpolation_of_abs():
    g = SpectralGrid(3, -1.0, 1.0)
    jumps = SpatialJumps(0.0, [0.0, 2.0])
    x = np.linspace(-0.97, 0.97, 20)
    np.testing.assert_allclose(interpolate(np.abs(g.nodes), g, jumps, x), np.abs(x), atol=1e-12)


def test_interpolation_at_node_is_collocation():
    g = SpectralGrid(8, 0.0, 1.0)
    f = np.sin(3 * g.nodes) + (g.nodes > 0.4)
    jumps = SpatialJumps(0.4, [1.0, 0.0])
    assert interpolate(f, g, jumps, g.nodes[2]) == f[2]


def test_interpolation_domain_errors():
    g = SpectralGrid(8, 0.0, 1.0)
    f = np.zeros(9)
    with pytest.raises(ValueError):
        interpolate(f, g, None, 1.5)
    with pytest.raises(ValueError):
        interpolate(f, g, SpatialJumps(g.nodes[3], [1.0]), 0.3)
    with pytest.raises(ValueError):
        interpolate(f, g, SpatialJumps(1.2, [1.0]), 0.3)


def test_step_function_has_zero_derivative():
    g = SpectralGrid(12, -1.0, 1.0)
    xi = 0.123
    f = heaviside(g.nodes - xi)
    d = disc_derivative(f, g, SpatialJumps(xi, [1.0]), 1)
    assert np.abs(d).max() < 1e-12


def test_no_jumps_gives_plain_derivative():
    g = SpectralGrid(10, 0.0, 2.0)
    f = np.exp(g.nodes)
    np.testing.assert_array_equal(disc_derivative(f, g, None, 2), g.D2 @ f)


def test_same_side_inert():
    g = SpectralGrid(10, 0.0, 1.0)
    k = kappa([0.3, -1.0, 2.0], g.nodes - 0.45)
    for side in (0.0, 1.0):
        theta = np.full(g.size, side)
        assert np.abs(correction_from_kappa(g.D1, k, theta)).max() < 1e-13


def test_piecewise_cubic_derivative_exact():
    xi = 0.3
    f, J = piecewise_poly([1.0, -2.0, 0.5, 1.0], [0.2, 1.0, -1.0, 3.0], xi)
    g = SpectralGrid(10, -1.0, 1.0)
    jumps = SpatialJumps(xi, J)
    for n in (1, 2):
        d = disc_derivative(f(g.nodes), g, jumps, n)
        np.testing.assert_allclose(d, f(g.nodes, n), rtol=1e-10, atol=1e-10 * np.abs(f(g.nodes, n)).max())


def test_bad_order():
    g = SpectralGrid(6)
    with pytest.raises(ValueError):
        disc_derivative(np.zeros(7), g, None, 3)


@pytest.mark.parametrize("N", [16, 32])
def test_sign_cosine_convergence(N):
    # f = sign(x - xi) cos x has jumps J_m = 2 cos^(m)(xi)
    xi = 0.2
    M = 8
    J = np.array([2 * np.cos(xi + m * np.pi / 2) for m in range(M + 1)])
    g = SpectralGrid(N)
    x = g.nodes
    f = np.sign(x - xi) * np.cos(x)
    err = np.abs(disc_derivative(f, g, SpatialJumps(xi, J), 1) + np.sign(x - xi) * np.sin(x)).max()
    assert err < 1e-6


def test_sign_cosine_error_decreases_with_N():
    xi = 0.2
    M = 8
    J = np.array([2 * np.cos(xi + m * np.pi / 2) for m in range(M + 1)])
    errs = []
    for N in (8, 12, 16, 20):
        g = SpectralGrid(N)
        x = g.nodes
        f = np.sign(x - xi) * np.cos(x)
        d = disc_derivative(f, g, SpatialJumps(xi, J), 1)
        errs.append(np.abs(d + np.sign(x - xi) * np.sin(x)).max())
    assert all(b < a for a, b in zip(errs, errs[1:]))
