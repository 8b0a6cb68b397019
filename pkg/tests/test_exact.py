import mpmath
import numpy as np
import pytest

from deltawave.chart import coefficient_set, compactification_g, height_h
from deltawave.exact import (
    ExactSolution,
    exact_jumps,
    free_pulse,
    pde_residual,
    tabulated_jump,
    validate_table,
)


def off_worldline_points(sol, rng, n):
    m = sol.motion
    pts = []
    while len(pts) < n:
        tau = rng.uniform(m.tau0, 4.3)
        s = rng.uniform(0.02, 0.98)
        if abs(s - m.zeta(tau)) > 1e-3:
            pts.append((tau, s))
    return pts


@pytest.mark.parametrize("which", ["I", "II"])
def test_chart_consistency(which, rng):
    sol = ExactSolution(which, 0.5)
    for tau, s in off_worldline_points(sol, rng, 50):
        t = tau - height_h(s)
        x = compactification_g(s)
        assert sol.psi(tau, s) == pytest.approx(float(sol.minkowski(t, x)), abs=1e-12)


@pytest.mark.parametrize("v", [0.25, 0.5])
def test_one_sided_limits(v):
    for which in ("I", "II"):
        sol = ExactSolution(which, v)
        for tau in (0.0, 2.0):
            z = sol.motion.zeta(tau)
            jump = sol.psi(tau, z, "right") - sol.psi(tau, z, "left")
            if which == "I":
                assert abs(jump) < 1e-12
            else:
                t = sol.motion.t_on_worldline(z)
                assert jump == pytest.approx(-np.cos(t) / (1 - v * v), rel=1e-12)


def test_closed_interval_and_domain():
    sol = ExactSolution("II", 0.5)
    vals = sol.psi(1.0, np.array([0.0, 1.0]))
    assert np.all(np.isfinite(vals))
    with pytest.raises(ValueError):
        sol.psi(1.0, 1.2)
    with pytest.raises(ValueError):
        ExactSolution("III", 0.5)


def test_tabulated_first_jumps():
    assert tabulated_jump("I", 0, 1.0, 0.5) == 0.0
    m = ExactSolution("II", 0.5).motion
    assert tabulated_jump("II", 0, m.tau0, 0.5, m) == pytest.approx(-4.0 / 3.0, rel=1e-12)


def test_tabulated_J1_of_solution_II_against_one_sided_differences():
    # one-sided Richardson differences of the field on each side of the worldline
    sol = ExactSolution("II", 0.5)
    tau = 2.0
    z = sol.motion.zeta(tau)

    def one_sided(side, h):
        sgn = 1.0 if side == "right" else -1.0
        f = lambda k: sol.branch(side, tau, z + sgn * k * h)
        d1 = sgn * (-3 * f(0) + 4 * f(1) - f(2)) / (2 * h)
        return d1

    fd = [one_sided("right", h) - one_sided("left", h) for h in (1e-3, 5e-4)]
    extrap = (4 * fd[1] - fd[0]) / 3
    assert exact_jumps(sol, tau, 1)[1] == pytest.approx(extrap, rel=1e-6)


@pytest.mark.parametrize("which", ["I", "II"])
def test_pde_residual_vanishes_off_worldline(which, rng):
    sol = ExactSolution(which, 0.5)
    for tau, s in off_worldline_points(sol, rng, 20):
        assert abs(pde_residual(sol, tau, s)) < 1e-6


def test_pde_residual_detects_corruption():
    sol = ExactSolution("II", 0.5)
    tau, s = 1.0, 0.8
    side = "right" if s > sol.motion.zeta(tau) else "left"
    with mpmath.workdps(30):
        bad = lambda t, x: sol.branch(side, t, x, lib=mpmath) + 0.01 * x * x
        assert abs(pde_residual(sol, tau, s, field=bad)) > 1e-4


def test_printed_coefficients_fail_the_residual():
    sol = ExactSolution("II", 0.5)
    assert abs(pde_residual(sol, 1.0, 0.8, coeffs=coefficient_set("printed"))) > 1e-3


def test_table_validation_shape():
    sol = ExactSolution("II", 0.5)
    err = validate_table(sol, [1.0], nmax=6)
    assert err.shape == (7, 1)
    # J_0 is transcribed correctly for both solutions
    assert err[0, 0] < 1e-12
    assert validate_table(ExactSolution("I", 0.5), [1.0], nmax=0)[0, 0] < 1e-12


def test_free_pulse_is_a_homogeneous_solution():
    s = np.array([0.0, 0.3, 0.7, 1.0])
    psi, psi_t = free_pulse(-1.5, s)
    assert np.all(np.isfinite(psi)) and np.all(np.isfinite(psi_t))
    sol = ExactSolution("II", 0.5)
    with mpmath.workdps(30):
        f = lambda w: mpmath.exp(-w * w)
        field = lambda t, x: f(t - mpmath.log(1 - x)) + f(t + 1 / x - mpmath.log(x))
        assert abs(pde_residual(sol, 0.2, 0.4, field=field)) < 1e-10
    h = 1e-6
    num = (free_pulse(0.3 + h, s)[0] - free_pulse(0.3 - h, s)[0]) / (2 * h)
    np.testing.assert_allclose(free_pulse(0.3, s)[1], num, atol=1e-8)
