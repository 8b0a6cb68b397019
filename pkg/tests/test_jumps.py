import numpy as np
import pytest
from numpy.polynomial import Polynomial

from deltawave.chart import CoefficientSet, coefficient_set
from deltawave.exact import ExactSolution, exact_jumps, exact_time_jumps
from deltawave.jets import Jet
from deltawave.jumps import (
    SourceSpec,
    chart_sources,
    delta_composition,
    delta_prime_composition,
    delta_selection,
    jump_J1,
    jump_series,
    jump_state,
    lorentz_gamma_sq,
    pi_sigma_jumps,
    time_jumps,
    transform_sources,
)

COEFFS = coefficient_set("derived")


def constant_coeffs(Z, A, B, C, E):
    P = lambda c: Polynomial([c])
    return CoefficientSet("const", {"Z": P(Z), "A": P(A), "B": P(B), "C": P(C), "E": P(E)}, P(1.0))


def unit_relative(a, b):
    return np.abs(np.asarray(a) - b) / np.maximum(np.abs(b), 1.0)


def test_delta_algebra():
    assert delta_selection((2.0, 3.0)) == (-3.0, 2.0)
    assert delta_composition(2.0) == 0.5
    b, a = delta_prime_composition(2.0, 0.0)
    assert (a, b) == (0.25, 0.0)
    with pytest.raises(ZeroDivisionError):
        delta_composition(0.0)


def test_lorentz_factor():
    c = lambda x: Jet.constant(x, 2)
    assert lorentz_gamma_sq(c(1.0), c(0.3), c(2.0), c(0.0)).value == pytest.approx(0.5)
    v = 0.6
    assert lorentz_gamma_sq(c(-1.0), c(0.0), c(1.0), c(v)).value == pytest.approx(1 / (1 - v * v))
    with pytest.raises(ZeroDivisionError):
        lorentz_gamma_sq(c(-1.0), c(0.0), c(1.0), c(1.0))


def test_lorentz_factor_high_precision():
    import mpmath
    sol = ExactSolution("II", 0.5)
    m = sol.motion
    tau = float(mpmath.findroot(lambda t: m.zeta(float(t)) - 0.5, 0.0))
    z = m.zeta_jet(tau, 3)
    zd = z.differentiate()
    Z, A, C = (COEFFS.jet(k, 0, z) for k in "ZAC")
    g2 = lorentz_gamma_sq(Z, A, C, zd).value
    with mpmath.workdps(30):
        s = mpmath.mpf(z.value)
        v = mpmath.mpf(0.5)
        zdot = 2 * v * s**2 * (s - 1) / (1 - v + 2 * v * s**2)
        ref = 1 / ((1 + s) * zdot**2 - (2 * s**2 - 1) * zdot - s**2 * (1 - s))
    assert g2 == pytest.approx(float(ref), rel=1e-13)


def test_zero_source_gives_zero_jumps():
    z = Jet.variable(0.4, 8) * 0.1 + 0.36
    J = jump_series(COEFFS, z, Jet(np.zeros(8)), Jet(np.zeros(7)), 6)
    assert all(np.all(j.c == 0) for j in J)


def test_static_flat_J1():
    cs = constant_coeffs(-1.0, 0.0, 0.0, 1.0, 0.0)
    z = Jet.constant(0.5, 5)
    F, G = Jet.constant(0.7, 5), Jet.constant(-0.2, 4)
    J = jump_series(cs, z, F, G, 1)
    assert J[0].value == pytest.approx(0.7)
    assert J[1].value == pytest.approx(-0.2)
    # the dF/ds term enters with a minus sign
    cj = {k: [cs.jet(k, 0, z), cs.jet(k, 1, z)] for k in "ZABCE"}
    zd = z.differentiate()
    J1 = jump_J1(G, Jet.constant(0.5, 4), cj, zd, zd.differentiate(), J[0], Jet.constant(1.0, 4))
    assert J1.value == pytest.approx(-0.7)


def test_constant_coefficient_static_recursion():
    Z, A, B, C, E = 1.3, 0.4, -0.7, 2.0, 0.9
    cs = constant_coeffs(Z, A, B, C, E)
    z = Jet.constant(0.5, 12)
    J = jump_series(cs, z, Jet.constant(0.3, 12), Jet.constant(1.1, 11), 6)
    # static worldline, constant coefficients: J_{n+2} = -(E / C) J_{n+1}
    for n in range(5):
        assert J[n + 2].value == pytest.approx(-(E / C) * J[n + 1].value, rel=1e-14)


@pytest.mark.parametrize("which", ["I", "II"])
@pytest.mark.parametrize("v", [0.25, 0.5])
def test_engine_matches_exact_oracle(which, v):
    sol = ExactSolution(which, v)
    for tau in (sol.motion.tau0, 1.0, 2.5, 4.0):
        st = jump_state(tau, sol.source, sol.motion, COEFFS, 10)
        ex = exact_jumps(sol, tau, 10)
        assert unit_relative(st.psi_jumps(), ex).max() < 1e-10


def test_solution_values_of_first_jump():
    sol = ExactSolution("II", 0.5)
    st = jump_state(sol.motion.tau0, sol.source, sol.motion, COEFFS, 3)
    assert st.psi_jumps()[0] == pytest.approx(-4.0 / 3.0, rel=1e-12)
    sol = ExactSolution("I", 0.5)
    st = jump_state(1.0, sol.source, sol.motion, COEFFS, 3)
    assert st.psi_jumps()[0] == 0.0


def test_pi_jumps_against_differences():
    sol = ExactSolution("II", 0.5)
    tau, h = 1.2, 1e-3
    st = jump_state(tau, sol.source, sol.motion, COEFFS, 6)
    Jp = jump_state(tau + h, sol.source, sol.motion, COEFFS, 6).psi_jumps()
    Jm = jump_state(tau - h, sol.source, sol.motion, COEFFS, 6).psi_jumps()
    W_fd = (Jp - Jm)[:-1] / (2 * h) - st.zeta_dot * st.psi_jumps()[1:]
    assert unit_relative(W_fd, st.pi_jumps()).max() < 1e-4
    W = pi_sigma_jumps(st.J, st.zeta)
    assert W[0].value == pytest.approx(st.pi_jumps()[0])


@pytest.mark.parametrize("which", ["I", "II"])
def test_time_jumps_against_exact(which):
    sol = ExactSolution(which, 0.5)
    m = sol.motion
    for node in (0.7, 0.4, 0.2):
        K_ex, tc = exact_time_jumps(sol, node, 5)
        st = jump_state(tc, sol.source, m, COEFFS, 6)
        K = time_jumps(st.J, st.zeta, node, 5)
        assert unit_relative(K, K_ex).max() < 1e-9
        # the particle moves towards s = 0, so K_0 = +J_0
        assert K[0] == pytest.approx(st.psi_jumps()[0], abs=1e-15)


def test_static_worldline_time_jumps_vanish():
    J = [Jet.constant(c, 6) for c in (1.0, 2.0, -1.0, 0.5)]
    z = Jet.constant(0.3, 6)
    K = time_jumps(J, z, 0.3, 3)
    np.testing.assert_array_equal(K[1:], 0.0)


def test_transform_sources_without_dipole():
    sol = ExactSolution("I", 0.5)
    m = sol.motion
    tau = 1.0
    z = m.zeta_jet(tau, 6)
    F_eff, G_eff = chart_sources(sol.source, m, COEFFS, z, tau)
    Ft, Gt = transform_sources(F_eff, G_eff, COEFFS, z)
    assert np.all(Ft.c == 0)
    np.testing.assert_allclose(Gt.c[: G_eff.order], G_eff.c[: G_eff.order])
    zeta = z.value
    t = m.t_on_worldline(zeta)
    ref = np.cos(t) / abs(m.delta_factor(zeta)) / COEFFS.R(zeta)
    assert G_eff.value == pytest.approx(ref, rel=1e-13)


def test_transform_sources_identity_chart():
    # x = s, t = tau: Ft = F / (A - zeta' Z), Gt = G - Z Ft' + (A' - zeta' Z') Ft - B Ft
    cs = CoefficientSet("lin", {"Z": Polynomial([-1.0]), "A": Polynomial([0.2, 0.5]),
                                "B": Polynomial([0.3]), "C": Polynomial([1.0]),
                                "E": Polynomial([0.0])}, Polynomial([1.0]))
    z = Jet.variable(0.0, 4) * 0.3 + 0.5
    F = (Jet.variable(1.0, 4)).cos()
    G = Jet.constant(0.4, 4)
    Ft, Gt = transform_sources(F, G, cs, z)
    den = 0.2 + 0.5 * 0.5 - 0.3 * (-1.0)
    assert Ft.value == pytest.approx(np.cos(1.0) / den)
    Ftd = Ft.deriv(1)
    ref = 0.4 + Ftd + 0.5 * Ft.value - 0.3 * Ft.value
    assert Gt.value == pytest.approx(ref)
