"""Jumps of the field across a moving delta-source in a general 1+1 chart.

For the equation

    Z u_tt + A u_ts + B u_t + C u_ss + E u_s = F delta'(s - zeta) + G delta(s - zeta)

with polynomial coefficients in ``s`` and a worldline ``s = zeta(tau)``,
the jumps ``J_n(tau)`` of ``d^n u / ds^n`` across the worldline follow
from matching distributions: ``J_0`` and ``J_1`` in closed form, the
rest by a recursion. All time dependence is carried by
:class:`~deltawave.jets.Jet` objects, so the time derivatives the
recursion consumes are exact.

Jumps are always "right minus left" in ``s`` (``s > zeta`` minus
``s < zeta``). Time jumps ``K_m`` at a fixed node are "after minus
before" and their sign depends on the direction the worldline sweeps
past the node.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial
from typing import Callable, Sequence

import numpy as np

from .chart import CoefficientSet, ParticleMotion, dh, height_h
from .jets import Jet

__all__ = [
    "SourceSpec",
    "lorentz_gamma_sq",
    "jump_J0",
    "jump_J1",
    "jump_recursion",
    "jump_series",
    "pi_sigma_jumps",
    "time_jumps",
    "delta_selection",
    "delta_composition",
    "delta_prime_composition",
    "chart_sources",
    "transform_sources",
    "JumpState",
    "jump_state",
]


@dataclass(frozen=True)
class SourceSpec:
    """Minkowski source profiles ``F(t)``, ``G(t)`` acting on Jets.

    ``F`` multiplies ``delta'(x - v t)`` and ``G`` multiplies ``delta(x - v t)``.
    ``None`` means identically zero.
    """

    F: Callable[[Jet], Jet] | None = None
    G: Callable[[Jet], Jet] | None = None
    label: str = ""

    def eval(self, which: str, t: Jet) -> Jet:
        fn = self.F if which == "F" else self.G
        if fn is None:
            return Jet(np.zeros_like(t.c))
        return fn(t)


# delta-function algebra ---------------------------------------------------------

def delta_selection(f_derivs: Sequence[float]):
    """Reduce ``f(s) delta'(s - s0)`` to constant coefficients.

    Parameters
    ----------
    f_derivs : (f(s0), f'(s0))

    Returns
    -------
    (coefficient of delta, coefficient of delta')
    """
    f0, f1 = f_derivs[0], f_derivs[1]
    return -f1, f0


def delta_composition(df0: float) -> float:
    """``delta(f(s)) = c * delta(s - s0)``; returns ``c`` for ``f'(s0) = df0``."""
    if df0 == 0:
        raise ZeroDivisionError("degenerate delta composition: f'(s0) = 0")
    return 1.0 / abs(df0)


def delta_prime_composition(df0: float, d2f0: float):
    """``delta'(f(s)) = a delta'(s - s0) + b delta(s - s0)``; returns ``(b, a)``."""
    if df0 == 0:
        raise ZeroDivisionError("degenerate delta composition: f'(s0) = 0")
    a3 = abs(df0) ** 3
    return d2f0 / a3, df0 / a3


# chart sources ----------------------------------------------------------------

def chart_sources(source: SourceSpec, motion: ParticleMotion, coeffs: CoefficientSet,
                  zeta: Jet, tau: float):
    """Normalised delta and delta' weights in the chart, as tau-jets.

    Returns ``(F_eff, G_eff)`` such that the chart equation, divided by the
    normalisation polynomial, has right-hand side
    ``F_eff delta'(s - zeta) + G_eff delta(s - zeta)``. The result has one
    order less than ``zeta``.
    """
    Delta = motion.delta_factor(zeta)            # negative on (0, 1)
    Delta_p = motion.delta_factor_prime(zeta)
    t = Jet.variable(tau, zeta.order) - height_h(zeta)
    F = source.eval("F", t)
    G = source.eval("G", t)
    # F'(t) along the worldline from the chain rule
    Fp = F.differentiate() / t.differentiate()
    absD = -Delta
    absD3 = absD * absD * absD
    dt_ds = -dh(zeta)
    F_s = Delta * F / absD3
    G_s = Delta_p * F / absD3 - Delta * Fp * dt_ds / absD3 + G / absD
    R = coeffs.jet_R(zeta, 0)
    Rp = coeffs.jet_R(zeta, 1)
    F_eff = F_s / R
    G_eff = G_s / R + F_s * Rp / (R * R)
    return F_eff.truncate(Fp.order), G_eff


def lorentz_gamma_sq(Z: Jet, A: Jet, C: Jet, zd: Jet) -> Jet:
    """``1 / (Z zeta'^2 - A zeta' + C)`` as a jet."""
    den = Z * zd * zd - A * zd + C
    if np.any(np.abs(den.value) < 1e-300):
        raise ZeroDivisionError("worldline is null in this chart (singular Lorentz factor)")
    return den.reciprocal()


def jump_J0(F: Jet, gamma_sq: Jet) -> Jet:
    return gamma_sq * F


def jump_J1(G: Jet, dF_ds: Jet | None, cj: dict, zd: Jet, zdd: Jet, J0: Jet, gamma_sq: Jet) -> Jet:
    """First-derivative jump.

    ``cj[name][k]`` is the k-th s-derivative of coefficient ``name`` along
    the worldline, as a jet.
    """
    if J0.order < 1:
        raise ValueError("J0 jet must have order >= 1")
    Z, A, B, C, E = (cj[k][0] for k in "ZABCE")
    Zp, Ap, Cp = cj["Z"][1], cj["A"][1], cj["C"][1]
    J0d = J0.differentiate()
    bracket = (G + J0d * (2.0 * Z * zd - A)
               + J0 * (Zp * zd * zd - Ap * zd + Cp + Z * zdd + B * zd - E))
    if dF_ds is not None:
        bracket = bracket - dF_ds
    return gamma_sq * bracket


def jump_recursion(J: list, cj: dict, zd: Jet, zdd: Jet, gamma_sq: Jet) -> Jet:
    """Next jump ``J_{n+2}`` from ``J_0 .. J_{n+1}`` (``n = len(J) - 2``)."""
    n = len(J) - 2
    if n < 0:
        raise ValueError("need at least J0 and J1")
    total = None
    for l in range(n + 1):
        b = comb(n, l)
        Al, Bl, El, Zl = cj["A"][l], cj["B"][l], cj["E"][l], cj["Z"][l]
        Jn1 = J[n + 1 - l]
        Jn = J[n - l]
        if Jn.order < 2 or Jn1.order < 1:
            raise ValueError("jet order exhausted in jump recursion")
        Jn1d = Jn1.differentiate()
        Jnd = Jn.differentiate()
        Jndd = Jnd.differentiate()
        term = (Al * Jn1d + Bl * (Jnd - zd * Jn1) + El * Jn1
                + Zl * (Jndd - 2.0 * Jn1d * zd - Jn1 * zdd))
        term = term * float(b)
        total = term if total is None else total + term
    for l in range(1, n + 1):
        Cl, Zl, Al = cj["C"][l], cj["Z"][l], cj["A"][l]
        term = J[n + 2 - l] * (Cl + Zl * zd * zd - Al * zd) * float(comb(n, l))
        total = total + term
    return -(gamma_sq * total)


def _coefficient_jets(coeffs: CoefficientSet, zeta: Jet, kmax: int) -> dict:
    out = {}
    for name in "ZABCE":
        out[name] = [coeffs.jet(name, k, zeta) for k in range(kmax + 1)]
    return out


def jump_series(coeffs: CoefficientSet, zeta: Jet, F: Jet, G: Jet, M: int) -> list:
    """Jumps ``J_0 .. J_M`` as jets for sigma-independent source weights.

    The jet order of ``J_n`` is ``min(order(F) - 1, order(G), order(zeta) - 2) - n + 1``
    for ``n >= 2``; callers seed the inputs with enough order.
    """
    if M < 0:
        return []
    zd = zeta.differentiate()
    zdd = zd.differentiate()
    cj = _coefficient_jets(coeffs, zeta, max(M, 1))
    Z, A, C = cj["Z"][0], cj["A"][0], cj["C"][0]
    g2 = lorentz_gamma_sq(Z, A, C, zd)
    J = [jump_J0(F, g2)]
    if M == 0:
        return J
    J.append(jump_J1(G, None, cj, zd, zdd, J[0], g2))
    for n in range(0, M - 1):
        J.append(jump_recursion(J, cj, zd, zdd, g2))
    return J


def pi_sigma_jumps(J: list, zeta: Jet) -> list:
    """Jumps of ``d^n/ds^n`` of the regular part of ``u_tau``: ``J_n' - zeta' J_{n+1}``."""
    zd = zeta.differentiate()
    return [J[n].differentiate() - zd * J[n + 1] for n in range(len(J) - 1)]


def time_jumps(J: list, zeta: Jet, node: float, mmax: int) -> np.ndarray:
    """Jumps ``K_0 .. K_mmax`` of ``d^m u / dtau^m`` at a node the worldline crosses.

    ``J`` and ``zeta`` must be expanded about the crossing time, where
    ``zeta(tau_c) = node``. The sign is "after minus before": when the
    worldline moves towards larger ``s`` the node passes from the right
    side to the left side, so ``K_0 = -J_0``; the opposite motion gives
    ``K_0 = +J_0``.
    """
    p = mmax
    eps = Jet(-zeta.truncate(p).c)   # node - zeta(tau), zero at the crossing
    eps.c[0] = node - zeta.c[0]
    P = Jet(np.zeros(p + 1))
    power = Jet.constant(1.0, p)
    for n in range(min(p, len(J) - 1) + 1):
        if J[n].order < p - n:
            raise ValueError(f"jet order of J_{n} too low for K_{p}")
        Jn = Jet(np.concatenate([J[n].c[: p - n + 1], np.zeros(n)]))
        P = P + Jn * power / float(factorial(n))
        power = power * eps
    direction = np.sign(zeta.c[1])
    return -direction * P.derivatives()


def transform_sources(F_eff: Jet, G_eff: Jet, coeffs: CoefficientSet, zeta: Jet):
    """Weights of the first-order reduction ``u_tau - Pi = Ft delta``.

    Returns ``(Ft, Gt)`` with ``Ft = F_eff / (A - zeta' Z)`` chosen to cancel
    the delta' term, and ``Gt`` the delta weight left in the Pi equation.
    """
    zd = zeta.differentiate()
    Z, A, B = (coeffs.jet(k, 0, zeta) for k in "ZAB")
    Zp, Ap = coeffs.jet("Z", 1, zeta), coeffs.jet("A", 1, zeta)
    den = A - zd * Z
    if np.any(np.abs(den.value) < 1e-300):
        raise ZeroDivisionError("singular source transform: A - zeta' Z = 0")
    Ft = F_eff / den
    Gt = G_eff - Z * Ft.differentiate() + (Ap - zd * Zp) * Ft - B * Ft
    return Ft, Gt


# bundled evaluation ------------------------------------------------------------

KMAX = 5


@dataclass
class JumpState:
    """Jump data needed by the solver at one time ``tau``.

    ``J`` holds ``J_0 .. J_nmax`` with ``nmax = max(M, KMAX)`` and ``W`` the
    matching Pi jumps ``W_0 .. W_{nmax-1}``; every jet keeps at least two
    spare tau orders.
    """

    tau: float
    M: int
    zeta: Jet
    J: list
    W: list

    @property
    def zeta0(self) -> float:
        return float(self.zeta.value)

    @property
    def zeta_dot(self) -> float:
        return float(self.zeta.c[1])

    def psi_jumps(self, k: int = 0) -> np.ndarray:
        """k-th tau derivative of ``J_0 .. J_M``."""
        return np.array([float(j.deriv(k)) for j in self.J[: self.M + 1]])

    def pi_jumps(self, k: int = 0) -> np.ndarray:
        """k-th tau derivative of ``W_0 .. W_{M-1}``."""
        return np.array([float(w.deriv(k)) for w in self.W[: max(self.M, 0)]])


def jump_state(tau: float, source: SourceSpec, motion: ParticleMotion,
               coeffs: CoefficientSet, M: int) -> JumpState:
    """Evaluate the worldline, jumps and Pi jumps at ``tau``."""
    nmax = max(M, KMAX)
    q = nmax + 2
    zeta = motion.zeta_jet(tau, q + 3)
    F_eff, G_eff = chart_sources(source, motion, coeffs, zeta, tau)
    J = jump_series(coeffs, zeta, F_eff.truncate(q + 1), G_eff.truncate(q), nmax)
    W = pi_sigma_jumps(J, zeta)
    return JumpState(tau, M, zeta, J, W)
