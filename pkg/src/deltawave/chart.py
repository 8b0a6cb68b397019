"""Minimal-gauge hyperboloidal chart on 1+1 Minkowski space.

Coordinates ``(tau, sigma)`` with ``sigma`` in ``[0, 1]`` are related to
Minkowski ``(t, x)`` by ``x = g(sigma)`` and ``t = tau - h(sigma)``.
Future null infinity on the right (``x -> +inf``) sits at ``sigma = 0``
and on the left at ``sigma = 1``.

Every scalar map below uses only arithmetic plus ``log``, so it accepts
floats, arrays and :class:`~deltawave.jets.Jet` arguments alike.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .jets import Jet

__all__ = [
    "compactification_g",
    "dg",
    "d2g",
    "height_h",
    "dh",
    "d2h",
    "CoefficientSet",
    "coefficient_set",
    "coefficients",
    "characteristic_speeds",
    "ParticleMotion",
    "worldline",
    "initial_sigma",
    "CONVENTIONS",
]

CONVENTIONS = ("derived", "printed")


def _log(s):
    return s.log() if isinstance(s, Jet) else np.log(s)


def _check_open_unit(s):
    if isinstance(s, Jet):
        s = s.value
    s = np.asarray(s)
    if np.any(s <= 0.0) or np.any(s >= 1.0):
        raise ValueError("sigma must lie in the open interval (0, 1)")


def compactification_g(s):
    """x = g(sigma) = (1/sigma + log(1 - sigma) - log(sigma)) / 2."""
    _check_open_unit(s)
    return 0.5 * (1.0 / s + _log(1.0 - s) - _log(s))


def dg(s):
    return 1.0 / (2.0 * s * s * (s - 1.0))


def d2g(s):
    return (2.0 - 3.0 * s) / (2.0 * s**3 * (s - 1.0) ** 2)


def height_h(s):
    """Minimal-gauge height ``h = g - 1/sigma + log(sigma)``."""
    _check_open_unit(s)
    return 0.5 * (-1.0 / s + _log(1.0 - s) + _log(s))


def dh(s):
    return (2.0 * s * s - 1.0) / (2.0 * s * s * (s - 1.0))


def d2h(s):
    return -(2.0 * s**3 - 3.0 * s + 2.0) / (2.0 * s**3 * (s - 1.0) ** 2)


# PDE coefficients ------------------------------------------------------------

# -(d_t^2) + d_x^2 in (tau, sigma), before normalisation
_RAW = {
    "Z": Polynomial([0, 0, -4, 0, 4]),            # -4 s^2 (1 - s^2)
    "A": Polynomial([0, 0, 4, -4, -8, 8]),        # 4 s^2 (1 - s)(1 - 2 s^2)
    "B": Polynomial([0, 0, 0, -8, 8]),            # -8 s^3 (1 - s)
    "C": Polynomial([0, 0, 0, 0, 4, -8, 4]),      # 4 s^4 (1 - s)^2
    "E": Polynomial([0, 0, 0, 8, -20, 12]),       # 4 s^3 (1 - s)(2 - 3 s)
}
_NORM = Polynomial([0, 0, -4, 4])                 # -4 s^2 (1 - s)

_PRINTED = {
    "Z": Polynomial([1, 1]),
    "A": Polynomial([1, 0, -2]),
    "B": Polynomial([0, -2]),
    "C": Polynomial([1, -1]),
    "E": Polynomial([0, 2, -3]),
}


def _derived():
    out = {}
    for name, p in _RAW.items():
        q, r = divmod(p, _NORM)
        assert np.allclose(r.coef, 0.0)
        out[name] = Polynomial(np.trim_zeros(q.coef, "b") if np.any(q.coef) else [0.0])
    return out


@dataclass(frozen=True)
class CoefficientSet:
    """Polynomial coefficients ``Z, A, B, C, E`` of the normalised wave operator.

    The operator is ``Z u_tt + A u_ts + B u_t + C u_ss + E u_s`` and the
    normalisation polynomial ``R`` satisfies ``R * operator = -u_tt + u_xx``.
    """

    convention: str
    polys: dict
    R: Polynomial

    NAMES = ("Z", "A", "B", "C", "E")

    def __call__(self, s):
        return tuple(self.polys[k](s) for k in self.NAMES)

    def poly(self, name: str, k: int = 0) -> Polynomial:
        p = self.polys[name]
        return p.deriv(k) if k else p

    def derivs(self, name: str, s, kmax: int) -> np.ndarray:
        """``[p(s), p'(s), ..., p^(kmax)(s)]`` for coefficient ``name``."""
        return np.array([self.poly(name, k)(s) for k in range(kmax + 1)])

    def jet(self, name: str, k: int, s: Jet) -> Jet:
        """k-th sigma derivative of a coefficient composed with a sigma jet."""
        from .jets import jet_polyval
        c = self.poly(name, k).coef
        return jet_polyval(list(c), s)

    def jet_R(self, s: Jet, k: int = 0) -> Jet:
        from .jets import jet_polyval
        p = self.R.deriv(k) if k else self.R
        return jet_polyval(list(p.coef), s)

    def fd_check(self, probes=(0.1, 0.3, 0.5, 0.7, 0.9), h=1e-5, kmax=3, rtol=1e-6) -> float:
        """Worst relative mismatch of analytic vs central-difference derivatives."""
        worst = 0.0
        for name in self.NAMES:
            for k in range(1, kmax + 1):
                p, dp = self.poly(name, k - 1), self.poly(name, k)
                for s in probes:
                    fd = (p(s + h) - p(s - h)) / (2 * h)
                    scale = max(1.0, abs(dp(s)))
                    worst = max(worst, abs(fd - dp(s)) / scale)
        if worst > rtol:
            raise ArithmeticError(f"coefficient derivative check failed ({worst:.2e})")
        return worst


def coefficient_set(convention: str = "derived") -> CoefficientSet:
    """Coefficient polynomials for the requested sign convention.

    ``"derived"`` divides the transformed flat wave operator by
    ``-4 s^2 (1 - s)``. ``"printed"`` is an alternative coefficient table
    kept for comparison; it does not represent the flat wave operator.
    """
    if convention == "derived":
        return CoefficientSet("derived", _derived(), _NORM)
    if convention == "printed":
        return CoefficientSet("printed", dict(_PRINTED), _NORM)
    raise ValueError(f"unknown coefficient convention {convention!r}")


def coefficients(s, convention: str = "derived"):
    """``(Z, A, B, C, E)`` evaluated at ``s``."""
    return coefficient_set(convention)(s)


def characteristic_speeds(s, convention: str = "derived"):
    """Roots ``(v_plus, v_minus)`` of ``Z l^2 - A l + C = 0``, larger first."""
    Z, A, B, C, E = coefficients(s, convention)
    disc = np.asarray(A * A - 4.0 * Z * C, dtype=float)
    if np.any(disc < 0):
        raise ValueError("coefficients are not hyperbolic at this sigma")
    r = np.sqrt(disc)
    return (A + r) / (2.0 * Z), (A - r) / (2.0 * Z)


# worldline -----------------------------------------------------------------

def initial_sigma(xtol: float = 1e-15) -> float:
    """Root of ``g(sigma) = 0``, i.e. the chart position of ``x = 0``."""
    return brentq(compactification_g, 0.5, 1.0 - 1e-12, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)


@dataclass(frozen=True)
class ParticleMotion:
    """Constant-velocity worldline ``x = v t`` expressed in the chart.

    Parameters
    ----------
    v : float
        Minkowski velocity, ``|v| < 1``.
    tau_end : float
        Last time the trajectory is needed (the dense ODE solution covers
        ``[tau0, tau_end]``).
    """

    v: float
    tau_end: float = 4.3

    def __post_init__(self):
        if not abs(self.v) < 1.0:
            raise ValueError(f"need |v| < 1, got {self.v}")

    # closed forms ---------------------------------------------------------
    @cached_property
    def sigma_star(self) -> float:
        return initial_sigma()

    @cached_property
    def tau0(self) -> float:
        """Chart time at which the particle passes ``t = 0`` (``x = 0``)."""
        return float(height_h(self.sigma_star))

    def rate(self, z):
        """Right-hand side of ``dzeta/dtau`` as a function of ``zeta``."""
        v = self.v
        return 2.0 * v * z * z * (z - 1.0) / (1.0 - v + 2.0 * v * z * z)

    def delta_factor(self, z):
        """``d(x - v t)/dsigma`` at ``sigma = z`` (negative for |v| < 1)."""
        v = self.v
        return (1.0 + v * (2.0 * z * z - 1.0)) / (2.0 * z * z * (z - 1.0))

    def delta_factor_prime(self, z):
        return d2g(z) + self.v * d2h(z)

    def t_on_worldline(self, z):
        """Minkowski time at the particle, ``g(zeta) / v``."""
        if self.v == 0:
            raise ZeroDivisionError("t on the worldline is undefined for a static particle")
        if isinstance(z, Jet):
            return compactification_g(z) / self.v
        z = np.asarray(z, dtype=float)
        return (1.0 + 2.0 * z * np.arctanh(1.0 - 2.0 * z)) / (2.0 * self.v * z)

    def identity_residual(self, tau, z):
        """``g(zeta) - v (tau - h(zeta))``; zero on the worldline."""
        return compactification_g(z) - self.v * (tau - height_h(z))

    def crossing_time(self, s, within_window: bool = False):
        """Time at which the particle sits at ``sigma = s``.

        Returns None for a static particle, and also when ``within_window``
        is set and the time falls outside ``[tau0, tau_end]``.
        """
        if self.v == 0:
            return None
        tc = compactification_g(s) / self.v + height_h(s)
        if within_window and not (self.tau0 <= tc <= self.tau_end):
            return None
        return tc

    # trajectory -----------------------------------------------------------
    @cached_property
    def _dense(self):
        if self.v == 0:
            return None
        t1 = max(self.tau_end, self.tau0 + 1e-3)
        sol = solve_ivp(lambda t, y: self.rate(y), (self.tau0, t1), [self.sigma_star],
                        method="DOP853", rtol=1e-13, atol=1e-15, dense_output=True)
        if not sol.success:
            raise ArithmeticError(f"worldline integration failed: {sol.message}")
        return sol.sol

    def zeta_ode(self, tau):
        """Worldline from the integrated equation of motion (no polishing)."""
        if self.v == 0:
            return np.full_like(np.asarray(tau, dtype=float), self.sigma_star)
        return self._dense(tau)[0] if np.ndim(tau) else float(self._dense(tau)[0])

    def zeta(self, tau):
        """Worldline position, Newton-polished on the closed-form identity."""
        if self.v == 0:
            return np.full_like(np.asarray(tau, dtype=float), self.sigma_star) if np.ndim(tau) else self.sigma_star
        tau = np.asarray(tau, dtype=float)
        if np.any(tau < self.tau0 - 1e-12) or np.any(tau > max(self.tau_end, self.tau0) + 1e-12):
            z = np.vectorize(self._bracketed)(tau)
        else:
            z = np.atleast_1d(self.zeta_ode(np.atleast_1d(tau)))
            for _ in range(3):
                z = z - self.identity_residual(np.atleast_1d(tau), z) / self.delta_factor(z)
            z = z.reshape(tau.shape)
        return float(z) if z.ndim == 0 else z

    def _bracketed(self, tau):
        f = lambda z: self.identity_residual(tau, z)
        return brentq(f, 1e-15, 1.0 - 1e-15, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=500)

    def zeta_jet(self, tau: float, order: int) -> Jet:
        """Taylor jet of the worldline at ``tau`` from the equation of motion."""
        z0 = self.zeta(tau)
        v = self.v
        a = np.zeros(order + 1)
        a[0] = z0
        s = np.zeros(order + 1)   # coefficients of zeta^2
        c = np.zeros(order + 1)   # coefficients of zeta^3
        for k in range(order):
            s[k] = np.dot(a[: k + 1], a[k::-1])
            c[k] = np.dot(s[: k + 1], a[k::-1])
            # (1 - v + 2 v zeta^2) zeta' = 2 v (zeta^3 - zeta^2), order k
            acc = 2.0 * v * (c[k] - s[k])
            for j in range(1, k + 1):
                acc -= 2.0 * v * s[j] * (k - j + 1) * a[k - j + 1]
            a[k + 1] = acc / ((k + 1) * (1.0 - v + 2.0 * v * s[0]))
        return Jet(a)

    def as_dict(self) -> dict:
        return {"v": self.v, "tau0": self.tau0, "sigma_star": self.sigma_star}


def worldline(v: float, tau_end: float = 4.3) -> ParticleMotion:
    if not abs(v) < 1.0:
        raise ValueError(f"need |v| < 1, got {v}")
    return ParticleMotion(float(v), float(tau_end))
