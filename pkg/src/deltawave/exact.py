"""Closed-form solutions for a uniformly moving scalar charge.

Two solutions of ``-u_tt + u_xx = F(t) delta'(x - v t) + G(t) delta(x - v t)``
are provided:

* Solution I: ``F = 0``, ``G = cos t``.
* Solution II: ``F = cos t``, ``G = 0``.

Each is available in Minkowski coordinates and in the hyperboloidal
chart, where the two sides of the worldline are analytic "branches". The
module also carries a transcription of tabulated closed-form jumps
``J_0 .. J_6`` and a high-precision oracle (mpmath) for the exact jumps,
used to validate both the tables and the jump recursion.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import mpmath
import numpy as np

from .chart import ParticleMotion, worldline
from .jets import Jet
from .jumps import SourceSpec

__all__ = [
    "ExactSolution",
    "tabulated_jump",
    "tabulated_time_jumps",
    "exact_jumps",
    "exact_time_jumps",
    "validate_table",
    "pde_residual",
    "free_pulse",
]


def _cos(t: Jet) -> Jet:
    return t.cos()


@dataclass(frozen=True)
class ExactSolution:
    """Solution ``which`` ("I" or "II") for a charge moving at speed ``v``."""

    which: str
    v: float
    tau_end: float = 4.3

    def __post_init__(self):
        if self.which not in ("I", "II"):
            raise ValueError(f"unknown solution {self.which!r}")
        if not abs(self.v) < 1.0:
            raise ValueError("need |v| < 1")

    @cached_property
    def motion(self) -> ParticleMotion:
        return worldline(self.v, self.tau_end)

    @property
    def source(self) -> SourceSpec:
        if self.which == "I":
            return SourceSpec(F=None, G=_cos, label="I")
        return SourceSpec(F=_cos, G=None, label="II")

    @property
    def gamma_sq(self) -> float:
        return 1.0 / (1.0 - self.v**2)

    # Minkowski ----------------------------------------------------------------
    def minkowski(self, t, x):
        """Field at Minkowski ``(t, x)``; the mean of both sides on the worldline."""
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        g2, v = self.gamma_sq, self.v
        phase = g2 * (t - v * x - np.abs(x - v * t))
        if self.which == "I":
            return -0.5 * np.sin(phase)
        return 0.5 * g2 * (v + np.sign(x - v * t)) * np.cos(phase)

    # hyperboloidal branches ------------------------------------------------------
    def _phases(self, tau, s, lib=np):
        v = self.v
        right = (tau + 1.0 / s - lib.log(s)) / (1.0 + v)      # s > zeta (x < v t)
        left = (tau - lib.log(1.0 - s)) / (1.0 - v)           # s < zeta (x > v t)
        return right, left

    def branch(self, side: str, tau, s, lib=np):
        """Analytic continuation of the field from one side of the worldline.

        ``side`` is ``"right"`` (``s > zeta``) or ``"left"`` (``s < zeta``).
        ``lib`` may be ``numpy`` or ``mpmath``.
        """
        pr, pl = self._phases(tau, s, lib)
        v = self.v
        if self.which == "I":
            return -0.5 * lib.sin(pr if side == "right" else pl)
        if side == "right":
            return -lib.cos(pr) / (2.0 * (1.0 + v))
        return lib.cos(pl) / (2.0 * (1.0 - v))

    def branch_tau(self, side: str, tau, s, lib=np):
        """Time derivative of :meth:`branch`."""
        pr, pl = self._phases(tau, s, lib)
        v = self.v
        if self.which == "I":
            if side == "right":
                return -0.5 * lib.cos(pr) / (1.0 + v)
            return -0.5 * lib.cos(pl) / (1.0 - v)
        if side == "right":
            return lib.sin(pr) / (2.0 * (1.0 + v) ** 2)
        return -lib.sin(pl) / (2.0 * (1.0 - v) ** 2)

    def psi(self, tau: float, s, side: str | None = None):
        """Field on the chart at time ``tau`` and positions ``s`` in [0, 1].

        The left branch is regular at ``s = 0`` and the right branch at
        ``s = 1``, so the closed interval is allowed.
        """
        return self._sided(self.branch, tau, s, side)

    def psi_tau(self, tau: float, s, side: str | None = None):
        """Regular part of the time derivative (the variable Pi off the worldline)."""
        return self._sided(self.branch_tau, tau, s, side)

    def _sided(self, fn, tau, s, side):
        s = np.asarray(s, dtype=float)
        if np.any(s < 0) or np.any(s > 1):
            raise ValueError("sigma must lie in [0, 1]")
        if side is not None:
            return fn(side, tau, s)
        z = self.motion.zeta(tau)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = fn("right", tau, np.where(s > 0, s, 0.5))
            l = fn("left", tau, np.where(s < 1, s, 0.5))
        return np.where(s > z, r, np.where(s < z, l, 0.5 * (r + l)))


# tabulated jumps ---------------------------------------------------------------

def _table_I(n, z, c, s, v):
    w = v * (v + 2)
    if n == 0:
        return 0.0 * z
    if n == 1:
        return -(1 - v * (1 - 2 * z**2)) / (2 * (1 - v**2) * (1 - z) * z**2) * c
    if n == 2:
        return (0.5 * ((2 + z) / ((1 + v) * z**3) - 1 / ((1 - v) * (1 - z) ** 2)) * c
                - (1 - v - 2 * z**2) * (1 - v + 2 * z**2) / (2 * (1 - v**2) ** 2 * (1 - z) ** 2 * z**4) * s)
    if n == 3:
        num = (-3 * (1 - v) ** 3 * (4 * v**2 + 8 * v + 3) * z**4
               - 3 * (1 - v) ** 3 * (2 * v**2 + 4 * v + 3) * z**2
               + (-4 * v**5 + 10 * v**3 + 2 * v) * z**6
               + 16 * (1 - v) ** 3 * (1 + v) ** 2 * z**3 + (1 - v) ** 3)
        return (num / (2 * (1 - v) ** 3 * (1 + v) ** 3 * (1 - z) ** 3 * z**6) * c
                + 1.5 * ((1 + z) * (2 + z) / ((1 + v) ** 2 * z**5) + 1 / ((1 - v) ** 2 * (1 - z) ** 3)) * s)
    if n == 4:
        return (3 * (-(2 + z * (5 - w * z * (4 + z))) / ((1 + v) ** 2 * z**5)
                     + v * (2 - v) / ((1 - v) ** 3 * (1 - z) ** 4)) * c
                + 0.5 * ((-11 * (2 - v) * v + 10) / ((1 - v) ** 4 * (1 - z) ** 4)
                         + (z * (z * (-(11 * w + 10) * z * (z + 4) - 6 * (6 * w + 5)) + 4) + 1)
                         / ((1 + v) ** 4 * z**8)) * s)
    if n == 5:
        return (0.5 * (-10 * (2 - v) * v * (24 * (2 - v) * v + 13) / ((1 - v) ** 5 * (1 - z) ** 5)
                       + (z * (z * (z * (-(v * (2 + v) * (24 * w + 13) - 10) * z * (z + 5)
                                         + 260 * v * (2 + v) + 250) + 120 * v * (2 + v) + 110) - 5) - 1)
                       / ((1 + v) ** 5 * z**10)) * c
                + 5 * ((5 * (2 - v) * v - 4) / ((1 - v) ** 4 * (z - 1) ** 5)
                       + (z * (z * ((5 * w + 4) * z * (z + 5) + 3 * (8 * w + 5)) - 7) - 2)
                       / ((v + 1) ** 4 * z**9)) * s)
    if n == 6:
        return (7.5 * (((2 - v) * v * (1 - 8 * (2 - v) * v) - 6) / ((1 - v) ** 5 * (1 - z) ** 6)
                       + (z * (z * ((w * (8 * w + 1) - 6) * (z + 6) * z**2 - 14 * (11 * w + 10) * z
                                    - 80 * w - 64) + 9) + 2) / ((v + 1) ** 5 * z**11)) * c
                + 0.5 * ((190 - (2 - v) * v * (463 - 274 * v * (2 - v))) / ((1 - v) ** 6 * (1 - z) ** 6)
                         + (z * (z * (z * (z * (-(w * (274 * w + 463) + 190) * z * (z + 6)
                                                - 15 * (w * (120 * w + 169) + 50)) + 940 * w + 920)
                                      + 300 * w + 285) - 6) - 1) / ((v + 1) ** 6 * z**12)) * s)
    raise ValueError("tabulated jumps stop at n = 6")


def _table_II(n, z, c, s, v):
    w = v * (v + 2)
    if n == 0:
        return -c / (1 - v**2)
    if n == 1:
        return (2 * (1 + v**2) * z**2 - (1 - v**2)) / (2 * (1 - v**2) ** 2 * z**2 * (1 - z)) * s
    if n == 2:
        return (0.5 * ((1 + z) ** 2 / ((1 + v) ** 3 * z**4) + 1 / ((1 - v) ** 3 * (1 - z) ** 2)) * c
                + 0.5 * ((2 + z) / ((1 + v) ** 2 * z**3) + 1 / ((1 - v) ** 2 * (1 - z) ** 2)) * s)
    if n == 3:
        return (1.5 * (-(1 + z) * (2 + z) / ((1 + v) ** 3 * z**5) + 1 / ((1 - v) ** 3 * (1 - z) ** 3)) * c
                + 0.5 * ((1 - 2 * v * (2 - v)) / ((1 - v) ** 4 * (1 - z) ** 3)
                         + (z * (3 - (2 * w + 1) * z * (z + 3)) + 1) / ((v + 1) ** 4 * z**6)) * s)
    if n == 4:
        return (0.5 * ((10 - 11 * v * (2 - v)) / ((1 - v) ** 5 * (1 - z) ** 4)
                       + (z * (z * ((11 * w + 10) * z * (z + 4) + 6 * (6 * w + 5)) - 4) - 1)
                       / ((v + 1) ** 5 * z**8)) * c
                + 3 * (-v * (2 - v) / ((1 - v) ** 4 * (1 - z) ** 4)
                       + (z * (w * z * (z + 4) - 5) - 2) / ((v + 1) ** 4 * z**7)) * s)
    if n == 5:
        return (5 * (-(5 * (2 - v) * v + 4) / ((1 - v) ** 5 * (1 - z) ** 5)
                     + (z * (z * (-(5 * w + 4) * z * (z + 5) - 3 * (8 * w + 5)) + 7) + 2)
                     / ((v + 1) ** 5 * z**9)) * c
                + 0.5 * ((-10 + v * (2 - v) * (24 * v * (2 - v) * v - 13)) / ((1 - v) ** 6 * (1 - z) ** 5)
                         + (z * (z * (z * (-(w * (24 * w + 13) - 10) * z * (z + 5) + 260 * w + 250)
                                      + 120 * w + 110) - 5) - 1) / ((v + 1) ** 6 * z**10)) * s)
    if n == 6:
        return (0.5 * ((z * (z * (z * ((w * (274 * w + 463) + 190) * (z + 6) * z**2
                                       + 15 * (w * (120 * w + 169) + 50) * z - 940 * w - 920)
                                 - 15 * (20 * w + 19)) + 6) + 1) / ((v + 1) ** 7 * z**12)
                       - (v * (2 - v) * (-274 * v * (2 - v) + 463) + 190) / ((1 - v) ** 7 * (1 - z) ** 6)) * c
                + 7.5 * (((v - 2) * v * (8 * (v - 2) * v + 1) - 6) / ((1 - v) ** 6 * (1 - z) ** 6)
                         + (z * (z * ((w * (8 * w + 1) - 6) * (z + 6) * z**2 - 14 * (11 * w + 10) * z
                                      - 80 * w - 64) + 9) + 2) / ((v + 1) ** 6 * z**11)) * s)
    raise ValueError("tabulated jumps stop at n = 6")


def tabulated_jump(which: str, n: int, tau: float, v: float, motion: ParticleMotion | None = None) -> float:
    """Transcribed closed-form jump ``J_n`` evaluated on the worldline at ``tau``."""
    motion = motion or worldline(v, max(4.3, tau))
    z = motion.zeta(tau)
    t = motion.t_on_worldline(z)
    table = _table_I if which == "I" else _table_II
    return float(table(n, z, np.cos(t), np.sin(t), v))


def tabulated_time_jumps(J0, J1, J2, J3, zd) -> tuple:
    """Time jumps ``K_0 .. K_3`` from jump jets for a worldline moving to larger s.

    ``J0..J3`` and ``zd`` (the worldline velocity) are Jets at the crossing.
    """
    d = lambda j, k: float(j.deriv(k))
    z1, z2, z3 = d(zd, 0), d(zd, 1), d(zd, 2)
    K0 = -d(J0, 0)
    K1 = -(d(J0, 1) - z1 * d(J1, 0))
    K2 = -(d(J0, 2) - 2 * d(J1, 1) * z1 - d(J1, 0) * z2 + d(J2, 0) * z1**2)
    K3 = -(d(J0, 3) - 3 * d(J1, 2) * z1 - 3 * d(J1, 1) * z2 - d(J1, 0) * z3
           + 3 * d(J2, 1) * z1**2 + 3 * d(J2, 0) * z1 * z2 - d(J3, 0) * z1**3)
    return K0, K1, K2, K3


# high-precision oracle -----------------------------------------------------------

def _mp_zeta(v, tau, guess):
    """Worldline position at ``tau`` solved to working precision."""
    v = mpmath.mpf(v)
    tau = mpmath.mpf(tau)
    f = lambda z: (1 / z + mpmath.log(1 - z) - mpmath.log(z)) / 2 - v * (tau - (-1 / z + mpmath.log(1 - z) + mpmath.log(z)) / 2)
    return mpmath.findroot(f, mpmath.mpf(guess))


def exact_jumps(sol: ExactSolution, tau: float, nmax: int, dps: int = 40) -> np.ndarray:
    """Exact ``J_0 .. J_nmax`` from the closed-form branches (mpmath Taylor expansion)."""
    with mpmath.workdps(dps):
        v = mpmath.mpf(sol.v)
        z = _mp_zeta(sol.v, tau, sol.motion.zeta(tau))
        tt = mpmath.mpf(tau)
        solmp = ExactSolution(sol.which, v, sol.tau_end)
        fr = lambda s: solmp.branch("right", tt, s, lib=mpmath)
        fl = lambda s: solmp.branch("left", tt, s, lib=mpmath)
        cr = mpmath.taylor(fr, z, nmax)
        cl = mpmath.taylor(fl, z, nmax)
        return np.array([float((cr[n] - cl[n]) * mpmath.factorial(n)) for n in range(nmax + 1)])


def exact_time_jumps(sol: ExactSolution, node: float, mmax: int, dps: int = 40) -> tuple:
    """Exact after-minus-before jumps of ``d^m u/dtau^m`` at a node, and the crossing time."""
    motion = sol.motion
    with mpmath.workdps(dps):
        s = mpmath.mpf(node)
        v = mpmath.mpf(sol.v)
        g = (1 / s + mpmath.log(1 - s) - mpmath.log(s)) / 2
        h = (-1 / s + mpmath.log(1 - s) + mpmath.log(s)) / 2
        tc = g / v + h
        solmp = ExactSolution(sol.which, v, sol.tau_end)
        fr = lambda t: solmp.branch("right", t, s, lib=mpmath)
        fl = lambda t: solmp.branch("left", t, s, lib=mpmath)
        cr = mpmath.taylor(fr, tc, mmax)
        cl = mpmath.taylor(fl, tc, mmax)
        # moving to smaller s, the node goes from the left side to the right side
        direction = -1.0 if motion.rate(node) < 0 else 1.0
        diff = [(cr[m] - cl[m]) * mpmath.factorial(m) for m in range(mmax + 1)]
        K = np.array([float(d) for d in diff]) * (1.0 if direction < 0 else -1.0)
        return K, float(tc)


def validate_table(sol: ExactSolution, taus, nmax: int = 6) -> np.ndarray:
    """Relative error of each tabulated jump against the oracle.

    Returns an array of shape ``(nmax + 1, len(taus))``. Entries where the
    exact jump vanishes hold the absolute error instead.
    """
    out = np.zeros((nmax + 1, len(taus)))
    for k, tau in enumerate(taus):
        ex = exact_jumps(sol, tau, nmax)
        for n in range(nmax + 1):
            tab = tabulated_jump(sol.which, n, tau, sol.v, sol.motion)
            scale = abs(ex[n]) if abs(ex[n]) > 1e-14 else 1.0
            out[n, k] = abs(tab - ex[n]) / scale
    return out


def pde_residual(sol: ExactSolution, tau: float, s: float, coeffs=None, field=None, dps: int = 30) -> float:
    """Residual of the homogeneous chart equation for a branch at ``(tau, s)``.

    ``field(tau, s)`` defaults to the branch on the relevant side of the
    worldline; derivatives are taken by high-precision numerical
    differentiation.
    """
    from .chart import coefficient_set
    coeffs = coeffs or coefficient_set("derived")
    side = "right" if s > sol.motion.zeta(tau) else "left"
    with mpmath.workdps(dps):
        solmp = ExactSolution(sol.which, mpmath.mpf(sol.v), sol.tau_end)
        f = field or (lambda t, x: solmp.branch(side, t, x, lib=mpmath))
        t0, s0 = mpmath.mpf(tau), mpmath.mpf(s)
        d = lambda a, b: mpmath.diff(f, (t0, s0), (a, b))
        Z, A, B, C, E = (mpmath.mpf(float(c)) for c in coeffs(s))
        res = Z * d(2, 0) + A * d(1, 1) + B * d(1, 0) + C * d(0, 2) + E * d(0, 1)
        return float(res)


def free_pulse(tau: float, s, width: float = 1.0):
    """Source-free solution ``f(t - x) + f(t + x)`` with ``f(w) = exp(-(w/width)^2)``.

    In the hyperboloidal chart ``t - x = tau - log(1 - s)`` and
    ``t + x = tau + 1/s - log(s)``; each term vanishes at the end of the
    interval where its argument diverges. Returns ``(psi, psi_tau)``.
    """
    s = np.asarray(s, dtype=float)
    out = np.zeros((2,) + s.shape)
    inner_r = np.where(s < 1, s, 0.0)
    inner_l = np.where(s > 0, s, 1.0)
    args = (np.where(s < 1, tau - np.log1p(-inner_r), np.inf),
            np.where(s > 0, tau + 1.0 / inner_l - np.log(inner_l), np.inf))
    for w in args:
        fin = np.isfinite(w)
        q = np.where(fin, w / width, 0.0)
        e = np.where(fin, np.exp(-q * q), 0.0)
        out[0] += e
        out[1] += -2.0 * q / width * e
    return out[0], out[1]
