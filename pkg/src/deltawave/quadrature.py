"""Discontinuous trapezium (DH2) and Hermite (DH4) one-step rules.

Both rules integrate an integrand across a step ``[t1, t1 + dt]`` that
may contain one point ``t1 + dt_c`` where the integrand and its
derivatives jump by the known amounts ``K[0], K[1], ...`` (after minus
before). With all jumps zero they reduce to the classical rules.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

__all__ = [
    "TimeJumpData",
    "dh2_increment",
    "dh4_increment",
    "dh2_jump_term",
    "dh4_jump_term",
    "toy_function",
    "toy_derivative",
    "toy_jumps",
    "legendre_q3",
    "toy_integral",
    "composite",
    "quadrature_experiment",
    "TOY_INTERVAL",
]

TOY_INTERVAL = (-0.51, 0.49)


@dataclass(frozen=True)
class TimeJumpData:
    """A jump located ``dt_c`` into the step, with jumps ``K[0..]`` in f, f', ..."""

    dt_c: float
    K: tuple

    def check(self, dt: float, need: int):
        if not (0.0 < self.dt_c / dt < 1.0):
            raise ValueError(f"jump offset {self.dt_c} is not strictly inside the step {dt}")
        if len(self.K) < need:
            raise ValueError(f"need {need} jump values, got {len(self.K)}")


def dh2_jump_term(dt, dt_c, K):
    """Jump contribution of the discontinuous trapezium rule.

    ``K`` entries may be arrays; the result broadcasts.
    """
    return 0.5 * K[0] * (dt - 2.0 * dt_c) + 0.5 * K[1] * dt_c * (dt_c - dt)


def dh4_jump_term(dt, dt_c, K):
    """Jump contribution of the discontinuous Hermite rule."""
    return (
        0.5 * K[0] * (dt - 2.0 * dt_c)
        + K[1] * (dt * (dt - 6.0 * dt_c) + 6.0 * dt_c**2) / 12.0
        - K[2] * dt_c * (dt * (dt - 3.0 * dt_c) + 2.0 * dt_c**2) / 12.0
        + K[3] * dt_c**2 * (dt - dt_c) ** 2 / 24.0
    )


def dh2_increment(f1, f2, dt, jump: TimeJumpData | None = None):
    """Increment ``y2 - y1`` over one step by the discontinuous trapezium rule."""
    inc = 0.5 * dt * (f1 + f2)
    if jump is not None:
        jump.check(dt, 2)
        inc = inc + dh2_jump_term(dt, jump.dt_c, jump.K)
    return inc


def dh4_increment(f1, f2, df1, df2, dt, jump: TimeJumpData | None = None):
    """Increment over one step by the discontinuous two-point Hermite rule."""
    inc = 0.5 * dt * (f1 + f2) + dt**2 / 12.0 * (df1 - df2)
    if jump is not None:
        jump.check(dt, 4)
        inc = inc + dh4_jump_term(dt, jump.dt_c, jump.K)
    return inc


# toy problem ---------------------------------------------------------------

def _p5(t):
    return t * (63.0 * t**4 - 70.0 * t**2 + 15.0) / 8.0


def _dp5(t):
    return (315.0 * t**4 - 210.0 * t**2 + 15.0) / 8.0


def legendre_q3(x):
    """Legendre function of the second kind of degree 3 on (-1, 1)."""
    x = np.asarray(x, dtype=float)
    p3 = 0.5 * x * (5.0 * x**2 - 3.0)
    return p3 * np.arctanh(x) - 2.5 * x**2 + 2.0 / 3.0


def _dq3(x):
    p3 = 0.5 * x * (5.0 * x**2 - 3.0)
    dp3 = 0.5 * (15.0 * x**2 - 3.0)
    return dp3 * np.arctanh(x) + p3 / (1.0 - x**2) - 5.0 * x


def _check_toy_domain(t):
    if np.any(np.abs(t) >= 1.0):
        raise ValueError("toy function is only defined on (-1, 1)")


def toy_function(t):
    """``P5(t)`` for ``t > 0`` and ``Q3(t)`` for ``t < 0`` (mean at zero)."""
    t = np.asarray(t, dtype=float)
    _check_toy_domain(t)
    with np.errstate(invalid="ignore"):
        return np.where(t > 0, _p5(t), np.where(t < 0, legendre_q3(t), 0.5 * (_p5(t) + legendre_q3(t))))


def toy_derivative(t):
    t = np.asarray(t, dtype=float)
    _check_toy_domain(t)
    return np.where(t > 0, _dp5(t), np.where(t < 0, _dq3(t), 0.5 * (_dp5(t) + _dq3(t))))


def toy_jumps():
    """Jumps of the toy function and its first three derivatives at t = 0."""
    # P5 side minus Q3 side
    return (-2.0 / 3.0, 15.0 / 8.0, 8.0, -105.0 / 2.0)


@lru_cache(maxsize=None)
def toy_integral(a: float = TOY_INTERVAL[0], b: float = TOY_INTERVAL[1], dps: int = 30) -> float:
    """High-precision integral of the toy function over ``[a, b]`` (a < 0 < b)."""
    with mpmath.workdps(dps):
        p5 = lambda t: t * (63 * t**4 - 70 * t**2 + 15) / 8
        q3 = lambda x: x * (5 * x**2 - 3) / 2 * mpmath.atanh(x) - mpmath.mpf(5) / 2 * x**2 + mpmath.mpf(2) / 3
        val = mpmath.quad(q3, [mpmath.mpf(a), 0]) + mpmath.quad(p5, [0, mpmath.mpf(b)])
        return float(val)


def composite(dt: float, rule: str, use_jumps: bool = True,
              interval=TOY_INTERVAL, func=toy_function, dfunc=toy_derivative,
              t_c: float = 0.0, K=None) -> float:
    """Composite DH2/DH4 integral of ``func`` over ``interval``.

    The integrand jumps at ``t_c`` by ``K``. With ``use_jumps=False`` the
    jump terms are dropped (the classical rules).
    """
    a, b = interval
    n = int(round((b - a) / dt))
    if n < 1 or abs(n * dt - (b - a)) > 1e-9 * (b - a):
        raise ValueError(f"step {dt} does not divide the interval")
    if K is None:
        K = toy_jumps()
    t = a + (b - a) * np.arange(n + 1) / n
    h = (b - a) / n
    f = func(t)
    df = dfunc(t) if rule == "dh4" else None
    if rule == "dh2":
        total = dh2_increment(f[:-1], f[1:], h).sum()
    elif rule == "dh4":
        total = dh4_increment(f[:-1], f[1:], df[:-1], df[1:], h).sum()
    else:
        raise ValueError(f"unknown rule {rule!r}")
    if use_jumps:
        k = np.searchsorted(t, t_c) - 1
        if 0 <= k < n:
            dt_c = t_c - t[k]
            if dt_c <= 0.0 or dt_c >= h:
                raise ValueError("jump location coincides with a grid point")
            term = dh2_jump_term if rule == "dh2" else dh4_jump_term
            total += term(h, dt_c, K)
    return float(total)


def quadrature_experiment(dt_list=(1 / 20, 1 / 40, 1 / 80, 1 / 160, 1 / 320)):
    """Errors of the four composite rules on the toy integral.

    Returns an array with columns
    ``dt, err_dh2_smooth, err_dh2, err_dh4_smooth, err_dh4``.
    """
    exact = toy_integral()
    rows = []
    for dt in dt_list:
        rows.append([
            dt,
            abs(composite(dt, "dh2", False) - exact),
            abs(composite(dt, "dh2", True) - exact),
            abs(composite(dt, "dh4", False) - exact),
            abs(composite(dt, "dh4", True) - exact),
        ])
    return np.array(rows)
