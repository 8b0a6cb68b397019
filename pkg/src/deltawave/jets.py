"""Truncated Taylor series ("jet") arithmetic.

A :class:`Jet` of order ``p`` stores the normalized Taylor coefficients
``c[k] = f^(k)(t0) / k!`` for ``k = 0..p`` of a function about a base
point. Arithmetic between jets is exact up to the truncation order, so
jets carry time derivatives of the jump coefficients along the worldline
without any numerical differentiation.

Coefficient arrays may carry trailing batch dimensions (one jet per grid
node, say); every operation broadcasts over them. Binary operations
between jets of different orders truncate to the lower order.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

__all__ = ["Jet", "as_jet", "jet_polyval", "compose_taylor"]


class Jet:
    """Truncated Taylor expansion with coefficients along axis 0."""

    __slots__ = ("c",)
    __array_priority__ = 100
    __array_ufunc__ = None

    def __init__(self, coeffs):
        c = np.asarray(coeffs, dtype=float)
        if c.ndim == 0:
            c = c[None]
        self.c = c

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, value, order: int) -> "Jet":
        value = np.asarray(value, dtype=float)
        c = np.zeros((order + 1,) + value.shape)
        c[0] = value
        return cls(c)

    @classmethod
    def variable(cls, value, order: int) -> "Jet":
        """The identity map ``t -> t`` expanded about ``value``."""
        jet = cls.constant(value, order)
        if order >= 1:
            jet.c[1] = 1.0
        return jet

    @classmethod
    def from_derivatives(cls, derivs) -> "Jet":
        d = np.asarray(derivs, dtype=float)
        fact = np.array([math.factorial(k) for k in range(d.shape[0])], dtype=float)
        return cls(d / fact.reshape((-1,) + (1,) * (d.ndim - 1)))

    # accessors ----------------------------------------------------------
    @property
    def order(self) -> int:
        return self.c.shape[0] - 1

    @property
    def value(self):
        return self.c[0]

    def deriv(self, k: int):
        """The k-th derivative at the base point."""
        if k > self.order:
            raise ValueError(f"jet of order {self.order} has no derivative {k}")
        return self.c[k] * math.factorial(k)

    def derivatives(self) -> np.ndarray:
        fact = np.array([math.factorial(k) for k in range(self.order + 1)], dtype=float)
        return self.c * fact.reshape((-1,) + (1,) * (self.c.ndim - 1))

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError(f"cannot raise jet order {self.order} to {order}")
        return Jet(self.c[: order + 1])

    def differentiate(self) -> "Jet":
        """Jet of the derivative; loses one order."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        k = np.arange(1, self.order + 1, dtype=float)
        return Jet(self.c[1:] * k.reshape((-1,) + (1,) * (self.c.ndim - 1)))

    def copy(self) -> "Jet":
        return Jet(self.c.copy())

    def __repr__(self):
        return f"Jet(order={self.order}, c={self.c!r})"

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            p = min(self.order, other.order)
            return self.c[: p + 1], other.c[: p + 1]
        return self.c, None

    def __neg__(self):
        return Jet(-self.c)

    def __pos__(self):
        return self

    def __add__(self, other):
        a, b = self._coerce(other)
        if b is None:
            c = a.copy()
            c[0] = c[0] + other
            return Jet(c)
        return Jet(a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._coerce(other)
        if b is None:
            return Jet(a * np.asarray(other, dtype=float))
        return Jet(_cauchy(a, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.c / np.asarray(other, dtype=float))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)):
            raise TypeError("only integer powers are supported")
        if n < 0:
            return (self ** (-n)).reciprocal()
        result = Jet.constant(np.ones_like(self.c[0]), self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def reciprocal(self) -> "Jet":
        a = self.c
        if np.any(a[0] == 0):
            raise ZeroDivisionError("jet with zero constant term has no reciprocal")
        r = np.zeros_like(a)
        r[0] = 1.0 / a[0]
        for k in range(1, a.shape[0]):
            acc = np.zeros_like(a[0])
            for j in range(1, k + 1):
                acc = acc + a[j] * r[k - j]
            r[k] = -acc / a[0]
        return Jet(r)

    # elementary functions -----------------------------------------------
    def exp(self) -> "Jet":
        a = self.c
        e = np.zeros_like(a)
        e[0] = np.exp(a[0])
        for k in range(1, a.shape[0]):
            acc = np.zeros_like(a[0])
            for j in range(1, k + 1):
                acc = acc + j * a[j] * e[k - j]
            e[k] = acc / k
        return Jet(e)

    def log(self) -> "Jet":
        a = self.c
        out = np.zeros_like(a)
        out[0] = np.log(a[0])
        for k in range(1, a.shape[0]):
            acc = k * a[k]
            for j in range(1, k):
                acc = acc - j * out[j] * a[k - j]
            out[k] = acc / (k * a[0])
        return Jet(out)

    def sincos(self) -> tuple["Jet", "Jet"]:
        a = self.c
        s = np.zeros_like(a)
        c = np.zeros_like(a)
        s[0] = np.sin(a[0])
        c[0] = np.cos(a[0])
        for k in range(1, a.shape[0]):
            acc_s = np.zeros_like(a[0])
            acc_c = np.zeros_like(a[0])
            for j in range(1, k + 1):
                acc_s = acc_s + j * a[j] * c[k - j]
                acc_c = acc_c + j * a[j] * s[k - j]
            s[k] = acc_s / k
            c[k] = -acc_c / k
        return Jet(s), Jet(c)

    def sin(self) -> "Jet":
        return self.sincos()[0]

    def cos(self) -> "Jet":
        return self.sincos()[1]

    def atanh(self) -> "Jet":
        return ((1 + self) / (1 - self)).log() * 0.5


def _cauchy(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.ndim == 1 and b.ndim == 1:
        return np.convolve(a, b)[: a.shape[0]]
    p = a.shape[0]
    shape = np.broadcast_shapes(a.shape[1:], b.shape[1:])
    out = np.zeros((p,) + shape)
    for k in range(p):
        out[k] = np.einsum("i...,i...->...", a[: k + 1], b[k::-1])
    return out


def as_jet(x, order: int) -> Jet:
    if isinstance(x, Jet):
        return x
    return Jet.constant(x, order)


def jet_polyval(coeffs: Sequence[float], x: Jet) -> Jet:
    """Evaluate ``sum coeffs[k] x**k`` in Horner form (lowest degree first)."""
    result = Jet.constant(np.full_like(x.c[0], coeffs[-1]), x.order)
    for a in reversed(coeffs[:-1]):
        result = result * x + a
    return result


def compose_taylor(derivs_at: Callable[[float, int], np.ndarray], x: Jet) -> Jet:
    """Compose a scalar function with a jet, given its derivatives.

    ``derivs_at(x0, p)`` must return ``[f(x0), f'(x0), ..., f^(p)(x0)]``.
    """
    p = x.order
    d = np.asarray(derivs_at(x.value, p), dtype=float)
    taylor = [d[k] / math.factorial(k) for k in range(p + 1)]
    eps = Jet(x.c.copy())
    eps.c[0] = 0.0
    result = Jet.constant(np.full_like(x.c[0], taylor[-1]), p)
    for a in reversed(taylor[:-1]):
        result = result * eps + a
    return result
