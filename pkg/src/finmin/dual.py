"""Forward-mode dual numbers, nestable for exact second derivatives.

A :class:`Dual` holds a value and a single derivative channel. Components
may be floats, numpy arrays (elementwise), or further ``Dual`` instances;
nesting two levels gives hyper-dual numbers whose inner-inner channel
carries one exact mixed second derivative. Only the operations the norm
and area formulas need are implemented: field arithmetic, nonnegative
integer powers, and square roots.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Dual",
    "sqrt",
    "gradient",
    "hessian",
    "central_gradient",
    "central_hessian",
]


class Dual:
    """Value plus one derivative channel: ``re + du * eps`` with ``eps**2 == 0``."""

    __slots__ = ("re", "du")

    # Keep numpy from broadcasting over us elementwise; reflected
    # operators must run so array * Dual builds a Dual of arrays.
    __array_ufunc__ = None
    __array_priority__ = 1000

    def __init__(self, re, du):
        self.re = re
        self.du = du

    def __repr__(self):
        return f"Dual({self.re!r}, {self.du!r})"

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.re + other.re, self.du + other.du)
        return Dual(self.re + other, self.du)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.re, -self.du)

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.re - other.re, self.du - other.du)
        return Dual(self.re - other, self.du)

    def __rsub__(self, other):
        return Dual(other - self.re, -self.du)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.re * other.re, self.re * other.du + self.du * other.re)
        return Dual(self.re * other, self.du * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            q = self.re / other.re
            return Dual(q, (self.du - q * other.du) / other.re)
        return Dual(self.re / other, self.du / other)

    def __rtruediv__(self, other):
        q = other / self.re
        return Dual(q, -(q / self.re) * self.du)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise TypeError("Dual supports nonnegative integer exponents only")
        out = 1.0
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out


def sqrt(x):
    """Square root that recurses through Dual components."""
    if isinstance(x, Dual):
        r = sqrt(x.re)
        return Dual(r, x.du / (2.0 * r))
    return np.sqrt(x)


def gradient(fun, x):
    """Exact gradient of ``fun: R^n -> R`` at x, one dual pass per coordinate."""
    x = [float(v) for v in x]
    n = len(x)
    g = np.empty(n)
    for i in range(n):
        args = [Dual(v, 1.0) if k == i else v for k, v in enumerate(x)]
        g[i] = fun(args).du
    return g


def hessian(fun, x):
    """Exact Hessian of ``fun: R^n -> R`` at x via nested (hyper-dual) passes."""
    x = [float(v) for v in x]
    n = len(x)
    h = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            args = [
                Dual(Dual(v, 1.0 if k == i else 0.0), Dual(1.0 if k == j else 0.0, 0.0))
                for k, v in enumerate(x)
            ]
            h[i, j] = fun(args).du.du
    return h


def central_gradient(fun, x, step):
    """Second-order central-difference gradient with a fixed step."""
    x = np.asarray(x, dtype=float)
    n = x.size
    g = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = step
        g[i] = (fun(x + e) - fun(x - e)) / (2.0 * step)
    return g


def central_hessian(fun, x, step):
    """Nested central-difference Hessian (4-point mixed stencil)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    h = np.empty((n, n))
    f0 = fun(x)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = step
        for j in range(n):
            if i == j:
                h[i, i] = (fun(x + ei) - 2.0 * f0 + fun(x - ei)) / step**2
                continue
            ej = np.zeros(n)
            ej[j] = step
            h[i, j] = (
                fun(x + ei + ej) - fun(x + ei - ej) - fun(x - ei + ej) + fun(x - ei - ej)
            ) / (4.0 * step**2)
    return h
