"""Vectorized forward-mode dual numbers.

A ``Dual`` carries a value array and a directional-derivative array of the
same shape.  Field evaluators are written against the small function set
below (``sqrt``, ``sin`` , ``cos``, ``arccos``, ``arctan2``, ``vdot``, ...)
so a single code path serves both plain evaluation and exact forward-mode
differentiation.
"""

from __future__ import annotations

import numpy as np

# Floor for derivative denominators near arccos/arctan2 poles.  Keeps eps
# finite; callers never differentiate exactly at a pole.
_DENOM_FLOOR = 1e-300


class Dual:
    """First-order jet ``val + eps * h`` with numpy broadcasting."""

    __slots__ = ("val", "eps")

    # Make ndarray <op> Dual defer to the reflected operators below.
    __array_ufunc__ = None

    def __init__(self, val, eps):
        self.val = np.asarray(val, dtype=float)
        self.eps = np.asarray(eps, dtype=float)

    @property
    def shape(self):
        return self.val.shape

    def __repr__(self):
        return f"Dual(val={self.val!r}, eps={self.eps!r})"

    def __getitem__(self, idx):
        return Dual(self.val[idx], self.eps[idx])

    def __neg__(self):
        return Dual(-self.val, -self.eps)

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val + other.val, self.eps + other.eps)
        return Dual(self.val + other, self.eps + np.zeros_like(np.asarray(other, dtype=float)))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val - other.val, self.eps - other.eps)
        return Dual(self.val - other, self.eps + np.zeros_like(np.asarray(other, dtype=float)))

    def __rsub__(self, other):
        return Dual(other - self.val, -self.eps + np.zeros_like(np.asarray(other, dtype=float)))

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.val * other.val, self.val * other.eps + self.eps * other.val)
        return Dual(self.val * other, self.eps * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            inv = 1.0 / other.val
            return Dual(self.val * inv, (self.eps - self.val * inv * other.eps) * inv)
        return Dual(self.val / other, self.eps / other)

    def __rtruediv__(self, other):
        inv = 1.0 / self.val
        return Dual(other * inv, -(other * inv) * inv * self.eps)

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise ValueError("Dual.__pow__ supports positive integer exponents only")
        return Dual(self.val**n, n * self.val ** (n - 1) * self.eps)


def value(x):
    """Value part of ``x`` (identity on plain arrays)."""
    if isinstance(x, Dual):
        return x.val
    return np.asarray(x, dtype=float)


def sqrt(x):
    if isinstance(x, Dual):
        r = np.sqrt(x.val)
        return Dual(r, 0.5 / r * x.eps)
    return np.sqrt(x)


def sin(x):
    if isinstance(x, Dual):
        return Dual(np.sin(x.val), np.cos(x.val) * x.eps)
    return np.sin(x)


def cos(x):
    if isinstance(x, Dual):
        return Dual(np.cos(x.val), -np.sin(x.val) * x.eps)
    return np.cos(x)


def arccos(x):
    """Arc cosine with clipped values and a floored derivative denominator."""
    if isinstance(x, Dual):
        v = np.clip(x.val, -1.0, 1.0)
        denom = np.sqrt(np.maximum(1.0 - v * v, _DENOM_FLOOR))
        return Dual(np.arccos(v), -x.eps / denom)
    return np.arccos(np.clip(x, -1.0, 1.0))


def arctan2(y, x):
    if isinstance(y, Dual) or isinstance(x, Dual):
        yv, xv = value(y), value(x)
        ye = y.eps if isinstance(y, Dual) else np.zeros_like(yv)
        xe = x.eps if isinstance(x, Dual) else np.zeros_like(xv)
        denom = np.maximum(xv * xv + yv * yv, _DENOM_FLOOR)
        return Dual(np.arctan2(yv, xv), (xv * ye - yv * xe) / denom)
    return np.arctan2(y, x)


def relu(x):
    """max(x, 0); derivative taken as 0 on the inactive side."""
    if isinstance(x, Dual):
        active = x.val > 0.0
        return Dual(np.where(active, x.val, 0.0), np.where(active, x.eps, 0.0))
    return np.maximum(x, 0.0)


def vdot(a, b):
    """Inner product over the last axis."""
    p = a * b
    if isinstance(p, Dual):
        return Dual(p.val.sum(axis=-1), p.eps.sum(axis=-1))
    return p.sum(axis=-1)


def apply_linear(matrix, x):
    """Right-multiply points ``x`` of shape (..., n) by a constant matrix."""
    m = np.asarray(matrix, dtype=float)
    if isinstance(x, Dual):
        return Dual(x.val @ m.T, x.eps @ m.T)
    return np.asarray(x, dtype=float) @ m.T


def normalize(x):
    """Scale (..., n) vectors to unit length."""
    n = sqrt(vdot(x, x))
    return x / n[..., None]
