"""Exact scalar helpers: dual numbers over the rationals.

``Dual(re, eps)`` models re + eps*E with E^2 = 0 and Fraction components.
Running the whole evaluation pipeline over duals gives exact first-order
variations: pushing a polynomial jet through the point map ``id + E*X`` of an
algebra element and reading the eps-component of an invariant yields its exact
Lie derivative, which must vanish for true invariants.
"""

from __future__ import annotations

from fractions import Fraction


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot build an exact dual from {type(x).__name__}")


class Dual:
    __slots__ = ("re", "eps")

    def __init__(self, re, eps=0):
        self.re = _as_fraction(re)
        self.eps = _as_fraction(eps)

    def __repr__(self):
        return f"Dual({self.re}, {self.eps})"

    def _lift(self, other):
        if isinstance(other, Dual):
            return other
        if isinstance(other, (int, Fraction)):
            return Dual(other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Dual(self.re + o.re, self.eps + o.eps)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.re, -self.eps)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Dual(self.re - o.re, self.eps - o.eps)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Dual(o.re - self.re, o.eps - self.eps)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Dual(self.re * o.re, self.re * o.eps + self.eps * o.re)

    __rmul__ = __mul__

    def reciprocal(self):
        if self.re == 0:
            raise ZeroDivisionError("dual number with zero real part")
        inv = Fraction(1) / self.re
        return Dual(inv, -self.eps * inv * inv)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.reciprocal()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.reciprocal() ** (-n)
        out = Dual(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.eps == o.eps

    def __hash__(self):
        return hash((self.re, self.eps))

    def __abs__(self):
        # ordering proxy used only for pivot selection
        return abs(self.re)

    def __float__(self):
        return float(self.re)
