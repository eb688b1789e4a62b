"""Exact Gaussian rationals ``re + im*i`` with ``re, im`` in Q."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union

GaussLike = Union["GaussRat", int, Fraction, complex]


class GaussRat:
    """An element of Q(i). Immutable; both parts are kept as reduced fractions."""

    __slots__ = ("_re", "_im")

    def __init__(self, re: Rational | int | str = 0, im: Rational | int | str = 0):
        object.__setattr__(self, "_re", Fraction(re))
        object.__setattr__(self, "_im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRat is immutable")

    @property
    def re(self) -> Fraction:
        return self._re

    @property
    def im(self) -> Fraction:
        return self._im

    @classmethod
    def coerce(cls, x: GaussLike) -> "GaussRat":
        if isinstance(x, GaussRat):
            return x
        if isinstance(x, bool):
            return cls(int(x))
        if isinstance(x, (int, Fraction)):
            return cls(x)
        if isinstance(x, complex):
            # only accept complex numbers whose parts are exact integers
            if x.real.is_integer() and x.imag.is_integer():
                return cls(int(x.real), int(x.imag))
            raise TypeError(f"inexact complex value {x!r} cannot become a GaussRat")
        if isinstance(x, Rational):
            return cls(Fraction(x.numerator, x.denominator))
        raise TypeError(f"cannot coerce {type(x).__name__} to GaussRat")

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        try:
            o = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRat(self._re + o._re, self._im + o._im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRat(-self._re, -self._im)

    def __sub__(self, other):
        try:
            o = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRat(self._re - o._re, self._im - o._im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRat(self._re * o._re - self._im * o._im, self._re * o._im + self._im * o._re)

    __rmul__ = __mul__

    def conjugate(self) -> "GaussRat":
        return GaussRat(self._re, -self._im)

    def norm(self) -> Fraction:
        return self._re * self._re + self._im * self._im

    def inverse(self) -> "GaussRat":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussRat(self._re / n, -self._im / n)

    def __truediv__(self, other):
        try:
            o = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return GaussRat.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out, base = GaussRat(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # comparisons ---------------------------------------------------------
    def __eq__(self, other):
        try:
            o = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        return self._re == o._re and self._im == o._im

    def __hash__(self):
        if self._im == 0:
            return hash(self._re)
        return hash((self._re, self._im))

    def __bool__(self):
        return bool(self._re) or bool(self._im)

    def is_real(self) -> bool:
        return self._im == 0

    def __complex__(self):
        return complex(float(self._re), float(self._im))

    # printing --------------------------------------------------------------
    def __str__(self) -> str:
        re, im = self._re, self._im
        if im == 0:
            return _frac_str(re)
        if re == 0:
            return _imag_str(im)
        sign = "+" if im > 0 else "-"
        return f"({_frac_str(re)}{sign}{_imag_str(abs(im))})"

    def __repr__(self) -> str:
        return f"GaussRat({self})"


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _imag_str(x: Fraction) -> str:
    if x == 1:
        return "i"
    if x == -1:
        return "-i"
    return f"{_frac_str(x)}*i"


I = GaussRat(0, 1)
