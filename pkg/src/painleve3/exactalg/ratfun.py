"""Multivariate polynomials and rational functions over Q(i).

A value is stored as ``(re + i*im) / den`` where ``re``, ``im`` and ``den`` are
flint polynomials with rational coefficients in one shared context.  The
canonical form has a monic real denominator (leading coefficient 1 in the
graded lexicographic order) and no common factor of ``re``, ``im`` and
``den``.  Because both the representation and the term order are fixed,
``str`` of a canonical value is deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

import flint
import numpy as np

from . import rings
from .gaussrat import GaussRat

Scalar = Union[GaussRat, int, Fraction]


def _q(x: Fraction | int) -> flint.fmpq:
    x = Fraction(x)
    return flint.fmpq(x.numerator, x.denominator)


def _frac(x: flint.fmpq) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def _free(p: flint.fmpq_mpoly) -> set[str]:
    if p.is_zero():
        return set()
    names = p.context().names()
    return {n for n, d in zip(names, p.degrees()) if d > 0}


def _mono_str(names: tuple[str, ...], exps: tuple[int, ...]) -> str:
    parts = []
    for n, e in zip(names, exps):
        if e == 1:
            parts.append(n)
        elif e > 1:
            parts.append(f"{n}^{e}")
    return "*".join(parts)


def _gauss_poly_str(re: flint.fmpq_mpoly, im: flint.fmpq_mpoly) -> tuple[str, int]:
    """Canonical string of ``re + i*im`` and its number of terms."""
    ctx = re.context()
    dre, dim = re.to_dict(), im.to_dict()
    monos = set(dre) | set(dim)
    if not monos:
        return "0", 0
    # let flint order the union of monomials in the context's term order
    order = ctx.from_dict({m: 1 for m in monos}).monoms()
    names = ctx.names()
    out: list[str] = []
    for m in order:
        c = GaussRat(_frac(dre[m]) if m in dre else 0, _frac(dim[m]) if m in dim else 0)
        mono = _mono_str(names, m)
        neg = False
        if c.im == 0 and c.re < 0 or c.re == 0 and c.im < 0:
            neg, c = True, -c
        if not mono:
            body = str(c)
        elif c == 1:
            body = mono
        else:
            cs = str(c)
            body = f"{cs}*{mono}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out), len(order)


class MultiPoly:
    """A polynomial with Gaussian-rational coefficients."""

    __slots__ = ("_re", "_im")

    def __init__(self, re: flint.fmpq_mpoly, im: flint.fmpq_mpoly | None = None):
        ctx = re.context()
        self._re = re
        self._im = ctx.from_dict({}) if im is None else im

    @property
    def ring(self) -> tuple[str, ...]:
        return self._re.context().names()

    @property
    def re(self) -> flint.fmpq_mpoly:
        return self._re

    @property
    def im(self) -> flint.fmpq_mpoly:
        return self._im

    def terms(self) -> dict[tuple[int, ...], GaussRat]:
        dre, dim = self._re.to_dict(), self._im.to_dict()
        return {
            tuple(int(e) for e in m): GaussRat(_frac(dre[m]) if m in dre else 0,
                                               _frac(dim[m]) if m in dim else 0)
            for m in set(dre) | set(dim)
        }

    def is_zero(self) -> bool:
        return self._re.is_zero() and self._im.is_zero()

    def free_symbols(self) -> set[str]:
        return _free(self._re) | _free(self._im)

    def total_degree(self) -> int:
        return max(self._re.total_degree(), self._im.total_degree())

    def degree(self, name: str) -> int:
        names = self.ring
        if name not in names:
            return 0
        k = names.index(name)
        return max(self._re.degrees()[k] if not self._re.is_zero() else 0,
                   self._im.degrees()[k] if not self._im.is_zero() else 0)

    def __len__(self) -> int:
        return len(set(self._re.monoms()) | set(self._im.monoms()))

    def as_ratfun(self) -> "RatFun":
        return RatFun._make(self._re, self._im, self._re.context().from_dict({}) + 1)

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.as_ratfun() == other.as_ratfun()

    def __hash__(self):
        return hash(str(self))

    def __add__(self, other):
        return (self.as_ratfun() + _as_rf(other)).num

    def __sub__(self, other):
        return (self.as_ratfun() - _as_rf(other)).num

    def __mul__(self, other):
        return (self.as_ratfun() * _as_rf(other)).num

    def __neg__(self):
        return MultiPoly(-self._re, -self._im)

    def __str__(self) -> str:
        return _gauss_poly_str(self._re, self._im)[0]

    def __repr__(self) -> str:
        return f"MultiPoly({self})"


def _as_rf(x) -> "RatFun":
    if isinstance(x, MultiPoly):
        return x.as_ratfun()
    return RatFun.coerce(x)


class RatFun:
    """Exact rational function over Q(i) in canonical form. Immutable."""

    __slots__ = ("_re", "_im", "_den", "_cache")

    def __init__(self, value: Scalar | "RatFun" | str = 0):
        src = value if isinstance(value, RatFun) else RatFun.coerce(value)
        self._re, self._im, self._den = src._re, src._im, src._den
        self._cache = src._cache

    # construction -----------------------------------------------------------
    @classmethod
    def _raw(cls, re, im, den) -> "RatFun":
        obj = object.__new__(cls)
        obj._re, obj._im, obj._den = re, im, den
        obj._cache = {}
        return obj

    @classmethod
    def _make(cls, re, im, den) -> "RatFun":
        """Build from polynomials in one context and bring to canonical form."""
        if den.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        ctx = den.context()
        if re.is_zero() and im.is_zero():
            z = ctx.from_dict({})
            return cls._raw(z, z, z + 1)
        if not den.is_constant():
            g = re if im.is_zero() else (im if re.is_zero() else re.gcd(im))
            g = g.gcd(den)
            if not g.is_one() and not g.is_constant():
                re, im, den = re / g, im / g, den / g
        lc = den.leading_coefficient()
        if lc != 1:
            inv = 1 / lc
            re, im, den = re * inv, im * inv, den * inv
        return cls._raw(re, im, den)

    @classmethod
    def coerce(cls, x) -> "RatFun":
        if isinstance(x, RatFun):
            return x
        if isinstance(x, MultiPoly):
            return x.as_ratfun()
        if isinstance(x, str):
            from .parsing import parse

            return parse(x)
        g = GaussRat.coerce(x)
        return cls.constant(g)

    @classmethod
    def constant(cls, c: Scalar, ctx: flint.fmpq_mpoly_ctx = rings.EMPTY) -> "RatFun":
        g = GaussRat.coerce(c)
        one = ctx.from_dict({}) + 1
        return cls._raw(one * _q(g.re), one * _q(g.im), one)

    @classmethod
    def symbol(cls, name: str) -> "RatFun":
        name = rings.ALIASES.get(name, name)
        ctx = rings.context_for([name])
        x = ctx.gens()[0]
        z = ctx.from_dict({})
        return cls._raw(x, z, z + 1)

    # structure --------------------------------------------------------------
    @property
    def context(self) -> flint.fmpq_mpoly_ctx:
        return self._den.context()

    @property
    def ring(self) -> tuple[str, ...]:
        return self.context.names()

    @property
    def num(self) -> MultiPoly:
        return MultiPoly(self._re, self._im)

    @property
    def den(self) -> MultiPoly:
        return MultiPoly(self._den)

    def parts(self) -> tuple[flint.fmpq_mpoly, flint.fmpq_mpoly, flint.fmpq_mpoly]:
        return self._re, self._im, self._den

    def free_symbols(self) -> set[str]:
        c = self._cache.get("free")
        if c is None:
            c = frozenset(_free(self._re) | _free(self._im) | _free(self._den))
            self._cache["free"] = c
        return set(c)

    def is_zero(self) -> bool:
        return self._re.is_zero() and self._im.is_zero()

    def is_constant(self) -> bool:
        return self._den.is_constant() and self._re.is_constant() and self._im.is_constant()

    def is_polynomial(self) -> bool:
        return self._den.is_constant()

    def to_gaussrat(self) -> GaussRat:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        re = self._re.to_dict().get((0,) * len(self.ring), 0)
        im = self._im.to_dict().get((0,) * len(self.ring), 0)
        return GaussRat(_frac(flint.fmpq(re)), _frac(flint.fmpq(im)))

    def size(self) -> int:
        """Number of stored terms; a cheap complexity measure for pivoting."""
        return len(self._re) + len(self._im) + len(self._den)

    def in_context(self, ctx: flint.fmpq_mpoly_ctx) -> "RatFun":
        if ctx is self.context or ctx.names() == self.ring:
            return self if ctx is self.context else RatFun._raw(
                self._re.project_to_context(ctx), self._im.project_to_context(ctx),
                self._den.project_to_context(ctx))
        missing = self.free_symbols() - set(ctx.names())
        if missing:
            raise ValueError(f"context lacks indeterminates {sorted(missing)}")
        return RatFun._raw(self._re.project_to_context(ctx), self._im.project_to_context(ctx),
                           self._den.project_to_context(ctx))

    def _aligned(self, other) -> tuple["RatFun", "RatFun"]:
        o = RatFun.coerce(other)
        ctx = rings.union(self.context, o.context)
        return self.in_context(ctx), o.in_context(ctx)

    # arithmetic ---------------------------------------------------------------
    def __add__(self, other):
        try:
            a, b = self._aligned(other)
        except TypeError:
            return NotImplemented
        if b.is_zero():
            return a
        if a.is_zero():
            return b
        if a._den == b._den:
            return RatFun._make(a._re + b._re, a._im + b._im, a._den)
        g = a._den.gcd(b._den)
        da, db = a._den / g, b._den / g
        return RatFun._make(a._re * db + b._re * da, a._im * db + b._im * da, a._den * db)

    __radd__ = __add__

    def __neg__(self):
        return RatFun._raw(-self._re, -self._im, self._den)

    def __sub__(self, other):
        try:
            o = RatFun.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return RatFun.coerce(other) - self

    def __mul__(self, other):
        try:
            a, b = self._aligned(other)
        except TypeError:
            return NotImplemented
        if a.is_zero() or b.is_zero():
            return RatFun.constant(0, a.context)
        if b.is_constant():
            a, b = b, a
        if a.is_constant():
            c = a.to_gaussrat()
            if c.im == 0:
                k = _q(c.re)
                return RatFun._raw(b._re * k, b._im * k, b._den)
        if b._im.is_zero():
            re, im = a._re * b._re, a._im * b._re
        elif a._im.is_zero():
            re, im = a._re * b._re, a._re * b._im
        else:
            re = a._re * b._re - a._im * b._im
            im = a._re * b._im + a._im * b._re
        return RatFun._make(re, im, a._den * b._den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if self.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        re, im, den = self._re, self._im, self._den
        if im.is_zero():
            return RatFun._make(den, im, re)
        norm = re * re + im * im
        return RatFun._make(den * re, -(den * im), norm)

    def __truediv__(self, other):
        try:
            o = RatFun.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return RatFun.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        if self._im.is_zero():
            # real numerator: powers stay coprime, no gcd needed
            return RatFun._raw(self._re ** n, self._im, self._den ** n)
        out, base = RatFun.constant(1, self.context), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate_coefficients(self) -> "RatFun":
        return RatFun._raw(self._re, -self._im, self._den)

    # comparisons ---------------------------------------------------------------
    def __eq__(self, other):
        try:
            a, b = self._aligned(other)
        except TypeError:
            return NotImplemented
        return a._den == b._den and a._re == b._re and a._im == b._im

    def equals_by_cross_multiplication(self, other) -> bool:
        a, b = self._aligned(other)
        return (a._re * b._den == b._re * a._den) and (a._im * b._den == b._im * a._den)

    def __hash__(self):
        return hash(str(self))

    # calculus --------------------------------------------------------------------
    def diff(self, name: str) -> "RatFun":
        """Partial derivative with respect to the indeterminate ``name``."""
        name = rings.ALIASES.get(name, name)
        if name not in self.free_symbols():
            return RatFun.constant(0, self.context)
        re, im, den = self._re, self._im, self._den
        dre, dim, dden = re.derivative(name), im.derivative(name), den.derivative(name)
        if dden.is_zero():
            return RatFun._make(dre, dim, den)
        return RatFun._make(dre * den - re * dden, dim * den - im * dden, den * den)

    # evaluation -------------------------------------------------------------------
    def _compiled(self):
        c = self._cache.get("compiled")
        if c is None:
            def arrays(p):
                d = p.to_dict()
                if not d:
                    return np.zeros((0, len(self.ring)), dtype=np.int64), np.zeros(0)
                ms = list(d)
                return (np.array(ms, dtype=np.int64).reshape(len(ms), -1),
                        np.array([float(flint.fmpq(d[m])) for m in ms]))
            c = (arrays(self._re), arrays(self._im), arrays(self._den))
            self._cache["compiled"] = c
        return c

    def evaluate(self, point: Mapping[str, complex]) -> complex | np.ndarray:
        """Floating-point value at ``point``; values may be numpy arrays (broadcast)."""
        names = self.ring
        free = self.free_symbols()
        missing = [n for n in free if n not in point]
        if missing:
            raise KeyError(f"no value for {sorted(missing)}")
        vals = [np.asarray(point[n], dtype=complex) if n in free else np.asarray(1.0 + 0j)
                for n in names]
        vals = np.broadcast_arrays(*vals) if vals else []
        shape = vals[0].shape if vals else ()

        def ev(E, c):
            if len(c) == 0:
                return np.zeros(shape, dtype=complex)
            acc = np.zeros(shape, dtype=complex)
            for row, coef in zip(E, c):
                term = np.full(shape, coef, dtype=complex)
                for k, e in enumerate(row):
                    if e:
                        term = term * vals[k] ** int(e)
                acc = acc + term
            return acc

        (Er, cr), (Ei, ci), (Ed, cd) = self._compiled()
        out = (ev(Er, cr) + 1j * ev(Ei, ci)) / ev(Ed, cd)
        return complex(out) if out.ndim == 0 else out

    # printing ----------------------------------------------------------------------
    def __str__(self) -> str:
        s = self._cache.get("str")
        if s is None:
            s = self._render()
            self._cache["str"] = s
        return s

    def _render(self) -> str:
        num, nterms = _gauss_poly_str(self._re, self._im)
        if self._den.is_one():
            return num
        zero = self._den.context().from_dict({})
        den, dterms = _gauss_poly_str(self._den, zero)
        if nterms > 1:
            num = f"({num})"
        if dterms > 1 or "*" in den:
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self) -> str:
        return f"RatFun({self})"


def symbols(spec: str | Iterable[str]) -> tuple[RatFun, ...]:
    """``symbols("q a t")`` returns the indeterminates as RatFuns."""
    names = spec.split() if isinstance(spec, str) else list(spec)
    return tuple(RatFun.symbol(n) for n in names)


def normalize(f: RatFun) -> RatFun:
    """Canonical representative. Values are always stored canonically, so this
    re-runs the reduction and returns an equal value (idempotent)."""
    return RatFun._make(*f.parts())


def common_context(values: Iterable[RatFun]) -> flint.fmpq_mpoly_ctx:
    ctx = rings.EMPTY
    for v in values:
        ctx = rings.union(ctx, v.context)
    return ctx


def substitute(f: RatFun, bindings: Mapping[str, RatFun | Scalar]) -> RatFun:
    """Simultaneous substitution of indeterminates by rational functions.

    Numerator and denominator are substituted separately after clearing the
    denominators of the images, and the quotient is normalized once.
    """
    f = RatFun.coerce(f)
    b = {rings.ALIASES.get(k, k): v for k, v in bindings.items()}
    for v in b.values():
        if isinstance(v, float) or (isinstance(v, complex) and not isinstance(v, GaussRat)):
            GaussRat.coerce(v)  # raises for inexact values
    free = f.free_symbols()
    active = {k: RatFun.coerce(v) for k, v in b.items() if k in free}
    if not active:
        return f
    ctx = common_context([f, *active.values()])
    f = f.in_context(ctx)
    names = ctx.names()
    images = {names.index(k): v.in_context(ctx) for k, v in active.items()}
    one = ctx.from_dict({}) + 1
    zero = ctx.from_dict({})

    re, im, den = f.parts()
    # common power bound per substituted variable over numerator and denominator
    bound = {}
    for k in images:
        bound[k] = max(p.degrees()[k] for p in (re, im, den) if not p.is_zero())

    pcache: dict[tuple[int, int], tuple] = {}
    qcache: dict[tuple[int, int], flint.fmpq_mpoly] = {}

    def ppow(k, e):
        key = (k, e)
        if key not in pcache:
            if e == 0:
                pcache[key] = (one, zero)
            else:
                r0, i0 = ppow(k, e - 1)
                pr, pi, _ = images[k].parts()
                if pi.is_zero():
                    pcache[key] = (r0 * pr, i0 * pr)
                else:
                    pcache[key] = (r0 * pr - i0 * pi, r0 * pi + i0 * pr)
        return pcache[key]

    def qpow(k, e):
        key = (k, e)
        if key not in qcache:
            qcache[key] = one if e == 0 else qpow(k, e - 1) * images[k].parts()[2]
        return qcache[key]

    def sub_real(p):
        accr, acci = zero, zero
        for mono, c in p.terms():
            tr = one * c
            ti = zero
            rest = [0] * len(names)
            for k, e in enumerate(mono):
                if k in images:
                    pr, pi = ppow(k, e)
                    qk = qpow(k, bound[k] - e)
                    if pi.is_zero():
                        tr, ti = tr * pr, ti * pr
                    else:
                        tr, ti = tr * pr - ti * pi, tr * pi + ti * pr
                    if not qk.is_one():
                        tr, ti = tr * qk, ti * qk
                else:
                    rest[k] = e
            if any(rest):
                m = ctx.from_dict({tuple(rest): 1})
                tr, ti = tr * m, ti * m
            accr, acci = accr + tr, acci + ti
        return accr, acci

    nr_r, nr_i = sub_real(re)
    ni_r, ni_i = sub_real(im) if not im.is_zero() else (zero, zero)
    num_re, num_im = nr_r - ni_i, nr_i + ni_r
    d_r, d_i = sub_real(den)
    if d_r.is_zero() and d_i.is_zero():
        raise ZeroDivisionError(
            f"denominator {f.den} vanishes identically under the substitution")
    if d_i.is_zero():
        return RatFun._make(num_re, num_im, d_r)
    norm = d_r * d_r + d_i * d_i
    return RatFun._make(num_re * d_r + num_im * d_i, num_im * d_r - num_re * d_i, norm)
