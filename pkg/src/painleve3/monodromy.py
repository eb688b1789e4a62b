"""Monodromy data, the cubic monodromy surfaces and their symmetries.

Values are exact (anything coercible to RatFun) or floating-point complex
numbers; a function works in exact mode unless one of its inputs is a
Python float or complex.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .exactalg import GaussRat, RatFun, substitute, symbols
from .laxops import D6, D7

I = GaussRat(0, 1)


class ExcludedLocus(ValueError):
    """The data lies on a locus excluded from the monodromy space (alpha = 0 etc.)."""


def _numeric(values) -> bool:
    return any(isinstance(v, (float, complex)) for v in values)


def _coerce(values):
    if _numeric(values):
        return [complex(v) if not isinstance(v, RatFun) else complex(v.to_gaussrat())
                for v in values]
    return [RatFun.coerce(v) for v in values]


def _is_zero(v, tol: float = 0.0) -> bool:
    if isinstance(v, RatFun):
        return v.is_zero()
    return abs(v) <= tol


def _mat_mul(A, B):
    return ((A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]),
            (A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]))


def _sl2_inverse(A):
    return ((A[1][1], -A[0][1]), (-A[1][0], A[0][0]))


# --------------------------------------------------------------------------- surfaces

@dataclass(frozen=True)
class CubicSurface:
    """x1 x2 x3 + x1^2 + x2^2 + p1 x1 + p2 x2 + p0 = 0."""

    p1: object
    p2: object
    p0: object
    family: str = D6

    def __call__(self, x1, x2, x3):
        return x1 * x2 * x3 + x1 * x1 + x2 * x2 + self.p1 * x1 + self.p2 * x2 + self.p0

    def gradient(self, x1, x2, x3) -> tuple:
        return (x2 * x3 + 2 * x1 + self.p1, x1 * x3 + 2 * x2 + self.p2, x1 * x2)

    def symbolic(self) -> RatFun:
        x1, x2, x3 = symbols("x1 x2 x3")
        return self(x1, x2, x3)

    def to_json(self) -> dict:
        return {"family": self.family, "p1": str(self.p1), "p2": str(self.p2),
                "p0": str(self.p0)}


def surface(family: str, alpha, beta=None) -> CubicSurface:
    """The monodromy surface: D6 (1 + ab, a + b, ab); D7 (a, 1, 0)."""
    family = family.upper()
    if family == D6:
        if beta is None:
            raise ValueError("the D6 surface needs alpha and beta")
        a, b = _coerce([alpha, beta])
        if _is_zero(a) or _is_zero(b):
            raise ExcludedLocus("alpha and beta must be nonzero")
        return CubicSurface(1 + a * b, a + b, a * b, D6)
    if family == D7:
        (a,) = _coerce([alpha])
        if _is_zero(a):
            raise ExcludedLocus("alpha must be nonzero")
        one = RatFun.constant(1) if isinstance(a, RatFun) else 1.0
        return CubicSurface(a, one, 0 * one, D7)
    raise ValueError(f"unknown family {family!r}")


@dataclass(frozen=True)
class SingularLocus:
    """Singular points of a surface; ``degenerate`` marks a singular x3-axis."""

    points: tuple[tuple, ...]
    degenerate: bool = False

    def to_json(self) -> dict:
        return {"points": [[str(c) for c in p] for p in self.points],
                "degenerate": self.degenerate}


def singular_points(S: CubicSurface, tol: float = 1e-12) -> SingularLocus:
    """All singular points, from dF/dx3 = x1 x2 (so x1 = 0 or x2 = 0).

    x1 = 0 forces x2 = -p2/2 and F = p0 - p2^2/4, then x3 = -p1/x2; the case
    x2 = 0 is the same with p1 and p2 exchanged.  If x1 = x2 = 0 the whole
    x3-axis is singular, which happens iff p1 = p2 = p0 = 0.
    """
    p1, p2, p0 = S.p1, S.p2, S.p0
    points = []
    for first in (True, False):
        # the free coordinate is x2 (first) or x1
        pa, pb = (p2, p1) if first else (p1, p2)
        if not _is_zero(pa * pa - 4 * p0, tol):
            continue
        if _is_zero(pa, tol):
            continue
        y = -pa / 2
        x3 = -pb / y
        pt = (0 * y, y, x3) if first else (y, 0 * y, x3)
        points.append(pt)
    degenerate = all(_is_zero(v, tol) for v in (p1, p2, p0))
    for p in points:
        if not all(_is_zero(g, tol * 10) for g in (*S.gradient(*p), S(*p))):
            raise ArithmeticError("case analysis produced a non-singular point")
    return SingularLocus(tuple(points), degenerate)


# --------------------------------------------------------------------------- D6 data

@dataclass(frozen=True)
class MonodromyDataD6:
    """Formal monodromy alpha, Stokes data a1, a2 at 0 and the link (l1, l2; l3, l4).

    beta and the Stokes data b1, b2 at infinity follow from top_inf = L top_0 L^-1.
    """

    alpha: object
    a1: object
    a2: object
    l1: object
    l2: object
    l3: object
    l4: object
    tol: float = 1e-12

    def __post_init__(self):
        vals = _coerce([self.alpha, self.a1, self.a2, self.l1, self.l2, self.l3, self.l4])
        for name, v in zip(("alpha", "a1", "a2", "l1", "l2", "l3", "l4"), vals):
            object.__setattr__(self, name, v)
        if _is_zero(self.alpha):
            raise ExcludedLocus("alpha must be nonzero")
        if not _is_zero(self.l1 * self.l4 - self.l2 * self.l3 - 1, self.tol):
            raise ValueError("the link must have determinant 1")
        if _is_zero(self.beta, self.tol):
            raise ExcludedLocus("beta must be nonzero")

    @property
    def exact(self) -> bool:
        return isinstance(self.alpha, RatFun)

    def top0(self):
        a, a1, a2 = self.alpha, self.a1, self.a2
        return ((a, a * a2), (a1 / a, (1 + a1 * a2) / a))

    def link(self):
        return ((self.l1, self.l2), (self.l3, self.l4))

    def top_inf(self):
        L = self.link()
        return _mat_mul(_mat_mul(L, self.top0()), _sl2_inverse(L))

    @property
    def beta(self):
        a, a1, a2 = self.alpha, self.a1, self.a2
        l1, l2, l3, l4 = self.l1, self.l2, self.l3, self.l4
        return l1 * l4 * a + l2 * l4 * a1 / a - l1 * l3 * a * a2 - l2 * l3 * (1 + a1 * a2) / a

    def stokes_inf(self) -> tuple:
        """(b1, b2) read off top_inf = [[beta, beta b2], [b1/beta, (1 + b1 b2)/beta]]."""
        T = self.top_inf()
        b = T[0][0]
        return T[1][0] * b, T[0][1] / b


def embed_d6(m: MonodromyDataD6):
    """(x1, x2, x3) of the data and F_{alpha,beta}(x), which must vanish."""
    a = m.alpha
    x = (m.l1 * m.l4 - 1, a * m.a2 * m.l1 * m.l3 - a * m.l1 * m.l4, (1 + m.a1 * m.a2) / a + a)
    return x, surface(D6, a, m.beta)(*x)


def embed_d6_symbolic() -> RatFun:
    """F(x) on the chart l1 != 0 with l4 = (1 + l2 l3)/l1 and beta from the relation."""
    al, a1, a2, l1, l2, l3 = symbols("alpha a1 a2 l1 l2 l3")
    m = MonodromyDataD6(al, a1, a2, l1, l2, l3, (1 + l2 * l3) / l1)
    return embed_d6(m)[1]


def top_inf_consistency(m: MonodromyDataD6) -> bool:
    """top_inf = L top_0 L^-1 has the shape of a formal monodromy times two Stokes matrices."""
    T = m.top_inf()
    b = m.beta
    b1, b2 = m.stokes_inf()
    rebuilt = ((b, b * b2), (b1 / b, (1 + b1 * b2) / b))
    tol = m.tol * max(1.0, *(abs(v) for row in T for v in row)) if not m.exact else 0.0
    return all(_is_zero(T[i][j] - rebuilt[i][j], tol) for i in range(2) for j in range(2))


# --------------------------------------------------------------------------- D7 data

@dataclass(frozen=True)
class D7Stokes:
    alpha: object
    c1: object
    c2: object
    top0: tuple
    alpha_identity: bool

    def to_json(self) -> dict:
        return {"alpha": str(self.alpha), "c1": str(self.c1), "c2": str(self.c2),
                "alphaIdentity": self.alpha_identity}


def d7_top_inf(e):
    """Formal monodromy [[0, -i], [-i, 0]] times the Stokes matrix [[1, 0], [e, 1]]."""
    (e,) = _coerce([e])
    mi = -I if isinstance(e, RatFun) else -1j
    one = e ** 0 if isinstance(e, RatFun) else 1.0
    zero = 0 * one
    return _mat_mul(((zero, mi * one), (mi * one, zero)), ((one, zero), (e, one)))


def d7_link_from_invariants(l12, l14, l23, l34) -> tuple:
    """A link (l1, l2, l3, l4) with the given pairwise products (one per orbit)."""
    l12, l14, l23, l34 = _coerce([l12, l14, l23, l34])
    if not _is_zero(l14 - l23 - 1, 1e-12) or not _is_zero(l12 * l34 - l14 * l23, 1e-12):
        raise ValueError("invariants violate l14 - l23 = 1 or l12 l34 = l14 l23")
    one = l14 ** 0 if isinstance(l14, RatFun) else 1.0
    if not _is_zero(l14, 0.0):
        return one, l12, l34 / l14, l14
    return l12, one, -one, -l34


def d7_alpha_and_stokes(e, l1, l2, l3, l4, tol: float = 1e-12) -> D7Stokes:
    """top_0 = L^-1 top_inf L, read as [[alpha, alpha c2], [c1/alpha, (1 + c1 c2)/alpha]]."""
    e, l1, l2, l3, l4 = _coerce([e, l1, l2, l3, l4])
    if not _is_zero(l1 * l4 - l2 * l3 - 1, tol):
        raise ValueError("the link must have determinant 1")
    L = ((l1, l2), (l3, l4))
    T0 = _mat_mul(_mat_mul(_sl2_inverse(L), d7_top_inf(e)), L)
    alpha = T0[0][0]
    if _is_zero(alpha, tol):
        raise ExcludedLocus("alpha = 0: excluded locus")
    c2 = T0[0][1] / alpha
    c1 = alpha * T0[1][0]
    mi = -I if isinstance(e, RatFun) else -1j
    closed = mi * (l1 * l4) * e - mi * (l1 * l2) + mi * (l3 * l4)
    rebuilt = ((alpha, alpha * c2), (c1 / alpha, (1 + c1 * c2) / alpha))
    same = all(_is_zero(T0[i][j] - rebuilt[i][j], tol) for i in range(2) for j in range(2))
    return D7Stokes(alpha, c1, c2, T0, _is_zero(alpha - closed, tol) and same)


def d7_trace_consistency(alpha, c1c2, e) -> object:
    """trace(top_0) - trace(top_inf); zero when (alpha, c1 c2, e) can come from one link."""
    alpha, c1c2, e = _coerce([alpha, c1c2, e])
    T = d7_top_inf(e)
    return alpha + (1 + c1c2) / alpha - (T[0][0] + T[1][1])


# --------------------------------------------------------------------------- automorphisms

def _sigma_maps():
    return {
        "sigma1": lambda a, b, x: (1 / a, 1 / b, (x[0] / (a * b), x[1] / (a * b), x[2])),
        "sigma2": lambda a, b, x: (-a, -b, (x[0], -x[1], -x[2])),
        "sigma3": lambda a, b, x: (1 / a, b, (x[0] / a, x[1] / a, x[2])),
        "sigma4": lambda a, b, x: (b, a, x),
    }


SIGMAS = ("sigma1", "sigma2", "sigma3", "sigma4")


@dataclass(frozen=True)
class AutomorphismReport:
    """Image data and whether F_image(image) = scale * F(x) identically."""

    name: str
    alpha: object
    beta: object
    point: tuple
    preserved: bool
    scale: object
    discrepancy: object = None

    def to_json(self) -> dict:
        return {"sigma": self.name, "alpha": str(self.alpha), "beta": str(self.beta),
                "point": [str(c) for c in self.point], "preserved": self.preserved,
                "scale": str(self.scale), "discrepancy": str(self.discrepancy)}


def automorphism_action(name: str, alpha=None, beta=None, point: Sequence | None = None
                        ) -> AutomorphismReport:
    """Apply sigma_k to (alpha, beta, x) and test surface preservation symbolically.

    The preservation test always runs on symbolic (alpha, beta, x); the
    returned image is for the given values (symbols when omitted).
    """
    if name not in SIGMAS:
        raise ValueError(f"unknown automorphism {name!r}; expected one of {SIGMAS}")
    fn = _sigma_maps()[name]
    al, be, x1, x2, x3 = symbols("alpha beta x1 x2 x3")
    a2, b2, y = fn(al, be, (x1, x2, x3))
    F = surface(D6, al, be).symbolic()
    G = surface(D6, a2, b2)(*y)
    # the x1 x2 x3 coefficients fix the scale
    scale = G.diff("x1").diff("x2").diff("x3")
    disc = G / scale - F
    if alpha is None:
        alpha, beta, point = al, be, (x1, x2, x3)
    vals = _coerce([alpha, beta, *point])
    ia, ib, ipt = fn(vals[0], vals[1], tuple(vals[2:]))
    return AutomorphismReport(name, ia, ib, ipt, disc.is_zero(), scale,
                              None if disc.is_zero() else disc)


# --------------------------------------------------------------------------- reducible data

@dataclass(frozen=True)
class ReducibleDatum:
    """A component of reducible monodromy data: shapes of L and top_0 and its coordinate.

    ``zeros`` names the entries forced to vanish; ``coordinate`` is the pair
    giving the point of P^1.
    """

    shape: str
    zeros: tuple[str, ...]
    coordinate: tuple[str, str]
    beta_is: str

    def data(self, alpha, free: dict | None = None) -> MonodromyDataD6:
        """Symbolic data with this shape (l1 l4 or l2 l3 fixed by det L = 1)."""
        names = ("a1", "a2", "l1", "l2", "l3", "l4")
        vals = {n: RatFun.symbol(n) for n in names}
        vals.update({n: RatFun.constant(0) for n in self.zeros})
        if "l2" in self.zeros or "l3" in self.zeros:
            vals["l4"] = 1 / vals["l1"]
        else:
            vals["l3"] = -1 / vals["l2"]
        if free:
            vals = {k: substitute(v, {n: RatFun.coerce(f) for n, f in free.items()})
                    for k, v in vals.items()}
        return MonodromyDataD6(alpha, vals["a1"], vals["a2"], vals["l1"], vals["l2"],
                               vals["l3"], vals["l4"])

    def verify(self) -> bool:
        """top_inf is triangular (the data is reducible) and beta has the stated value."""
        (al,) = symbols("alpha")
        m = self.data(al)
        T = m.top_inf()
        target = al if self.beta_is == "alpha" else 1 / al
        return (T[0][1].is_zero() or T[1][0].is_zero()) and (m.beta - target).is_zero()

    def to_json(self) -> dict:
        return {"shape": self.shape, "zeros": list(self.zeros),
                "coordinate": f"({self.coordinate[0]}:{self.coordinate[1]})",
                "beta": self.beta_is}


_SAME = (ReducibleDatum("lower triangular L and top0", ("l2", "a2"), ("l3", "a1"), "alpha"),
         ReducibleDatum("upper triangular L and top0", ("l3", "a1"), ("l2", "a2"), "alpha"))
# beta = 1/alpha: the link swaps the invariant lines
_INVERSE = (ReducibleDatum("lower top0, anti-triangular L (l4 = 0)", ("l4", "a2"), ("l1", "a1"),
                           "1/alpha"),
            ReducibleDatum("upper top0, anti-triangular L (l1 = 0)", ("l1", "a1"), ("l4", "a2"),
                           "1/alpha"))


def reducible_locus(alpha, beta) -> list[ReducibleDatum]:
    """Components of the reducible locus of R(alpha, beta): empty unless alpha = beta^(+-1)."""
    a, b = _coerce([alpha, beta])
    tol = 1e-12
    same = _is_zero(a - b, tol)
    inverse = _is_zero(a * b - 1, tol)
    out: list[ReducibleDatum] = []
    if same:
        out.extend(_SAME)
    if inverse:
        out.extend(_INVERSE)
    return out
