"""Lax operators on moduli charts, isomonodromy flows and gauge equivalences.

Operators are 2x2 matrices of Laurent polynomials in ``z`` whose coefficients
are exact rational functions of the chart generators.  A lax operator stands
for ``z d/dz + A`` and a deformation operator for ``d/dt + B``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .exactalg import DerivationSpec, GaussRat, RatFun, solve_linear, substitute, symbols

Laurent = dict  # exponent -> RatFun, no zero values stored

D6, D7 = "D6", "D7"
CHARTS = {D6: ("ST1", "ST0"), D7: ("C0", "CM1")}


class ChartDomainError(ValueError):
    """The state is outside the chart (or the chart overlap) it is used on."""


class DerivationFailure(ArithmeticError):
    def __init__(self, message: str, system=None):
        super().__init__(message)
        self.system = system


def _zero() -> RatFun:
    return RatFun.constant(0)


def _lclean(p: Mapping[int, RatFun]) -> Laurent:
    return {k: v for k, v in p.items() if not v.is_zero()}


def _ladd(p: Laurent, r: Laurent, sign: int = 1) -> Laurent:
    out = dict(p)
    for k, v in r.items():
        v = v if sign > 0 else -v
        out[k] = out[k] + v if k in out else v
    return _lclean(out)


def _lmul(p: Laurent, r: Laurent) -> Laurent:
    out: dict[int, RatFun] = {}
    for i, u in p.items():
        for j, v in r.items():
            out[i + j] = out[i + j] + u * v if i + j in out else u * v
    return _lclean(out)


class LaurentMatrix:
    """2x2 matrix with Laurent-polynomial entries, stored row-major."""

    __slots__ = ("_e",)

    def __init__(self, entries: Sequence[Mapping[int, object]]):
        if len(entries) != 4:
            raise ValueError("a 2x2 matrix needs four entries")
        self._e = tuple(_lclean({int(k): RatFun.coerce(v) for k, v in e.items()}) for e in entries)

    @classmethod
    def from_rows(cls, rows) -> "LaurentMatrix":
        (a, b), (c, d) = rows
        return cls([a, b, c, d])

    @classmethod
    def identity(cls) -> "LaurentMatrix":
        return cls([{0: 1}, {}, {}, {0: 1}])

    @classmethod
    def scalar(cls, c) -> "LaurentMatrix":
        return cls([{0: c}, {}, {}, {0: c}])

    @property
    def entries(self) -> tuple[Laurent, ...]:
        return self._e

    def entry(self, i: int, j: int) -> Laurent:
        return self._e[2 * i + j]

    def coefficient(self, k: int) -> tuple[RatFun, RatFun, RatFun, RatFun]:
        return tuple(e.get(k, _zero()) for e in self._e)

    def zrange(self) -> tuple[int, int] | None:
        ks = [k for e in self._e for k in e]
        return (min(ks), max(ks)) if ks else None

    def __add__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        return LaurentMatrix([_ladd(a, b) for a, b in zip(self._e, other._e)])

    def __sub__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        return LaurentMatrix([_ladd(a, b, -1) for a, b in zip(self._e, other._e)])

    def __neg__(self) -> "LaurentMatrix":
        return LaurentMatrix([{k: -v for k, v in e.items()} for e in self._e])

    def __mul__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        a, b, c, d = self._e
        p, q, r, s = other._e
        return LaurentMatrix([
            _ladd(_lmul(a, p), _lmul(b, r)), _ladd(_lmul(a, q), _lmul(b, s)),
            _ladd(_lmul(c, p), _lmul(d, r)), _ladd(_lmul(c, q), _lmul(d, s)),
        ])

    def scale(self, c) -> "LaurentMatrix":
        c = RatFun.coerce(c)
        return LaurentMatrix([{k: v * c for k, v in e.items()} for e in self._e])

    def map(self, fn: Callable[[RatFun], RatFun]) -> "LaurentMatrix":
        return LaurentMatrix([{k: fn(v) for k, v in e.items()} for e in self._e])

    def zdz(self) -> "LaurentMatrix":
        return LaurentMatrix([{k: v * k for k, v in e.items() if k} for e in self._e])

    def z_inverted(self) -> "LaurentMatrix":
        """Entries evaluated at 1/z."""
        return LaurentMatrix([{-k: v for k, v in e.items()} for e in self._e])

    def z_scaled(self, c) -> "LaurentMatrix":
        """Entries evaluated at c*z."""
        c = RatFun.coerce(c)
        return LaurentMatrix([{k: v * c ** k for k, v in e.items()} for e in self._e])

    def trace(self) -> Laurent:
        return _ladd(self._e[0], self._e[3])

    def det(self) -> Laurent:
        a, b, c, d = self._e
        return _ladd(_lmul(a, d), _lmul(b, c), -1)

    def is_zero(self) -> bool:
        return not any(self._e)

    def commutator(self, other: "LaurentMatrix") -> "LaurentMatrix":
        return self * other - other * self

    def substitute(self, bindings) -> "LaurentMatrix":
        return self.map(lambda v: substitute(v, bindings))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        return (self - other).is_zero()

    def to_strings(self) -> list[dict[str, str]]:
        return [{str(k): str(v) for k, v in sorted(e.items())} for e in self._e]

    def __repr__(self) -> str:
        return f"LaurentMatrix({self.to_strings()})"


@dataclass(frozen=True)
class ZMatrixOperator:
    """``z d/dz + A + twist*Id`` (kind "lax") or ``d/dt + B`` (kind "deformation").

    ``A``/``B`` are trace-free; the scalar ``twist`` is only used for the
    half-integer shift of the s2-type transformations.
    """

    kind: str
    matrix: LaurentMatrix
    family: str = ""
    chart: str = ""
    bindings: Mapping[str, str] = field(default_factory=dict)
    twist: RatFun = field(default_factory=_zero)

    def __post_init__(self):
        if self.kind not in ("lax", "deformation"):
            raise ValueError("kind must be 'lax' or 'deformation'")
        if self.matrix.trace():
            raise ValueError("operator matrix must be trace-free")

    @property
    def full(self) -> LaurentMatrix:
        if self.twist.is_zero():
            return self.matrix
        return self.matrix + LaurentMatrix.scalar(self.twist)

    def twisted(self, c) -> "ZMatrixOperator":
        return ZMatrixOperator(self.kind, self.matrix, self.family, self.chart, self.bindings,
                               self.twist + RatFun.coerce(c))

    def z_inverted(self) -> "ZMatrixOperator":
        """``z d/dz + A(z)`` pulled back by ``z -> 1/z``, i.e. ``z d/dz - A(1/z)``."""
        return ZMatrixOperator(self.kind, -self.matrix.z_inverted(), self.family, self.chart,
                               self.bindings, -self.twist)

    def z_scaled(self, c) -> "ZMatrixOperator":
        return ZMatrixOperator(self.kind, self.matrix.z_scaled(c), self.family, self.chart,
                               self.bindings, self.twist)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "chart": self.chart,
            "kind": self.kind,
            "bindings": dict(self.bindings),
            "twist": str(self.twist),
            "entries": self.matrix.to_strings(),
        }


def operator_from_json(data: Mapping) -> ZMatrixOperator:
    m = LaurentMatrix([{int(k): RatFun.coerce(v) for k, v in e.items()} for e in data["entries"]])
    return ZMatrixOperator(data["kind"], m, data.get("family", ""), data.get("chart", ""),
                           dict(data.get("bindings", {})), RatFun.coerce(data.get("twist", "0")))


# --------------------------------------------------------------------------- charts

@dataclass(frozen=True)
class ChartState:
    """A point of a chart: generators (q, a, t) and parameters.

    Parameters are ``(theta0, thetainf)`` for D6 and ``(theta,)`` for D7.
    Values are exact (RatFun or anything coercible) or Python complex numbers.
    """

    family: str
    chart: str
    q: object
    a: object
    t: object
    params: tuple

    def __post_init__(self):
        if self.family not in CHARTS:
            raise ValueError(f"unknown family {self.family!r}")
        if self.chart not in CHARTS[self.family]:
            raise ValueError(f"chart {self.chart!r} does not belong to {self.family}")
        if len(self.params) != (2 if self.family == D6 else 1):
            raise ValueError("D6 takes (theta0, thetainf), D7 takes (theta,)")

    @classmethod
    def symbolic(cls, family: str, chart: str | None = None) -> "ChartState":
        q, a, t = symbols("q a t")
        params = symbols("theta0 thetainf") if family == D6 else symbols("theta")
        return cls(family, chart or CHARTS[family][0], q, a, t, tuple(params))

    @property
    def exact(self) -> bool:
        return all(_is_exact(v) for v in (self.q, self.a, self.t, *self.params))

    def with_values(self, **changes) -> "ChartState":
        data = dict(family=self.family, chart=self.chart, q=self.q, a=self.a, t=self.t,
                    params=self.params)
        data.update(changes)
        return ChartState(**data)

    def exact_values(self) -> "ChartState":
        return self.with_values(q=RatFun.coerce(self.q), a=RatFun.coerce(self.a),
                                t=RatFun.coerce(self.t),
                                params=tuple(RatFun.coerce(p) for p in self.params))

    def bindings(self) -> dict[str, str]:
        names = ("theta0", "thetainf") if self.family == D6 else ("theta",)
        out = {"q": str(self.q), "a": str(self.a), "t": str(self.t)}
        out.update({n: str(v) for n, v in zip(names, self.params)})
        return out


def _is_exact(v) -> bool:
    if isinstance(v, (RatFun, GaussRat, int, Fraction)):
        return True
    if isinstance(v, complex):
        return False
    try:
        RatFun.coerce(v)
        return True
    except TypeError:
        return False


def _is_zero(v) -> bool:
    if isinstance(v, RatFun):
        return v.is_zero()
    return v == 0


def dependent_entries(s: ChartState) -> dict[str, object]:
    """All matrix coefficients of the chart's standard form, as functions of the generators.

    Works for exact values (RatFun arithmetic) and for complex numbers alike.
    """
    if _is_zero(s.q):
        raise ChartDomainError("q = 0 is outside the principal charts")
    q, a, t = s.q, s.a, s.t
    if s.exact:
        q, a, t = (RatFun.coerce(v) for v in (q, a, t))
        params = tuple(RatFun.coerce(p) for p in s.params)
    else:
        params = s.params
    half, quarter = Fraction(1, 2), Fraction(1, 4)
    if not s.exact:
        half, quarter = 0.5, 0.25
    if s.family == D6:
        th0, thi = params
        if s.chart == "ST1":
            bm2 = (a * a - t * t * quarter) / q
            return {"a-1": a, "b1": t * t * quarter, "b0": q * t * t * quarter + t * thi * half,
                    "b-2": bm2, "b-1": (bm2 - a - t * (th0 * half - half)) / q,
                    "c1": 1, "c0": -q}
        # ST0: lower-left c1*z + 1 with c1 = -1/q, H-part a*z
        core = a * a - t * t * quarter
        return {"a1": a, "b-2": t * t * quarter, "b-1": t * (th0 - 1) * half + t * t * quarter / q,
                "b0": q * q * core - t * thi * q * half, "b1": q * core,
                "c1": -1 / q, "c0": 1}
    (th,) = params
    core = a * a - t * t * quarter
    if s.chart == "C0":
        return {"a-1": a, "b1": 1, "b2": 0, "b0": -t * th / (2 * q) + core / (q * q),
                "b-1": core / q, "c0": 1, "c-1": -q}
    # CM1: lower-left z^-1 + c0 with c0 = -1/q, H-part a*z
    return {"a1": a, "b-1": t * t * quarter, "b0": t * th * half + t * t * quarter / q,
            "b1": -q * (1 - a - q * a * a), "b2": q * a * a, "c-1": 1, "c0": -1 / q}


def build_operator(s: ChartState) -> ZMatrixOperator:
    """``z d/dz + A`` for an exact chart state."""
    if not s.exact:
        raise TypeError("build_operator needs exact generator values; use dependent_entries "
                        "for floating-point states")
    e = dependent_entries(s)
    hpart = {k[1:]: v for k, v in e.items() if k.startswith("a")}
    b = {int(k[1:]): v for k, v in e.items() if k.startswith("b")}
    c = {int(k[1:]): v for k, v in e.items() if k.startswith("c")}
    h = {int(k): v for k, v in hpart.items()}
    m = LaurentMatrix([h, b, c, {k: -v for k, v in h.items()}])
    return ZMatrixOperator("lax", m, s.family, s.chart, s.bindings())


# --------------------------------------------------------------------------- flows

def _param_names(family: str) -> tuple[str, ...]:
    return ("theta0", "thetainf") if family == D6 else ("theta",)


def _residual_matrix(A: LaurentMatrix, B: LaurentMatrix, D: DerivationSpec) -> LaurentMatrix:
    return A.map(D) - B.zdz() - A.commutator(B)


def commutation_residual(L: ZMatrixOperator, Bop: ZMatrixOperator, D: DerivationSpec) -> LaurentMatrix:
    """``D(A) - z d/dz(B) - [A, B]``; zero exactly when the pair commutes.

    This is the coefficient form of ``[z d/dz + A, d/dt + B] = 0``.
    """
    if L.kind != "lax" or Bop.kind != "deformation":
        raise ValueError("expected a lax operator and a deformation operator")
    if L.family and Bop.family and L.family != Bop.family:
        raise ValueError("operators belong to different families")
    D = D if "z" in D.covered() else D.with_constants("z")
    return _residual_matrix(L.full, Bop.matrix, D)


@dataclass(frozen=True)
class FlowResult:
    flow: DerivationSpec
    B: ZMatrixOperator


DEFAULT_WINDOWS = {D6: (-2, 1), D7: (-1, 2)}


def _equations(M: LaurentMatrix) -> list[RatFun]:
    return [v for e in M.entries for v in e.values()]


def derive_isomonodromy_flow(family: str, window: tuple[int, int] | None = None,
                             chart: str | None = None) -> FlowResult:
    """Solve the commutation equations for B and the flow (q', a')."""
    s = ChartState.symbolic(family, chart)
    return derive_flow_for_operator(build_operator(s), window or DEFAULT_WINDOWS[family],
                                    _param_names(family))


def derive_flow_for_operator(L: ZMatrixOperator, window: tuple[int, int],
                             constants: Iterable[str] = (),
                             dependent: Sequence[str] = ("q", "a")) -> FlowResult:
    """Deformation ansatz over ``window`` for an arbitrary lax operator.

    The generators in ``dependent`` get unknown derivatives; everything in
    ``constants`` (and z) is constant in t.
    """
    lo, hi = window

    def tag(k: int) -> str:
        return f"{'m' if k < 0 else ''}{abs(k)}"

    parts = {p: {k: RatFun.symbol(f"B{p}_{tag(k)}") for k in range(lo, hi + 1)}
             for p in ("H", "E1", "E2")}
    bh, b1, b2 = parts["H"], parts["E1"], parts["E2"]
    B = LaurentMatrix([bh, b1, b2, {k: -v for k, v in bh.items()}])
    dots = {g: RatFun.symbol(f"{g}dot") for g in dependent}
    D = DerivationSpec("t", dots, frozenset({"z", *constants}))
    R = _residual_matrix(L.full, B, D)
    unknowns = [str(v) for d in (bh, b1, b2) for v in d.values()] + [str(v) for v in dots.values()]
    sol = solve_linear(unknowns, _equations(R))
    if not sol.consistent:
        raise DerivationFailure(f"commutation equations are inconsistent for window {lo}..{hi}",
                                system=_equations(R))
    if sol.kind != "unique":
        raise DerivationFailure(f"commutation equations leave {sol.free} undetermined",
                                system=_equations(R))
    val = sol.particular
    flow = DerivationSpec("t", {g: val[f"{g}dot"] for g in dependent},
                          frozenset({"z", *constants}))
    Bsol = B.substitute({k: v for k, v in val.items() if not k.endswith("dot")})
    return FlowResult(flow, ZMatrixOperator("deformation", Bsol, L.family, L.chart, L.bindings))


def published_flow(family: str) -> DerivationSpec:
    """The first-order systems in closed form (used as the comparison target)."""
    q, a, t = symbols("q a t")
    if family == D7:
        (th,) = symbols("theta")
        images = {"q": (q + 2 * a) / t,
                  "a": (-t ** 2 - th * t * q + 4 * a ** 2 + 2 * q * a + 2 * q ** 3) / (2 * t * q)}
    else:
        th0, thi = symbols("theta0 thetainf")
        images = {"q": (4 * a - q) / t,
                  "a": (4 * a ** 2 - t ** 2 + q * (t - a - t * th0) + q ** 3 * t * thi
                        + q ** 4 * t ** 2) / (t * q)}
    return DerivationSpec("t", images, frozenset({"z", *_param_names(family)}))


def second_order_rhs(family: str, q: RatFun, qp: RatFun, t: RatFun, params) -> RatFun:
    """Right-hand side of the PIII equation q'' = F(t, q, q')."""
    if family == D7:
        (th,) = params
        return qp ** 2 / q - qp / t - th / t + 2 * q ** 2 / t ** 2 - 1 / q
    th0, thi = params
    return (qp ** 2 / q - qp / t - 4 * (th0 - 1) / t + 4 * thi * q ** 2 / t
            + 4 * q ** 3 - 4 / q)


def a_from_derivative(family: str, q, qp, t):
    """The chart generator a recovered from q and q'."""
    return (t * qp - q) / 2 if family == D7 else (t * qp + q) / 4


def reduce_to_second_order(flow: DerivationSpec, family: str) -> RatFun:
    """``q'' - F(t, q, q')`` with ``a`` eliminated; zero for the isomonodromy flows."""
    q, a, t, qp = symbols("q a t qp")
    q1 = flow(q)
    q2 = flow(q1)
    params = symbols(" ".join(_param_names(family)))
    elim = {"a": a_from_derivative(family, q, qp, t)}
    return substitute(q2, elim) - second_order_rhs(family, q, qp, t, params)


def swapped_inverse_equation_check(flow: DerivationSpec | None = None, swapped: bool = True) -> RatFun:
    """Residual of Q = 1/q against PIII(D6) with (theta0 - 1) and thetainf interchanged."""
    flow = flow or published_flow(D6)
    q, t = symbols("q t")
    th0, thi = symbols("theta0 thetainf")
    Q = 1 / q
    Q1 = flow(Q)
    Q2 = flow(Q1)
    params = (thi + 1, th0 - 1) if swapped else (th0, thi)
    return Q2 - second_order_rhs(D6, Q, Q1, t, params)


# --------------------------------------------------------------------------- gauge

@dataclass(frozen=True)
class GaugeShape:
    """Window of z-exponents for T plus structural zeros ``(k, i, j)``.

    ``singular`` lists exponents k whose coefficient matrix must have zero
    determinant; being nonlinear it is checked on the solution, not imposed.
    """

    window: tuple[int, int]
    zeros: frozenset = frozenset()
    singular: frozenset = frozenset()

    def __post_init__(self):
        if self.window[0] > self.window[1]:
            raise ValueError("empty gauge window")


def _tname(k: int, i: int, j: int) -> str:
    return f"T{i + 1}{j + 1}_{'m' if k < 0 else ''}{abs(k)}"


def gauge_solve(L: ZMatrixOperator, Ltilde: ZMatrixOperator, shape: GaugeShape) -> LaurentMatrix | None:
    """A matrix T with (z d/dz + A) T = T (z d/dz + Ã), or None.

    Among solutions, T is normalized so that its first nonzero coefficient, scanning
    exponents upwards and entries row-major, equals 1.  det T must be a nonzero
    multiple of a single power of z.
    """
    lo, hi = shape.window
    ents: list[dict[int, RatFun]] = [{}, {}, {}, {}]
    unknowns = []
    for k in range(lo, hi + 1):
        for i in range(2):
            for j in range(2):
                if (k, i, j) in shape.zeros:
                    continue
                name = _tname(k, i, j)
                unknowns.append(name)
                ents[2 * i + j][k] = RatFun.symbol(name)
    T = LaurentMatrix(ents)
    R = T.zdz() + L.full * T - T * Ltilde.full
    sol = solve_linear(unknowns, _equations(R))
    if not sol.consistent or not sol.basis:
        return None
    candidates = list(sol.basis)
    if len(candidates) > 1:
        total = {u: sum((vec[u] for vec in candidates), RatFun.constant(0)) for u in unknowns}
        candidates.append(total)
    for vec in candidates:
        first = next((vec[u] for u in unknowns if not vec[u].is_zero()), None)
        if first is None:
            continue
        scaled = {u: v / first for u, v in vec.items()}
        Tsol = T.substitute(scaled)
        if _gauge_ok(Tsol, shape):
            return Tsol
    return None


def _gauge_ok(T: LaurentMatrix, shape: GaugeShape) -> bool:
    det = T.det()
    if len(det) != 1:
        return False
    for k in shape.singular:
        a, b, c, d = T.coefficient(k)
        if not (a * d - b * c).is_zero():
            return False
    return True


def gauge_identity(T: LaurentMatrix, L: ZMatrixOperator, Ltilde: ZMatrixOperator) -> LaurentMatrix:
    """``z d/dz(T) + A T - T Ã``; zero for a valid gauge matrix."""
    return T.zdz() + L.full * T - T * Ltilde.full


# --------------------------------------------------------------------------- charts

TRANSFER_SHAPES = {
    D6: GaugeShape((-1, 0), frozenset({(-1, 0, 0), (-1, 1, 0), (-1, 1, 1), (0, 1, 0)})),
    D7: GaugeShape((0, 1), frozenset({(1, 0, 0), (1, 1, 0), (1, 1, 1), (0, 1, 0)})),
}


def chart_transfer(s: ChartState, target: str, certify: bool = True) -> ChartState:
    """Express the same connection on the other chart of the family.

    On both families the gluing keeps q and rescales the H-coefficient by q^2.
    For exact states the result is certified by solving for the bundle
    automorphism relating the two operators.
    """
    if target not in CHARTS[s.family]:
        raise ValueError(f"unknown chart {target!r} for {s.family}")
    if target == s.chart:
        return s
    if _is_zero(s.q):
        raise ChartDomainError("the state has c0 = 0 (q = 0) and lies outside the chart overlap")
    principal = CHARTS[s.family][0]
    a = s.a / (s.q * s.q) if s.chart == principal else s.a * s.q * s.q
    out = s.with_values(chart=target, a=a)
    if certify and s.exact:
        out = out.exact_values()
        T = gauge_solve(build_operator(s.exact_values()), build_operator(out),
                        TRANSFER_SHAPES[s.family])
        if T is None:
            raise ChartDomainError("no bundle automorphism relates the two chart operators")
    return out


def transfer_gauge(s: ChartState, target: str) -> LaurentMatrix:
    """The certifying automorphism of :func:`chart_transfer` (exact states only)."""
    out = chart_transfer(s, target, certify=False).exact_values()
    T = gauge_solve(build_operator(s.exact_values()), build_operator(out), TRANSFER_SHAPES[s.family])
    if T is None:
        raise ChartDomainError("no bundle automorphism relates the two chart operators")
    return T
