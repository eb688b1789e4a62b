"""Special solutions: algebraic D7 solutions, constant D6 solutions, reducible
families, Riccati reductions and Frobenius series for Bessel-type equations.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .backlund import BacklundWord, apply_state
from .exactalg import DerivationSpec, GaussRat, RatFun, solve_linear, substitute, symbols
from .laxops import (D6, D7, ChartState, LaurentMatrix, ZMatrixOperator, derive_flow_for_operator,
                     second_order_rhs)
from .numflow import PathSpec, Trajectory, integrate

SIGNS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def _rf(x) -> RatFun:
    return RatFun.coerce(x)


def _constant_value(x) -> GaussRat | None:
    """The exact constant behind ``x``, or None when x is symbolic."""
    r = _rf(x)
    return r.to_gaussrat() if r.is_constant() else None


def _rational(x) -> Fraction | None:
    g = _constant_value(x)
    if g is None or g.im != 0:
        return None
    return Fraction(g.re)


# --------------------------------------------------------------------------- curve reduction

def reduce_on_curve(f: RatFun, var: str = "t", power: int = 2, replacement=None) -> RatFun:
    """Rewrite numerator and denominator of f using ``var**power = replacement``.

    With the defaults this reduces modulo the curve t^2 = 2 q^3, leaving
    numerator and denominator of degree < 2 in t.
    """
    if replacement is None:
        (q,) = symbols("q")
        replacement = 2 * q ** 3
    replacement = _rf(replacement)
    (v,) = symbols(var)

    def reduce_poly(p) -> RatFun:
        names = p.ring
        out = RatFun.constant(0)
        for exps, c in p.terms().items():
            term = RatFun.coerce(c)
            for name, e in zip(names, exps):
                if name == var:
                    k, r = divmod(e, power)
                    term = term * replacement ** k * v ** r
                elif e:
                    term = term * RatFun.symbol(name) ** e
            out = out + term
        return out

    return reduce_poly(f.num) / reduce_poly(f.den)


def zero_on_curve(f: RatFun) -> bool:
    """True iff f vanishes on t^2 = 2 q^3 (t is not a rational function of q there)."""
    return reduce_on_curve(RatFun.coerce(f).num.as_ratfun()).is_zero()


# --------------------------------------------------------------------------- D7 algebraic

@dataclass(frozen=True)
class AlgebraicFamily:
    """An algebraic D7 solution on the curve t^2 = 2 q^3 (q is the curve coordinate).

    ``q_value`` and ``a_value`` are the solution's generators as functions of
    the curve point (q, t); ``entries`` are the chart coefficients for the
    base family (theta = 0).
    """

    theta: int
    q_value: RatFun
    a_value: RatFun
    entries: dict
    checks: dict

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {"theta": self.theta, "relation": "t^2 = 2*q^3", "q": str(self.q_value),
                "a": str(self.a_value), "entries": {k: str(v) for k, v in self.entries.items()},
                "checks": dict(self.checks), "pass": self.passed}


def curve_derivation() -> DerivationSpec:
    """d/dt along t^2 = 2 q^3, i.e. q' = t / (3 q^2)."""
    q, t = symbols("q t")
    return DerivationSpec("t", {"q": t / (3 * q ** 2)}, frozenset({"z"}))


def _flow_on_curve(qv: RatFun, av: RatFun, theta: int) -> tuple[bool, bool]:
    """Does (qv, av) satisfy the D7 first-order system along the curve?"""
    (t,) = symbols("t")
    D = curve_derivation()
    th = RatFun.coerce(theta)
    q_flow = (qv + 2 * av) / t
    a_flow = (-t ** 2 - th * t * qv + 4 * av ** 2 + 2 * qv * av + 2 * qv ** 3) / (2 * t * qv)
    return zero_on_curve(D(qv) - q_flow), zero_on_curve(D(av) - a_flow)


@lru_cache(maxsize=None)
def d7_algebraic_family(theta: int = 0) -> AlgebraicFamily:
    """The algebraic D7 solution for an integer parameter.

    theta = 0 is the family q^3 = t^2/2 with a = -q/6; other integers are
    reached with the word s2+ s1+ (theta -> theta + 1) or its inverse.
    """
    if isinstance(theta, bool) or int(theta) != theta:
        raise ValueError("algebraic D7 solutions are built for integer theta only")
    theta = int(theta)
    q, t = symbols("q t")
    a = -q / 6
    core = a * a - t * t / 4
    entries = {"a-1": a, "b1": RatFun.constant(1),
               "b0": reduce_on_curve(core / (q * q)), "b-1": reduce_on_curve(core / q),
               "c0": RatFun.constant(1), "c-1": -q}
    checks = {
        "a = (t q' - q)/2 on the curve": zero_on_curve((t * curve_derivation()(q) - q) / 2 - a),
        "b0 = 1/36 - q/2": zero_on_curve(entries["b0"] - (Fraction(1, 36) - q / 2)),
        "b-1 = q (1/36 - q/2)": zero_on_curve(entries["b-1"] - q * (Fraction(1, 36) - q / 2)),
    }
    qv, av = q, a
    if theta:
        step = BacklundWord.parse("s2+ s1+", D7)
        if theta < 0:
            step = step.inverse()
        state = ChartState(D7, "C0", q, a, t, (RatFun.constant(0),))
        for _ in range(abs(theta)):
            state = apply_state(step, state)
            state = state.with_values(q=reduce_on_curve(state.q), a=reduce_on_curve(state.a))
        if _rf(state.t) != t:
            raise ArithmeticError("the word moved t; expected a pure parameter shift")
        if _rational(state.params[0]) != theta:
            raise ArithmeticError("unexpected parameter after the word")
        qv, av = state.q, state.a
    okq, oka = _flow_on_curve(qv, av, theta)
    checks["q' = (q + 2a)/t"] = okq
    checks["a' from the D7 system"] = oka
    return AlgebraicFamily(theta, qv, av, entries, checks)


def algebraic_branch(t_tilde, branch: int = 0) -> complex:
    """q_j(t~) = exp(2 pi i j / 3) exp(2 t~ / 3) / 2^(1/3)."""
    return cmath.exp(2j * cmath.pi * branch / 3) * cmath.exp(2 * t_tilde / 3) / 2 ** (1 / 3)


def algebraic_trajectory(path: PathSpec, branch: int = 0, **kw) -> Trajectory:
    """Integrate the theta = 0 algebraic solution along ``path`` (t~ branch of its start)."""
    start = path.start()
    tt0 = complex(np.log(start)) if path.plane == "t" else start
    q0 = algebraic_branch(tt0, branch)
    return integrate(D7, (RatFun.constant(0),), (tt0, q0, -q0 / 6), path, **kw)


# --------------------------------------------------------------------------- D6 constants

def d6_constant_solutions(theta0, thetainf) -> list[GaussRat]:
    """Constant solutions of PIII(D6): q^4 = 1 together with thetainf q^2 = theta0 - 1."""
    th0, thi = _rf(theta0), _rf(thetainf)
    out = []
    for c in (GaussRat(1), GaussRat(-1), GaussRat(0, 1), GaussRat(0, -1)):
        if (thi * RatFun.coerce(c * c) - (th0 - 1)).is_zero():
            out.append(c)
    return out


def constant_trajectory(theta0, thetainf, value, path: PathSpec, **kw) -> Trajectory:
    """Integrate from the constant solution q = value (a = q/4)."""
    if value not in d6_constant_solutions(theta0, thetainf):
        raise ValueError(f"q = {value} is not a constant solution for these parameters")
    start = path.start()
    tt0 = complex(np.log(start)) if path.plane == "t" else start
    v = complex(value)
    return integrate(D6, (_rf(theta0), _rf(thetainf)), (tt0, v, v / 4), path, **kw)


# --------------------------------------------------------------------------- reducible families

def reducible_presence(theta0, thetainf) -> list[tuple[int, int]]:
    """The (eps1, eps2) families of reducible modules present for (theta0, thetainf).

    alpha = beta iff theta0 - thetainf is an even integer, alpha = 1/beta iff
    theta0 + thetainf is; each family then needs the listed inequality.
    Floats are read as the decimals they print as.
    """
    theta0, thetainf = (Fraction(repr(x)) if isinstance(x, float) else x for x in (theta0, thetainf))
    diff = _rational(_rf(theta0) - _rf(thetainf))
    total = _rational(_rf(theta0) + _rf(thetainf))
    if (_constant_value(theta0) is None or _constant_value(thetainf) is None) and \
            diff is None and total is None:
        raise ValueError("presence needs numeric parameters (or a numeric sum or difference)")

    def even(x):
        return x is not None and x.denominator == 1 and x.numerator % 2 == 0

    out = []
    if even(diff):
        if diff >= 2:
            out.append((1, 1))
    if even(total):
        if total >= 2:
            out.append((1, -1))
        if total <= 0:
            out.append((-1, 1))
    if even(diff) and diff <= 0:
        out.append((-1, -1))
    return out


@dataclass(frozen=True)
class ReducibleStandardForm:
    """Lax operator of a reducible family: diagonal -/+ (eps1 t/z + eps2 t z)/2 -/+ d, lower-left c1 z + c0."""

    eps1: int
    eps2: int
    d: object
    c1: object = 1
    c0: object = 0

    def __post_init__(self):
        if (self.eps1, self.eps2) not in SIGNS:
            raise ValueError("eps1 and eps2 must be +1 or -1")
        if _rf(self.c1).is_zero() and _rf(self.c0).is_zero():
            raise ValueError("c = c1 z + c0 must be nonzero")

    def operator(self) -> ZMatrixOperator:
        (t,) = symbols("t")
        d = _rf(self.d)
        h = {-1: -self.eps1 * t / 2, 0: -d, 1: -self.eps2 * t / 2}
        h = {k: v for k, v in h.items() if not v.is_zero()}
        c = {k: _rf(v) for k, v in ((1, self.c1), (0, self.c0)) if not _rf(v).is_zero()}
        return ZMatrixOperator("lax", LaurentMatrix([h, {}, c, {k: -v for k, v in h.items()}]))


@dataclass(frozen=True)
class RiccatiFamily:
    """Isomonodromic reducible family: q' = rhs(q, t, d) with its PIII(D6) parameters."""

    eps1: int
    eps2: int
    rhs: RatFun
    theta0: RatFun
    thetainf: RatFun
    bessel_c: RatFun
    bessel_lambda: RatFun
    consistency_residual: RatFun

    def to_json(self) -> dict:
        return {"eps": [self.eps1, self.eps2], "rhs": str(self.rhs),
                "params": {"theta0": str(self.theta0), "thetainf": str(self.thetainf)},
                "bessel": {"c": str(self.bessel_c), "lambda": str(self.bessel_lambda)},
                "consistent": self.consistency_residual.is_zero()}


def _match_d6_params(q2_minus: RatFun) -> tuple[RatFun, RatFun]:
    """Solve for (theta0, thetainf) making the residual vanish identically in q and t."""
    num = q2_minus.num
    names = num.ring
    groups: dict[tuple[int, int], RatFun] = {}
    for exps, c in num.terms().items():
        key = tuple(exps[names.index(n)] if n in names else 0 for n in ("q", "t"))
        mono = RatFun.coerce(c)
        for n, e in zip(names, exps):
            if n not in ("q", "t") and e:
                mono = mono * RatFun.symbol(n) ** e
        groups[key] = groups.get(key, RatFun.constant(0)) + mono
    sol = solve_linear(["theta0", "thetainf"], list(groups.values()))
    if sol.kind != "unique":
        raise ArithmeticError(f"no unique PIII(D6) parameters for this family ({sol.kind})")
    return sol.particular["theta0"], sol.particular["thetainf"]


@lru_cache(maxsize=None)
def _riccati_symbolic(eps1: int, eps2: int) -> RiccatiFamily:
    q, t = symbols("q t")
    L = ReducibleStandardForm(eps1, eps2, RatFun.symbol("d"), 1, -q).operator()
    res = derive_flow_for_operator(L, (-1, 1), ("d",), ("q",))
    rhs = res.flow.images["q"]
    th0s, this = symbols("theta0 thetainf")
    q2 = res.flow(rhs)
    th0, thi = _match_d6_params(q2 - second_order_rhs(D6, q, rhs, t, (th0s, this)))
    consistency = q2 - second_order_rhs(D6, q, rhs, t, (th0, thi))
    c, lam = bessel_reduction(rhs, eps2)
    return RiccatiFamily(eps1, eps2, rhs, th0, thi, c, lam, consistency)


def riccati_isomonodromy(eps1: int, eps2: int, d=None) -> RiccatiFamily:
    """Derive the isomonodromy equation of a reducible family from the commutation equations.

    The deformation operator is B_{-1}/z + B_0 + B_1 z.  ``d`` may be left
    symbolic (None) or given as an exact value.
    """
    if (eps1, eps2) not in SIGNS:
        raise ValueError("eps1 and eps2 must be +1 or -1")
    fam = _riccati_symbolic(eps1, eps2)
    if d is None:
        return fam
    b = {"d": _rf(d)}
    return RiccatiFamily(eps1, eps2, *(substitute(v, b) for v in (
        fam.rhs, fam.theta0, fam.thetainf, fam.bessel_c, fam.bessel_lambda,
        fam.consistency_residual)))


def bessel_reduction(rhs: RatFun, eps2: int) -> tuple[RatFun, RatFun]:
    """Substitute q = (eps2/2) y'/y into q' = rhs and read off y'' + (c/t) y' + lam y = 0.

    Raises if the result is not of that linear form.
    """
    y, yp, ypp, t = symbols("y yp ypp t")
    qv = Fraction(eps2, 2) * yp / y
    dq = Fraction(eps2, 2) * (ypp / y - yp * yp / (y * y))
    lin = (dq - substitute(rhs, {"q": qv})) * y * (2 * eps2)
    c = lin.diff("yp") * t
    lam = lin.diff("y")
    if lin.diff("ypp") != RatFun.constant(1) or (lin - ypp - c / t * yp - lam * y) != 0:
        raise ArithmeticError("the substitution does not give a linear second-order equation")
    if not c.diff("t").is_zero() or not lam.diff("t").is_zero():
        raise ArithmeticError("the reduced equation is not of Bessel type")
    return c, lam


# --------------------------------------------------------------------------- Frobenius series

@dataclass(frozen=True)
class PowerSeries:
    """t^rho * (sum coeffs[k] t^k + log(t) * sum log_coeffs[k] t^k), truncated at order N."""

    rho: RatFun
    coeffs: tuple[RatFun, ...]
    N: int
    log_coeffs: tuple[RatFun, ...] | None = None

    @property
    def log_flag(self) -> bool:
        return self.log_coeffs is not None and any(not c.is_zero() for c in self.log_coeffs)

    def _numeric(self, cs) -> np.ndarray:
        return np.array([complex(c.to_gaussrat()) for c in cs])

    def __call__(self, t, derivative: int = 0):
        """Value (derivative 0, 1 or 2) at t with the principal branches of t^rho and log t."""
        t = np.asarray(t, dtype=complex)
        rho = complex(self.rho.to_gaussrat())
        out = np.zeros_like(t)
        logt = np.log(t)
        parts = [(self._numeric(self.coeffs), False)]
        if self.log_flag:
            parts.append((self._numeric(self.log_coeffs), True))
        for cs, with_log in parts:
            for k, c in enumerate(cs):
                if c == 0:
                    continue
                s = k + rho
                p = t ** s
                if not with_log:
                    fac = [1, s, s * (s - 1)][derivative]
                    out = out + c * fac * p / t ** derivative
                else:
                    # derivatives of t^s log t
                    if derivative == 0:
                        term = p * logt
                    elif derivative == 1:
                        term = (s * logt + 1) * p / t
                    else:
                        term = (s * (s - 1) * logt + 2 * s - 1) * p / t ** 2
                    out = out + c * term
        return out

    def recurrence_residual(self, c, lam) -> list[RatFun]:
        """Coefficients of t^(rho+k-2), k = 0..N, of y'' + (c/t) y' + lam y (log part included)."""
        c, lam = _rf(c), _rf(lam)
        zero = RatFun.constant(0)
        u = list(self.coeffs)
        v = list(self.log_coeffs) if self.log_coeffs is not None else [zero] * len(u)

        def P(s):
            return s * (s + c - 1)

        out = []
        for k in range(self.N + 1):
            s = self.rho + k
            uk = u[k] if k < len(u) else zero
            vk = v[k] if k < len(v) else zero
            u2 = u[k - 2] if k >= 2 else zero
            v2 = v[k - 2] if k >= 2 else zero
            plain = uk * P(s) + lam * u2 + vk * (2 * s - 1 + c)
            logpart = vk * P(s) + lam * v2
            out.extend([plain, logpart])
        return out

    def to_json(self) -> dict:
        out = {"rho": str(self.rho), "coeffs": [str(c) for c in self.coeffs], "N": self.N,
               "logFlag": self.log_flag}
        if self.log_flag:
            out["logCoeffs"] = [str(c) for c in self.log_coeffs]
        return out


def _frobenius_coeffs(rho: RatFun, c: RatFun, lam: RatFun, N: int, a0: RatFun) -> list[RatFun]:
    a = [a0, RatFun.constant(0)]
    for k in range(2, N + 1):
        s = rho + k
        a.append(-lam * a[k - 2] / (s * (s + c - 1)))
    return a[:N + 1]


def bessel_frobenius(c, lam, N: int) -> tuple[PowerSeries, PowerSeries]:
    """Two Frobenius solutions of y'' + (c/t) y' + lam y = 0 at t = 0, through order N.

    The exponents are 0 and 1 - c.  When they differ by an integer m >= 0 and
    the recurrence at the smaller exponent breaks down, the second solution
    is d/drho [(rho - rho_small) y(rho)] (or d/drho y(rho) for m = 0), which
    carries a log term.
    """
    if N < 1:
        raise ValueError("the order N must be at least 1")
    c, lam = _rf(c), _rf(lam)
    one = RatFun.constant(1)
    r0, r1 = RatFun.constant(0), 1 - c
    m = _rational(c - 1)
    if m is None or m.denominator != 1:
        # non-resonant (or symbolic) exponents
        return (PowerSeries(r0, tuple(_frobenius_coeffs(r0, c, lam, N, one)), N),
                PowerSeries(r1, tuple(_frobenius_coeffs(r1, c, lam, N, one)), N))
    m = int(m)
    hi, lo = (r0, r1) if m >= 0 else (r1, r0)
    m = abs(m)
    first = PowerSeries(hi, tuple(_frobenius_coeffs(hi, c, lam, N, one)), N)
    if m > 0:
        # try the plain recurrence at the smaller exponent; it survives when the
        # obstruction -lam * a_{m-2} vanishes (then a_m is free and set to 0)
        a = [one, RatFun.constant(0)]
        ok = True
        for k in range(2, N + 1):
            s = lo + k
            den = s * (s + c - 1)
            if den.is_zero():
                if not (lam * a[k - 2]).is_zero():
                    ok = False
                    break
                a.append(RatFun.constant(0))
            else:
                a.append(-lam * a[k - 2] / den)
        if ok:
            return first, PowerSeries(lo, tuple(a[:N + 1]), N)
    rho = RatFun.symbol("rho")
    a0 = one if m == 0 else rho - lo
    A = _frobenius_coeffs(rho, c, lam, N, a0)
    at = {"rho": lo}
    plain = tuple(substitute(x.diff("rho"), at) for x in A)
    logs = tuple(substitute(x, at) for x in A)
    return first, PowerSeries(lo, plain, N, logs)


def _series_quotient(num: Sequence[RatFun], den: Sequence[RatFun], n: int) -> list[RatFun]:
    if den[0].is_zero():
        raise ValueError("leading coefficient of the denominator vanishes")
    inv0 = den[0].inverse()
    out: list[RatFun] = []
    for k in range(n):
        acc = num[k] if k < len(num) else RatFun.constant(0)
        for j in range(1, min(k, len(den) - 1) + 1):
            acc = acc - den[j] * out[k - j]
        out.append(acc * inv0)
    return out


@dataclass(frozen=True)
class RiccatiSolution:
    """q = (eps2/2) y'/y for y = mix[0] y1 + mix[1] y2, with its formal Laurent series."""

    family: RiccatiFamily
    y: PowerSeries
    q_series: PowerSeries

    def q(self, t) -> np.ndarray:
        """q from the y series directly (converges wherever the y series does)."""
        return self.family.eps2 / 2 * self.y(t, 1) / self.y(t)

    def to_json(self) -> dict:
        return {"family": self.family.to_json(), "y": self.y.to_json(),
                "q": self.q_series.to_json()}


def riccati_solution(eps1: int, eps2: int, d, mix=(1, 0), N: int = 30) -> RiccatiSolution:
    """Riccati solution from a combination of the two Frobenius solutions.

    The q series is the exact formal quotient (eps2/2) y'/y; it needs y to be
    a single series t^rho * (power series), so the exponents of the mixed
    solutions must differ by an integer and y must carry no log term.
    """
    fam = riccati_isomonodromy(eps1, eps2, d)
    y1, y2 = bessel_frobenius(fam.bessel_c, fam.bessel_lambda, N)
    m1, m2 = _rf(mix[0]), _rf(mix[1])
    used = [(m, s) for m, s in ((m1, y1), (m2, y2)) if not m.is_zero()]
    if not used:
        raise ValueError("trivial solution: both mixing constants vanish")
    if any(s.log_flag for _, s in used):
        raise ValueError("the formal quotient is not available for a log series")
    rho = min((s.rho for _, s in used), key=lambda r: _rational(r) if _rational(r) is not None else 0)
    coeffs = [RatFun.constant(0)] * (N + 1)
    for m, s in used:
        shift = _rational(s.rho - rho)
        if shift is None or shift.denominator != 1:
            raise ValueError("mixed exponents differ by a non-integer; no single series")
        for k, cf in enumerate(s.coeffs):
            if k + int(shift) <= N:
                coeffs[k + int(shift)] = coeffs[k + int(shift)] + m * cf
    lead = next((k for k, cf in enumerate(coeffs) if not cf.is_zero()), None)
    if lead is None:
        raise ValueError("trivial solution: y vanishes to order N")
    coeffs = coeffs[lead:]
    rho = rho + lead
    y = PowerSeries(rho, tuple(coeffs), len(coeffs) - 1)
    n = len(coeffs) - 1
    # t y' / y = rho + t u'/u for y = t^rho u, so q = (eps2/2) t^-1 (rho + t u'/u)
    tu = [k * cf for k, cf in enumerate(coeffs)]
    ratio = _series_quotient(tu, coeffs, n)
    ratio[0] = ratio[0] + rho
    half = Fraction(eps2, 2)
    q_series = PowerSeries(RatFun.constant(-1), tuple(half * r for r in ratio), n - 1)
    return RiccatiSolution(fam, y, q_series)


def riccati_series_check(sol: RiccatiSolution) -> list[RatFun]:
    """Coefficients of q' - rhs for the formal q series, through its order (all zero)."""
    fam = sol.family
    qs = sol.q_series
    n = qs.N
    u = list(qs.coeffs)  # q = sum u_k t^(k-1)
    zero = RatFun.constant(0)
    q2 = [sum((u[i] * u[k - i] for i in range(k + 1)), zero) for k in range(n + 1)]
    rhs = fam.rhs
    e2 = -rhs.diff("q").diff("q") / 2  # coefficient -2 eps2 q^2 / 2 derivative -> -2 eps2
    cq = substitute(rhs.diff("q"), {"q": 0}) * RatFun.symbol("t")
    c0 = substitute(rhs, {"q": 0})
    out = []
    # powers t^(k-2): q' gives (k-1) u_k; q^2 gives q2_k; (c/t) q gives c u_k; const at k = 2
    for k in range(n + 1):
        lhs = (k - 1) * u[k]
        r = -e2 * q2[k] + cq * u[k] + (c0 if k == 2 else zero)
        out.append(lhs - r)
    return out
