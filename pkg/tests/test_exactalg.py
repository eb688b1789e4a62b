"""Exact rational-function arithmetic, derivations and linear solving.

Oracle tags: [TRIVIAL] direct assertions, [DERIVED] checked against an
independent computation (sympy or a numerically integrated trajectory).
"""

import random
from fractions import Fraction

import numpy as np
import pytest
import sympy

from painleve3.exactalg import (
    DerivationSpec, GaussRat, I, NonlinearError, ParseError, RatFun, apply_derivation,
    normalize, parse, parse_gaussrat, solve_linear, substitute, symbols,
)

q, a, t, th0, thi = symbols("q a t theta0 thetainf")


def _random_ratfun(rng: random.Random, names=("q", "t", "a"), terms=3, deg=2) -> RatFun:
    def poly():
        out = RatFun(0)
        for _ in range(terms):
            c = GaussRat(Fraction(rng.randint(-5, 5), rng.randint(1, 4)), rng.randint(-2, 2))
            m = RatFun(c)
            for n in names:
                m = m * RatFun.symbol(n) ** rng.randint(0, deg)
            out = out + m
        return out

    den = poly()
    while den.is_zero():
        den = poly()
    return poly() / den


# ------------------------------------------------------------------ GaussRat

def test_gaussrat_lowest_terms_and_exactness():
    """[TRIVIAL] Components are reduced; (x + y) - y == x."""
    x = GaussRat(Fraction(4, 6), Fraction(-3, 9))
    assert x.re == Fraction(2, 3) and x.im == Fraction(-1, 3)
    y = GaussRat(Fraction(1, 7), 5)
    assert (x + y) - y == x
    assert I * I == -1
    assert GaussRat(1, 2) * GaussRat(1, 2).inverse() == 1


def test_gaussrat_print_parse_round_trip():
    """[TRIVIAL] parse(print(x)) == x for a spread of values."""
    rng = random.Random(3)
    for _ in range(200):
        x = GaussRat(Fraction(rng.randint(-50, 50), rng.randint(1, 30)),
                     Fraction(rng.randint(-50, 50), rng.randint(1, 30)))
        assert parse_gaussrat(str(x)) == x


# ------------------------------------------------------------------ normalize

def test_normalize_common_factor():
    """[TRIVIAL] (q^2 - 1)/(q - 1) -> q + 1 and (t/q)(q/t) -> 1."""
    assert normalize((q ** 2 - 1) / (q - 1)) == q + 1
    assert str(normalize((t / q) * (q / t))) == "1"


def test_normalize_b1_denominator_factor():
    """[DERIVED] sympy.cancel oracle on the quotient of a difference of squares."""
    u = 2 * a - t - th0 * q
    f = (u ** 2 - t ** 2 * q ** 4) / (u + t * q ** 2)
    assert normalize(f) == u - t * q ** 2
    sq, sa, st, s0 = sympy.symbols("q a t theta0")
    su = 2 * sa - st - s0 * sq
    expected = sympy.cancel((su ** 2 - st ** 2 * sq ** 4) / (su + st * sq ** 2))
    assert normalize(f) == parse(str(sympy.expand(expected)).replace("**", "^"))


def test_normalize_idempotent_and_canonical_denominator():
    """[TRIVIAL] Idempotence; monic denominator; zero iff numerator zero."""
    rng = random.Random(5)
    for _ in range(100):
        f = _random_ratfun(rng)
        assert normalize(normalize(f)) == normalize(f)
        assert str(normalize(f)) == str(f)
        if not f.is_zero():
            lead = max(f.den.terms())
            assert f.den.terms()[lead] == 1 or f.den.terms()[lead].re > 0
    assert normalize(q - q).is_zero()


def test_division_by_zero_rational_function():
    """[TRIVIAL] Inverting zero raises."""
    with pytest.raises(ZeroDivisionError, match="division by zero rational function"):
        q / (q - q)


def test_field_axioms_randomized():
    """[TRIVIAL] Associativity, distributivity and inverses on 1000 random triples."""
    rng = random.Random(11)
    for _ in range(1000):
        f, g, h = (_random_ratfun(rng, terms=2, deg=1) for _ in range(3))
        assert (f + g) + h == f + (g + h)
        assert (f * g) * h == f * (g * h)
        assert f * (g + h) == f * g + f * h
        if not f.is_zero():
            assert f * f.inverse() == 1


def test_cross_multiplication_agrees_with_canonical_equality():
    """[TRIVIAL] Both equality tests agree on equal and unequal pairs."""
    rng = random.Random(13)
    for _ in range(100):
        f, g = _random_ratfun(rng), _random_ratfun(rng)
        same = (f * g) / g if not g.is_zero() else f
        assert same.equals_by_cross_multiplication(f) and same == f
        assert (f == g) == f.equals_by_cross_multiplication(g)


def _to_sympy(f: RatFun):
    return sympy.sympify(str(f).replace("^", "**").replace("i", "I"))


def test_random_values_match_sympy():
    """[DERIVED] sympy oracle: composite expressions agree at random exact points."""
    rng = random.Random(17)
    for _ in range(20):
        f, g = _random_ratfun(rng), _random_ratfun(rng)
        sf, sg = _to_sympy(f), _to_sympy(g)
        for ours, theirs in ((f * g, sf * sg), (f + g, sf + sg), (f - g / (f + 1), sf - sg / (sf + 1))):
            for _ in range(3):
                pt = {n: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for n in "qta"}
                try:
                    mine = substitute(ours, pt).to_gaussrat()
                except ZeroDivisionError:
                    continue
                ref = sympy.nsimplify(theirs.subs({sympy.Symbol(n): sympy.Rational(v.numerator, v.denominator)
                                                   for n, v in pt.items()}))
                re, im = ref.as_real_imag()
                assert mine == GaussRat(Fraction(str(re)), Fraction(str(im)))


# ------------------------------------------------------------------ substitute

def test_substitute_polynomial():
    """[TRIVIAL] q^2 with q -> t + 1."""
    assert substitute(q ** 2, {"q": t + 1}) == t ** 2 + 2 * t + 1


def test_substitute_pole_raises():
    """[TRIVIAL] 1/q at q = 0 names the vanishing factor."""
    with pytest.raises(ZeroDivisionError, match="q"):
        substitute(1 / q, {"q": 0})


def test_substitute_rejects_inexact_binding():
    """[TRIVIAL] Transcendental or floating values are not ring elements."""
    alpha, beta = symbols("alpha beta")
    with pytest.raises(TypeError):
        substitute(alpha + beta, {"alpha": np.exp(1j * np.pi * 0.3)})


def test_substitute_is_homomorphic():
    """[TRIVIAL] Substitution commutes with + and *."""
    rng = random.Random(19)
    for _ in range(50):
        f, g = _random_ratfun(rng), _random_ratfun(rng)
        b = {"q": _random_ratfun(rng, ("t",)), "a": t + 2}
        try:
            lhs_sum, lhs_prod = substitute(f + g, b), substitute(f * g, b)
            fs, gs = substitute(f, b), substitute(g, b)
        except ZeroDivisionError:
            continue
        assert lhs_sum == fs + gs
        assert lhs_prod == fs * gs


# ------------------------------------------------------------------ derivations

D6_FLOW = DerivationSpec("t", {"q": (4 * a - q) / t, "a": RatFun.symbol("A")},
                         frozenset({"theta0", "thetainf", "A"}))


def test_chain_rule_d6():
    """[TRIVIAL] D(q^2) = 2q(4a - q)/t."""
    assert apply_derivation(D6_FLOW, q ** 2) == 2 * q * (4 * a - q) / t


def test_chain_rule_d7():
    """[TRIVIAL] D(t q) = q + (q + 2a) under q' = (q + 2a)/t."""
    D = DerivationSpec("t", {"q": (q + 2 * a) / t, "a": 0})
    assert D(t * q) == q + (q + 2 * a)


def test_constants_and_uncovered():
    """[TRIVIAL] Constants differentiate to zero; uncovered names raise."""
    assert D6_FLOW(th0 * thi).is_zero()
    with pytest.raises(ValueError, match="lam"):
        D6_FLOW(RatFun.symbol("lam"))


def test_leibniz_and_quotient_rules():
    """[TRIVIAL] Product and quotient rules on random inputs."""
    rng = random.Random(23)
    for _ in range(100):
        f, g = _random_ratfun(rng), _random_ratfun(rng)
        D = D6_FLOW
        assert D(f * g) == D(f) * g + f * D(g)
        if not g.is_zero():
            assert D(f / g) == (D(f) * g - f * D(g)) / g ** 2


def test_derivation_matches_integrated_trajectory():
    """[DERIVED] q' = (4a - q)/t against finite differences of a numerical solution."""
    from painleve3.numflow import PathSpec, integrate

    tr = integrate("D6", (Fraction(1, 3), Fraction(1, 5)), (0, 0.7 + 0.1j, 0.3 - 0.2j),
                   PathSpec.line(1, 1.5, 401))
    A = tr.arrays()
    qp_formula = ((4 * a - q) / t).evaluate({"q": A["q"], "a": A["a"], "t": A["t"]})
    h = A["t"][1] - A["t"][0]
    qp_fd = (A["q"][2:] - A["q"][:-2]) / (2 * h)
    assert np.abs(qp_fd - qp_formula[1:-1]).max() < 1e-5
    # fourth-order stencil for the 1e-8 level
    qp4 = (-A["q"][4:] + 8 * A["q"][3:-1] - 8 * A["q"][1:-3] + A["q"][:-4]) / (12 * h)
    assert np.abs(qp4 - qp_formula[2:-2]).max() < 1e-8


# ------------------------------------------------------------------ linear solving

def test_solve_single_and_pair():
    """[TRIVIAL] x = q; x = 1, y = 0."""
    s = solve_linear(["x"], [RatFun.symbol("x") - q])
    assert s.kind == "unique" and s.particular["x"] == q
    s = solve_linear(["x", "y"], ["x + y - 1", "x - y - 1"])
    assert s.particular == {"x": RatFun(1), "y": RatFun(0)}


def test_solve_family_and_inconsistent():
    """[TRIVIAL] Underdetermined gives a basis; contradictory gives 'inconsistent'."""
    s = solve_linear(["x", "y"], ["x + y - 1"])
    assert s.kind == "family" and len(s.basis) == 1
    g = s.general()
    assert (g["x"] + g["y"] - 1).is_zero()
    assert solve_linear(["x", "y"], ["x + y - 1", "x + y - 2"]).kind == "inconsistent"


def test_solve_rejects_nonlinear():
    """[TRIVIAL] x^2 is not linear in x."""
    with pytest.raises(NonlinearError):
        solve_linear(["x"], [RatFun.symbol("x") ** 2 - 1])


def test_solve_back_substitution_over_function_field():
    """[TRIVIAL] Random systems with polynomial coefficients back-substitute to zero."""
    rng = random.Random(29)
    names = ["u1", "u2", "u3"]
    for _ in range(20):
        eqs = []
        for _ in range(3):
            e = _random_ratfun(rng, ("q", "t"), 2, 1).num.as_ratfun()
            for n in names:
                e = e + _random_ratfun(rng, ("q", "t"), 2, 1).num.as_ratfun() * RatFun.symbol(n)
            eqs.append(e)
        s = solve_linear(names, eqs)
        if not s.consistent:
            continue
        sol = s.general()
        for e in eqs:
            assert substitute(e, sol).is_zero()


def test_parse_errors():
    """[TRIVIAL] Malformed expressions raise ParseError."""
    for bad in ("q +", "(q", "q ^ x", "2 ** "):
        with pytest.raises(ParseError):
            parse(bad)


def test_parse_print_round_trip_expressions():
    """[TRIVIAL] Canonical printing re-parses to the same value."""
    rng = random.Random(31)
    for _ in range(100):
        f = _random_ratfun(rng)
        assert parse(str(f)) == f
