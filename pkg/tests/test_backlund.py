"""Bäcklund transformations: parameter actions, state maps, verification, relations.

Oracle tags: [PAPER] published formulas, [DERIVED] independent recomputation,
[TRIVIAL] direct assertions.
"""

import random
import warnings
from fractions import Fraction

import numpy as np
import pytest

from painleve3.backlund import (
    CRITICAL_CASES, GENERATORS, BacklundWord, ParamPoint, PartialMapError, apply_state,
    compose_word, gauge_check, group_relations_check, locus_equation_residual,
    okamoto_substitution_check, param_action, published_d7_s2plus, published_s2_a,
    published_s4_a, solution_map, state_map, symbolic_params, transport_residuals,
    verify_transformation, word,
)
from painleve3.exactalg import RatFun, substitute, symbols
from painleve3.laxops import ChartState
from painleve3.numflow import PathSpec, Trajectory, residual

q, a, t = symbols("q a t")
th, th0, thi = symbols("theta theta0 thetainf")
R = RatFun.coerce


# ------------------------------------------------------------------ words and parameters

def test_word_parsing():
    """[TRIVIAL] Whitespace letters, ^-1 inverses, superscript plus and family detection."""
    w = word("s1 s2^-1 B1")
    assert w.family == "D6" and w.letters == (("s1", 1), ("s2", -1), ("B1", 1))
    assert word("s2⁺ s1+").family == "D7"
    assert str(word("s3^2")) == "s3 s3"
    with pytest.raises(ValueError):
        word("s5")
    with pytest.raises(ValueError):
        word("s1+ s2", "D6")


def test_param_action_table():
    """[PAPER] Generator rows of the parameter table."""
    P = symbolic_params("D6")
    expected = {
        "s1": (2 - th0, -thi, 2), "s2": (1 + th0, 1 + thi, 0), "s3": (th0, -thi, 1),
        "s4": (thi, th0, 0), "B1": (2 + th0, thi, 0), "B2": (th0, 2 + thi, 0),
        "B3": (th0, thi, 4),
    }
    for g, (x, y, k) in expected.items():
        Q = param_action(word(g), P)
        assert R(Q.theta0) == x and R(Q.thetainf) == y and Q.k == k
    P7 = symbolic_params("D7")
    assert R(param_action(word("s1+"), P7).theta0) == -th
    assert R(param_action(word("s2+"), P7).theta0) == 1 - th
    assert param_action(word("s2+"), P7).k == 2


def test_s4_squared_and_b1_word():
    """[PAPER] s4 s4 = id; s3 s1^-1 s4 s3 s4 acts as B1."""
    P = symbolic_params("D6")
    assert param_action(word("s4 s4"), P).same_as(P)
    assert param_action(word("s3 s1^-1 s4 s3 s4"), P).same_as(param_action(word("B1"), P))


def test_shift_arithmetic():
    """[TRIVIAL] s3^4 shifts t~ by 4 * (i pi / 2) = 2 pi i, like B3."""
    P = ParamPoint(R(0), R(0), 0, 0.25 + 0j)
    Q = param_action(word("s3 s3 s3 s3"), P)
    assert Q.k == 4 and abs(Q.t_tilde() - (0.25 + 2j * np.pi)) < 1e-15


def test_param_action_is_a_group_action():
    """[TRIVIAL] action(w1 w2) = action(w1) o action(w2) on random words up to length 8."""
    rng = random.Random(5)
    letters = [(g, e) for g in GENERATORS["D6"] for e in (1, -1)]
    P = symbolic_params("D6")
    for _ in range(200):
        w1 = BacklundWord("D6", tuple(rng.choice(letters) for _ in range(rng.randint(0, 8))))
        w2 = BacklundWord("D6", tuple(rng.choice(letters) for _ in range(rng.randint(0, 8))))
        assert param_action(w1 * w2, P).same_as(param_action(w1, param_action(w2, P)))
        assert param_action(w1 * w1.inverse(), P).same_as(P)


# ------------------------------------------------------------------ state maps

def test_published_state_formulas():
    """[PAPER] s2, s4 and s2+ q~ as displayed."""
    assert state_map("s2", "D6").q == -(t * q ** 2 - q * th0 - t + 2 * a) / (
        q * (t * q ** 2 + q * thi - t + 2 * a))
    assert state_map("s4", "D6").q == q * (-q ** 2 * t - thi * q - t + 2 * a) / (
        -q ** 2 * t - th0 * q - t + 2 * a)
    qt, _ = published_d7_s2plus()
    assert qt == -t * (th * q + 2 * a - t) / (2 * q ** 2)


def test_state_map_rejects_words():
    """[TRIVIAL] Only single generators have a base map."""
    with pytest.raises(ValueError):
        state_map("s1 s2")


def test_s1_s3_act_on_time():
    """[PAPER] s1 keeps (q, a) with t -> -t; s3 is (q, a, t) -> (-iq, -ia, it)."""
    m1 = state_map("s1", "D6")
    assert m1.q == q and m1.a == a and m1.sigma == -1
    m3 = state_map("s3", "D6")
    i = RatFun.coerce("i")
    assert m3.q == -i * q and m3.a == -i * a and m3.sigma == RatFun.coerce("-i").to_gaussrat()


def test_denominator_provenance():
    """[PAPER] Reducible-locus factors divide the s2 and s4 denominators."""
    f2 = (t * q ** 2 + q * thi - t + 2 * a).num
    f4 = (-q ** 2 * t - th0 * q - t + 2 * a).num
    d2 = state_map("s2", "D6").q.den.as_ratfun()
    d4 = state_map("s4", "D6").q.den.as_ratfun()
    assert (d2 / f2.as_ratfun()).is_polynomial()
    assert (d4 / f4.as_ratfun()).is_polynomial()


def test_b2_denominator_factorization():
    """[PAPER] Under theta0 = thetainf + 2 the B2 denominator is the product of two loci."""
    d = substitute(state_map("B2", "D6").q.den.as_ratfun(), {"theta0": thi + 2})
    f1 = 2 * a + t + thi * q + t * q ** 2
    f2 = 2 * a - t - thi * q - 2 * q + t * q ** 2
    assert d == f1 * f2 or d == -(f1 * f2)
    assert (d / f1).is_polynomial() and (d / f2).is_polynomial()


def test_s4_published_a_equals_derived():
    """[PAPER] The displayed s4 a~ equals a~ = (t D(q~) + q~)/4."""
    assert published_s4_a() == state_map("s4", "D6").a


def test_s2_published_a_is_inconsistent():
    """[DERIVED] The displayed s2 a~ fails transport; the derived a~ passes."""
    m = state_map("s2", "D6")
    assert published_s2_a() != m.a
    from painleve3.backlund import StateMap

    bad = StateMap("D6", m.q, published_s2_a(), m.k)
    target = param_action(word("s2"), symbolic_params("D6")).params()
    assert not transport_residuals(bad, target)[1].is_zero()
    assert all(r.is_zero() for r in transport_residuals(m, target))


# ------------------------------------------------------------------ verification

ALL = [("D6", g) for g in ("s1", "s2", "s3", "s4", "B1", "B2")] + [("D7", "s1+"), ("D7", "s2+")]


@pytest.mark.parametrize("family,gen", ALL)
def test_verify_transformation_passes(family, gen):
    """[PAPER] Derivation transport and gauge transport, both exact."""
    r = verify_transformation(gen, family)
    assert r.passed, r.to_json()
    names = [c.name for c in r.checks]
    assert "transport q" in names and "transport a" in names and f"gauge {gen}" in names
    ok, T = gauge_check(family, gen)
    assert ok and len(T.det()) == 1


def test_verify_control_unshifted_parameter():
    """[TRIVIAL] s2 checked against thetainf instead of 1 + thetainf fails."""
    r = verify_transformation("s2", "D6", target_params=[th0 + 1, thi])
    assert not r.passed
    assert any(c.residual != "0" for c in r.checks)


def test_composite_d7_map():
    """[PAPER] s2+ s1+ maps q to t(theta q - 2a + t)/(2q^2) at parameter 1 + theta."""
    m = compose_word(word("s2+ s1+"))
    assert m.q == t * (th * q - 2 * a + t) / (2 * q ** 2)
    assert m.sigma == 1
    assert R(param_action(word("s2+ s1+"), symbolic_params("D7")).theta0) == 1 + th
    assert verify_transformation("s2+ s1+", "D7").passed


def test_report_json_schema():
    """[TRIVIAL] {word, paramAction, pass, checks: [{name, pass, residual}]}."""
    data = verify_transformation("s4", "D6").to_json()
    assert set(data) == {"word", "paramAction", "pass", "checks"}
    assert all(set(c) == {"name", "pass", "residual"} for c in data["checks"])


@pytest.mark.parametrize("family,gen", [("D6", g) for g in GENERATORS["D6"]]
                         + [("D7", g) for g in GENERATORS["D7"]])
def test_inverse_letters_on_exact_states(family, gen):
    """[TRIVIAL] g g^-1 and g^-1 g fix a generic exact state."""
    if family == "D6":
        s = ChartState("D6", "ST1", R("3/7"), R("2/5+i/3"), R("5/3"), (R("1/3"), R("2/11")))
    else:
        s = ChartState("D7", "C0", R("3/7"), R("2/5"), R("5/3"), (R("1/3"),))
    for w in (f"{gen} {gen}^-1", f"{gen}^-1 {gen}"):
        out = apply_state(w, s)
        assert (out.q, out.a, out.t) == (s.q, s.a, s.t)
        assert tuple(map(R, out.params)) == tuple(map(R, s.params))


def test_group_relations_on_states():
    """[PAPER] B1 and B2 words agree with their defining words on an exact state."""
    s = ChartState("D6", "ST1", R("3/7"), R("2/5+i/3"), R("5/3"), (R("1/3"), R("2/11")))
    for lhs, rhs in (("B1", "s3 s1^-1 s4 s3 s4"), ("B2", "B1^-1 s2 s2")):
        u, v = apply_state(lhs, s), apply_state(rhs, s)
        assert (u.q, u.a, u.t) == (v.q, v.a, v.t)


def test_group_relations_check():
    """[PAPER] All listed relations hold at the level of parameter actions."""
    rel = group_relations_check()
    assert rel and all(rel.values()), rel


def test_apply_state_excluded_locus():
    """[TRIVIAL] s2 at q = 0 or on its reducible locus without the parameter relation raises."""
    th0v, thiv = R("1/3"), R("1/5")
    qv, tv = R(2), R(3)
    loc = (tv - tv * qv ** 2 - qv * thiv) / 2
    s = ChartState("D6", "ST1", qv, loc, tv, (th0v, thiv))
    with pytest.raises(PartialMapError):
        apply_state("s2", s)


# ------------------------------------------------------------------ critical loci

def _case(gen, rel):
    return next(c for c in CRITICAL_CASES if c.generator == gen and dict(c.relation) == rel)


def test_s2_critical_locus():
    """[PAPER] theta0 + thetainf = 0 on the locus: q~ = -1/q, a~ = (-q + 2a)/(2q^2)."""
    c = _case("s2", {"thetainf": "-theta0"})
    assert c.value() == -1 / q
    # a~ as a function of (q, a) on the locus
    loc = (t - t * q ** 2 + q * th0) / 2
    assert c.a_value() == substitute((-q + 2 * a) / (2 * q ** 2), {"a": loc})
    s = ChartState("D6", "ST1", R(2), substitute(loc, {"q": 2, "t": 3, "theta0": R("1/3")}), R(3),
                   (R("1/3"), R("-1/3")))
    out = apply_state("s2", s)
    assert out.q == R("-1/2")
    assert out.a == (R(-2) + 2 * s.a) / 8


def test_b1_critical_loci():
    """[PAPER] B1 at thetainf = -theta0 gives -q + theta0/t; the other value is derived."""
    c2 = _case("B1", {"thetainf": "-theta0"})
    assert c2.value() == -q + th0 / t
    assert locus_equation_residual(c2, c2.value()).is_zero()
    c1 = _case("B1", {"thetainf": "theta0"})
    assert c1.value() == -(t * q + th0) / t
    assert locus_equation_residual(c1, c1.value()).is_zero()
    # the displayed value for this case does not solve the target equation
    assert not locus_equation_residual(c1, c1.printed).is_zero()


def test_b2_critical_loci():
    """[PAPER] B2 on-locus values solve the target equation up to the recorded sign."""
    for rel, den in (({"theta0": "thetainf + 2"}, t + thi * q + q),
                     ({"theta0": "-thetainf"}, t - thi * q - q)):
        c = _case("B2", rel)
        assert c.value() == -t * q / den
        assert locus_equation_residual(c, c.value()).is_zero()
        assert not locus_equation_residual(c, t * q / den).is_zero()


@pytest.mark.parametrize("case", CRITICAL_CASES, ids=lambda c: f"{c.generator}-{list(c.relation.values())[0]}")
def test_overrides_agree_with_limits(case):
    """[DERIVED] States approaching the locus: the generic map tends to the override."""
    m = state_map(case.generator, "D6")
    pt = {"theta0": R("3/10"), "thetainf": R("7/10")}
    (k, v), = case.relation.items()
    pt[k] = substitute(R(v), pt)
    pt.update({"q": R("4/5"), "t": R("13/10")})
    loc = substitute(R(case.locus), pt)
    target = substitute(case.value(), pt)
    gaps = [abs(complex((substitute(m.q, {**pt, "a": loc + eps}) - target).to_gaussrat()))
            for eps in (Fraction(1, 10 ** 6), Fraction(1, 10 ** 12))]
    assert gaps[1] < 1e-8 and gaps[1] <= 1e-5 * gaps[0]
    # floating evaluation of the uncancelled formula converges linearly
    fpt = {n: complex(x.to_gaussrat()) for n, x in pt.items()}
    fpt["a"] = complex(loc.to_gaussrat()) + 1e-8
    tv = complex(target.to_gaussrat())
    assert abs(complex(m.q.evaluate(fpt)) - tv) < 1e-5 * (1 + abs(tv))


# ------------------------------------------------------------------ change of variables

def test_okamoto_dictionary():
    """[PAPER] x = t^2, Q = t q with (4 thetainf, -4(theta0 - 1), 4, -4); D7 sign change."""
    res = okamoto_substitution_check()
    assert all(v.is_zero() for v in res.values()), {k: str(v) for k, v in res.items()}


def test_okamoto_wrong_gamma():
    """[TRIVIAL] gamma = -4 leaves a nonzero residual."""
    assert not okamoto_substitution_check(gamma=-4)["D6"].is_zero()


# ------------------------------------------------------------------ trajectories

def test_solution_map_constant_under_s4():
    """[DERIVED] q = 1 at thetainf = theta0 - 1 maps to a rational solution at swapped parameters.

    The image is (t + theta0/2 - 3/4)/(t + theta0/2 - 1/4), not a constant: a
    constant 1 would need the swapped pair to satisfy thetainf = theta0 - 1 again.
    """
    from painleve3.exactalg import GaussRat
    from painleve3.laxops import second_order_rhs
    from painleve3.special import constant_trajectory

    image = substitute(state_map("s4", "D6").q, {"q": 1, "a": R("1/4"), "thetainf": th0 - 1})
    assert image == (t + th0 / 2 - R("3/4")) / (t + th0 / 2 - R("1/4"))
    d1 = image.diff("t")
    assert (d1.diff("t") - second_order_rhs("D6", image, d1, t, (th0 - 1, th0))).is_zero()

    tr = constant_trajectory(Fraction(3, 2), Fraction(1, 2), GaussRat(1), PathSpec.line(1, 2, 51))
    out = solution_map("s4", tr)
    assert tuple(map(R, out.params)) == (R("1/2"), R("3/2"))
    closed = (t + R("3/4") - R("3/4")) / (t + R("3/4") - R("1/4"))
    assert max(abs(s.q - complex(closed.evaluate({"t": s.t}))) for s in out.samples) < 1e-12
    assert residual(out).max < 1e-10


def test_solution_map_algebraic_under_composite():
    """[DERIVED] The algebraic D7 solution maps to a solution at theta = 1."""
    from painleve3.special import algebraic_trajectory

    tr = algebraic_trajectory(PathSpec.line(1, 2, 201))
    out = solution_map("s2+ s1+", tr)
    assert R(out.params[0]) == 1
    assert residual(out).max < 1e-9


def test_solution_map_empty():
    """[TRIVIAL] Empty trajectory maps to an empty trajectory with target parameters."""
    out = solution_map("s2", Trajectory("D6", (R("1/3"), R("1/5")), ()))
    assert len(out) == 0 and tuple(map(R, out.params)) == (R("4/3"), R("6/5"))


def test_solution_map_drops_excluded_samples():
    """[TRIVIAL] A sample on a pole of the map is dropped with a warning."""
    from painleve3.numflow import Sample

    params = (R("1/3"), R("1/5"))
    good = [Sample(np.log(1 + 0.1 * k), 0.5 + 0.1j * k, 0.2) for k in range(3)]
    tt = 0.0
    bad = Sample(tt, 1.0, (1.0 - 1.0 - 0.2) / 2)  # on t q^2 + q thetainf - t + 2a = 0 at t = 1
    tr = Trajectory("D6", params, tuple(good + [bad]))
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        out = solution_map("s2", tr)
    assert len(out) == 3 and any("dropped" in str(x.message) for x in w)
