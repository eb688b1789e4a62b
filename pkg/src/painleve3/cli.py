"""Command-line interface.

Exit codes: 0 success (everything verified), 1 a verification failed,
2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import backlund, laxops, monodromy, numflow, special
from .exactalg import GaussRat, ParseError, RatFun

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class InputError(ValueError):
    pass


# decimal inputs seen while parsing the current command, for the report note
_decimals: dict[str, GaussRat] = {}


_NUM = r"[0-9]+(?:\.[0-9]*)?(?:/[0-9]+)?|\.[0-9]+"
_COMPLEX = re.compile(
    rf"^\s*(?:(?P<re>[+-]?\s*(?:{_NUM}))(?!\s*\*?\s*i))?"
    rf"\s*(?:(?P<im>[+-]?\s*(?:{_NUM})?)\s*\*?\s*i)?\s*$")


def _part(text: str) -> Fraction:
    text = text.replace(" ", "")
    if text in ("", "+"):
        return Fraction(1)
    if text == "-":
        return Fraction(-1)
    return Fraction(text)


def parse_complex(text: str) -> GaussRat:
    """``re``, ``im i`` or ``re+im i`` with rational (1/3) or decimal (0.25) parts.

    Decimals are converted to the exact rational they denote.
    """
    m = _COMPLEX.match(text)
    if not m or (m.group("re") is None and m.group("im") is None):
        raise InputError(f"cannot parse {text!r} as a complex number (expected re+im i)")
    re_ = _part(m.group("re")) if m.group("re") is not None else Fraction(0)
    im_ = _part(m.group("im")) if m.group("im") is not None else Fraction(0)
    value = GaussRat(re_, im_)
    if "." in text:
        _decimals[text.strip()] = value
    return value


def _family(args) -> str:
    if not getattr(args, "family", None):
        raise InputError("--family d6|d7 is required")
    return args.family.upper()


def _params(args, family: str) -> tuple[RatFun, ...]:
    if family == laxops.D6:
        if args.theta0 is None or args.thetainf is None:
            raise InputError("D6 needs --theta0 and --thetainf")
        return (RatFun.coerce(parse_complex(args.theta0)),
                RatFun.coerce(parse_complex(args.thetainf)))
    if args.theta is None:
        raise InputError("D7 needs --theta")
    return (RatFun.coerce(parse_complex(args.theta)),)


# --------------------------------------------------------------------------- reports

class Report:
    """Collects named checks and a payload; renders as JSON or aligned text."""

    def __init__(self, title: str, payload: dict | None = None):
        self.title = title
        self.payload = dict(payload or {})
        self.checks: list[dict] = []

    def check(self, name: str, ok: bool, detail="") -> None:
        self.checks.append({"name": name, "pass": bool(ok), "residual": str(detail)})

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def to_json(self) -> dict:
        out = dict(self.payload)
        if self.checks:
            out["checks"] = self.checks
            out["pass"] = self.passed
        return out

    def text(self) -> str:
        lines = [self.title]
        for k, v in self.payload.items():
            if isinstance(v, (dict, list)):
                v = json.dumps(v)
            lines.append(f"  {k}: {v}")
        if self.checks:
            width = max(len(c["name"]) for c in self.checks)
            for c in self.checks:
                tag = "PASS" if c["pass"] else "FAIL"
                extra = f"  {c['residual']}" if c["residual"] not in ("", "0") else ""
                lines.append(f"  {tag}  {c['name']:<{width}}{extra}")
        return "\n".join(lines)


def _decimal_note() -> str:
    pairs = ", ".join(f"{k} -> {v}" for k, v in _decimals.items())
    return f"decimal inputs were read as the exact rationals they denote: {pairs}"


def _emit(args, report: Report, raw: dict | None = None) -> int:
    data = raw if raw is not None else report.to_json()
    if _decimals:
        data = {**data, "note": _decimal_note()}
        report.payload["note"] = _decimal_note()
    text = json.dumps(data, indent=2, sort_keys=False) if args.json else report.text()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(json.dumps(data, indent=2) + "\n")
    print(text)
    return EXIT_OK if report.passed else EXIT_FAIL


# --------------------------------------------------------------------------- verify

def cmd_verify_isomonodromy(args) -> int:
    families = [_family(args)] if args.family else [laxops.D7, laxops.D6]
    rep = Report("isomonodromy flows")
    flows = {}
    for fam in families:
        derived = laxops.derive_isomonodromy_flow(fam).flow
        target = laxops.published_flow(fam)
        for g in ("q", "a"):
            ok = derived.images[g] == target.images[g]
            rep.check(f"{fam} {g}' derived = closed form", ok,
                      "" if ok else derived.images[g] - target.images[g])
        flows[fam] = {g: str(derived.images[g]) for g in ("q", "a")}
        r = laxops.reduce_to_second_order(derived, fam)
        rep.check(f"{fam} second-order reduction", r.is_zero(), r)
        if fam == laxops.D6:
            s = laxops.swapped_inverse_equation_check(derived)
            rep.check("D6 1/q equation with swapped parameters", s.is_zero(), s)
    rep.payload["flows"] = flows
    return _emit(args, rep)


def cmd_verify_backlund(args) -> int:
    if not args.element:
        raise InputError("--element WORD is required (e.g. 's2' or 's1 s2^-1 B1')")
    family = _family(args) if args.family else None
    try:
        w = backlund.BacklundWord.parse(args.element, family)
    except ValueError as err:
        raise InputError(str(err)) from None
    r = backlund.verify_transformation(w, gauge=not args.no_gauge)
    rep = Report(f"Bäcklund word {r.word}", {"word": r.word, "paramAction": r.param_action})
    for c in r.checks:
        rep.check(c.name, c.passed, c.residual)
    return _emit(args, rep, r.to_json())


def cmd_verify_group(args) -> int:
    rep = Report("Bäcklund group relations")
    for name, ok in backlund.group_relations_check().items():
        rep.check(name, ok)
    return _emit(args, rep)


def cmd_verify_okamoto(args) -> int:
    rep = Report("primed/unprimed change of variables")
    for name, r in backlund.okamoto_substitution_check().items():
        rep.check(name, r.is_zero(), r)
    return _emit(args, rep)


def cmd_verify_monodromy_embed(args) -> int:
    rep = Report("monodromy identities")
    F = monodromy.embed_d6_symbolic()
    rep.check("D6 embedding lies on the surface (chart l1 != 0)", F.is_zero(), F)
    e, l1, l2, l3 = (RatFun.symbol(n) for n in ("e", "l1", "l2", "l3"))
    st = monodromy.d7_alpha_and_stokes(e, l1, l2, l3, (1 + l2 * l3) / l1)
    rep.check("D7 alpha = -i l14 e + i l12 - i l34", st.alpha_identity)
    link = monodromy.d7_link_from_invariants(Fraction(1, 2), Fraction(1, 2), Fraction(-1, 2),
                                             Fraction(-1, 2))
    triv = monodromy.d7_alpha_and_stokes(0, *link)
    ok = (triv.alpha == RatFun.coerce(GaussRat(0, 1)) and triv.c1.is_zero() and triv.c2.is_zero())
    rep.check("trivial Stokes point gives (alpha, c1, c2) = (i, 0, 0)", ok,
              f"({triv.alpha}, {triv.c1}, {triv.c2})")
    for name in monodromy.SIGMAS:
        r = monodromy.automorphism_action(name)
        if name == "sigma3":
            rep.payload["sigma3 discrepancy"] = str(r.discrepancy)
            continue
        rep.check(f"{name} preserves the surfaces", r.preserved, r.discrepancy or "")
    return _emit(args, rep)


# --------------------------------------------------------------------------- monodromy

def cmd_monodromy_singular(args) -> int:
    family = _family(args)
    if args.alpha is None or (family == laxops.D6 and args.beta is None):
        raise InputError("--alpha (and --beta for D6) are required")
    alpha = parse_complex(args.alpha)
    beta = parse_complex(args.beta) if family == laxops.D6 else None
    try:
        S = monodromy.surface(family, alpha, beta)
    except monodromy.ExcludedLocus as err:
        raise InputError(str(err)) from None
    loc = monodromy.singular_points(S)
    rep = Report(f"singular points of the {family} surface", {"surface": S.to_json(),
                                                              **loc.to_json()})
    return _emit(args, rep)


def cmd_monodromy_alpha(args) -> int:
    e = parse_complex(args.e or "0")
    if args.l is not None:
        link = [parse_complex(x) for x in args.l.split(",")]
    elif args.invariants is not None:
        try:
            link = monodromy.d7_link_from_invariants(
                *[parse_complex(x) for x in args.invariants.split(",")])
        except (TypeError, ValueError) as err:
            raise InputError(str(err)) from None
    else:
        raise InputError("give --l l1,l2,l3,l4 or --invariants l12,l14,l23,l34")
    if len(link) != 4:
        raise InputError("the link needs four entries")
    try:
        st = monodromy.d7_alpha_and_stokes(e, *link)
    except monodromy.ExcludedLocus as err:
        raise InputError(str(err)) from None
    except ValueError as err:
        raise InputError(str(err)) from None
    rep = Report("D7 formal monodromy and Stokes data", st.to_json())
    rep.check("alpha matches the closed form", st.alpha_identity)
    return _emit(args, rep)


# --------------------------------------------------------------------------- special

def cmd_special_riccati(args) -> int:
    eps1, eps2 = args.eps1, args.eps2
    if (eps1, eps2) not in special.SIGNS:
        raise InputError("--eps1 and --eps2 must be 1 or -1")
    d = parse_complex(args.d) if args.d is not None else None
    fam = special.riccati_isomonodromy(eps1, eps2, d)
    rep = Report(f"Riccati family ({eps1}, {eps2})", fam.to_json())
    rep.check("derivative of the Riccati equation satisfies PIII(D6)",
              fam.consistency_residual.is_zero(), fam.consistency_residual)
    raw = None
    if d is not None:
        mix = [parse_complex(x) for x in args.mix.split(",")]
        try:
            sol = special.riccati_solution(eps1, eps2, d, mix, args.order)
        except ValueError as err:
            raise InputError(str(err)) from None
        ok = all(c.is_zero() for c in special.riccati_series_check(sol))
        rep.check("q series satisfies the Riccati equation through its order", ok)
        rep.payload["series"] = sol.q_series.to_json()
        raw = {**sol.q_series.to_json(), "y": sol.y.to_json(), "family": fam.to_json(),
               "pass": rep.passed}
    return _emit(args, rep, raw)


def cmd_special_algebraic(args) -> int:
    theta = args.theta if args.theta is not None else "0"
    g = parse_complex(theta)
    if g.im != 0 or Fraction(g.re).denominator != 1:
        raise InputError("algebraic D7 solutions exist here for integer theta only")
    fam = special.d7_algebraic_family(int(g.re))
    rep = Report(f"algebraic D7 solution, theta = {fam.theta}",
                 {k: v for k, v in fam.to_json().items() if k not in ("checks", "pass")})
    for name, ok in fam.checks.items():
        rep.check(name, ok)
    return _emit(args, rep)


def cmd_special_constants(args) -> int:
    th0, thi = _params(args, laxops.D6)
    sols = special.d6_constant_solutions(th0, thi)
    rep = Report("constant D6 solutions", {"theta0": str(th0), "thetainf": str(thi),
                                          "constants": [str(c) for c in sols]})
    return _emit(args, rep)


def cmd_special_presence(args) -> int:
    th0, thi = _params(args, laxops.D6)
    try:
        fams = special.reducible_presence(th0, thi)
    except ValueError as err:
        raise InputError(str(err)) from None
    rep = Report("reducible families present", {"theta0": str(th0), "thetainf": str(thi),
                                               "families": [list(f) for f in fams]})
    return _emit(args, rep)


# --------------------------------------------------------------------------- numerics

def _path(args) -> numflow.PathSpec:
    t0 = complex(parse_complex(args.t0))
    t1 = complex(parse_complex(args.t1))
    pts = [t0] + [complex(parse_complex(p)) for p in (args.via or [])] + [t1]
    if args.plane == "t" and any(p == 0 for p in pts):
        raise InputError("t = 0 is a fixed singularity; paths must avoid it")
    try:
        return numflow.PathSpec.polyline(pts, args.samples, args.plane)
    except ValueError as err:
        raise InputError(str(err)) from None


def cmd_integrate(args) -> int:
    family = _family(args)
    params = _params(args, family)
    path = _path(args)
    if args.q0 is None or args.a0 is None:
        raise InputError("--q0 and --a0 are required")
    q0, a0 = complex(parse_complex(args.q0)), complex(parse_complex(args.a0))
    start = path.start()
    tt0 = complex(np.log(start)) if args.plane == "t" else start
    tol = args.tol or numflow.DEFAULT_TOL
    try:
        traj = numflow.integrate(family, params, (tt0, q0, a0), path, tol=tol)
    except ValueError as err:
        raise InputError(str(err)) from None
    data = traj.to_json()
    rep = Report(f"{family} trajectory", {"samples": len(traj.samples), "events": traj.events,
                                          "endpoint q": _num(traj.endpoint()[0])})
    if args.check:
        r = numflow.residual(traj)
        data["residual"] = r.max
        rep.check("second-order residual", r.max < args.check, f"{r.max:.3e}")
    return _emit(args, rep, data)


def _num(z) -> str:
    z = complex(z)
    return f"{z.real:.15g}{z.imag:+.15g}i"


def cmd_backlund_apply(args) -> int:
    traj = _load_traj(args.traj) if args.traj else None
    family = traj.family if traj is not None and not args.family else _family(args)
    try:
        w = backlund.BacklundWord.parse(args.word, family)
    except ValueError as err:
        raise InputError(str(err)) from None
    if traj is not None:
        if traj.family != family:
            raise InputError("trajectory family does not match --family")
        out = backlund.solution_map(w, traj)
        rep = Report(f"{w} applied to a trajectory", {"samples": len(out.samples),
                                                       "params": [str(p) for p in out.params]})
        return _emit(args, rep, out.to_json())
    params = _params(args, family)
    vals = [parse_complex(x) for x in (args.q, args.a, args.t) if x is not None]
    if len(vals) != 3:
        raise InputError("give --q, --a and --t (or --traj FILE)")
    chart = laxops.CHARTS[family][0]
    s = laxops.ChartState(family, chart, *(RatFun.coerce(v) for v in vals), params)
    try:
        r = backlund.apply_state(w, s)
    except backlund.PartialMapError as err:
        raise InputError(str(err)) from None
    rep = Report(f"{w} applied to a state", {"q": str(r.q), "a": str(r.a), "t": str(r.t),
                                             "params": [str(p) for p in r.params]})
    return _emit(args, rep)


def _load_traj(path: str) -> numflow.Trajectory:
    try:
        with open(path) as fh:
            return numflow.Trajectory.from_json(json.load(fh))
    except (OSError, json.JSONDecodeError, KeyError) as err:
        raise InputError(f"cannot read trajectory {path}: {err}") from None


def cmd_residual(args) -> int:
    if not args.traj:
        raise InputError("--traj FILE is required")
    traj = _load_traj(args.traj)
    if args.word:
        traj = backlund.solution_map(backlund.BacklundWord.parse(args.word, traj.family), traj)
    r = numflow.exp_form_check(traj) if args.exp_form else numflow.residual(traj)
    tol = args.tol or 1e-7
    rep = Report("trajectory residual", {"max": r.max, "skipped": list(r.skipped)})
    rep.check(f"max residual < {tol:g}", r.passed(tol), f"{r.max:.3e}")
    return _emit(args, rep, {**r.to_json(), "pass": rep.passed})


# --------------------------------------------------------------------------- parser

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", type=str.lower, choices=["d6", "d7"])
    p.add_argument("--theta0")
    p.add_argument("--thetainf")
    p.add_argument("--theta")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--tol", type=float)
    p.add_argument("--out", metavar="FILE", help="also write the JSON report to FILE")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="painleve3", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command")

    verify = sub.add_parser("verify", help="exact verification suites")
    vsub = verify.add_subparsers(dest="what")
    p = vsub.add_parser("isomonodromy", help="derive the flows from the Lax pairs")
    _common(p)
    p.set_defaults(func=cmd_verify_isomonodromy)
    p = vsub.add_parser("backlund", help="verify a Bäcklund word")
    _common(p)
    p.add_argument("--element", help="word such as 's2' or 's1 s2^-1 B1'")
    p.add_argument("--no-gauge", action="store_true", help="skip the gauge-matrix solve")
    p.set_defaults(func=cmd_verify_backlund)
    p = vsub.add_parser("group-relations", help="relations of the Bäcklund groups")
    _common(p)
    p.set_defaults(func=cmd_verify_group)
    p = vsub.add_parser("okamoto", help="primed/unprimed equation change of variables")
    _common(p)
    p.set_defaults(func=cmd_verify_okamoto)
    p = vsub.add_parser("monodromy-embed", help="surface and Stokes identities")
    _common(p)
    p.set_defaults(func=cmd_verify_monodromy_embed)

    mono = sub.add_parser("monodromy", help="monodromy surfaces")
    msub = mono.add_subparsers(dest="what")
    p = msub.add_parser("singular", help="singular points of a surface")
    _common(p)
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.set_defaults(func=cmd_monodromy_singular)
    p = msub.add_parser("alpha", help="D7 alpha, c1, c2 from the link and e")
    _common(p)
    p.add_argument("--e")
    p.add_argument("--l", help="l1,l2,l3,l4")
    p.add_argument("--invariants", help="l12,l14,l23,l34")
    p.set_defaults(func=cmd_monodromy_alpha)

    spec = sub.add_parser("special", help="special solutions")
    ssub = spec.add_subparsers(dest="what")
    p = ssub.add_parser("riccati", help="Riccati families and their series")
    _common(p)
    p.add_argument("--eps1", type=int, default=1)
    p.add_argument("--eps2", type=int, default=1)
    p.add_argument("--d")
    p.add_argument("--order", type=int, default=30)
    p.add_argument("--mix", default="1,0", help="coefficients of the two Frobenius solutions")
    p.set_defaults(func=cmd_special_riccati)
    p = ssub.add_parser("algebraic", help="algebraic D7 solutions")
    _common(p)
    p.set_defaults(func=cmd_special_algebraic)
    p = ssub.add_parser("constants", help="constant D6 solutions")
    _common(p)
    p.set_defaults(func=cmd_special_constants)
    p = ssub.add_parser("presence", help="reducible families present in the moduli space")
    _common(p)
    p.set_defaults(func=cmd_special_presence)

    p = sub.add_parser("integrate", help="integrate along a path")
    _common(p)
    p.add_argument("--q0")
    p.add_argument("--a0")
    p.add_argument("--t0", default="1")
    p.add_argument("--t1", default="2")
    p.add_argument("--via", action="append", help="intermediate path point (repeatable)")
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--plane", choices=["t", "t_tilde"], default="t")
    p.add_argument("--check", type=float, help="fail unless the residual is below this value")
    p.set_defaults(func=cmd_integrate)

    bl = sub.add_parser("backlund", help="apply Bäcklund transformations")
    bsub = bl.add_subparsers(dest="what")
    p = bsub.add_parser("apply", help="apply a word to a state or a trajectory file")
    _common(p)
    p.add_argument("--word", required=True)
    p.add_argument("--q")
    p.add_argument("--a")
    p.add_argument("--t")
    p.add_argument("--traj", help="trajectory JSON written by 'integrate --out'")
    p.set_defaults(func=cmd_backlund_apply)

    p = sub.add_parser("residual", help="residual of a stored trajectory")
    _common(p)
    p.add_argument("--traj")
    p.add_argument("--word", help="map through this word first")
    p.add_argument("--exp-form", action="store_true", help="use the t~-form equation")
    p.set_defaults(func=cmd_residual)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    _decimals.clear()
    if not argv:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if not hasattr(args, "func"):
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, ParseError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except numflow.NumericalFailure as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
