"""Linear systems over the rational-function field Q(i)(x1, ..., xn)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import rings
from .ratfun import RatFun, common_context, substitute


class NonlinearError(ValueError):
    pass


@dataclass(frozen=True)
class LinearSolution:
    """Result of :func:`solve_linear`.

    ``kind`` is ``"unique"``, ``"family"`` or ``"inconsistent"``.  For the first
    two, every solution is ``particular + sum(c_k * basis[k])``; ``free`` lists
    the unknowns chosen as parameters (one per basis vector).  For an
    inconsistent system ``conflict`` holds a nonzero constant-term combination.
    """

    kind: str
    unknowns: tuple[str, ...]
    particular: dict[str, RatFun] = field(default_factory=dict)
    basis: tuple[dict[str, RatFun], ...] = ()
    free: tuple[str, ...] = ()
    conflict: RatFun | None = None

    @property
    def consistent(self) -> bool:
        return self.kind != "inconsistent"

    def general(self) -> dict[str, RatFun]:
        """The solution with the free unknowns kept as symbols."""
        out = dict(self.particular)
        for name, vec in zip(self.free, self.basis):
            sym = RatFun.symbol(name)
            for u, v in vec.items():
                out[u] = out[u] + sym * v
        return out


def _split(eq: RatFun, unknowns: Sequence[str]) -> tuple[dict[str, RatFun], RatFun]:
    """Coefficients of each unknown and the constant part of eq's numerator."""
    re, im, _ = eq.parts()
    names = eq.ring
    present = [u for u in unknowns if u in names]
    coeffs: dict[str, RatFun] = {}
    for u in present:
        dre, dim = re.derivative(u), im.derivative(u)
        if dre.is_zero() and dim.is_zero():
            continue
        for p in (dre, dim):
            if not p.is_zero():
                degs = p.degrees()
                bad = [v for v in present if degs[names.index(v)] > 0]
                if bad:
                    raise NonlinearError(f"equation is not linear in {u} (couples with {bad})")
        one = re.context().from_dict({}) + 1
        coeffs[u] = RatFun._make(dre, dim, one)
    zero_map = {u: 0 for u in present}
    cre = re.subs(zero_map) if present else re
    cim = im.subs(zero_map) if present else im
    one = re.context().from_dict({}) + 1
    return coeffs, RatFun._make(cre, cim, one)


def solve_linear(unknowns: Iterable[str], equations: Iterable) -> LinearSolution:
    """Gauss-Jordan elimination with exact pivots, verified by back-substitution."""
    unknowns = tuple(rings.ALIASES.get(u, u) for u in unknowns)
    eqs = [RatFun.coerce(e) for e in equations]
    ctx = common_context([*eqs, *(RatFun.symbol(u) for u in unknowns)])
    rows: list[tuple[dict[str, RatFun], RatFun]] = []
    for e in eqs:
        if e.is_zero():
            continue
        e = e.in_context(ctx)
        for u in unknowns:
            if u in e.free_symbols() and u in e.den.free_symbols():
                raise NonlinearError(f"unknown {u} occurs in a denominator")
        coeffs, const = _split(e, unknowns)
        if not coeffs and const.is_zero():
            continue
        rows.append((coeffs, const))

    pivots: dict[str, tuple[dict[str, RatFun], RatFun]] = {}
    pending = rows
    order = {u: k for k, u in enumerate(unknowns)}
    while True:
        best = None
        for ri, (coeffs, _) in enumerate(pending):
            for u, c in coeffs.items():
                key = (c.size(), len(coeffs), order[u])
                if best is None or key < best[0]:
                    best = (key, ri, u)
        if best is None:
            break
        _, ri, u = best
        coeffs, const = pending[ri]
        inv = coeffs[u].inverse()
        prow = ({v: (c * inv if v != u else RatFun.constant(1)) for v, c in coeffs.items()},
                const * inv)

        def eliminate(row):
            rc, rk = row
            if u not in rc:
                return row
            m = rc[u]
            out = {}
            for v in set(rc) | set(prow[0]):
                if v == u:
                    continue
                val = rc.get(v, RatFun.constant(0)) - m * prow[0].get(v, RatFun.constant(0))
                if not val.is_zero():
                    out[v] = val
            return out, rk - m * prow[1]

        pending = [eliminate(r) for k, r in enumerate(pending) if k != ri]
        pivots = {v: eliminate(r) for v, r in pivots.items()}
        pivots[u] = prow
        # rows left with no unknowns are either trivial or a contradiction
        kept = []
        for rc, rk in pending:
            if rc:
                kept.append((rc, rk))
            elif not rk.is_zero():
                return LinearSolution("inconsistent", unknowns, conflict=rk)
        pending = kept
    for rc, rk in pending:
        if not rk.is_zero():
            return LinearSolution("inconsistent", unknowns, conflict=rk)

    free = tuple(u for u in unknowns if u not in pivots)
    zero = RatFun.constant(0)
    particular = {u: (-pivots[u][1] if u in pivots else zero) for u in unknowns}
    basis = []
    for f in free:
        vec = {u: zero for u in unknowns}
        vec[f] = RatFun.constant(1)
        for u, (rc, _) in pivots.items():
            if f in rc:
                vec[u] = -rc[f]
        basis.append(vec)
    sol = LinearSolution("unique" if not free else "family", unknowns,
                         particular, tuple(basis), free)
    _verify(sol, eqs)
    return sol


def _verify(sol: LinearSolution, eqs: Sequence[RatFun]) -> None:
    general = sol.general()
    for e in eqs:
        if not substitute(e, general).is_zero():
            raise ArithmeticError("back-substitution of the linear solution failed")
