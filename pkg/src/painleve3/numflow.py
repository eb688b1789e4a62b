"""Numerical integration of the isomonodromy systems along complex paths.

Paths are parametrized by s in [0, 1], either in the t-plane or in the
t~-plane (t = exp(t~)).  The state (q, a) is integrated together with t~, so
the branch of log t is tracked continuously.  Near poles of q, D6 switches to
the inverse frame Q = 1/q, A = Q/2 - a Q^2, which obeys the same system with
parameters (thetainf + 1, theta0 - 1); D7 steps around the pole on a circular
arc.  Residuals use high-order finite-difference stencils on the complex
sample nodes, so they measure the actual accuracy of the samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .exactalg import RatFun, substitute
from .laxops import D6, D7, CHARTS

SWAP_THRESHOLD = 1e3
DEFAULT_TOL = 3e-14
# zeros are circled where |x| is at least about this large: the removable 0/0
# costs accuracy roughly in proportion to 1/|x|^2 near the zero
ZERO_DETOUR_MODULUS = 3e-2


class NumericalFailure(RuntimeError):
    """Integration could not continue; ``state`` holds the last good sample."""

    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state


# --------------------------------------------------------------------------- paths

@dataclass(frozen=True)
class PathSpec:
    """A path in the t-plane (``plane="t"``) or the t~-plane (``plane="t_tilde"``).

    ``kind`` is ``line`` (two points), ``polyline`` (two or more points) or
    ``arc`` (points = (center,), with ``radius`` and angles ``phi0``, ``phi1``).
    """

    kind: str
    points: tuple[complex, ...]
    samples: int = 101
    plane: str = "t"
    radius: float = 0.0
    phi0: float = 0.0
    phi1: float = 0.0

    def __post_init__(self):
        if self.kind not in ("line", "polyline", "arc"):
            raise ValueError(f"unknown path kind {self.kind!r}")
        if self.plane not in ("t", "t_tilde"):
            raise ValueError("plane must be 't' or 't_tilde'")
        if self.samples < 1:
            raise ValueError("at least one sample is needed")
        object.__setattr__(self, "points", tuple(complex(p) for p in self.points))
        if self.kind == "line" and len(self.points) != 2:
            raise ValueError("a line takes two points")
        if self.kind == "polyline" and len(self.points) < 2:
            raise ValueError("a polyline takes at least two points")
        if self.kind == "arc" and (len(self.points) != 1 or self.radius <= 0):
            raise ValueError("an arc takes a center and a positive radius")
        if self.plane == "t" and self.distance_to_origin() <= 1e-12:
            raise ValueError("the path passes through t = 0")

    @classmethod
    def line(cls, start, end, samples: int = 101, plane: str = "t") -> "PathSpec":
        return cls("line", (start, end), samples, plane)

    @classmethod
    def polyline(cls, points: Sequence, samples: int = 101, plane: str = "t") -> "PathSpec":
        return cls("polyline", tuple(points), samples, plane)

    @classmethod
    def arc(cls, center, radius: float, phi0: float, phi1: float, samples: int = 101,
            plane: str = "t") -> "PathSpec":
        return cls("arc", (center,), samples, plane, float(radius), float(phi0), float(phi1))

    # geometry ---------------------------------------------------------------
    def _segments(self) -> tuple[np.ndarray, np.ndarray]:
        pts = np.array(self.points)
        lengths = np.abs(np.diff(pts))
        total = lengths.sum()
        if total == 0:
            return pts, np.zeros(len(pts))
        return pts, np.concatenate([[0.0], np.cumsum(lengths) / total])

    def __call__(self, s):
        """Position and derivative d/ds at s (arrays allowed)."""
        s = np.asarray(s, dtype=float)
        if self.kind == "arc":
            phi = self.phi0 + (self.phi1 - self.phi0) * s
            w = self.radius * np.exp(1j * phi)
            return self.points[0] + w, 1j * (self.phi1 - self.phi0) * w
        pts, knots = self._segments()
        if knots[-1] == 0:
            return np.full(s.shape, pts[0], dtype=complex), np.zeros(s.shape, dtype=complex)
        k = np.clip(np.searchsorted(knots, s, side="right") - 1, 0, len(pts) - 2)
        # skip zero-length pieces
        span = knots[k + 1] - knots[k]
        span = np.where(span == 0, 1.0, span)
        u = (s - knots[k]) / span
        pos = pts[k] + (pts[k + 1] - pts[k]) * u
        return pos, (pts[k + 1] - pts[k]) / span

    def start(self) -> complex:
        return complex(self(0.0)[0])

    def end(self) -> complex:
        return complex(self(1.0)[0])

    def length(self) -> float:
        if self.kind == "arc":
            return abs(self.phi1 - self.phi0) * self.radius
        return float(np.abs(np.diff(np.array(self.points))).sum())

    def distance_to_origin(self) -> float:
        if self.kind == "arc":
            s = np.linspace(0, 1, 2001)
            return float(np.abs(self(s)[0]).min())
        best = math.inf
        for p0, p1 in zip(self.points, self.points[1:]):
            d = p1 - p0
            if d == 0:
                best = min(best, abs(p0))
                continue
            u = min(1.0, max(0.0, -(p0 * d.conjugate()).real / abs(d) ** 2))
            best = min(best, abs(p0 + u * d))
        return best if len(self.points) > 1 else abs(self.points[0])

    def to_json(self) -> dict:
        return {"kind": self.kind, "plane": self.plane, "samples": self.samples,
                "points": [[p.real, p.imag] for p in self.points], "radius": self.radius,
                "phi0": self.phi0, "phi1": self.phi1}


# --------------------------------------------------------------------------- trajectories

@dataclass(frozen=True)
class Sample:
    """A point of a trajectory.  ``frame="inverted"`` stores (Q, A) = (1/q, Q/2 - a Q^2).

    ``segment`` increases after a gap (a detour or dropped samples), so
    finite-difference stencils never straddle one.
    """

    t_tilde: complex
    q: complex
    a: complex
    frame: str = "direct"
    segment: int = 0

    @property
    def t(self) -> complex:
        return complex(np.exp(self.t_tilde))

    def direct(self) -> tuple[complex, complex]:
        if self.frame == "direct":
            return self.q, self.a
        Q, A = self.q, self.a
        return 1 / Q, (Q - 2 * A) / (2 * Q * Q)

    def inverted(self) -> tuple[complex, complex]:
        if self.frame == "inverted":
            return self.q, self.a
        q, a = self.q, self.a
        Q = 1 / q
        return Q, Q / 2 - a * Q * Q


@dataclass(frozen=True)
class Trajectory:
    family: str
    params: tuple
    samples: tuple[Sample, ...]
    events: tuple = ()

    def __len__(self) -> int:
        return len(self.samples)

    def arrays(self) -> dict[str, np.ndarray]:
        d = [s.direct() for s in self.samples]
        return {"t_tilde": np.array([s.t_tilde for s in self.samples]),
                "t": np.array([s.t for s in self.samples]),
                "q": np.array([x[0] for x in d]), "a": np.array([x[1] for x in d])}

    def endpoint(self) -> tuple[complex, complex]:
        return self.samples[-1].direct()

    def to_json(self) -> dict:
        names = ("theta0", "thetainf") if self.family == D6 else ("theta",)
        return {
            "family": self.family,
            "params": {n: _num_json(v) for n, v in zip(names, self.params)},
            "samples": [{"t_tilde": [s.t_tilde.real, s.t_tilde.imag], "q": [s.q.real, s.q.imag],
                         "a": [s.a.real, s.a.imag], "frame": s.frame, "segment": s.segment}
                        for s in self.samples],
            "events": list(self.events),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Trajectory":
        fam = data["family"].upper()
        names = ("theta0", "thetainf") if fam == D6 else ("theta",)
        params = tuple(_num_from_json(data["params"][n]) for n in names)
        samples = tuple(Sample(complex(*s["t_tilde"]), complex(*s["q"]), complex(*s["a"]),
                               s.get("frame", "direct"), s.get("segment", 0))
                        for s in data["samples"])
        return cls(fam, params, samples, tuple(data.get("events", ())))


def _num_json(v):
    if isinstance(v, (complex, float)):
        v = complex(v)
        return [v.real, v.imag]
    return str(v)


def _num_from_json(v):
    if isinstance(v, list):
        return complex(*v)
    return RatFun.coerce(v)


# --------------------------------------------------------------------------- vector fields

def _param_names(family: str) -> tuple[str, ...]:
    return ("theta0", "thetainf") if family == D6 else ("theta",)


@lru_cache(maxsize=None)
def _flow(family: str):
    from .backlund import source_flow

    return source_flow(family)


def _numeric_params(params) -> tuple[complex, ...]:
    out = []
    for p in params:
        if isinstance(p, (int, float, complex)):
            out.append(complex(p))
        else:
            out.append(complex(RatFun.coerce(p).to_gaussrat()))
    return tuple(out)


def swapped_params(params: Sequence) -> tuple:
    """Parameters of the D6 equation obeyed by 1/q."""
    th0, thi = params
    return (thi + 1, th0 - 1)


def vector_field(family: str, params) -> Callable[[complex, complex, complex], tuple]:
    """(q, a, t) -> (q', a') as a fast numeric function."""
    F = _flow(family)
    names = _param_names(family)
    pv = _numeric_params(params)
    exact = all(not isinstance(p, (float, complex)) for p in params)
    exprs = []
    for g in ("q", "a"):
        e = F.images[g]
        if exact:
            e = substitute(e, {n: RatFun.coerce(p) for n, p in zip(names, params)})
        exprs.append(e)
    extra = {n: v for n, v in zip(names, pv)}

    def f(q, a, t):
        pt = {"q": q, "a": a, "t": t, **extra}
        return exprs[0].evaluate(pt), exprs[1].evaluate(pt)

    return f


def second_order_numeric(family: str, params) -> Callable:
    """(q, q', t) -> q'' for the PIII equation."""
    pv = _numeric_params(params)
    if family == D7:
        (th,) = pv

        def f(q, qp, t):
            return qp * qp / q - qp / t - th / t + 2 * q * q / (t * t) - 1 / q
        return f
    th0, thi = pv

    def f(q, qp, t):
        return (qp * qp / q - qp / t - 4 * (th0 - 1) / t + 4 * thi * q * q / t
                + 4 * q ** 3 - 4 / q)
    return f


# --------------------------------------------------------------------------- integration

@dataclass
class _Piece:
    """A parametrized curve t(s) on [0, 1] with its derivative."""

    pos: Callable
    plane: str

    def t_and_dt(self, s: float) -> tuple[complex, complex]:
        w, dw = self.pos(s)
        w, dw = complex(w), complex(dw)
        if self.plane == "t":
            return w, dw
        t = complex(np.exp(w))
        return t, t * dw


def _singularity_estimate(x: complex, xp: complex, t: complex, order: int) -> complex:
    """Location of a zero (order -1) or a pole (order k > 0) of x from x and x'."""
    if order < 0:
        return t - x / xp
    return t + order * x / xp


def integrate(family: str, params, initial: tuple, path: PathSpec, tol: float = DEFAULT_TOL,
              swap_threshold: float = SWAP_THRESHOLD) -> Trajectory:
    """Integrate the first-order system from ``initial = (t~0, q0, a0)`` along ``path``.

    Samples are returned at ``path.samples`` equally spaced values of s.  When
    |q| exceeds ``swap_threshold``, D6 continues in the inverse frame and D7
    circles the (double) pole.  Simple zeros, where the systems have a
    removable 0/0, are circled in either family once |q| (or |Q|) drops below
    ``ZERO_DETOUR_MODULUS / 3``; a D6 swap lands next to the zero of Q, which
    is circled at once.  Samples skipped by a detour are omitted and the
    segment counter is increased.
    """
    family = family.upper()
    if family not in CHARTS:
        raise ValueError(f"unknown family {family!r}")
    if len(params) != (2 if family == D6 else 1):
        raise ValueError("D6 takes (theta0, thetainf), D7 takes (theta,)")
    tt0, q0, a0 = (complex(x) for x in initial)
    if q0 == 0:
        raise ValueError("q0 = 0 lies outside the chart")
    start = path.start()
    t_start = start if path.plane == "t" else complex(np.exp(start))
    if path.plane == "t_tilde":
        if abs(start - tt0) > 1e-12 * max(1.0, abs(tt0)):
            raise ValueError("t~0 does not match the start of the path")
    elif abs(np.exp(tt0) - t_start) > 1e-12 * max(1.0, abs(t_start)):
        raise ValueError("exp(t~0) does not match the start of the path")

    fields = {"direct": vector_field(family, params)}
    if family == D6:
        fields["inverted"] = vector_field(D6, swapped_params(params))
    s_grid = np.linspace(0.0, 1.0, path.samples) if path.samples > 1 else np.array([0.0])
    samples: list[Sample] = []
    events: list[dict] = []
    frame, segment = "direct", 0
    y = np.array([q0, a0, tt0], dtype=complex)
    if family == D6 and abs(q0) > swap_threshold:
        Q = 1 / q0
        y = np.array([Q, Q / 2 - a0 * Q * Q, tt0], dtype=complex)
        frame = "inverted"
    if path.length() == 0:
        return Trajectory(family, tuple(params), (Sample(tt0, complex(y[0]), complex(y[1]), frame),))

    piece = _Piece(path, path.plane)
    small_threshold = ZERO_DETOUR_MODULUS / 3

    def rhs_factory(pc: _Piece, fr: str):
        f = fields[fr]

        def rhs(s, yy):
            t, dt = pc.t_and_dt(s)
            dq, da = f(yy[0], yy[1], t)
            return np.array([dq * dt, da * dt, dt / t])
        return rhs

    def big(s, yy):
        return abs(yy[0]) - swap_threshold
    big.terminal, big.direction = True, 1

    def small(s, yy):
        return abs(yy[0]) - small_threshold
    small.terminal, small.direction = True, -1

    s0 = 0.0
    pending = list(s_grid)
    if pending and pending[0] == 0.0:
        samples.append(Sample(tt0, complex(y[0]), complex(y[1]), frame, segment))
        pending.pop(0)
    while s0 < 1.0:
        t_eval = [s for s in pending if s > s0]
        sol = solve_ivp(rhs_factory(piece, frame), (s0, 1.0), y, method="DOP853", rtol=tol,
                        atol=tol, t_eval=t_eval or None, events=(big, small))
        if sol.status == -1:
            raise NumericalFailure(f"integration failed at s = {s0}: {sol.message}",
                                   samples[-1] if samples else None)
        ts = np.asarray(sol.t)
        if t_eval and ts.size:
            ys = np.asarray(sol.y).reshape(3, -1)
            for k in range(ts.size):
                samples.append(Sample(complex(ys[2, k]), complex(ys[0, k]), complex(ys[1, k]),
                                      frame, segment))
            pending = [s for s in pending if s > ts[-1]]
        if sol.status == 0:
            break
        which = 0 if len(sol.t_events[0]) else 1
        s_ev = float(sol.t_events[which][0])
        y_ev = np.asarray(sol.y_events[which][0])
        t_ev, _ = piece.t_and_dt(s_ev)
        if which == 0 and family == D6:
            Q = 1 / y_ev[0]
            A = Q / 2 - y_ev[1] * Q * Q
            new = "inverted" if frame == "direct" else "direct"
            events.append({"kind": "frame_swap", "s": s_ev, "to": new,
                           "t_tilde": [y_ev[2].real, y_ev[2].imag],
                           "continuity": float(abs(y_ev[0] * Q - 1))})
            frame = new
            y_ev = np.array([Q, A, y_ev[2]], dtype=complex)
            which = 1
        xp = fields[frame](y_ev[0], y_ev[1], t_ev)[0]
        order = -1 if which == 1 else 2
        p = _singularity_estimate(y_ev[0], xp, t_ev, order)
        min_radius = min(ZERO_DETOUR_MODULUS / abs(xp), 0.25 * abs(p)) if which == 1 else 0.0
        y, s0, record = _detour(piece, fields[frame], y_ev, s_ev, p, tol, min_radius)
        record["frame"] = frame
        record["kind"] = "detour_zero" if which == 1 else "detour_pole"
        events.append(record)
        segment += 1
        pending = [s for s in pending if s > s0]
    return Trajectory(family, tuple(params), tuple(samples), tuple(events))


def _exit_parameter(piece: _Piece, s_ev: float, center: complex, R: float) -> float:
    """First s > s_ev at which the path leaves the disc |t - center| <= R."""
    _, dt = piece.t_and_dt(s_ev)
    step = R / (8 * max(abs(dt), 1e-300))
    s = s_ev
    while s < 1.0:
        s_next = min(1.0, s + step)
        if abs(piece.t_and_dt(s_next)[0] - center) > R:
            lo, hi = s, s_next
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if abs(piece.t_and_dt(mid)[0] - center) > R:
                    hi = mid
                else:
                    lo = mid
            return hi
        s = s_next
    raise NumericalFailure("the path ends next to a singularity")


def _detour(piece: _Piece, field_fn, y, s_ev, center, tol, min_radius: float = 0.0):
    """Leave the path at s_ev, circle ``center`` at four times the current distance
    (at least ``min_radius``), rejoin."""
    t_ev, _ = piece.t_and_dt(s_ev)
    rho = abs(t_ev - center)
    R = max(4 * rho, min_radius)
    if R >= 0.5 * abs(center):
        raise NumericalFailure("singularity too close to t = 0 for a detour")
    s_exit = _exit_parameter(piece, s_ev, center, R)
    t_exit = piece.t_and_dt(s_exit)[0]
    t_out = center + R * (t_ev - center) / rho
    phi0 = float(np.angle(t_out - center))
    phi1 = float(np.angle(t_exit - center))
    dphi = (phi1 - phi0 + np.pi) % (2 * np.pi) - np.pi
    legs = [PathSpec("line", (t_ev, t_out), 2), PathSpec.arc(center, R, phi0, phi0 + dphi, 2)]
    for leg in legs:
        if leg.length() == 0:
            continue
        pc = _Piece(leg, "t")

        def rhs(s, yy, pc=pc):
            t, dt = pc.t_and_dt(s)
            dq, da = field_fn(yy[0], yy[1], t)
            return np.array([dq * dt, da * dt, dt / t])
        sol = solve_ivp(rhs, (0.0, 1.0), y, method="DOP853", rtol=tol, atol=tol)
        if sol.status != 0:
            raise NumericalFailure(f"detour failed: {sol.message}")
        y = sol.y[:, -1]
    return y, s_exit, {"center": [center.real, center.imag], "radius": R,
                       "s_leave": s_ev, "s_rejoin": s_exit}


# --------------------------------------------------------------------------- residuals

@dataclass(frozen=True)
class ResidualReport:
    max: float
    per_sample: tuple[tuple[int, float], ...]
    skipped: tuple[int, ...] = ()

    def passed(self, tol: float) -> bool:
        return self.max < tol

    def to_json(self) -> dict:
        return {"max": self.max, "per_sample": [list(x) for x in self.per_sample],
                "skipped": list(self.skipped)}


def fornberg_weights(z0: complex, nodes: Sequence[complex], m: int) -> np.ndarray:
    """Finite-difference weights for derivatives 0..m at z0 from arbitrary (complex) nodes."""
    x = np.asarray(nodes, dtype=complex)
    n = x.size
    c = np.zeros((n, m + 1), dtype=complex)
    c1, c4 = 1.0, x[0] - z0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2, c5, c4 = 1.0, c4, x[i] - z0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 = c2 * c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c


def _segments_of(traj: Trajectory) -> list[list[int]]:
    """Index runs sharing a segment number (no detour or gap inside)."""
    runs: list[list[int]] = []
    for k, smp in enumerate(traj.samples):
        if runs and traj.samples[runs[-1][-1]].segment == smp.segment:
            runs[-1].append(k)
        else:
            runs.append([k])
    return runs


def _both_frames(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """q and 1/q at every sample, each computed without overflow from the stored frame."""
    q = np.empty(len(traj.samples), dtype=complex)
    Q = np.empty(len(traj.samples), dtype=complex)
    with np.errstate(all="ignore"):
        for k, smp in enumerate(traj.samples):
            if smp.frame == "inverted":
                Q[k], q[k] = smp.q, 1 / smp.q if smp.q != 0 else np.inf
            else:
                q[k], Q[k] = smp.q, 1 / smp.q if smp.q != 0 else np.inf
    return q, Q


def inverse_rhs(f: Callable) -> Callable:
    """Right-hand side of the equation obeyed by Q = 1/q when q'' = f(q, q', t)."""

    def g(Q, Qp, t):
        return 2 * Qp * Qp / Q - Q * Q * f(1 / Q, -Qp / (Q * Q), t)
    return g


def _stencil_residuals(traj: Trajectory, q: np.ndarray, Q: np.ndarray, nodes: np.ndarray,
                       rhs: Callable, rhs_inv: Callable, half: int):
    """Stencil residuals, each evaluated in the frame (q or 1/q) bounded at its centre."""
    per, skipped = [], []
    for run in _segments_of(traj):
        n = len(run)
        h = min(half, (n - 1) // 2)
        if h < 2:
            continue
        for j in range(h, n - h):
            k = run[j]
            idx = run[j - h:j + h + 1]
            use_inverse = abs(q[k]) > 1
            vals = Q[idx] if use_inverse else q[idx]
            if not np.all(np.isfinite(vals)) or vals[h] == 0:
                skipped.append(k)
                continue
            w = fornberg_weights(nodes[k], nodes[idx], 2)
            # derivative weights sum to zero; centring the values limits cancellation
            v = vals - vals[h]
            d1, d2 = v @ w[:, 1], v @ w[:, 2]
            f = rhs_inv if use_inverse else rhs
            per.append((k, float(abs(d2 - f(vals[h], d1, k)))))
    return per, skipped


def _report(per, skipped) -> ResidualReport:
    if not per:
        raise ValueError("no interior samples with a full stencil")
    return ResidualReport(max(r for _, r in per), tuple(per), tuple(sorted(skipped)))


def residual(traj: Trajectory, half_width: int = 5) -> ResidualReport:
    """Residual of the second-order equation at interior samples.

    Derivatives with respect to t come from (2*half_width + 1)-point stencils
    on the complex nodes t_k.  Each stencil uses q, or 1/q (checked against
    the transformed equation) when |q| > 1 at its centre, so poles are
    resolved; for D6 the equation for 1/q is PIII(D6) with swapped
    parameters.  Stencils never cross a detour.
    """
    if len(traj.samples) < 5:
        raise ValueError("residual needs at least 5 samples")
    f = second_order_numeric(traj.family, traj.params)
    t = np.array([s.t for s in traj.samples])
    q, Q = _both_frames(traj)
    g = inverse_rhs(f)
    per, skipped = _stencil_residuals(traj, q, Q, t, lambda v, d, k: f(v, d, t[k]),
                                      lambda v, d, k: g(v, d, t[k]), half_width)
    return _report(per, skipped)


def exp_form_check(traj: Trajectory, half_width: int = 5) -> ResidualReport:
    """Residual of the equation for Q(t~) = q(exp(t~)), derivatives taken in t~."""
    if len(traj.samples) < 5:
        raise ValueError("exp_form_check needs at least 5 samples")
    pv = _numeric_params(traj.params)
    tt = np.array([s.t_tilde for s in traj.samples])
    if traj.family == D6:
        th0, thi = pv

        def f(Q, Qp, x):
            e = np.exp(x)
            return (Qp * Qp / Q - 4 * (th0 - 1) * e + 4 * thi * Q * Q * e
                    + 4 * Q ** 3 * e * e - 4 * e * e / Q)
    else:
        (th,) = pv

        def f(Q, Qp, x):
            e = np.exp(x)
            return Qp * Qp / Q - th * e + 2 * Q * Q - e * e / Q
    q, Q = _both_frames(traj)
    g = inverse_rhs(f)
    per, skipped = _stencil_residuals(traj, q, Q, tt, lambda v, d, k: f(v, d, tt[k]),
                                      lambda v, d, k: g(v, d, tt[k]), half_width)
    return _report(per, skipped)


def backlund_residual_check(w, traj: Trajectory, **kw) -> ResidualReport:
    """Map a trajectory through a Bäcklund word and check the target equation."""
    from .backlund import solution_map

    return residual(solution_map(w, traj), **kw)
