"""Numerical integration, residuals, pole passage and Bäcklund checks on trajectories.

Oracle tags: [PAPER] published values, [DERIVED] independent recomputation,
[TRIVIAL] direct assertions.
"""

import json
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from painleve3.numflow import (
    NumericalFailure, PathSpec, Sample, Trajectory, backlund_residual_check, exp_form_check,
    integrate, residual,
)
from painleve3.special import algebraic_trajectory

D6_PARAMS = (Fraction(1, 3), Fraction(1, 5))
D6_INIT = (0, 0.7 + 0.1j, 0.3 - 0.2j)
D7_INIT = (0, 0.8 + 0.2j, 0.1 - 0.1j)


def _noisy(traj: Trajectory, amplitude: float, seed: int = 0) -> Trajectory:
    rng = np.random.default_rng(seed)
    out = []
    for s in traj.samples:
        q, a = s.direct()
        out.append(Sample(s.t_tilde, q + amplitude * rng.normal(), a, "direct", s.segment))
    return Trajectory(traj.family, traj.params, tuple(out))


# ------------------------------------------------------------------ integration

def test_constant_trajectory():
    """[DERIVED] thetainf = theta0 - 1, (q, a) = (1, 1/4) stays constant to 1e-12."""
    tr = integrate("D6", (Fraction(3, 2), Fraction(1, 2)), (0, 1, 0.25), PathSpec.line(1, 3 + 2j, 51))
    A = tr.arrays()
    assert np.abs(A["q"] - 1).max() < 1e-12 and np.abs(A["a"] - 0.25).max() < 1e-12
    assert residual(tr).max < 1e-10
    assert exp_form_check(tr).max < 1e-10


def test_algebraic_tracking():
    """[DERIVED] The D7 theta = 0 start on q = (t^2/2)^(1/3) tracks the branch to 1e-9."""
    q0 = 0.5 ** (1 / 3)
    tr = integrate("D7", (0,), (0, q0, -q0 / 6), PathSpec.line(1, 2, 41))
    A = tr.arrays()
    assert np.abs(A["q"] - (A["t"] ** 2 / 2) ** (1 / 3)).max() < 1e-9
    assert residual(tr).max < 1e-9


def test_zero_length_path():
    """[TRIVIAL] A zero-length path returns the initial sample only."""
    tr = integrate("D6", D6_PARAMS, (0, 0.5, 0.1), PathSpec.line(1, 1, 11))
    assert len(tr.samples) == 1 and tr.samples[0].q == 0.5


def test_rejections():
    """[TRIVIAL] Paths through t = 0, q0 = 0 and a mismatched start are refused."""
    with pytest.raises(ValueError):
        PathSpec.line(-1, 1)
    with pytest.raises(ValueError):
        integrate("D6", D6_PARAMS, (0, 0, 0.1), PathSpec.line(1, 2))
    with pytest.raises(ValueError):
        integrate("D6", D6_PARAMS, (0.3, 0.5, 0.1), PathSpec.line(1, 2))
    with pytest.raises(ValueError):
        integrate("D8", D6_PARAMS, D6_INIT, PathSpec.line(1, 2))


def test_mpmath_taylor_oracle():
    """[DERIVED] mpmath's Taylor integrator on the t~-form equation agrees to 1e-12."""
    mpmath.mp.dps = 25
    th0, thi = mpmath.mpf(1) / 3, mpmath.mpf(1) / 5
    q0, a0 = mpmath.mpc(0.7, 0.1), mpmath.mpc(0.3, -0.2)

    def F(x, y):
        Q, P = y
        e = mpmath.exp(x)
        return [P, P * P / Q - 4 * (th0 - 1) * e + 4 * thi * Q * Q * e + 4 * Q ** 3 * e * e
                - 4 * e * e / Q]

    # dq/dt~ = t q' = 4a - q
    sol = mpmath.odefun(F, 0, [q0, 4 * a0 - q0])
    tr = integrate("D6", D6_PARAMS, D6_INIT, PathSpec.line(0, 0.4, 5, plane="t_tilde"))
    for s in tr.samples:
        assert abs(s.q - complex(sol(mpmath.mpf(s.t_tilde.real))[0])) < 1e-12


def test_json_round_trip():
    """[TRIVIAL] Trajectory JSON carries [re, im] pairs and reloads."""
    tr = integrate("D6", D6_PARAMS, D6_INIT, PathSpec.line(1, 1.5, 6))
    js = json.loads(json.dumps(tr.to_json()))
    assert js["family"] == "D6" and len(js["samples"][0]["q"]) == 2
    back = Trajectory.from_json(js)
    assert np.allclose(back.arrays()["q"], tr.arrays()["q"], rtol=0, atol=1e-15)


# ------------------------------------------------------------------ residuals

def test_noise_control():
    """[TRIVIAL] 1e-3 noise on q pushes the residual above 1e-2."""
    tr = integrate("D6", D6_PARAMS, D6_INIT, PathSpec.line(1, 2.5 + 0.3j, 61))
    assert residual(tr).max < 1e-7
    assert residual(_noisy(tr, 1e-3)).max > 1e-2


def test_exp_form_agrees_with_t_form():
    """[DERIVED] The t~-form residual is t^2 times the t-form one (chain rule), so after
    dividing by |t|^2 the two reports agree within a factor 10."""
    tr = integrate("D6", D6_PARAMS, D6_INIT, PathSpec.line(0, 0.8 + 0.2j, 61, plane="t_tilde"))
    r_t, r_e = residual(tr), exp_form_check(tr)
    assert r_t.max < 1e-8 and r_e.max < 1e-7
    t = np.abs(tr.arrays()["t"])
    scaled = max(r / t[k] ** 2 for k, r in r_e.per_sample)
    assert r_t.max / 10 <= scaled <= 10 * r_t.max
    tr7 = algebraic_trajectory(PathSpec.line(0, 0.7, 41, plane="t_tilde"))
    assert residual(tr7).max < 1e-9 and exp_form_check(tr7).max < 1e-9


def test_too_few_samples():
    """[TRIVIAL] Residuals need at least five samples."""
    empty = Trajectory("D6", D6_PARAMS, ())
    with pytest.raises(ValueError):
        residual(empty)
    with pytest.raises(ValueError):
        exp_form_check(empty)


def test_step_halving_order():
    """[DERIVED] Halving the step (tol / 2^8 for the 8th-order pair) cuts the residual >= 4x."""
    d6_path = PathSpec.line(1, 2.5 + 0.3j, 61)
    d7_path = PathSpec.line(1, 2, 41)
    q0 = 0.5 ** (1 / 3)
    for tol in (1e-6, 1e-8):
        r6 = [residual(integrate("D6", D6_PARAMS, D6_INIT, d6_path, tol=x)).max
              for x in (tol, tol / 256)]
        r7 = [residual(integrate("D7", (0,), (0, q0, -q0 / 6), d7_path, tol=x)).max
              for x in (tol, tol / 256)]
        assert r6[1] * 4 <= r6[0] and r7[1] * 4 <= r7[0]


# ------------------------------------------------------------------ paths and poles

def test_path_independence():
    """[DERIVED] Homotopic pole-free paths agree at the endpoint to 1e-7."""
    end = 2.5 + 0.3j
    for family, params, init in (("D6", D6_PARAMS, D6_INIT), ("D7", (Fraction(1, 3),), D7_INIT)):
        ends = [integrate(family, params, init, p).endpoint()[0] for p in (
            PathSpec.line(1, end, 21), PathSpec.polyline([1, 1.5 + 0.6j, end], 21),
            PathSpec.polyline([1, 1.7 - 0.5j, end], 21), PathSpec.polyline([1, 2.2 + 1j, end], 21))]
        assert max(abs(e - ends[0]) for e in ends) < 1e-7


def test_d6_frame_swap_continuity():
    """[TRIVIAL] Crossing a pole of q swaps frames with |q Q - 1| < 1e-9."""
    tr = integrate("D6", (Fraction(5, 2), Fraction(1, 2)), (0, -0.1421554, 0.3), PathSpec.line(1, 3, 201))
    swaps = [e for e in tr.events if e["kind"] == "frame_swap"]
    assert swaps and all(e["continuity"] < 1e-9 for e in swaps)
    assert any(s.frame == "inverted" for s in tr.samples)
    assert residual(tr).max < 1e-6


def test_d7_pole_detour():
    """[DERIVED] D7 pole passage with a recorded detour keeps the residual small."""
    tr = integrate("D7", (0,), (0, 5.0, 0.0), PathSpec.line(1, 4, 121))
    assert any(e["kind"] == "detour_pole" for e in tr.events)
    assert residual(tr).max < 1e-8


def test_detour_near_origin_fails():
    """[TRIVIAL] A singularity too close to t = 0 cannot be circled."""
    with pytest.raises(NumericalFailure):
        integrate("D7", (0,), (0, 1e4, 0.0), PathSpec.line(1, 0.01, 21))


# ------------------------------------------------------------------ Bäcklund checks

def test_backlund_s2_on_generic_trajectory():
    """[DERIVED] s2 maps a generic D6 solution to a solution of the target equation."""
    tr = integrate("D6", D6_PARAMS, D6_INIT, PathSpec.line(1, 2.5 + 0.3j, 61))
    assert backlund_residual_check("s2", tr).max < 1e-7


def test_backlund_s4_identity_on_diagonal():
    """[PAPER] s4 at theta0 = thetainf returns the input trajectory."""
    from painleve3.backlund import solution_map

    tr = integrate("D6", (Fraction(1, 3), Fraction(1, 3)), D6_INIT, PathSpec.line(1, 2, 31))
    out = solution_map("s4", tr)
    assert np.abs(out.arrays()["q"] - tr.arrays()["q"]).max() < 1e-10
    assert np.abs(out.arrays()["a"] - tr.arrays()["a"]).max() < 1e-10


def test_backlund_composite_on_algebraic():
    """[DERIVED] s2+ s1+ on the D7 algebraic trajectory solves the theta = 1 equation."""
    tr = algebraic_trajectory(PathSpec.line(1, 2, 41))
    assert backlund_residual_check("s2+ s1+", tr).max < 1e-7
