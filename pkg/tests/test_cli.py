"""End-to-end tests of every subcommand, exit codes and JSON output.

Oracle tags: [PAPER] published values, [DERIVED] module results, [TRIVIAL] plumbing.
"""

import json
import subprocess
import sys
from fractions import Fraction

import pytest

from painleve3.cli import EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC, EXIT_OK, main, parse_complex
from painleve3.exactalg import GaussRat

D6 = ["--family", "d6", "--theta0", "1/3", "--thetainf", "1/5"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


# ------------------------------------------------------------------ input parsing

def test_parse_complex_forms():
    """[TRIVIAL] re, im i and re+im i with rational or decimal parts."""
    assert parse_complex("1/3") == GaussRat(Fraction(1, 3))
    assert parse_complex("0.25-2i") == GaussRat(Fraction(1, 4), -2)
    assert parse_complex("-i") == GaussRat(0, -1)
    assert parse_complex("1/2 + 3/4*i") == GaussRat(Fraction(1, 2), Fraction(3, 4))


def test_empty_and_bad_input(capsys):
    """[TRIVIAL] No arguments prints usage and exits 2; bad values exit 2."""
    code, _, err = run(capsys)
    assert code == EXIT_INPUT and "usage" in err
    assert run(capsys, "integrate", "--family", "d6", "--q0", "x")[0] == EXIT_INPUT
    assert run(capsys, "verify")[0] == EXIT_INPUT
    assert run(capsys, "monodromy", "singular", "--family", "d6", "--alpha", "0", "--beta", "1")[0] \
        == EXIT_INPUT


# ------------------------------------------------------------------ verify

@pytest.mark.parametrize("family", ["d6", "d7"])
def test_verify_isomonodromy(capsys, family):
    """[DERIVED] Derived flows equal the closed forms."""
    code, data = run_json(capsys, "verify", "isomonodromy", "--family", family)
    assert code == EXIT_OK and data["pass"]
    assert set(data["flows"][family.upper()]) == {"q", "a"}


def test_verify_backlund_json(capsys):
    """[DERIVED] {word: "s2", checks: [...], pass: true}."""
    code, data = run_json(capsys, "verify", "backlund", "--element", "s2", "--family", "d6")
    assert code == EXIT_OK
    assert data["word"] == "s2" and data["pass"] is True and data["checks"]
    assert data["paramAction"] == "(theta0 + 1, thetainf + 1, t~)"


def test_verify_backlund_bad_word(capsys):
    """[TRIVIAL] Unknown letters are invalid input."""
    assert run(capsys, "verify", "backlund", "--element", "s9", "--family", "d6")[0] == EXIT_INPUT


@pytest.mark.parametrize("family", ["d6", "d7"])
def test_verify_group_relations(capsys, family):
    """[DERIVED] All relations hold."""
    code, out, _ = run(capsys, "verify", "group-relations", "--family", family)
    assert code == EXIT_OK and "FAIL" not in out


def test_verify_okamoto_and_embed(capsys):
    """[DERIVED] Change of variables and monodromy identities pass."""
    assert run(capsys, "verify", "okamoto")[0] == EXIT_OK
    code, data = run_json(capsys, "verify", "monodromy-embed")
    assert code == EXIT_OK and data["pass"]


# ------------------------------------------------------------------ monodromy

def test_monodromy_singular(capsys):
    """[PAPER] alpha = beta = 1: points (0,-1,2) and (-1,0,2)."""
    code, data = run_json(capsys, "monodromy", "singular", "--family", "d6", "--alpha", "1",
                          "--beta", "1")
    assert code == EXIT_OK
    assert sorted(map(tuple, data["points"])) == [("-1", "0", "2"), ("0", "-1", "2")]
    code, data = run_json(capsys, "monodromy", "singular", "--family", "d7", "--alpha", "2")
    assert code == EXIT_OK and data["points"] == []


def test_monodromy_alpha(capsys):
    """[PAPER] Trivial Stokes invariants give (i, 0, 0); alpha = 0 is refused."""
    code, data = run_json(capsys, "monodromy", "alpha", "--e", "0", "--invariants",
                          "1/2,1/2,-1/2,-1/2")
    assert code == EXIT_OK and (data["alpha"], data["c1"], data["c2"]) == ("i", "0", "0")
    code, _, err = run(capsys, "monodromy", "alpha", "--e", "0", "--l", "1,0,0,1")
    assert code == EXIT_INPUT and "excluded" in err


# ------------------------------------------------------------------ special

def test_special_riccati_series(capsys):
    """[DERIVED] The series object for (1,1), d = 1/4, order 30."""
    code, data = run_json(capsys, "special", "riccati", "--eps1", "1", "--eps2", "1", "--d", "1/4",
                          "--order", "30")
    assert code == EXIT_OK
    assert {"rho", "coeffs", "N", "logFlag"} <= set(data)
    assert data["rho"] == "-1" and data["coeffs"][2] == "-2/3"


def test_special_algebraic_constants_presence(capsys):
    """[PAPER]/[DERIVED] Algebraic, constant and presence subcommands."""
    code, data = run_json(capsys, "special", "algebraic", "--theta", "0")
    assert code == EXIT_OK and data["a"] == "-1/6*q"
    code, data = run_json(capsys, "special", "constants", "--theta0", "2", "--thetainf", "1")
    assert code == EXIT_OK and data["constants"] == ["1", "-1"]
    code, data = run_json(capsys, "special", "presence", "--theta0", "4", "--thetainf", "2")
    assert code == EXIT_OK and data["families"] == [[1, 1], [1, -1]]
    assert run(capsys, "special", "algebraic", "--theta", "1/2")[0] == EXIT_INPUT


# ------------------------------------------------------------------ integrate, apply, residual

def test_integrate_rejects_origin(capsys):
    """[TRIVIAL] A path starting at t = 0 is invalid input."""
    code = run(capsys, "integrate", "--family", "d7", "--theta", "0", "--q0", "0.8", "--a0", "0",
               "--t0", "0")[0]
    assert code == EXIT_INPUT


def test_integrate_decimal_note(capsys):
    """[TRIVIAL] Decimal inputs are reported with their exact reading."""
    code, data = run_json(capsys, "integrate", "--family", "d7", "--theta", "0", "--q0", "0.8",
                          "--a0", "0", "--samples", "11")
    assert code == EXIT_OK and "0.8 -> 4/5" in data["note"]


def test_integrate_check_failure(capsys):
    """[TRIVIAL] An impossible residual bound gives exit 1."""
    code = run(capsys, "integrate", *D6, "--q0", "0.7+0.1i", "--a0", "0.3-0.2i", "--check", "1e-30")[0]
    assert code == EXIT_FAIL


def test_integrate_numeric_failure(capsys):
    """[TRIVIAL] A singularity next to t = 0 is a numerical failure (exit 3)."""
    code = run(capsys, "integrate", "--family", "d7", "--theta", "0", "--q0", "10000", "--a0", "0",
               "--t1", "1/100", "--samples", "21")[0]
    assert code == EXIT_NUMERIC


def test_pipeline_integrate_apply_residual(capsys, tmp_path):
    """[DERIVED] integrate --out, backlund apply --traj, residual on the mapped file."""
    tr = tmp_path / "tr.json"
    mapped = tmp_path / "mapped.json"
    code = run(capsys, "integrate", *D6, "--q0", "0.7+0.1i", "--a0", "0.3-0.2i", "--t1", "2.5+0.3i",
               "--samples", "61", "--out", str(tr), "--check", "1e-7")[0]
    assert code == EXIT_OK
    code = run(capsys, "backlund", "apply", "--word", "s2", "--traj", str(tr), "--out", str(mapped))[0]
    assert code == EXIT_OK
    assert json.loads(mapped.read_text())["params"]
    code, data = run_json(capsys, "residual", "--traj", str(mapped))
    assert code == EXIT_OK and data["max"] < 1e-7
    # the t~-form residual carries a factor |t|^2 relative to the t-form one
    code, data = run_json(capsys, "residual", "--traj", str(tr), "--word", "s2", "--exp-form",
                          "--tol", "1e-5")
    assert code == EXIT_OK
    assert run(capsys, "residual", "--traj", str(tmp_path / "missing.json"))[0] == EXIT_INPUT


def test_backlund_apply_state(capsys):
    """[DERIVED] s2 on an exact state shifts both parameters by one."""
    code, data = run_json(capsys, "backlund", "apply", *D6, "--word", "s2", "--q", "1/2", "--a",
                          "1/3", "--t", "1")
    assert code == EXIT_OK and data["params"] == ["4/3", "6/5"]
    code = run(capsys, "backlund", "apply", *D6, "--word", "s2", "--q", "1/2")[0]
    assert code == EXIT_INPUT


def test_json_output_is_deterministic(capsys):
    """[TRIVIAL] Two runs print identical bytes."""
    argv = ("verify", "isomonodromy", "--family", "d6", "--json")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_console_script_entry_point():
    """[TRIVIAL] python -m painleve3.cli runs the same parser."""
    res = subprocess.run([sys.executable, "-m", "painleve3.cli", "special", "constants",
                          "--theta0", "2", "--thetainf", "5", "--json"],
                         capture_output=True, text=True, timeout=120)
    assert res.returncode == 0 and json.loads(res.stdout)["constants"] == []

