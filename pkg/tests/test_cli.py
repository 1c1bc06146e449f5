import json
import subprocess
import sys
from fractions import Fraction

import pytest

from wittlab.cli import main
from wittlab.report import ReportDocument, Result


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_bracket(capsys):
    code, out, _ = run(capsys, "bracket", "L[2]", "L[-2]", "--algebra", "wtilde")
    assert code == 0
    assert out.strip() == "4*L[0] + 1/2*C1"


def test_bracket_parse_error_is_usage_error(capsys):
    code, _, err = run(capsys, "bracket", "L[2] +", "L[1]")
    assert code == 2
    assert "position" in err


def test_aut_compose(capsys):
    code, out, _ = run(capsys, "aut", "compose", "b(2,3)", "t(1)")
    assert code == 0
    assert out.strip() == "inner{} sigma(e=1, l=3, a=2, mu=3)"


def test_aut_apply_and_invert(capsys):
    assert run(capsys, "aut", "apply", "z(3,2)", "L[1]")[1].strip() == "L[1] + 4*I[4]"
    out = run(capsys, "aut", "invert", "inner{} sigma(e=-1, l=2, a=3, mu=4)")[1]
    assert out.strip() == "inner{} sigma(e=-1, l=-1/2, a=3, mu=1/4)"
    out = run(capsys, "aut", "normal-form", "z(2,1) b(2,1)")[1]
    assert out.strip() == "inner{2:1} sigma(e=1, l=0, a=2, mu=1)"


def test_aut_verify_exit_codes(capsys):
    assert run(capsys, "aut", "verify", "pi(-1) b(2,-1)", "--algebra", "w22")[0] == 0
    assert run(capsys, "aut", "verify", "b(2,3)", "--algebra", "w22")[0] == 1


def test_h2(capsys):
    code, out, _ = run(capsys, "h2", "--window", "6", "--degree", "0")
    assert code == 0
    assert "h2_dim 2" in out.splitlines()
    assert "PAIR L[2] L[-2] = 1/2" in out.splitlines()
    assert "h2_dim 0" in run(capsys, "h2", "--window", "6", "--degree", "1")[1].splitlines()


def test_h2_rejects_small_window(capsys):
    code, _, err = run(capsys, "h2", "--window", "2")
    assert code == 2 and "window" in err


def test_der(capsys):
    code, out, _ = run(capsys, "der", "--degree", "0", "--window", "6")
    assert code == 0
    assert "outer_dim 1" in out.splitlines()
    assert "MAP I[2] -> I[2]" in out.splitlines()


def test_verify_jacobi_w22(capsys):
    assert run(capsys, "verify", "jacobi", "--algebra", "w22", "--window", "10")[0] == 0


def test_verify_rejects_small_window(capsys):
    code, _, err = run(capsys, "verify", "cocycles", "--window", "2")
    assert code == 2 and "window" in err


def test_bad_flags_are_usage_errors(capsys):
    assert run(capsys, "verify", "everything")[0] == 2
    assert run(capsys, "h2", "--algebra", "sl2")[0] == 2
    assert run(capsys, "h2", "--window", "six")[0] == 2


def test_env_window(capsys, monkeypatch):
    monkeypatch.setenv("WITTLAB_WINDOW", "4")
    code, out, _ = run(capsys, "h2", "--json")
    assert code == 0 and json.loads(out)["window"] == 4
    monkeypatch.setenv("WITTLAB_WINDOW", "2")
    assert run(capsys, "h2")[0] == 2


def test_json_report_round_trip(capsys):
    code, out, _ = run(capsys, "verify", "cocycles", "--window", "4", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == 1 and data["command"] == "verify cocycles"
    assert all(r["status"] == "pass" for r in data["results"])
    assert ReportDocument.from_json(out).to_json() == out.rstrip("\n")


def test_json_has_no_floats(capsys):
    out = run(capsys, "h2", "--window", "4", "--json")[1]

    def walk(v):
        if isinstance(v, float):
            raise AssertionError(f"float {v} in report")
        if isinstance(v, dict):
            for x in v.values():
                walk(x)
        if isinstance(v, list):
            for x in v:
                walk(x)
    walk(json.loads(out))


def test_exit_code_follows_statuses():
    doc = ReportDocument("verify x", "w", 3, [Result.check("a", 1, 1, "oracle")])
    assert doc.exit_code == 0
    doc.results.append(Result.check("b", 1, 2, "oracle"))
    assert doc.exit_code == 1
    doc.results[-1] = Result.skipped("b", "not applicable")
    assert doc.exit_code == 1


def test_result_renders_exact_rationals():
    r = Result.check("x", Fraction(1, 2), Fraction(2, 4), "oracle")
    assert r.computed == "1/2" and r.status == "pass"
    with pytest.raises(TypeError):
        Result.check("y", 0.5, 0.5, "oracle")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "wittlab", "bracket", "L[1]", "L[-1]"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "2*L[0]"
