import io
import json
import subprocess
import sys

import pytest

from negkdv.anchors import anchor
from negkdv.cli import run_command


def run(*argv):
    buf = io.BytesIO()
    code = run_command(list(argv), out=buf)
    return code, buf.getvalue()


def checks(out):
    return {c["check_id"]: c for c in json.loads(out)["checks"]}


def test_verify_span_json():
    code, out = run("verify", "lemma32", "--format", "json")
    assert code == 0
    cs = checks(out)
    assert set(cs) == {"lemma32.n4", "lemma32.n5"}
    assert all(c["status"] == "pass" for c in cs.values())


def test_stabilizer_anchor():
    code, out = run("verify", "stabilizer")
    c = checks(out)["stabilizer"]
    assert code == 0 and c["status"] == "pass" and c["paper_anchor"] == anchor("stabilizer")


def test_coadjoint_exit_three():
    code, out = run("verify", "coadjoint")
    c = checks(out)["coadjoint"]
    assert code == 3 and c["status"] == "discrepancy"
    assert c["details"]["derived_density"] and c["details"]["printed_density"]


def test_painleve_and_soliton():
    code, out = run("painleve", "--ode", "eq102")
    assert code == 3
    assert checks(out)["painleve.eq102"]["details"]["leading_orders"][0]["p"] == -2
    code, out = run("soliton", "--flow", "k3")
    assert code == 0
    sol = checks(out)["soliton.k3"]["details"]["solutions"][0]
    assert sol["n"] == "2/3" and sol["family"]["p"] == "-9/10*A^3"


def test_tolerance_flag_can_fail():
    code, out = run("soliton", "--flow", "k4", "--tolerance", "0")
    assert code == 1


def test_expand_and_symmetry():
    code, out = run("expand", "--n", "4", "--travelling")
    assert code == 0 and "33*w_x*w_xx^2" in checks(out)["expand.n4.travelling"]["details"]["polynomial"]
    code, out = run("symmetry", "--eq", "eq102")
    assert code == 3
    code, out = run("symmetry", "--eq", "u*u_x + u_xxx")
    assert code == 0


@pytest.mark.parametrize("argv", [["verify", "nope"], ["painleve", "--ode", "u ^ -1"],
                                  ["soliton", "--flow", "k9"], ["frobnicate"],
                                  ["symmetry", "--eq", "u +"]])
def test_usage_errors(argv, capsys):
    code, _ = run(*argv)
    assert code == 2


def test_text_format():
    code, out = run("verify", "rescale", "--format", "text")
    assert code == 0 and out.decode().splitlines()[-1] == "summary: 1 pass, 0 fail, 0 discrepancy"


def test_determinism():
    a = run("verify", "all", "--seed", "5")
    b = run("verify", "all", "--seed", "5")
    assert a == b
    assert json.loads(a[1])["summary"] == {"pass": 22, "fail": 0, "discrepancy": 6}


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "negkdv", "verify", "hamiltonian"],
                       capture_output=True)
    assert p.returncode == 0 and json.loads(p.stdout)["summary"]["pass"] == 1


def test_emit_empty():
    from negkdv.report import REPORT_VERSION, emit_report
    assert json.loads(emit_report([])) == {"version": REPORT_VERSION, "checks": [],
                                           "summary": {"pass": 0, "fail": 0, "discrepancy": 0}}
