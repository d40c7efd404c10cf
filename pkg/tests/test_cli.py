import json
import subprocess
import sys

import pytest

from nambu import fixtures
from nambu.cli import main
from nambu.parser import parse_system
from nambu.tensor import levi_civita
from nambu.transform import transform_tensor


def sysfile(name):
    return str(fixtures.path(name))


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_examples(capsys):
    assert run(capsys, "verify", sysfile("n4"), "--tensor", "L1", "--cond1", "--cond2")[0] == 0
    code, out, _ = run(capsys, "verify", sysfile("n6"), "--tensor", "LBLOCK", "--cond1")
    assert code == 1 and "witness: (1, 4, 2, 3, 5, 6)" in out and "residual: 1" in out
    assert run(capsys, "verify", sysfile("n3"), "--matrix", "J", "--casimir", "C")[0] == 0
    assert run(capsys, "verify", sysfile("n3"), "--matrix", "J", "--casimir", "H")[0] == 1


def test_verify_defaults_and_flags(capsys):
    code, out, _ = run(capsys, "verify", sysfile("n4"), "--tensor", "L2")
    assert code == 0 and "cond_algebraic: PASS" in out and "cond_differential: PASS" in out
    code, out, _ = run(capsys, "verify", sysfile("n6"), "--matrix", "J")
    assert code == 0 and "jacobi: PASS" in out
    code, out, _ = run(capsys, "verify", sysfile("n6"), "--matrix", "J", "--compatible", "J1")
    assert code == 0 and "compatibility[J1]: PASS" in out
    code, out, _ = run(capsys, "verify", sysfile("n3"), "--tensor", "EPS", "--fi", "--fi-degree", "1")
    assert code == 0 and "fundamental_identity: PASS" in out


@pytest.mark.parametrize("mu,code", [(0, 0), (1, 1)])
def test_fi_switch(capsys, mu, code):
    got, out, _ = run(capsys, "verify", sysfile("n6"), "--tensor", "LBLOCK", "--fi",
                      "--fi-tuple", "p1,u1,p2,H,E", "--param", f"mu={mu}")
    assert got == code
    if code:
        assert "residual: 2*q2" in out


def test_admissible_examples(capsys):
    for name, rank, K, verdict in (("n3", 2, 1, "yes"), ("n4", 2, 2, "yes"), ("n6", 4, 2, "no")):
        code, out, _ = run(capsys, "admissible", sysfile(name))
        assert code == 0
        assert f"rank = {rank}\nK = {K}\nadmissible: {verdict}" in out


def test_transform_examples(capsys):
    code, out, _ = run(capsys, "transform", sysfile("n3"), "--matrix", "J", "--map", "PHI")
    assert code == 0 and out == "vars: x1 x2 x3\nmatrix J\n  1 2 : 1\n"
    code, out, _ = run(capsys, "transform", sysfile("n4"), "--tensor", "L1", "--map", "PHI2")
    assert parse_system(out).tensors["L1"] == levi_civita(4, [1, 2, 3])
    spec = fixtures.load("n4")
    code, out, _ = run(capsys, "transform", sysfile("n4"), "--tensor", "L3", "--map", "ID")
    assert parse_system(out).tensors["L3"].entries.keys() == spec.tensors["L3"].entries.keys()


def test_transform_round_trip_all(capsys):
    # every rendered object re-parses to exactly the transformed object
    for name in fixtures.NAMES:
        spec = fixtures.load(name)
        for mname, cmap in spec.maps.items():
            for kind, bucket in (("--tensor", spec.tensors), ("--matrix", spec.matrices)):
                for oname, obj in bucket.items():
                    code, out, _ = run(capsys, "transform", sysfile(name), kind, oname, "--map", mname)
                    assert code == 0
                    back = parse_system(out)
                    got = (back.tensors if kind == "--tensor" else back.matrices)[oname]
                    assert got == transform_tensor(obj, cmap)


def test_derive_examples(capsys):
    spec3, spec4 = fixtures.load("n3"), fixtures.load("n4")
    code, out, _ = run(capsys, "derive", sysfile("n3"), "--tensor", "EPS", "--casimir", "C")
    assert code == 0 and parse_system(out).matrices["J"] == spec3.matrices["J"]
    code, out, _ = run(capsys, "derive", sysfile("n4"), "--tensor", "EPS4", "--casimir", "C1",
                       "--casimir", "C2")
    assert code == 0 and parse_system(out).matrices["J"] == spec4.matrices["J"]
    code, out, _ = run(capsys, "derive", sysfile("n3"), "--tensor", "EPS", "--casimir", "m")
    assert code == 2
    code, out, _ = run(capsys, "derive", sysfile("n3"), "--tensor", "EPS", "--casimir", "C",
                       "--casimir", "H")
    assert code == 2


def test_derive_constant_casimir(tmp_path, capsys):
    src = fixtures.text("n3") + "\nobs ONE = 1\n"
    f = tmp_path / "c.sys"
    f.write_text(src)
    code, out, _ = run(capsys, "derive", f, "--tensor", "EPS", "--casimir", "ONE")
    assert code == 0 and parse_system(out).matrices["J"].is_zero()


def test_simulate_examples(tmp_path, capsys):
    out_csv = tmp_path / "o.csv"
    code, out, _ = run(capsys, "simulate", sysfile("n3"), "--tensor", "EPS", "--gen", "H",
                       "--gen", "C", "--z0", "1,0,1", "--dt", "1e-3", "--T", "100",
                       "--tol", "1e-7", "--out", out_csv)
    assert code == 0 and "H: max relative drift" in out
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "t,z1,z2,z3,H,C" and len(lines) == 100002
    code, out, _ = run(capsys, "simulate", sysfile("n6"), "--matrix", "J", "--gen", "H",
                       "--monitor", "C1", "--monitor", "C2", "--z0", "0.1,0,0.01,0.1,0,0.01",
                       "--dt", "1e-2", "--T", "20", "--tol", "1e-7", "--out", tmp_path / "six.csv")
    assert code == 0


def test_simulate_stdout_and_tolerance(capsys):
    code, out, err = run(capsys, "simulate", sysfile("n3"), "--matrix", "J", "--gen", "H",
                         "--monitor", "C", "--z0", "1,0,1", "--dt", "0.5", "--T", "20",
                         "--tol", "1e-12")
    assert code == 1
    assert out.startswith("t,z1,z2,z3,H,C\n") and "EXCEEDS TOLERANCE" in err


def test_simulate_blowup_exit_1(tmp_path, capsys):
    f = tmp_path / "b.sys"
    # db/dt = -b^2 from b0 = -10 has a pole at t = 0.1
    f.write_text("vars: a b\nmatrix J\n  1 2 : 1\nobs G = a*b^2\n")
    code, _, err = run(capsys, "simulate", f, "--matrix", "J", "--gen", "G", "--z0", "1,-10",
                       "--dt", "0.001", "--T", "5", "--out", tmp_path / "b.csv")
    assert code == 1 and "non-finite" in err


@pytest.mark.parametrize("argv", [
    ["simulate", "n3", "--tensor", "EPS", "--gen", "H", "--gen", "C", "--z0", "1,0,1",
     "--dt", "0", "--T", "1"],
    ["simulate", "n3", "--tensor", "EPS", "--gen", "H", "--z0", "1,0,1", "--dt", "0.1", "--T", "1"],
    ["simulate", "n3", "--tensor", "EPS", "--gen", "H", "--gen", "C", "--z0", "1,0",
     "--dt", "0.1", "--T", "1"],
    ["simulate", "n3", "--tensor", "EPS", "--gen", "H", "--gen", "C", "--z0", "1,x,0",
     "--dt", "0.1", "--T", "1"],
    ["verify", "n3", "--tensor", "NOPE"],
    ["verify", "n3"],
    ["verify", "n3", "--matrix", "J", "--cond1"],
    ["verify", "n3", "--tensor", "EPS", "--matrix", "J"],
    ["verify", "n3", "--tensor", "EPS", "--param", "zeta=1"],
    ["verify", "n3", "--tensor", "EPS", "--param", "m"],
    ["verify", "n3", "--tensor", "EPS", "--param", "m=q"],
    ["admissible", "n3", "--samples", "0"],
    ["transform", "n3", "--matrix", "J", "--map", "NOPE"],
    ["verify", "missing"],
])
def test_usage_errors_exit_2(argv, capsys):
    argv = [sysfile(a) if a in fixtures.NAMES else ("/nonexistent.sys" if a == "missing" else a)
            for a in argv]
    try:
        code = main(argv)
    except SystemExit as exc:  # argparse rejects bad knobs itself
        code = exc.code
    assert code == 2


def test_malformed_file_exit_2(tmp_path, capsys):
    f = tmp_path / "bad.sys"
    f.write_text("vars: q p\nmatrix J\n  1 2 : q +* p\n")
    code, _, err = run(capsys, "verify", f, "--matrix", "J")
    assert code == 2 and "line 3" in err


def test_json_output_is_byte_identical(capsys):
    argv = ["admissible", sysfile("n6"), "--seed", "7", "--format", "json"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    data = json.loads(a)
    assert data == {"matrix": "J", "dimension": 6, "rank": 4, "casimir_count": 2,
                    "admissible": False, "samples": 8, "seed": 7}
    argv = ["verify", sysfile("n6"), "--tensor", "LBLOCK", "--format", "json"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    rep = json.loads(a)["reports"][0]
    assert rep["witness"] == [1, 4, 2, 3, 5, 6] and rep["residual"] == "1" and not rep["passed"]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nambu", "admissible", sysfile("n3")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "admissible: yes" in proc.stdout
