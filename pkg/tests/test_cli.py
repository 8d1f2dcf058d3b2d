import io
import json
from contextlib import redirect_stdout

import pytest

from ringsieve.cli import main


def run(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


@pytest.fixture
def sq_file(tmp_path):
    f = tmp_path / "sq.sv"
    f.write_text("algebra Q\ntail kfree 2\n")
    return str(f)


@pytest.fixture
def cube_file(tmp_path):
    f = tmp_path / "cube.sv"
    f.write_text("algebra Q\ntail kfree 3\n")
    return str(f)


@pytest.fixture
def flip_code_file(tmp_path):
    from ringsieve.presets import neighbor_flip_code
    from ringsieve.shiftspace import format_code

    f = tmp_path / "flip.code"
    f.write_text(format_code(neighbor_flip_code()))
    return str(f)


def test_density_and_solve(sq_file):
    code, out = run(["sieve", "density", "--spec", sq_file, "--cutoff", "2000"])
    assert code == 0 and "interval" in out
    code, out = run(["lg", "solve", "--spec", sq_file, "--cong", "2^2=3"])
    assert code == 0 and "witness: 3" in out


def test_enumerate(sq_file):
    code, out = run(["sieve", "enumerate", "--spec", sq_file, "--bound", "10"])
    assert code == 0
    assert "count: 14" in out


def test_tail_command(sq_file):
    code, out = run(["sieve", "tail", "--spec", sq_file, "--bound", "200", "--norm-cutoff", "10"])
    assert code == 0 and "count: 8" in out


def test_exit_code_negative_outcomes(sq_file, cube_file):
    code, out = run(["shift", "conjugacy", "--spec", sq_file, "--other", cube_file])
    assert code == 1 and "provably_not" in out
    code, out = run(["shift", "conjugacy", "--spec", sq_file, "--other", sq_file])
    assert code == 0 and "witness" in out


def test_exit_code_missing_file():
    code, out = run(["sieve", "density", "--spec", "/nonexistent/x.sv"])
    assert code == 3


def test_exit_code_usage(sq_file):
    with pytest.raises(SystemExit) as e:
        run(["sieve", "density", "--cutof", "10", "--spec", sq_file])
    assert e.value.code == 2
    code, _ = run(["sieve", "density"])
    assert code == 2


def test_exit_code_domain_error(tmp_path):
    f = tmp_path / "onefree.sv"
    f.write_text("algebra Q\ntail kfree 1\n")
    code, out = run(["sieve", "density", "--spec", str(f)])
    assert code == 4 and "TailNotBoundable" in out


def test_scan_reports_violation_with_exit_1():
    code, out = run(
        ["linmap", "scan", "--source", "Q", "--target", "Q(sqrt 3)", "--matrix", "1,0", "--cutoff", "10"]
    )
    assert code == 1 and "violating_prime: 2" in out


def test_shear_unit_check_exit_1():
    code, out = run(
        ["linmap", "units", "--source", "Q(sqrt 2)", "--matrix", "1,1,0,1", "--height", "5"]
    )
    assert code == 1 and "counterexample: -1+1*w" in out


def test_apply_block_code(flip_code_file, tmp_path):
    pat = tmp_path / "demo.pat"
    pat.write_text("-3,-2,-1,2,3,4,9,17,19\n")
    code, out = run(
        ["shift", "apply", "--code", flip_code_file, "--pattern", str(pat), "--known=-4:20"]
    )
    assert code == 0
    assert "image: -3,-1,2,4,9,17,18,19" in out


def test_byte_identical_output(sq_file):
    args = ["--json", "entropy", "product", "--spec", sq_file, "--cutoff", "3000"]
    _, out1 = run(args)
    _, out2 = run(args)
    assert out1 == out2
    doc = json.loads(out1)
    assert doc["command"] == "entropy product"
    assert len(doc["interval"]) == 2


def test_preservers_command():
    code, out = run(["linmap", "preservers", "--q", "3", "--n", "2", "--m", "2"])
    assert code == 0 and "preservers: 8" in out and "all_monomial: True" in out


def test_orbit_command(tmp_path):
    pat = tmp_path / "p.pat"
    pat.write_text("1,2\n")
    win = tmp_path / "w.pat"
    win.write_text("0,1,2\n")
    code, out = run(
        ["shift", "orbit", "--field", "Q", "--k", "2", "--pattern", str(pat), "--window-pattern", str(win)]
    )
    assert code == 0 and "delta: 4" in out


def test_surjectivity_command():
    code, out = run(["lg", "surjectivity", "--field", "Q", "--k", "2", "--p", "2"])
    assert code == 0 and "target_classes: 3" in out


@pytest.mark.parametrize(
    "group,sub",
    [
        ("sieve", "enumerate"),
        ("lg", "solve"),
        ("linmap", "check"),
        ("shift", "admissible"),
        ("entropy", "product"),
    ],
)
def test_selftests(group, sub):
    code, out = run([group, sub, "--selftest"])
    assert code == 0
    assert "selftest_result: pass" in out
