import subprocess
import sys

import pytest

from irva.cli import main

TRIANGLE = "dim 2; x1 >= 1 & x2 < 2 & x1 - x2 <= 1"


@pytest.fixture
def files(tmp_path):
    def build(name, text):
        src = tmp_path / f"{name}.f"
        src.write_text(text + "\n")
        out = tmp_path / f"{name}.irva"
        assert main(["build", str(src), "-o", str(out)]) == 0
        return str(out)

    build.dir = tmp_path
    return build


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out.strip(), out.err.strip()


def test_member(files, capsys):
    t = files("tri", TRIANGLE)
    assert run(capsys, "member", t, "1,0") == (0, "true", "")
    assert run(capsys, "member", t, "1,2")[:2] == (1, "false")
    assert run(capsys, "member", t, "3,2")[:2] == (1, "false")
    assert run(capsys, "member", t, "2, 3/2")[:2] == (0, "true")
    assert run(capsys, "member", t, "2,3/2", "--oracle")[:2] == (0, "true")


def test_predicates_and_exit_codes(files, capsys):
    t = files("tri", TRIANGLE)
    half = files("half", "dim 2; x1 >= 1")
    other = files("other", "dim 2; x1 - x2 <= 1 & 1 <= x1 & 2 > x2")
    assert run(capsys, "subset", t, half)[:2] == (0, "true")
    assert run(capsys, "subset", half, t)[:2] == (1, "false")
    assert run(capsys, "eq", t, other)[:2] == (0, "true")
    assert run(capsys, "eq", t, half)[:2] == (1, "false")
    diff = str(files.dir / "d.irva")
    assert main(["op", "diff", t, t, "-o", diff]) == 0
    assert run(capsys, "empty", diff)[:2] == (0, "true")
    assert run(capsys, "empty", t)[:2] == (1, "false")


def test_not_and_op(files, capsys):
    t = files("tri", TRIANGLE)
    neg = str(files.dir / "neg.irva")
    assert main(["not", t, "-o", neg]) == 0
    direct = files("direct", "dim 2; !(x1 >= 1 & x2 < 2 & x1 - x2 <= 1)")
    assert run(capsys, "eq", neg, direct)[:2] == (0, "true")
    both = str(files.dir / "both.irva")
    assert main(["op", "or", t, neg, "-o", both]) == 0
    assert run(capsys, "eq", both, files("all", "dim 2; true"))[:2] == (0, "true")
    assert run(capsys, "member", both, "-7,100", "--oracle")[:2] == (0, "true")


def test_round_trip_files_are_stable(files):
    t = files("tri", TRIANGLE)
    again = str(files.dir / "again.irva")
    assert main(["minimize", t, "-o", again]) == 0
    assert open(t).read() == open(again).read()


def test_stats_dot_validate(files, capsys):
    t = files("tri", TRIANGLE)
    code, out, _ = run(capsys, "stats", t)
    assert code == 0 and "implicit 9 (in 4, out 5)" in out
    code, out, _ = run(capsys, "dot", t)
    assert code == 0 and out.startswith("digraph")
    assert run(capsys, "validate", t) == (0, "", "")


def test_validate_reports_violations(tmp_path, capsys):
    bad = tmp_path / "bad.irva"
    bad.write_text("IRVA v1\ndim 1\ninitial 0\nimplicit 0 out dim 0\nimplicit 1 in dim 1\nitrans 0 +1 1\n")
    code, out, _ = run(capsys, "validate", str(bad))
    assert code == 3 and "IncompleteTransitions" in out
    code, _, err = run(capsys, "member", str(bad), "1")
    assert code == 3 and "integrity" in err


def test_usage_errors(files, tmp_path, capsys):
    t = files("tri", TRIANGLE)
    assert run(capsys, "member", t, "1")[0] == 2
    assert run(capsys, "member", t, "1,x")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "stats", str(tmp_path / "missing.irva"))[0] == 2
    (tmp_path / "junk.f").write_text("dim 2; x1 >")
    assert run(capsys, "build", str(tmp_path / "junk.f"), "-o", str(tmp_path / "j.irva"))[0] == 2
    one = files("one", "dim 1; x1 > 0")
    assert run(capsys, "op", "and", t, one, "-o", str(tmp_path / "x.irva"))[0] == 2


def test_depth_cap_exit_code(tmp_path, capsys):
    (tmp_path / "t.f").write_text(TRIANGLE)
    code, _, err = run(capsys, "build", str(tmp_path / "t.f"), "-o", str(tmp_path / "t.irva"), "--depth-cap", "2")
    assert code == 3 and "depth cap" in err


def test_console_entry_point(files):
    t = files("tri", TRIANGLE)
    proc = subprocess.run(
        [sys.executable, "-m", "irva.cli", "member", t, "1,0"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "true"
