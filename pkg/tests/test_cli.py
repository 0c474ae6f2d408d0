import json
import subprocess
import sys

import pytest

from medianspace import fileio
from medianspace import fixtures as F
from medianspace.cli import cli_run, main


def run(*argv):
    rep, code, out = cli_run(list(argv))
    return code, out


@pytest.fixture
def q4_file(tmp_path):
    path = tmp_path / "q4.json"
    fileio.write_space(F.hypercube(4), path)
    return path


def test_rank_prints_integer(q4_file):
    assert run("rank", str(q4_file)) == (0, "4")


def test_rank_from_fixture_directory(q4_file, monkeypatch):
    monkeypatch.setenv("MEDIANSPACE_FIXTURE_DIR", str(q4_file.parent))
    assert run("rank", "q4") == (0, "4")


@pytest.mark.parametrize("spec", ["hypercube:3", "substar", "weighted_star:5", "grid:3", "star:3*path:3"])
def test_roundtrip_passes(spec):
    code, out = run("roundtrip", f"fixture:{spec}")
    assert code == 0 and "FAIL" not in out


def test_profile_weighted_star():
    code, out = run("profile", "fixture:weighted_star:20", "--eps", "1/10")
    assert (code, out) == (0, "N(1/10) = 9")


def test_validate_rejects_cycle():
    code, out = run("validate", "fixture:cycle:5")
    assert code == 1
    assert "witness" in out


def test_validate_accepts_grid():
    assert run("validate", "fixture:grid:3")[0] == 0


def test_usage_errors_exit_two():
    assert run("rank")[0] == 2
    assert run("frobnicate", "x")[0] == 2
    assert run("rank", "no/such/file.json")[0] == 2
    assert run("hull", "fixture:grid:2", "--set", "9,9")[0] == 2
    assert run("profile", "fixture:path:3", "--eps", "0.1")[0] == 2
    assert run("rank", "fixture:nothing:3")[0] == 2


def test_malformed_file_exits_two(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"version": 1, "kind": "graph", "points": ["a"], "edges": [')
    code, out = run("rank", str(bad))
    assert code == 2 and "line" in out


def test_dualize_then_realize(tmp_path):
    code, text = run("dualize", "fixture:path:4")
    assert code == 0
    pocset = tmp_path / "p.json"
    pocset.write_text(text + "\n")
    code, text = run("realize", str(pocset))
    assert code == 0
    realized = fileio.parse_space(text)
    assert realized.n == 4


def test_json_report_is_deterministic():
    a = run("walls", "fixture:substar", "--json")[1]
    b = run("walls", "fixture:substar", "--json")[1]
    assert a == b
    data = json.loads(a)
    assert data["command"] == "walls" and data["exit_status"] == 0
    assert data["inputs_digest"].startswith("sha256:")
    assert all("paper_anchor" in c for c in data["checks"])


def test_digest_depends_on_flags():
    a = json.loads(run("profile", "fixture:path:4", "--eps", "1/2", "--json")[1])["inputs_digest"]
    b = json.loads(run("profile", "fixture:path:4", "--eps", "1", "--json")[1])["inputs_digest"]
    assert a != b


def test_report_written_to_file(tmp_path):
    out = tmp_path / "r.json"
    code, _ = run("roundtrip", "fixture:path:3", "-o", str(out))
    assert code == 0
    assert fileio.parse_report(out.read_text()).ok


@pytest.mark.parametrize("argv,expected", [
    (["hull", "fixture:grid:2", "--set", "0,0;2,1"], "{0,0, 0,1, 1,0, 1,1, 2,0, 2,1}"),
    (["project", "fixture:grid:4", "--set", "0,0;2,2", "--point", "3,1"], None),
    (["cover", "fixture:path:4", "--x0", "v1", "--eps", "0"], "k = 1"),
    (["rigidity", "fixture:star:3", "--x0", "c"], "BRANCHING"),
    (["rigidity", "fixture:grid:2", "--x0", "1,1"], "GRID_LIKE"),
    (["group", "fixture:hypercube:3", "--x0", "000"], "|Aut| = 48"),
    (["embed-check", "fixture:substar", "--c1", "i1;t1", "--c2", "i2;t2"], None),
    (["decompose", "fixture:substar", "--c1", "i1;t1", "--c2", "i2;t2", "--x", "t1", "--y", "t2"], None),
    (["decompose", "fixture:grid:2", "--c1", "0,0;1,0;2,0", "--c2", "0,0;0,1;0,2", "--x", "2,2"], None),
])
def test_subcommands(argv, expected):
    code, out = run(*argv)
    assert code == 0, out
    if expected is not None:
        assert out.splitlines()[0] == expected


def test_project_prints_gate():
    assert run("project", "fixture:grid:4", "--set", "0,0;0,1;0,2;1,0;1,1;1,2;2,0;2,1;2,2",
               "--point", "3,1") == (0, "2,1")


def test_precondition_failure_exits_two():
    code, out = run("embed-check", "fixture:grid:4", "--c1", "0,0;0,1", "--c2", "4,0;4,1")
    assert code == 2 and out.startswith("error:")


def test_verify_all_subset():
    code, out = run("verify-all", "--only", "3,4", "--seed", "1")
    assert code == 0
    assert out.splitlines()[-1] == "2/2 checks passed"


def test_main_returns_exit_code(capsys):
    assert main(["rank", "fixture:path:3"]) == 0
    assert capsys.readouterr().out == "1\n"
    assert main(["rank"]) == 2
    assert "error" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "medianspace", "rank", "fixture:hypercube:2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "2\n"
