import subprocess
import sys
from pathlib import Path

from medianspace.cli import cli_run

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def test_written_corpus_reads_back(tmp_path, monkeypatch):
    proc = subprocess.run([sys.executable, str(SCRIPTS / "make_fixtures.py"), "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    monkeypatch.setenv("MEDIANSPACE_FIXTURE_DIR", str(tmp_path))
    assert cli_run(["rank", "hypercube_4"])[1:] == (0, "4")
    assert cli_run(["validate", "substar"])[1] == 0


def test_rigidity_script():
    proc = subprocess.run([sys.executable, str(SCRIPTS / "rigidity_refinement.py"), "--max-level", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.count("GRID_LIKE  verified=True") == 2
