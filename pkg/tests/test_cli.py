import csv
import re
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from nvthompson import cli
from nvthompson.elements import parse_element, power
from nvthompson.generators import generator, sym

QUAD_SWAP = "(0 (1 L L) (1 L L)) | [0,2,1,3] | (1 (0 L L) (0 L L))"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_summaries(capsys):
    code, out, _ = run(capsys, "eval", "A0")
    assert code == 0 and "# blocks: 3" in out and "# carets: 2" in out
    code, out, _ = run(capsys, "eval", "")
    assert "# blocks: 1" in out
    code, out, _ = run(capsys, "eval", "C0 C0")
    assert "# blocks: 4" in out
    assert parse_element(out) == power(generator(sym("C", 0), 2), 2)


def test_eq_exit_status(capsys):
    assert run(capsys, "eq", QUAD_SWAP, "")[0] == 0
    assert run(capsys, "eq", "C0", "C0'")[0] == 1
    assert run(capsys, "eq", "C0 A1 q2'", "C0 A1 q2'")[0] == 0


def test_word_equals_its_decomposition(capsys):
    code, out, _ = run(capsys, "decompose", "B1 C0 A2' q1")
    word, marker = out.splitlines()
    assert code == 0 and marker.startswith("# verified: yes")
    assert run(capsys, "eq", "B1 C0 A2' q1", word)[0] == 0


def test_decompose_identity_and_finite(capsys):
    code, out, _ = run(capsys, "decompose", "")
    assert out.splitlines()[0] == ""
    code, out, _ = run(capsys, "decompose", "--finite", "A4")
    assert code == 0 and all(int(tok[1]) <= 1 for tok in out.splitlines()[0].split())


def test_element_files_and_diagrams(tmp_path, capsys):
    f = tmp_path / "x.txt"
    code, out, _ = run(capsys, "eval", "C0 A1")
    f.write_text(out)
    code, out, _ = run(capsys, "mul", str(f), "A1' C0'")
    assert "# blocks: 1" in out
    code, out, _ = run(capsys, "inv", str(f))
    assert run(capsys, "eq", out, "A1' C0'")[0] == 0
    code, out, _ = run(capsys, "reduce", "dim: 1\npairs:\nfrom 0/2^1 -> to 0/2^1\nfrom 1/2^1 -> to 1/2^1\n")
    assert "# key: nV/1/0.0=0.0" in out


def test_wordlength(capsys):
    code, out, _ = run(capsys, "wordlength", "--exact", "--radius", "2", "C0 C0")
    assert code == 0 and "exact: 2" in out
    code, out, _ = run(capsys, "wordlength", "--exact", "--radius", "1", "C0 C0")
    assert "exact: > 1" in out


@pytest.mark.parametrize("argv,code", [
    (["eval", "A0 X1"], 2),
    (["eq", "(0 L", "A0"], 2),
    (["--dim", "1", "eval", "C0"], 3),
    (["--dim", "3", "render", "B0.2"], 6),
    (["experiment", "ball", "--radius", "5", "--budget", "50"], 5),
    (["--max-level", "3", "eval", "C0 C0 C0 C0"], 3),
])
def test_exit_codes(capsys, tmp_path, argv, code):
    if argv[0] == "experiment":
        argv = argv + ["--out", str(tmp_path / "o")]
    assert run(capsys, *argv)[0] == code
    assert not (tmp_path / "o").exists()


def test_unverified_decomposition_exit(monkeypatch, capsys):
    def broken(x, verify=True):
        from nvthompson.errors import UnverifiedDecomposition
        raise UnverifiedDecomposition("forced")
    monkeypatch.setattr(cli, "decompose", broken)
    assert run(capsys, "decompose", "A0")[0] == 4


def test_experiments_write_csv_and_manifest(tmp_path, capsys):
    out = tmp_path / "res"
    assert run(capsys, "experiment", "counts", "--n-max", "10", "--out", str(out))[0] == 0
    with open(out / "counts.csv") as fh:
        rows = list(csv.reader(fh))
    assert [r[0] for r in rows[1:]] == [str(n) for n in range(1, 11)]
    assert run(capsys, "experiment", "c0", "--n-max", "14", "--out", str(out))[0] == 0
    with open(out / "c0.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [int(r["blocks"]) for r in rows] == [2 ** n for n in range(1, 15)]
    assert run(capsys, "experiment", "ball", "--radius", "0", "--out", str(out))[0] == 0
    assert len((out / "ball.csv").read_text().splitlines()) == 2
    assert "radius = 0" in (out / "ball-manifest.txt").read_text()
    assert run(capsys, "experiment", "distortion", "--n-max", "4", "--out", str(out))[0] == 0
    assert (out / "distortion.csv").read_text().splitlines()[-1] == "4,9,48,1"


def test_env_fallbacks(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("NVT_OUT", str(tmp_path / "env"))
    monkeypatch.setenv("NVT_SEED", "7")
    monkeypatch.setenv("NVT_DIM", "1")
    assert run(capsys, "experiment", "counts", "--n-max", "2")[0] == 0
    manifest = (tmp_path / "env" / "counts-manifest.txt").read_text()
    assert "seed = 7" in manifest and "dim = 1" in manifest
    assert run(capsys, "eval", "C0")[0] == 3


def test_render(tmp_path, capsys):
    target = tmp_path / "q.svg"
    assert run(capsys, "render", "--svg", "-o", str(target), "(0 (1 L L) (1 L L)) | [0,1,2,3] | L L")[0] == 2
    assert not target.exists()
    quads = "0/2^1 x 0/2^1\n1/2^1 x 0/2^1\n0/2^1 x 1/2^1\n1/2^1 x 1/2^1\n"
    assert run(capsys, "render", "--svg", "-o", str(target), quads)[0] == 0
    root = ET.parse(target).getroot()
    assert len(root.findall("{http://www.w3.org/2000/svg}rect")) == 4
    code, out, _ = run(capsys, "render", "C0")
    assert out.splitlines()[1] == "| 1 |    | 0 | 1 |"
    code, out, _ = run(capsys, "render", "(0 (1 L L) L)")
    assert out == "-+0\n +-+1\n | +--0\n | +--1\n +--2\n"


def test_relation_table_flag(capsys):
    code, out, _ = run(capsys, "--relation-table")
    # the shared table may already have been extended past the startup bound
    m = re.search(r"q\[i\+1\] = A0' q\[i\] A1    verified for indices 2\.\.(\d+)", out)
    assert code == 0 and m and int(m.group(1)) >= 10


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nvthompson.cli", "eq", "C0", "C0'"],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and proc.stdout == "not equal\n"
