import csv
import io
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from ngcut import cli
from ngcut.dca import DcaResult, DcaTrace
from ngcut.io import read_solution

from test_io import NGCUT_TWO


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def _value(out):
    line = next(ln for ln in out.splitlines() if ln.startswith("value"))
    return line.split()[1]


def test_solve_t1(t1_file, tmp_path, capsys):
    sol, svg = tmp_path / "t1.sol", tmp_path / "t1.svg"
    code, out, _ = run(["solve", "--instance", t1_file, "--t", 30, "--u", 10,
                        "--out", sol, "--svg", svg, "--trace"], capsys)
    assert code == 0 and _value(out) == "18"
    assert "iter    1" in out
    rec = read_solution(sol.read_text())
    assert rec.total_value == 18 and rec.t == 30.0 and rec.init == "initial-dca"
    assert len(ET.parse(svg).getroot().findall("{http://www.w3.org/2000/svg}g")) == 2


def test_solve_missing_file(tmp_path, capsys):
    missing = tmp_path / "nope.txt"
    code, _, err = run(["solve", "--instance", missing], capsys)
    assert code == 1 and str(missing) in err


def test_solve_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("name x\nstock 4 4\npieces 0\n")
    code, _, err = run(["solve", "--instance", bad], capsys)
    assert code == 1 and "bad.txt" in err and "line 3" in err


def test_solve_uses_data_dir(t1_file, capsys, monkeypatch):
    monkeypatch.setenv(cli.DATA_ENV, str(t1_file.parent))
    monkeypatch.chdir(t1_file.parent.parent)
    code, out, _ = run(["solve", "--instance", t1_file.name, "--t", 30, "--u", 10], capsys)
    assert code == 0 and _value(out) == "18"


def test_solve_fractional_exit_code(t1_file, capsys, monkeypatch):
    def fake(inst, cfg):
        return DcaResult(np.full(4, 0.5), 0.0, None, None, False,
                         DcaTrace(iterations=3, termination="max_iter"), fractional=[0, 1, 2, 3])
    monkeypatch.setattr(cli, "run_dca", fake)
    code, out, _ = run(["solve", "--instance", t1_file], capsys)
    assert code == 2 and "4 fractional components" in out


def test_solve_ngcut_defaults(tmp_path, capsys):
    path = tmp_path / "two.txt"
    path.write_text(NGCUT_TWO)
    code, out, _ = run(["solve", "--ngcut", path, "--index", 2], capsys)
    assert code == 0 and _value(out) == "40"
    assert "t, u        30, 30" in out
    code, _, err = run(["solve", "--ngcut", path, "--index", 3], capsys)
    assert code == 1 and "out of range" in err


def test_exact(t1_file, capsys):
    code, out, _ = run(["exact", "--instance", t1_file], capsys)
    assert code == 0 and _value(out) == "18" and "proved_optimal" in out


def test_exact_rejects_zero_limit(t1_file, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["exact", "--instance", str(t1_file), "--time-limit", "0"])
    assert exc.value.code == 2
    assert "must be > 0" in capsys.readouterr().err


def test_exact_tiny_limit(tmp_path, capsys):
    path = tmp_path / "big.txt"
    path.write_text("name big\nstock 20 20\npieces 3\n3 4 10 2\n5 3 13 2\n4 4 15 2\n")
    code, out, _ = run(["exact", "--instance", path, "--time-limit", "1e-6"], capsys)
    assert code == 0 and "time_limit" in out


def _twelve(tmp_path):
    lines = ["12"]
    for k in range(12):
        lines += ["1", f"{4 + k % 3} 4", f"2 2 {k % 3 + 1} {5 + k}"]
    path = tmp_path / "twelve.txt"
    path.write_text("\n".join(lines) + "\n")
    return path


def test_bench_two(tmp_path, capsys):
    path = tmp_path / "two.txt"
    path.write_text(NGCUT_TWO)
    out_csv = tmp_path / "b.csv"
    code, out, _ = run(["bench", "--ngcut", path, "--with-exact", "--csv", out_csv], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out_csv.read_text())))
    assert list(rows[0]) == cli.BENCH_COLUMNS
    assert [(r["instance"], r["algorithm"]) for r in rows] == [
        ("ngcut1", "dca"), ("ngcut1", "exact"), ("ngcut2", "dca"), ("ngcut2", "exact")]
    for r in rows:
        for col in ("L", "W", "m", "n_P", "n_Q", "n_vars", "n_cons", "objective", "iterations"):
            assert r[col] not in ("", "-")
    assert rows[0]["t"] == "30.0" and rows[2]["u"] == "30.0"
    header = out.splitlines()[0].split()
    assert header == cli.BENCH_COLUMNS


def test_bench_csv_to_stdout_is_stable(tmp_path, capsys):
    path = tmp_path / "two.txt"
    path.write_text(NGCUT_TWO)
    outs = [run(["bench", "--ngcut", path], capsys)[1] for _ in range(2)]
    strip = [[ln.rsplit(",", 4)[0] for ln in o.split("\n\n")[1].splitlines()] for o in outs]
    assert strip[0] == strip[1]


def test_bench_defaults_and_params(tmp_path, capsys):
    path = _twelve(tmp_path)
    code, out, _ = run(["bench", "--ngcut", path, "--only", 12], capsys)
    row = list(csv.DictReader(io.StringIO(out.split("\n\n")[1])))[0]
    assert code == 0 and (row["t"], row["u"]) == ("180.0", "10.0")
    params = tmp_path / "tu.txt"
    params.write_text("# index t u\n12 7 3\n")
    code, out, _ = run(["bench", "--ngcut", path, "--only", 12, "--params", params], capsys)
    row = list(csv.DictReader(io.StringIO(out.split("\n\n")[1])))[0]
    assert (row["t"], row["u"]) == ("7.0", "3.0")
    params.write_text("12 7\n")
    code, _, err = run(["bench", "--ngcut", path, "--params", params], capsys)
    assert code == 1 and "tu.txt:1" in err


def test_bench_records_failures(tmp_path, capsys, monkeypatch):
    path = tmp_path / "two.txt"
    path.write_text(NGCUT_TWO)

    def boom(form, cfg):
        raise ValueError("synthetic failure")
    monkeypatch.setattr(cli, "run_dca", boom)
    code, out, _ = run(["bench", "--ngcut", path], capsys)
    assert code == 0 and out.count("error: synthetic failure") == 4


def test_render(t1_file, tmp_path, capsys):
    sol = tmp_path / "t1.sol"
    run(["solve", "--instance", t1_file, "--t", 30, "--u", 10, "--out", sol], capsys)
    svg = tmp_path / "r.svg"
    code, out, _ = run(["render", "--instance", t1_file, "--solution", sol, "--svg", svg], capsys)
    assert code == 0 and out == "AAAA\n" * 4
    ET.parse(svg)


def test_render_name_mismatch(t1_file, tmp_path, capsys):
    sol = tmp_path / "t1.sol"
    run(["solve", "--instance", t1_file, "--t", 30, "--u", 10, "--out", sol], capsys)
    other = tmp_path / "other.txt"
    other.write_text(t1_file.read_text().replace("name T1", "name T2"))
    code, _, err = run(["render", "--instance", other, "--solution", sol], capsys)
    assert code == 1 and "'T1'" in err and "'T2'" in err


def test_convert(tmp_path, capsys):
    path = tmp_path / "two.txt"
    path.write_text(NGCUT_TWO)
    outdir = tmp_path / "conv"
    code, out, _ = run(["convert", "--ngcut", path, "--out-dir", outdir], capsys)
    assert code == 0
    assert sorted(p.name for p in outdir.iterdir()) == ["ngcut1.txt", "ngcut2.txt"]
    code, out, _ = run(["solve", "--instance", outdir / "ngcut2.txt"], capsys)
    assert code == 0 and _value(out) == "40"


def test_module_entry_point(t1_file):
    proc = subprocess.run([sys.executable, "-m", "ngcut.cli", "solve", "--instance", str(t1_file),
                           "--t", "30", "--u", "10"], capture_output=True, text=True)
    assert proc.returncode == 0 and "value       18" in proc.stdout
