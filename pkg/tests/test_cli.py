from __future__ import annotations

import csv
import json
import subprocess
import sys

import pytest

from indexmap.cli import main
from indexmap.consolve import CongruenceSystem, Row, dump

GAUSS = ["--group", "2+i", "--group", "3+2i", "--group", "(2+i)(3+2i)", "--group", "(2+i)^2(3+2i)"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_scan_csv(tmp_path, capsys):
    out = tmp_path / "records.csv"
    code, _, _ = run(capsys, "scan", "--group", "2", "--group", "3", "--bound", "1000000",
                     "--filter", "1 mod 4", "--out", str(out))
    assert code == 0
    rows = list(csv.reader(open(out)))
    assert rows[0] == ["p", "ind_1", "ind_2", "excluded_reason"]
    assert all(int(r[0]) % 4 == 1 for r in rows[1:])
    assert rows[1] == ["5", "1", "1", ""]


def test_scan_json(capsys):
    code, hist = run_json(capsys, "scan", "--group", "2", "--bound", "20")
    assert code == 0 and hist == {"1": 5, "2": 2}


def test_gauss_scan(capsys, tmp_path):
    code, out = run_json(capsys, "gauss-scan", "--q", "5", "--bound", "1000000")
    assert code == 0 and out["pattern_violations"] == []
    assert "1,1,1,1" in out["histogram"] and "2,1,1,1" in out["histogram"]
    code, _, err = run(capsys, "gauss-scan", "--q", "2", "--bound", "1000")
    assert code == 2 and "q = 2" in err


def test_image(capsys):
    code, out = run_json(capsys, "image", "--a", "-100")
    assert code == 0 and out["M"] == 20
    assert set(range(20)) - set(out["allowed_residues"]) == {10}


def test_image_check(capsys):
    code, out = run_json(capsys, "image-check", "--a", "-3", "--h", "9")
    assert code == 0 and out["in_image"] is False and out["kummer_count_agrees"]


def test_decide_ell(capsys):
    code, out = run_json(capsys, "decide-ell", *GAUSS, "--ell", "5", "--tuple", "2,1,1,1")
    assert code == 0 and out["member"] is True and out["systems"]
    code, out = run_json(capsys, "decide-ell", "--fixture", "gaussian", "--ell", "5", "--tuple", "2,2,1,1")
    assert out["member"] is False
    code, _, err = run(capsys, "decide-ell", *GAUSS, "--ell", "2", "--tuple", "0,0,0,0")
    assert code == 2 and "certified" in err


def test_solve(tmp_path, capsys):
    path = tmp_path / "sys.json"
    dump(CongruenceSystem(3, 1, (Row((1,), 0, 2, True),)), path)
    code, out = run_json(capsys, "solve", "--file", str(path))
    assert code == 0 and out["solvable"]
    code, out = run_json(capsys, "solve", "--file", str(path), "--method", "bruteforce")
    assert out["witness"] == [9]
    code, out = run_json(capsys, "solve", "--file", str(path), "--method", "structured")
    assert code == 0 and out["solvable"] and out["method"] == "structured"


def test_kummer(capsys):
    code, out = run_json(capsys, "kummer", "--a", "2", "--n", "8", "--m", "8")
    assert code == 0 and out["degree"] == 4
    code, out = run_json(capsys, "kummer", "--a", "2", "--n", "8", "--m", "8", "--statistical", "--bound", "1000000")
    assert code == 0 and out["agrees"]
    code, _, _ = run(capsys, "kummer", "--a", "2", "--n", "3", "--m", "8")
    assert code == 2


def test_density(capsys):
    code, out = run_json(capsys, "density", "--a", "2", "--h", "1", "--t", "50", "--bound", "1000000")
    assert code == 0
    assert abs(out["truncated"]["50"]["decimal"] - 0.375424) < 1e-6
    assert abs(out["empirical"]["ratio"] - 0.3739) < 0.005


def test_output_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["--workers", "1", "scan", "--group", "2,3", "--group", "-5", "--bound", "200000", "--out", str(a)])
    main(["--workers", "4", "scan", "--group", "2,3", "--group", "-5", "--bound", "200000", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_reproduce(capsys, tmp_path):
    out = tmp_path / "acc.json"
    code, text, _ = run(capsys, "reproduce", "--bound", "1000000", "--out", str(out))
    lines = [l for l in text.splitlines() if l.startswith("[")]
    assert len(lines) == 11
    results = json.load(open(out))
    failed = [r["criterion"] for r in results if not r["passed"]]
    # criterion 6 asks for a truncated value the product does not take; see README
    assert failed == [6]
    assert code == 1


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["scan", "--no-such-flag"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "indexmap.cli", "image", "--a", "2", "--bogus"],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and "unrecognized arguments" in proc.stderr
