import subprocess
import sys

import pytest

from minorforge.cli import dispatch


def run(capsys, *argv):
    code = dispatch(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_proxy_find_dyadic(capsys):
    code, out, _ = run(capsys, "proxy", "find", "--pf", "D")
    assert code == 0 and out.strip() == "pf=D q=11 images=2=2 F=2,6,10"


def test_proxy_verify_rejects_with_exit_1(capsys):
    code, out, _ = run(capsys, "proxy", "verify", "--pf", "D", "--q", "7", "--images", "2=2")
    assert code == 1 and "2*2*2" in out


def test_proxy_not_found_is_domain_failure(capsys):
    code, out, _ = run(capsys, "proxy", "find", "--pf", "U1", "--prime-ceiling", "19")
    assert code == 1 and "no proxy" in out


def test_usage_errors_exit_2(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "generate", "--class", "dyadic")[0] == 2
    assert run(capsys, "proxy", "verify", "--pf", "D")[0] == 2
    assert run(capsys, "catalog", "show")[0] == 2


def test_catalog_and_matroid_tools(capsys):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == 0 and "P8" in out.split()
    code, out, _ = run(capsys, "catalog", "show", "F7")
    assert "bases\t28" in out and "B 7 3 " in out
    code, out, _ = run(capsys, "iso", "F7-", "F7-*")
    assert out.startswith("not isomorphic")
    code, out, _ = run(capsys, "iso", "P8", "P8*")
    assert out.startswith("isomorphic")
    code, out, _ = run(capsys, "minor", "F7", "M(K4)")
    assert out.strip() == "yes"
    code, out, _ = run(capsys, "deltay", "AG(2,3)\\e")
    assert out.splitlines()[0] == "size\t3"
    code, _, err = run(capsys, "catalog", "show", "nonsense")
    assert code == 1


def test_generate_counts_and_logs(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("MINORFORGE_STORE", str(tmp_path))
    code, out, _ = run(capsys, "generate", "--class", "2regular", "--max-n", "8", "--groups", "7")
    assert code == 0 and "n=8\ttotal=25" in out
    code, out, _ = run(capsys, "counts", "--class", "2regular")
    rows = [l.split("\t") for l in out.strip().splitlines()]
    assert rows[0] == ["r", "5", "6", "7", "8"]
    assert rows[-1] == ["total", "2", "1", "4", "25"]
    # idempotent: a second run reuses the completed levels
    code, out2, _ = run(capsys, "generate", "--class", "2regular", "--max-n", "8")
    assert code == 0 and "total=25" in out2
    logs = sorted((tmp_path / "log").iterdir())
    assert len(logs) == 3
    text = logs[0].read_text()
    assert "minorforge 0.1.0" in text and '"groups": 7' in text


def test_verify_base_and_chhunt(tmp_path, capsys):
    code, out, _ = run(capsys, "verify-base", "--class", "dyadic")
    assert code == 0 and out.count("\tpass") == 7
    code, _, _ = run(capsys, "generate", "--class", "dyadic", "--max-n", "8", "--store", str(tmp_path))
    code, out, _ = run(capsys, "chhunt", "--class", "dyadic", "--n", "7", "--store", str(tmp_path))
    assert code == 0 and "survivors\t1" in out


def test_missing_level_is_domain_failure(tmp_path, capsys):
    code, _, err = run(capsys, "chhunt", "--class", "dyadic", "--n", "9", "--store", str(tmp_path))
    assert code == 1


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "minorforge.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "minorforge" in res.stdout
