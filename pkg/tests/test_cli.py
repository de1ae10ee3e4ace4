import json

import pytest

from kfree.cli import main
from kfree.output import read_csv


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sieve_table(capsys):
    code, out, _ = run(capsys, "sieve", "--k", "2", "--limit", "100000")
    assert code == 0
    meta, rows = read_csv(out)
    assert meta["schema_version"] == "1"
    assert [r["X"] for r in rows] == ["10", "100", "1000", "10000", "100000"]
    assert rows[0]["count"] == "7" and rows[1]["count"] == "61"
    assert rows[-1]["count"] == "60794"


def test_sieve_small_segments_same_output(capsys):
    _, a, _ = run(capsys, "sieve", "--k", "3", "--limit", "50000")
    _, b, _ = run(capsys, "sieve", "--k", "3", "--limit", "50000", "--segment", "1024")
    assert a == b


def test_bad_flags_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        main(["sieve", "--k", "1", "--limit", "10"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["cseries", "--H", "0.5", "--ell", "2"])
    assert e.value.code == 2
    code, _, err = run(capsys, "sieve", "--k", "2", "--limit", "100", "--segment", "1000")
    assert code == 2 and "segment" in err


def test_capacity_exit_3(capsys):
    code, _, err = run(capsys, "sieve", "--k", "2", "--limit", str(10**20))
    assert code == 3 and "capacity" in err


def test_budget_exit_4(capsys):
    code, _, err = run(capsys, "cseries", "--H", "40", "--ell", "6", "--budget", "1000")
    assert code == 4
    code, _, err = run(capsys, "singular", "--shifts", "0,1", "--tol", "1e-80")
    assert code == 4 and "achieved error" in err


def test_singular_json(capsys):
    code, out, _ = run(capsys, "singular", "--shifts", "0")
    obj = json.loads(out)
    assert code == 0 and obj["value"].startswith("0.6079271018540266")


def test_cseries_both(capsys):
    code, out, _ = run(capsys, "cseries", "--H", "2", "--ell", "2", "--method", "both")
    obj = json.loads(out)
    assert code == 0
    assert float(obj["delta"]) <= float(obj["fourier"]["err"]) + float(obj["binomial"]["err"])


def test_moments_commands(capsys):
    code, out, _ = run(capsys, "moments", "short", "--x", "1000", "--H", "4", "--ell", "2")
    assert code == 0
    _, rows = read_csv(out)
    assert rows[0]["kind"] == "short"
    code, out, _ = run(capsys, "moments", "ap", "--X", "1000", "--q", "7", "--ell", "2")
    _, rows = read_csv(out)
    assert code == 0 and rows[0]["powersums"].startswith("6;")


def test_output_and_manifest_deterministic(tmp_path, capsys):
    outs, mans = [], []
    for workers in ("1", "2"):
        o, m = tmp_path / f"o{workers}.csv", tmp_path / f"m{workers}.json"
        assert main(["--workers", workers, "--out", str(o), "--manifest", str(m), "sieve", "--k", "2", "--limit", "20000"]) == 0
        outs.append(o.read_text())
        mans.append(json.loads(m.read_text()))
    assert outs[0] == outs[1]
    assert mans[0]["output_digest"] == mans[1]["output_digest"]
    assert mans[0]["parameters"] == mans[1]["parameters"]


def test_verify_unknown_suite_exit_2():
    with pytest.raises(SystemExit) as e:
        main(["verify", "nosuchsuite"])
    assert e.value.code == 2


def test_version(capsys):
    with pytest.raises(SystemExit) as e:
        main(["--version"])
    assert e.value.code == 0
    assert "kfree" in capsys.readouterr().out
