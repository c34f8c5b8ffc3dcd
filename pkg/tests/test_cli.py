import json
import subprocess
import sys

import numpy as np
import pytest

from ghzsig.cli import fingerprint_stats, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_honest(capsys):
    code, out, _ = run(capsys, "honest", "--n", "64", "--seed", "42")
    assert code == 0
    rep = json.loads(out)
    assert rep["accepted"] is True
    assert out.endswith("\n") and out.count("\n") == 1


def test_table1(capsys):
    code, out, _ = run(capsys, "table1", "--n", "64", "--c", "2")
    assert code == 0
    assert json.loads(out) == {"alice_to_bob": 64, "bob_to_alice": 64, "alice_to_trent": 8}
    _, out, _ = run(capsys, "table1", "--reference")
    assert set(json.loads(out)) == {"ours", "reference"}


def test_eve_flip(capsys):
    code, out, _ = run(capsys, "eve", "--n", "32", "--flip", "3,17", "--seed", "1")
    assert code == 1
    assert json.loads(out)["mismatch_positions"] == [3, 17]


def test_eve_phase(capsys):
    code, out, _ = run(capsys, "eve", "--n", "32", "--phase", "5", "--seed", "1")
    assert code == 1
    assert json.loads(out)["anomaly_positions"] == [5]


def test_forge_and_disavow(capsys):
    code, out, _ = run(capsys, "forge", "--n", "8", "--seed", "2")
    assert code == 1 and json.loads(out)["arbitration_verdict"] == "Invalid"
    code, out, _ = run(capsys, "disavow", "--n", "8", "--seed", "2", "--r", "4")
    assert code == 0 and json.loads(out)["arbitration_verdict"] == "Valid"


def test_bb84(capsys):
    code, out, _ = run(capsys, "bb84", "--raw", "2000", "--seed", "3")
    assert code == 0 and json.loads(out)["qber"] == 0
    code, out, _ = run(capsys, "bb84", "--raw", "2000", "--eve", "--seed", "3")
    assert code == 1 and json.loads(out)["aborted"] is True


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["honest", "--n", "x"],
        ["honest", "--unknown"],
        ["eve", "--n", "8"],
        ["eve", "--n", "8", "--flip", "9"],
        ["eve", "--n", "8", "--flip", "a,b"],
        ["honest", "--n", "0"],
        ["fingerprint-stats", "--n", "20"],
        ["honest", "--config", "/nonexistent.json"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    # argparse failures raise SystemExit; config errors return the code
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    _, err = capsys.readouterr()
    assert code == 2
    assert err.strip().count("\n") == 0 and "error" in err


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_bits": 6, "message": "011011", "r_copies": 2}))
    code, out, _ = run(capsys, "honest", "--config", str(cfg), "--seed", "5")
    rep = json.loads(out)
    assert code == 0 and rep["n_bits"] == 6 and rep["master_seed"] == 5
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nope": 1}))
    assert main(["honest", "--config", str(bad)]) == 2


def test_output_file_and_batch(tmp_path, capsys):
    target = tmp_path / "reports.jsonl"
    code = main(["honest", "--n", "8", "--runs", "3", "--seed", "10", "--output", str(target)])
    assert code == 0
    lines = target.read_text().splitlines()
    assert [json.loads(l)["master_seed"] for l in lines] == [10, 11, 12]


def test_parallel_matches_sequential(tmp_path):
    seq, par = tmp_path / "seq.jsonl", tmp_path / "par.jsonl"
    main(["forge", "--n", "8", "--runs", "4", "--seed", "1", "--output", str(seq)])
    main(["forge", "--n", "8", "--runs", "4", "--seed", "1", "--parallel", "2", "--output", str(par)])
    assert seq.read_bytes() == par.read_bytes()


def test_seed_determines_output_bytes(capsys):
    outputs = []
    for _ in range(2):
        for argv in (
            ["honest", "--n", "16", "--seed", "9"],
            ["forge", "--n", "8", "--seed", "9"],
            ["bb84", "--raw", "500", "--seed", "9"],
            ["fingerprint-stats", "--trials", "200", "--seed", "9"],
        ):
            main(argv)
            outputs.append(capsys.readouterr().out)
    assert outputs[:4] == outputs[4:]


def test_fingerprint_stats_modes():
    eq = fingerprint_stats(4, 2, 7, 500, np.random.default_rng(0), mode="equal")
    assert all(p["empirical_accept"] == 1.0 for p in eq["pairs"])
    orth = fingerprint_stats(4, 2, 7, 4000, np.random.default_rng(1), pairs=1, mode="orthogonal")
    (row,) = orth["pairs"]
    assert row["overlap"] == 0 and row["analytic_accept"] == 0.5
    assert row["within_3se"]
    rnd = fingerprint_stats(4, 2, 7, 2000, np.random.default_rng(2))
    assert rnd["d_min"] == 2 and rnd["m"] == 8
    assert rnd["all_within_3se"]
    assert fingerprint_stats(20, 2, 0, 10, np.random.default_rng(0), pairs=1, exact=False)["d_min"] is None


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ghzsig", "table1", "--n", "1"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["alice_to_trent"] == 2
