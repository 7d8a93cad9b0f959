import json

import pytest

from momentkit import __version__
from momentkit.cli import cli_run


def run(capsys, *argv):
    code = cli_run(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_gauss_clean_run(capsys):
    code, doc = run(capsys, "gauss", "--qlist", "3,5,9")
    assert code == 0
    assert set(doc) == {"spec", "results", "violations", "version"}
    assert doc["version"] == __version__
    assert doc["violations"] == []
    qs = {r["q"] for r in doc["results"]}
    assert qs == {3, 5, 9}
    # one row per character, including the trivial one
    assert sum(1 for r in doc["results"] if r["q"] == 5) == 4
    for r in doc["results"]:
        assert r["deviation"] <= 1e-9 * r["q"] ** 0.5


def test_gauss_bad_q(capsys):
    assert cli_run(["gauss", "--qlist", "4"]) == 2
    assert cli_run(["gauss", "--qlist", "x"]) == 2


def test_unknown_subcommand():
    assert cli_run(["frobnicate"]) == 2
    assert cli_run([]) == 2


def test_json_and_csv_outputs(tmp_path, capsys):
    jpath, cpath = tmp_path / "out.json", tmp_path / "out.csv"
    code = cli_run(["gauss", "--qlist", "5", "--json", str(jpath),
                    "--csv", str(cpath)])
    assert code == 0
    assert capsys.readouterr().out == ""  # routed to the file
    doc = json.loads(jpath.read_text(encoding="utf-8"))
    assert doc["violations"] == []
    text = cpath.read_text(encoding="utf-8")
    lines = text.splitlines()
    assert lines[0].split(",")[0] == "q"
    assert len(lines) == 1 + 4  # header + one row per character
    assert "\r" not in text


def test_determinism(tmp_path):
    args = ["local", "--case", "case2sc", "--q", "5", "--s", "0.1",
            "--oracle", "8"]
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    assert cli_run(args + ["--json", str(p1)]) == 0
    assert cli_run(args + ["--json", str(p2)]) == 0
    assert p1.read_bytes() == p2.read_bytes()


def test_charsum_scan_advisory(tmp_path, capsys):
    adv = tmp_path / "advisory.json"
    code, doc = run(capsys, "charsum-scan", "--qmin", "3", "--qmax", "7",
                    "--advisory", str(adv))
    assert code == 0
    assert json.loads(adv.read_text(encoding="utf-8")) == []
    rows = [r for r in doc["results"] if "chi_k" in r]
    assert {r["q"] for r in rows} == {3, 5, 7}
    summary = [r for r in doc["results"] if r.get("summary")]
    assert len(summary) == 1
    assert summary[0]["max_abs_S_over_q"] <= 1000


def test_hyper_kloosterman_mode(capsys):
    code, doc = run(capsys, "hyper", "--q", "9")
    assert code == 0
    assert doc["violations"] == []
    rows = [r for r in doc["results"] if "t" in r]
    assert len(rows) == 8  # all nonzero arguments
    for r in rows:
        assert r["abs"] <= 2.0 + 1e-9


def test_hyper_2f1_mode(capsys):
    code, doc = run(capsys, "hyper", "--q", "7", "--chi", "1", "--eta", "2")
    assert code == 0
    kinds = [r for r in doc["results"] if "kummer" in r]
    assert len(kinds) == 1


def test_local_oracle_agreement(capsys):
    code, doc = run(capsys, "local", "--case", "case3", "--q", "7",
                    "--s", "0.1", "--oracle", "8", "--chi-ram", "2")
    assert code == 0
    row = doc["results"][0]
    assert row["abs_diff"] <= row["tail_bound"]


def test_local_case2sc_components(capsys):
    code, doc = run(capsys, "local", "--case", "case2sc", "--q", "5",
                    "--s", "0", "--oracle", "8")
    assert code == 0
    row = doc["results"][0]
    comp = row["components"]
    assert set(comp) == {"empty", "1", "2", "3", "4", "14", "23"}
    total = sum(complex(v["re"], v["im"]) for v in comp.values())
    closed = complex(row["closed"]["re"], row["closed"]["im"])
    assert abs(total - closed) < 1e-9


def test_local_vanishing_char(capsys):
    code, doc = run(capsys, "local", "--case", "case1", "--q", "5",
                    "--chi-ram", "1")
    assert code == 0
    assert doc["results"][0]["closed"] == "vanishes"


def test_degenerate_and_conductors(capsys):
    spec = '{"r": 1, "finite": [{"q": 7, "case": "case3"}]}'
    code, doc = run(capsys, "degenerate", "--spec", spec, "--d4")
    assert code == 0
    assert doc["results"][0]["d3_vanishes"] is True
    assert any("residue_at_1" in r for r in doc["results"])
    assert any(r.get("case") == "case3" for r in doc["results"])

    code, doc = run(capsys, "conductors", "--spec", spec)
    assert code == 0
    assert doc["results"][0]["C3"] == 343


def test_spec_at_file_and_errors(tmp_path, capsys):
    good = tmp_path / "spec.json"
    good.write_text('{"r": 1, "finite": []}', encoding="utf-8")
    code, doc = run(capsys, "conductors", "--spec", f"@{good}")
    assert code == 0
    capsys.readouterr()
    assert cli_run(["conductors", "--spec", "@/nonexistent"]) == 2
    assert cli_run(["conductors", "--spec", "{not json"]) == 2
    assert cli_run(["conductors", "--spec", '{"r": 1, "oops": 1}']) == 2
    assert cli_run(["degenerate", "--spec",
                    '{"finite": [{"q": 6, "case": "case1"}]}']) == 2


def test_version_flag():
    assert cli_run(["--version"]) == 0
