import csv
import io
import json
import subprocess
import sys
from dataclasses import replace

import pytest

from engel.catalog import default_catalog
from engel.cli import main
from engel.report import CSV_COLUMNS, ConfigError, RunConfig, RunResult, l0_pairs, render, run


def rows_of(text):
    table = text.split("\n\n")[0]
    return {r["label"]: r for r in csv.DictReader(io.StringIO(table))}


@pytest.fixture
def s3_file(tmp_path):
    f = tmp_path / "s3.grp"
    f.write_text("degree: 3\nlabel: S3\ngen: (1 2)\ngen: (1 2 3)\n")
    return f


def test_sink_command(s3_file, capsys):
    assert main(["sink", "--group", str(s3_file), "--element", "(1 2)", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["sink"] == ["()", "(1 2 3)", "(1 3 2)"]
    assert doc["sink_size"] == 3 and doc["sink_rank"] == 1


def test_sink_identity(capsys):
    assert main(["sink", "--group", "S4", "--element", "()"]) == 0
    out = capsys.readouterr().out
    assert "sink size: 1" in out and "sink rank: 0" in out


@pytest.mark.parametrize("element", ["(1 4)", "(1 2", "(1 9)"])
def test_sink_bad_element_exit_2(element, capsys):
    assert main(["sink", "--group", "A4", "--element", element]) == 2
    assert "engel sink:" in capsys.readouterr().err


def test_sink_bad_group_file(tmp_path, capsys):
    f = tmp_path / "bad.grp"
    f.write_text("degree: 3\ngen: (1 2\n")
    assert main(["sink", "--group", str(f), "--element", "()"]) == 2
    assert "line 2" in capsys.readouterr().err


def test_usage_errors_exit_2(capsys):
    assert main(["verify", "--lemmas", "kovacs,bogus"]) == 2
    assert main(["report", "--max-order", "0"]) == 2
    assert main(["report", "--catalog", "nonsense:1"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["report", "--format", "xml"])
    assert exc.value.code == 2


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"catalog": "S3,C4", "lemmas": "kovacs", "format": "json"}))
    out = tmp_path / "out.json"
    assert main(["verify", "--config", str(cfg), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert [g["label"] for g in doc["groups"]] == ["S3", "C4"]
    assert list(doc["groups"][0]["lemmas"]) == ["kovacs"]
    assert main(["verify", "--config", str(cfg), "--lemmas", "lf2", "--out", str(out)]) == 0
    assert list(json.loads(out.read_text())["groups"][0]["lemmas"]) == ["lf2"]
    cfg.write_text(json.dumps({"catalog": "S3", "colour": 1}))
    assert main(["verify", "--config", str(cfg)]) == 2
    cfg.write_text("{not json")
    assert main(["verify", "--config", str(cfg)]) == 2


def test_threads_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("ENGEL_THREADS", "nope")
    assert main(["report", "--catalog", "S3"]) == 2
    monkeypatch.setenv("ENGEL_THREADS", "2")
    out = tmp_path / "t.csv"
    assert main(["report", "--catalog", "S3,C5", "--out", str(out)]) == 0
    assert set(rows_of(out.read_text())) == {"S3", "C5"}


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(lattice_cap=0)
    with pytest.raises(ConfigError):
        RunConfig(lemmas=("l1",))
    with pytest.raises(ConfigError):
        RunConfig.from_mapping({"threads": "4"})
    assert RunConfig.from_mapping({"max-order": 10, "lemmas": "l0,lf2"}).lemmas == ("l0", "lf2")


def test_report_rows(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["report", "--catalog", "S3,AB_r2,D4,Q8xC3,A5", "--out", str(out)]) == 0
    text = out.read_text()
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    rows = rows_of(text)
    s3 = rows["S3"]
    assert (s3["order"], s3["soluble"], s3["fitting_height"], s3["r_star"], s3["rank_gamma_inf"]) == ("6", "yes", "2", "1", "1")
    ab = rows["AB_r2"]
    assert (ab["r_star"], ab["rank_gamma_inf"]) == ("3", "3")
    for label in ("D4", "Q8xC3"):
        assert rows[label]["nilpotent"] == "yes"
        assert rows[label]["r_star"] == rows[label]["rank_gamma_inf"] == "0"
    assert rows["A5"]["fitting_height"] == "-" and rows["A5"]["soluble"] == "no"
    summary = text.split("\n\n")[1].splitlines()
    assert summary[0] == "r_star,max_rank_gamma_inf,groups"


def test_report_marks_caps():
    res = run(RunConfig(catalog="S5,C4", enumeration_threshold=100))
    s5 = res.rows[0]
    assert s5.cap == "enumeration" and s5.order == 120 and s5.rank_G is None and s5.soluble is False
    res = run(RunConfig(catalog="S4", lattice_cap=3))
    assert res.rows[0].cap == "lattice"
    assert res.summary() == []


def test_verify_nilpotent_catalog_l0(tmp_path):
    out = tmp_path / "v.json"
    code = main(["verify", "--catalog", "nilpotent", "--max-order", "64", "--lemmas", "l0", "--format", "json", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    labels = [g["label"] for g in doc["groups"]]
    assert "S3" not in labels and "Q8" in labels and "C2^3" in labels
    assert all(g["nilpotent"] for g in doc["groups"])
    assert all(g["lemmas"]["l0"]["status"] == "pass" for g in doc["groups"] if g["order"] > 1)


def test_l0_in_nilpotent_group_has_trivial_commutators():
    from engel.catalog import resolve_group
    from engel.sinks import verify_l0

    G = resolve_group("D4xC3")
    for _, P, g in l0_pairs(G, 10_000, 42):
        assert verify_l0(G, P, g).values["commutator_order"] == 1


def test_l0_pairs_sampling_is_seeded():
    from engel.catalog import resolve_group

    G = resolve_group("S5")
    full = l0_pairs(G, 10_000, 42)
    assert len(full) > 100
    a = [(p, P.key(), g) for p, P, g in l0_pairs(G, 100, 42)]
    b = [(p, P.key(), g) for p, P, g in l0_pairs(G, 100, 42)]
    c = [(p, P.key(), g) for p, P, g in l0_pairs(G, 100, 7)]
    assert a == b and len(a) == 100 and a != c


def test_corrupted_oracle_exits_1_with_witness(capsys):
    code = main(["verify", "--catalog", "S4,D5", "--lemmas", "l0", "--corrupt-oracle"])
    err = capsys.readouterr().err
    assert code == 1
    assert "FAIL l0 on S4" in err and "witness (" in err


def test_corrupt_flag_is_hidden(capsys):
    with pytest.raises(SystemExit):
        main(["verify", "--help"])
    assert "corrupt" not in capsys.readouterr().out


def test_every_catalog_group_once():
    res = run(RunConfig(max_order=40))
    labels = [r.label for r in res.rows]
    assert labels == [r.label for r in default_catalog(40)]


def test_json_and_csv_agree():
    cfg = RunConfig(catalog="S3,S4,C2^2:C3", lemmas=("kovacs", "lf2"))
    res = run(cfg)
    rows = rows_of(render(res))
    doc = json.loads(render(RunResult(replace(cfg, format="json"), res.rows)))
    for g in doc["groups"]:
        r = rows[g["label"]]
        assert str(g["rank_G"]) == r["rank_G"] and str(g["r_star"]) == r["r_star"]
        assert g["lemmas"]["kovacs"]["status"] == r["kovacs"]


def test_entry_point_runs():
    out = subprocess.run([sys.executable, "-m", "engel.cli", "sink", "--group", "S3", "--element", "(1 2)"], capture_output=True, text=True)
    assert out.returncode == 0 and "sink size: 3" in out.stdout
