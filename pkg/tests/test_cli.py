import json
import math
import time

import pytest

from mawc import cli
from mawc.errors import EmptyRateWindowError, PreconditionError
from mawc.jsonio import config_hash, dumps, fmt_float, read_csv
from mawc.rates import computation_capacity
from mawc.source import binary_entropy


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_fmt_float_round_trips():
    for x in (0.1, 1.0, 1 / 3, 5e-324, 1e300, -2.5, 0.0):
        s = fmt_float(x)
        assert float(s) == x
        assert "." in s or "e" in s
    assert fmt_float(float("nan")) == "null"


def test_dumps_is_canonical():
    a = dumps({"b": 1, "a": [0.1, None, True]})
    b = dumps({"a": [0.1, None, True], "b": 1})
    assert a == b
    assert json.loads(a) == {"a": [0.1, None, True], "b": 1}
    assert config_hash({"x": 1}) != config_hash({"x": 2})


def test_rates_spec_row():
    rows = read_csv(cli.run_rates({"grid": [{"p": 0.0, "q": 0.5, "theta": 0.5}]}, seed=3))
    assert float(rows[0]["C_c"]) == 1.0
    assert float(rows[0]["R_sep"]) == 0.5
    assert rows[0]["seed"] == "3" and rows[0]["config_hash"]


def test_rates_empty_grid_is_header_only():
    text = cli.run_rates({"grid": []})
    lines = text.strip().splitlines()
    assert lines[0].startswith("# mawc rates schema v")
    assert lines[1].split(",") == cli.RATE_COLUMNS
    assert len(lines) == 2


def test_rates_thousand_points_fast():
    axes = {"p": [i / 100 for i in range(50)], "q": [0.3, 0.45], "theta": [0.1 * i for i in range(1, 11)]}
    t0 = time.perf_counter()
    rows = read_csv(cli.run_rates({"axes": axes}))
    assert len(rows) == 1000
    assert time.perf_counter() - t0 < 1.0
    r = rows[123]
    assert float(r["C_c"]) == computation_capacity(float(r["p"]), float(r["H_U"]))


def test_rates_degenerate_and_undefined_cells():
    rows = read_csv(cli.run_rates({"grid": [{"p": 0.1, "q": 0.05, "theta": 0.0}]}))
    assert rows[0]["C_c"].startswith("degenerate")
    assert rows[0]["R_sep_sec"] == ""
    assert float(rows[0]["C_wtc"]) == 0.0


def test_rates_invalid_row_reports_context():
    with pytest.raises(PreconditionError, match="grid row 1"):
        cli.run_rates({"grid": [{"p": 0.1}, {"p": 1.7}]})


def test_compcode_noiseless_uncoded_scenario():
    cfg = {"source": {"theta": 0.3}, "channel": {"p": 0.0, "q": 0.0}, "decoder": "uncoded",
           "blocks": [[2, 2], [4, 4]], "num_codes": 1, "trials_per_code": 300}
    doc, csv = cli.run_compcode(cfg, seed=5)
    for rec in doc["records"]:
        assert rec["error"]["mean_error_rate"] == 0.0
        assert rec["leakage_code0"]["total_bits"] <= 1e-9
    assert len(read_csv(csv)) == 2


def test_compcode_empty_window_and_force():
    cfg = {"source": {"theta": 0.5}, "channel": {"p": 0.05, "q": 0.1}, "k": 7, "n": 8,
           "num_codes": 1, "trials_per_code": 5}
    with pytest.raises(EmptyRateWindowError):
        cli.run_compcode(cfg)
    doc, _ = cli.run_compcode(cfg, force=True)
    assert doc["records"][0]["error"]["in_window"] is False


def test_main_empty_window_exit_code(tmp_path, capsys):
    path = write(tmp_path, "c.json", {"source": {"theta": 0.5}, "channel": {"p": 0.05}, "k": 22, "n": 24})
    assert cli.main(["compcode", "--config", path]) == cli.EXIT_PRECONDITION
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["kind"] == "empty_rate_window"
    assert err["error"]["window"]["admissible"] == []


def test_main_budget_exit_code(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("MAWC_ENUM_CAP", "64")
    path = write(tmp_path, "l.json", {"source": {"theta": 0.3}, "channel": {"q": 0.1}, "k": 3, "n": 6, "ell": 4})
    assert cli.main(["leakage", "--config", path]) == cli.EXIT_BUDGET
    assert json.loads(capsys.readouterr().err)["error"]["kind"] == "budget_exceeded"


def test_main_bad_config_exit_code(tmp_path, capsys):
    path = write(tmp_path, "x.json", {"source": {"nothing": 1}})
    assert cli.main(["leakage", "--config", path]) == cli.EXIT_PRECONDITION


def test_equivalence_scan_default_passes(tmp_path):
    out = tmp_path / "t2.json"
    path = write(tmp_path, "t.json", {"num_trials": 2000})
    assert cli.main(["theorem2", "--config", path, "--seed", "4", "--out", str(out)]) == cli.EXIT_OK
    doc = json.loads(out.read_text())
    rec = doc["records"][0]
    assert doc["ok"] and rec["num_disagreements"] == 0
    assert 0 < rec["min_rejected_gap"] <= rec["max_rejected_gap"]


def test_equivalence_scan_faulty_checker_fails(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(cli, "SCAN_CHECKER", lambda joint, tol: True)
    path = write(tmp_path, "t.json", {"num_trials": 50})
    assert cli.main(["theorem2", "--config", path]) == cli.EXIT_PROPERTY
    assert "property_violation" in capsys.readouterr().err


def test_leakage_subcommand(tmp_path):
    out = tmp_path / "l.json"
    path = write(tmp_path, "l.json.in", {"source": {"independent": [0.3, 0.3]}, "channel": {"q": 0.0},
                                         "k": 1, "uncoded": True})
    assert cli.main(["leakage", "--config", path, "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    expect = binary_entropy(0.42) - binary_entropy(0.3)
    assert doc["records"][0]["leakage"]["per_source_bits"][0] == pytest.approx(expect, abs=1e-12)
    assert (tmp_path / "l.csv").exists()


def test_separation_noiseless_comparison():
    cfg = {"theta": 0.5, "channel": {"p": 0.0, "q": 0.0}, "k": 2, "num_trials": 100,
           "joint": {"num_codes": 1, "trials_per_code": 100}}
    doc, csv = cli.run_separation_compare(cfg, seed=2)
    rows = {r["scheme"]: r for r in read_csv(csv)}
    assert float(rows["joint"]["rate"]) == 1.0
    assert float(rows["separation"]["reference_rate"]) == 0.5
    assert float(rows["joint"]["leakage_bits"]) <= 1e-9
    assert float(rows["separation"]["leakage_bits"]) > 0.5
    assert doc["records"][1]["reference_secrecy_rate"] is None


def test_separation_reference_lines_degraded():
    cfg = {"theta": 0.5, "channel": {"p": 0.1, "q": 0.3}, "k": 2, "n_per_terminal": 6, "rand_len": 1,
           "num_trials": 50, "joint": {"n": 6, "num_codes": 1, "trials_per_code": 20}}
    doc, _ = cli.run_separation_compare(cfg, seed=2)
    joint, sep = doc["records"]
    assert joint["reference_rate"] == pytest.approx(1 - binary_entropy(0.1), abs=1e-15)
    assert sep["reference_secrecy_rate"] == pytest.approx(
        (binary_entropy(0.3) - binary_entropy(0.1)) / 2, abs=1e-15)


def test_separation_precondition(tmp_path, capsys):
    path = write(tmp_path, "s.json", {"channel": {"p": 0.2, "q": 0.1}, "k": 2, "n_per_terminal": 3,
                                      "rand_len": 1})
    assert cli.main(["separation", "--config", path]) == cli.EXIT_PRECONDITION


def test_reruns_are_byte_identical(tmp_path):
    path = write(tmp_path, "c.json", {"source": {"theta": 0.3}, "channel": {"p": 0.05, "q": 0.2},
                                      "k": 3, "n": 8, "num_codes": 3, "trials_per_code": 20})
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        assert cli.main(["compcode", "--config", path, "--seed", "99", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert "timing" in doc
        outs.append(dumps(cli.strip_timing(doc)))
    assert outs[0] == outs[1]
    assert (tmp_path / "r0.csv").read_bytes() == (tmp_path / "r1.csv").read_bytes()


def test_workers_do_not_change_results():
    cfg = {"source": {"theta": 0.5}, "channel": {"p": 0.05, "q": 0.2}, "k": 2, "n": 6,
           "num_codes": 4, "trials_per_code": 10}
    a, _ = cli.run_compcode(cfg, seed=1, workers=1)
    b, _ = cli.run_compcode(cfg, seed=1, workers=2)
    assert dumps(a) == dumps(b)


def test_config_echo_is_verbatim(tmp_path):
    cfg = {"source": {"theta": 0.1}, "channel": {"p": 0.0, "q": 0.0}, "decoder": "uncoded",
           "k": 1, "n": 1, "num_codes": 1, "trials_per_code": 3, "note": "x"}
    out = tmp_path / "o.json"
    cli.main(["compcode", "--config", write(tmp_path, "c.json", cfg), "--out", str(out)])
    assert json.loads(out.read_text())["config"] == cfg
    assert not math.isnan(json.loads(out.read_text())["timing"]["wall_clock_s"])
