import json

import numpy as np
import pytest

from eastsim.cli import main
from eastsim.io import CSV_COLUMNS, parse_config_text, read_rounds_csv
from eastsim.errors import ConfigError


def test_default_run_writes_1200_rows(tmp_path):
    assert main(["run", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "rounds.csv").read_text().splitlines()
    assert lines[0].split(",") == list(CSV_COLUMNS)
    assert len(lines) == 1201
    assert {"summary.json", "manifest.json"} <= {p.name for p in tmp_path.iterdir()}


def test_rounds_override(tmp_path):
    assert main(["run", "--rounds", "1", "--out", str(tmp_path)]) == 0
    assert len(read_rounds_csv(tmp_path / "rounds.csv")) == 1


def test_same_seed_byte_identical(tmp_path):
    for d in ("a", "b"):
        assert main(["run", "--rounds", "100", "--seed", "5", "--temp-jitter", "0.5", "--out", str(tmp_path / d)]) == 0
    assert (tmp_path / "a/rounds.csv").read_bytes() == (tmp_path / "b/rounds.csv").read_bytes()


def test_env_seed_default(tmp_path, monkeypatch):
    monkeypatch.setenv("EAST_SIM_SEED", "77")
    assert main(["run", "--rounds", "1", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "manifest.json").read_text())["seed"] == 77


def test_summary_round_trips_through_csv(tmp_path):
    assert main(["run", "--rounds", "300", "--temp-jitter", "0.5", "--out", str(tmp_path)]) == 0
    rows = read_rounds_csv(tmp_path / "rounds.csv")
    summary = json.loads((tmp_path / "summary.json").read_text())
    for r in "ABC":
        for col in ("p_save_levels", "p_save_db"):
            vals = np.array([row[f"{col}_{r}"] for row in rows])
            got = summary["regions"][r][col]
            assert got["min"] == pytest.approx(vals.min(), abs=1e-9)
            assert got["max"] == pytest.approx(vals.max(), abs=1e-9)
            assert got["mean"] == pytest.approx(vals.mean(), abs=1e-9)
        prr = np.array([row[f"prr_{r}"] for row in rows])
        assert summary["regions"][r]["prr"]["min"] == pytest.approx(prr.min(), abs=1e-9)
    assert summary["traffic"]["power_adjust_msgs"] == sum(row["adjust_msgs"] for row in rows)
    assert summary["traffic"]["acks"] == sum(row["acks"] for row in rows)


def test_manifest_replay(tmp_path):
    assert main(["run", "--rounds", "80", "--seed", "3", "--ref-mobility", "perimeter",
                 "--node-step", "4", "--temp-jitter", "1.0", "--out", str(tmp_path / "a")]) == 0
    assert main(["run", "--config", str(tmp_path / "a/manifest.json"), "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a/rounds.csv").read_bytes() == (tmp_path / "b/rounds.csv").read_bytes()


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# small run\nnodes = 20\nrounds = 4  # short\nref_mobility = center\neta = 0.003\n")
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    rows = read_rounds_csv(tmp_path / "o/rounds.csv")
    assert len(rows) == 4 and rows[0]["ref_x"] == 50.0
    assert sum(rows[0][f"count_{r}"] for r in "ABC") == 20


@pytest.mark.parametrize("text, line", [
    ("nodes = 10\nrounds = many\n", 2),
    ("nodes = 10\n\nbogus = 1\n", 3),
    ("scheme = east\nnodes = 0\n", 2),
    ("just words\n", 1),
])
def test_bad_config_is_line_numbered(text, line):
    with pytest.raises(ConfigError, match=f"cfg:{line}:"):
        parse_config_text(text, "cfg")


def test_bad_config_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("rounds = -1\n")
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "bad.cfg:1:" in capsys.readouterr().err


def test_missing_config_is_io_error(tmp_path):
    assert main(["run", "--config", str(tmp_path / "nope.cfg"), "--out", str(tmp_path)]) == 3


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["run", "--rounds", "1", "--out", str(blocker / "sub")]) == 3


def test_compare_deltas(tmp_path):
    assert main(["compare", "--rounds", "200", "--temp-jitter", "0.5", "--out", str(tmp_path),
                 "--schemes", "east,classical-per-node,classical-region-max"]) == 0
    cmp = read_rounds_csv(tmp_path / "compare.csv")
    assert len(cmp) == 200
    for row in cmp:
        assert all(v >= 0 for k, v in row.items() if k.startswith("delta_"))
    summary = json.loads((tmp_path / "compare_summary.json").read_text())
    # classical-per-node minus EAST is exactly EAST's saving, recomputed from its own CSV
    east_rows = read_rounds_csv(tmp_path / "east/rounds.csv")
    expected = np.mean([row["p_save_levels_A"] for row in east_rows])
    got = summary["delta_levels"]["classical-per-node"]["A"]["mean"]
    assert got == pytest.approx(expected, rel=1e-5)
    assert summary["power_adjust_msgs"]["east"] <= summary["power_adjust_msgs"]["classical-per-node"]


def test_compare_needs_two_schemes(tmp_path):
    assert main(["compare", "--schemes", "east", "--out", str(tmp_path)]) == 2


def test_sweep(tmp_path, caplog):
    assert main(["sweep", "--seeds", "1,2,3,2", "--rounds", "5", "--out", str(tmp_path)]) == 0
    subdirs = sorted(p.name for p in tmp_path.iterdir() if p.is_dir())
    assert subdirs == ["seed_1", "seed_2", "seed_3"]
    agg = read_rounds_csv(tmp_path / "aggregate.csv")
    assert [row["seed"] for row in agg] == [1, 2, 3]
    assert "duplicate" in caplog.text
