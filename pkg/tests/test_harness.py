import csv
import json
from dataclasses import replace

import pytest
import yaml

from ice_beamsim.channel.model import realize
from ice_beamsim.core.config import ScenarioConfig
from ice_beamsim.core.exceptions import ParsingError
from ice_beamsim.core.types import TRIAL_COLUMNS
from ice_beamsim.harness.cli import main
from ice_beamsim.harness.io import (
    SUMMARY_COLUMNS,
    cdf_table,
    read_trials,
    write_results,
)
from ice_beamsim.harness.runner import NO_SERVICE, run_scenario, service_key, trial_rng
from ice_beamsim.locbf.pipeline import AlignmentSystem, align_with_plan, plan_measurements
from ice_beamsim.parsing.reader import ResultsReader


def test_record_layout(small_config):
    result = run_scenario(small_config)
    n_snr = len(small_config.snr_db_sweep)
    per_trial = n_snr * (len(small_config.services) + 1)
    assert len(result.records) == small_config.trials * per_trial

    first = result.records[:per_trial]
    assert all(r.trial == 0 for r in first)
    assert [(r.method, r.service, r.snr_db) for r in first] == [
        ("location_cs", "gps", -10.0),
        ("location_cs", "gps", 0.0),
        ("location_cs", "lte", -10.0),
        ("location_cs", "lte", 0.0),
        ("exhaustive", NO_SERVICE, -10.0),
        ("exhaustive", NO_SERVICE, 0.0),
    ]
    assert all(r.spectral_efficiency >= 0.0 for r in result.records)
    assert {r.tx_beams_used for r in result.records if r.method == "exhaustive"} == {16}


def test_exhaustive_dominates_location_based(small_config):
    result = run_scenario(replace(small_config, trials=6))
    best = {
        (r.trial, r.snr_db): r.spectral_efficiency
        for r in result.records
        if r.method == "exhaustive"
    }
    for r in result.records:
        if r.method == "location_cs":
            assert r.spectral_efficiency <= best[(r.trial, r.snr_db)] + 1e-9


def test_trials_are_independent_of_trial_count(small_config):
    short = run_scenario(replace(small_config, trials=2)).records
    long = run_scenario(replace(small_config, trials=4)).records
    assert [r.to_row() for r in long[: len(short)]] == [r.to_row() for r in short]


def test_service_key_is_stable():
    assert service_key("gps") == service_key("gps")
    assert service_key("gps") != service_key("lte")


def test_write_results_files(small_config, tmp_path):
    result = run_scenario(small_config)
    paths = write_results(result, small_config, tmp_path / "run")

    with paths["trials"].open(newline="") as f:
        header = next(csv.reader(f))
    assert tuple(header) == TRIAL_COLUMNS
    assert header == [
        "trial", "service", "method", "snr_db", "spectral_eff_bps_hz",
        "tx_beams", "total_switchings", "fallback",
    ]

    with paths["summary"].open(newline="") as f:
        assert tuple(next(csv.reader(f))) == SUMMARY_COLUMNS

    manifest = yaml.safe_load(paths["manifest"].read_text())
    assert manifest["run"]["records"] == len(result.records)
    assert ScenarioConfig.from_manifest(paths["manifest"]).to_dict() == small_config.to_dict()


def test_identical_seeds_give_identical_bytes(small_config, tmp_path):
    a = write_results(run_scenario(small_config), small_config, tmp_path / "a")
    b = write_results(run_scenario(small_config), small_config, tmp_path / "b")
    assert a["trials"].read_bytes() == b["trials"].read_bytes()
    assert a["summary"].read_bytes() == b["summary"].read_bytes()


def test_worker_pool_matches_serial_run(small_config, tmp_path):
    serial = write_results(run_scenario(small_config), small_config, tmp_path / "s")
    pooled_cfg = replace(small_config, workers=2)
    pooled = write_results(run_scenario(pooled_cfg), pooled_cfg, tmp_path / "p")
    assert serial["trials"].read_bytes() == pooled["trials"].read_bytes()


def test_different_seeds_differ(small_config):
    a = run_scenario(small_config).records
    b = run_scenario(replace(small_config, seed=8)).records
    assert [r.spectral_efficiency for r in a] != [r.spectral_efficiency for r in b]


def test_read_trials_round_trip(small_config, tmp_path):
    result = run_scenario(small_config)
    paths = write_results(result, small_config, tmp_path)
    records = read_trials(paths["trials"])
    assert [r.to_row() for r in records] == [r.to_row() for r in result.records]


def test_read_trials_reports_bad_rows(tmp_path):
    path = tmp_path / "trials.csv"
    path.write_text(
        ",".join(TRIAL_COLUMNS) + "\n"
        "0,gps,location_cs,0,1.5,3,9,0\n"
        "1,gps,location_cs,zero,1.5,3,9,0\n"
    )
    with pytest.raises(ParsingError) as exc:
        read_trials(path)
    assert exc.value.line_number == 3


def test_reader_checks_required_columns(tmp_path):
    path = tmp_path / "trials.csv"
    path.write_text("trial,service\n0,gps\n")
    with pytest.raises(ParsingError):
        list(ResultsReader(path, required_columns=TRIAL_COLUMNS).read())


def test_cdf_table(small_config):
    records = run_scenario(small_config).records
    rows = cdf_table(records, "tx_beams")
    assert rows
    exhaustive = [r for r in rows if r["method"] == "exhaustive"]
    assert {r["value"] for r in exhaustive} == {"16"}
    assert all(r["probability"] == "1" for r in exhaustive)
    with pytest.raises(ParsingError):
        cdf_table(records, "latency")


# ----------------------------------------------------------------------
# CLI
# ----------------------------------------------------------------------

def _write_small_config(cfg: ScenarioConfig, path):
    cfg.save(path)
    return path


def test_cli_run_and_cdf(small_config, tmp_path):
    config_path = _write_small_config(small_config, tmp_path / "cfg.yaml")
    out = tmp_path / "results"

    assert main(["run", "--config", str(config_path), "--out", str(out), "--trials", "2"]) == 0
    assert (out / "trials.csv").exists()
    assert (out / "summary.csv").exists()
    assert ScenarioConfig.from_manifest(out / "manifest.yaml").trials == 2

    assert main(["cdf", "--results", str(out), "--metric", "total_switchings"]) == 0
    with (out / "cdf_total_switchings.csv").open(newline="") as f:
        assert next(csv.reader(f)) == ["service", "method", "snr_db", "value", "probability"]


def test_cli_service_filter(small_config, tmp_path):
    config_path = _write_small_config(small_config, tmp_path / "cfg.yaml")
    out = tmp_path / "results"
    code = main([
        "run", "--config", str(config_path), "--out", str(out),
        "--trials", "1", "--services", "gps", "--seed", "0x10",
    ])
    assert code == 0
    records = read_trials(out / "trials.csv")
    assert {r.service for r in records} == {"gps", NO_SERVICE}


def test_cli_configuration_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("bogus: 1\n")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert main(["run", "--out", str(tmp_path / "o"), "--trials", "0"]) == 2
    assert main(["run", "--out", str(tmp_path / "o"), "--services", "galileo"]) == 2
    assert main(["cdf", "--results", str(tmp_path / "missing")]) == 2


def test_cli_warns_when_fallback_was_used(small_config, tmp_path, capsys):
    # a stop threshold above 1 ends OMP before the first atom
    cfg = replace(small_config, omp_residual_tol=2.0)
    config_path = _write_small_config(cfg, tmp_path / "cfg.yaml")
    out = tmp_path / "results"

    assert main(["run", "--config", str(config_path), "--out", str(out), "--trials", "1"]) == 0
    assert "fallback" in capsys.readouterr().err
    assert all(r.fallback_used for r in read_trials(out / "trials.csv") if r.method == "location_cs")


def test_cli_quiet_without_fallback(small_config, tmp_path, capsys):
    config_path = _write_small_config(small_config, tmp_path / "cfg.yaml")
    assert main(["run", "--config", str(config_path), "--out", str(tmp_path / "r")]) == 0
    assert "fallback" not in capsys.readouterr().err


# ----------------------------------------------------------------------
# Reader positions / JSON trials
# ----------------------------------------------------------------------

def test_read_trials_line_numbers_survive_skipped_rows(tmp_path):
    path = tmp_path / "trials.csv"
    path.write_text(
        ",".join(TRIAL_COLUMNS) + "\n"
        "0,gps,location_cs,0,1.5,3,9,0\n"
        ",,,,,,,\n"
        "\n"
        "1,gps,location_cs,zero,1.5,3,9,0\n"
    )
    with pytest.raises(ParsingError) as exc:
        read_trials(path)
    assert exc.value.line_number == 5


def test_reader_yields_csv_line_positions(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("a,b\n1,2\n,\n3,4\n")
    reader = ResultsReader(path)
    assert [(pos, row["a"]) for pos, row in reader.read()] == [(2, "1"), (4, "3")]
    assert reader.get_stats() == {"records_read": 2, "records_skipped": 1}


def test_json_trials_round_trip(small_config, tmp_path):
    result = run_scenario(small_config)
    paths = write_results(result, small_config, tmp_path, trials_json=True)

    from_json = read_trials(paths["trials_json"])
    assert [r.to_row() for r in from_json] == [r.to_row() for r in result.records]
    manifest = yaml.safe_load(paths["manifest"].read_text())
    assert manifest["run"]["files"] == ["trials.csv", "summary.csv", "trials.json"]


def test_json_trials_report_bad_items(tmp_path):
    path = tmp_path / "trials.json"
    good = dict(zip(TRIAL_COLUMNS, ["0", "gps", "location_cs", "0", "1.5", "3", "9", "0"]))
    path.write_text(json.dumps([good, {**good, "tx_beams": "many"}]))
    with pytest.raises(ParsingError) as exc:
        read_trials(path)
    assert "item 2" in str(exc.value)

    path.write_text(json.dumps([{"trial": 0}]))
    with pytest.raises(ParsingError):
        read_trials(path)


def test_cli_cdf_accepts_json_trials(small_config, tmp_path):
    config_path = _write_small_config(small_config, tmp_path / "cfg.yaml")
    out = tmp_path / "results"
    run_args = ["run", "--config", str(config_path), "--out", str(out), "--trials-json"]
    assert main(run_args) == 0

    json_cdf = tmp_path / "from_json.csv"
    assert main(["cdf", "--results", str(out / "trials.json"), "--out", str(json_cdf)]) == 0
    assert main(["cdf", "--results", str(out)]) == 0
    assert json_cdf.read_bytes() == (out / "cdf_tx_beams.csv").read_bytes()


def test_record_switchings_include_refinement(small_config):
    cfg = replace(small_config, trials=1)
    record = run_scenario(cfg).records[0]
    assert (record.method, record.service, record.snr_db) == ("location_cs", "gps", -10.0)

    # replay the same cell from its seed streams
    system = AlignmentSystem.from_scenario(cfg)
    realization, H = realize(
        cfg.geometry, cfg.n_paths, system.ap_cfg, system.ue_cfg, trial_rng(cfg.seed, 0, 0)
    )
    gps = cfg.service_list[0]
    key = service_key(gps.name)
    plan = plan_measurements(realization, gps, gps, system, trial_rng(cfg.seed, 0, 1, key))
    selection = align_with_plan(
        H, plan, system.at_snr(-10.0), trial_rng(cfg.seed, 0, 2, key, 0)
    )

    assert selection.total_switchings == selection.tx_beams_used * selection.rx_beams_used
    assert selection.refinement_switchings > 0
    assert record.total_switchings == selection.probed_switchings
    assert record.tx_beams_used == selection.tx_beams_used


def test_exhaustive_only_emits_one_record_per_snr(small_config):
    cfg = replace(small_config, trials=1, methods=["exhaustive"], snr_db_sweep=[-20.0, -5.0, 0.0])
    records = run_scenario(cfg).records
    assert [(r.method, r.service, r.snr_db) for r in records] == [
        ("exhaustive", NO_SERVICE, -20.0),
        ("exhaustive", NO_SERVICE, -5.0),
        ("exhaustive", NO_SERVICE, 0.0),
    ]
