"""Command-line interface tests. Everything runs in-process through main()."""

import csv
import json

import pytest

from supersim.cli import (
    RESULT_COLUMNS,
    build_parser,
    build_sweep,
    main,
    parse_predictor_spec,
    read_results_csv,
)
from supersim.config import CONFIG_FIELDS, ConfigError, SimConfig, config_from_row, config_to_row


def run_cli(*argv):
    return main(list(argv))


def test_parse_predictor_specs():
    assert parse_predictor_spec("exact") == ("exact", 0.0, 0.0)
    assert parse_predictor_spec("exponential") == ("exponential", 0.0, 0.0)
    assert parse_predictor_spec("alpha:0.25") == ("alpha", 0.25, 0.0)
    assert parse_predictor_spec("alpha_beta:0.5:0.3") == ("alpha_beta", 0.5, 0.3)
    for bad in ("alpha", "alpha_beta:0.5", "alpha:x", "mystery:1"):
        with pytest.raises(ConfigError):
            parse_predictor_spec(bad)


def test_config_row_round_trip():
    cfg = SimConfig(n_queues=12, arrival_rate=0.85, choice_policy="min_add",
                    sched_policy="srpt", predictor="alpha", alpha=0.25,
                    horizon=55.5, warmup=5.0, replications=2, seed=99)
    row = config_to_row(cfg)
    assert set(row) == set(CONFIG_FIELDS)
    back = config_from_row(row)
    assert back == cfg
    assert isinstance(back.n_queues, int)
    assert isinstance(back.arrival_rate, float)


def sweep_args(**over):
    ns = build_parser().parse_args(["run", "--dry-run"])
    for k, v in over.items():
        setattr(ns, k, v)
    return ns


def test_build_sweep_default_grid():
    # 8 default loads x 1 choice x 1 sched x 1 predictor
    cfgs = build_sweep(sweep_args(), {})
    assert len(cfgs) == 8
    lams = sorted({c.arrival_rate for c in cfgs})
    assert lams[0] == 0.5 and lams[-1] == 0.99


def test_build_sweep_cross_product():
    ns = sweep_args(lam=["0.5,0.9"], choice=["shortest_queue,least_loaded"],
                    sched=["fifo,srpt,sjf,psjf"], predictor=["exact,alpha:0.5"])
    cfgs = build_sweep(ns, {})
    assert len(cfgs) == 2 * 2 * 4 * 2
    assert len({(c.arrival_rate, c.choice_policy, c.sched_policy, c.predictor, c.alpha)
                for c in cfgs}) == len(cfgs)


def test_build_sweep_rejects_bad_load():
    with pytest.raises(ConfigError):
        build_sweep(sweep_args(lam=["1.0"]), {})
    with pytest.raises(ConfigError):
        build_sweep(sweep_args(lam=[""]), {})


def test_config_file_merge(tmp_path):
    cfg_file = tmp_path / "sweep.json"
    cfg_file.write_text(json.dumps({"n": 7, "lam": [0.6], "sched": ["srpt"]}))
    ns = sweep_args(config=str(cfg_file))
    cfgs = build_sweep(ns, json.loads(cfg_file.read_text()))
    assert len(cfgs) == 1
    assert cfgs[0].n_queues == 7
    assert cfgs[0].sched_policy == "srpt"
    # flags beat the file
    ns2 = sweep_args(config=str(cfg_file), n=9)
    cfgs2 = build_sweep(ns2, json.loads(cfg_file.read_text()))
    assert cfgs2[0].n_queues == 9


def test_run_dry_run_prints_plan(capsys):
    rc = run_cli("run", "--dry-run", "--lam", "0.5", "--n", "10",
                 "--horizon", "50", "--warmup", "5", "--reps", "1")
    assert rc == 0
    out = capsys.readouterr().out
    assert "shortest_queue" in out and "0.5" in out


def test_run_writes_results_and_manifest(tmp_path):
    out = tmp_path / "res"
    rc = run_cli("run", "--lam", "0.6,0.8", "--n", "10", "--horizon", "60",
                 "--warmup", "10", "--reps", "2", "--seed", "5",
                 "--sched", "fifo,srpt", "--out", str(out))
    assert rc == 0
    rows = read_results_csv(out / "results.csv")
    assert len(rows) == 4
    for row in rows:
        assert set(RESULT_COLUMNS) <= set(row)
        assert float(row["mean_response"]) > 0.9
    manifest = json.loads((out / "manifest.json").read_text())
    assert len(manifest["configs"]) == 4
    assert len(manifest["wall_seconds"]) == 4
    assert manifest["failures"] == {}


def test_run_rerun_byte_identical(tmp_path):
    outs = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        rc = run_cli("run", "--lam", "0.7", "--n", "8", "--horizon", "40",
                     "--warmup", "5", "--reps", "2", "--seed", "31",
                     "--choice", "least_loaded", "--sched", "srpt",
                     "--dump-records", "--out", str(out))
        assert rc == 0
        outs.append(out)
    a_files = sorted(p.name for p in outs[0].iterdir())
    b_files = sorted(p.name for p in outs[1].iterdir())
    assert a_files == b_files
    for name in a_files:
        if name == "manifest.json":
            continue  # carries wall-clock timings
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes(), name


def test_run_rejects_invalid_grid():
    assert run_cli("run", "--lam", "1.5", "--dry-run") == 2
    assert run_cli("run", "--lam", "0.5", "--sched", "rr", "--dry-run") == 2


def test_oracle_tails(tmp_path, capsys):
    out = tmp_path / "oracle.csv"
    rc = run_cli("oracle", "--lam", "0.7", "--d", "2", "--imax", "4", "--out", str(out))
    assert rc == 0
    with open(out, newline="") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 5
    got = [float(r["tail_fraction"]) for r in rows]
    assert got[0] == pytest.approx(1.0)
    assert got[2] == pytest.approx(0.7 ** 3, rel=1e-12)


def test_oracle_mean(capsys):
    rc = run_cli("oracle", "--lam", "0.5", "--mean")
    assert rc == 0
    out = capsys.readouterr().out
    assert "1.2656" in out


def test_trace_subcommand(tmp_path):
    src = tmp_path / "trace.csv"
    with open(src, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["submission", "size", "prediction"])
        for i in range(300):
            w.writerow([i * 0.37, 0.4 + (i % 9) * 0.2, 0.5 + (i % 9) * 0.2])
    out = tmp_path / "rep"
    rc = run_cli("trace", "--trace", str(src), "--lam", "0.8", "--q", "10",
                 "--reps", "2", "--choice", "least_loaded_updated",
                 "--sched", "sprpt", "--emit-metrics", "--out", str(out))
    assert rc == 0
    rows = read_results_csv(out / "results.csv")
    assert len(rows) == 1
    names = {p.name for p in out.iterdir()}
    assert any(n.startswith("slowdown_cdf_") for n in names)
    assert any(n.startswith("conditional_slowdown_") for n in names)
    assert "period_weights.csv" in names
    assert "heatmap.csv" in names


def test_convert_subcommand(tmp_path):
    raw = tmp_path / "raw.csv"
    with open(raw, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["when", "work", "guess", "state"])
        w.writerow([10, 1.0, 1.1, "done"])
        w.writerow([20, 2.0, 2.2, "evicted"])
    out = tmp_path / "canon.csv"
    rc = run_cli("convert", "--in", str(raw), "--out", str(out),
                 "--submission-col", "when", "--size-col", "work",
                 "--prediction-col", "guess", "--status-col", "state",
                 "--ok-value", "done")
    assert rc == 0
    text = out.read_text()
    assert "failed" in text and "ok" in text


def test_fairness_subcommand(tmp_path):
    # build a records dump through a real run first
    out = tmp_path / "run"
    rc = run_cli("run", "--lam", "0.9", "--n", "10", "--horizon", "80",
                 "--warmup", "10", "--reps", "1", "--seed", "8",
                 "--dump-records", "--out", str(out))
    assert rc == 0
    dumps = [p for p in out.iterdir() if p.name.startswith("records_")]
    assert len(dumps) == 1
    fout = tmp_path / "fair"
    rc2 = run_cli("fairness", "--records", str(dumps[0]), "--bins", "10",
                  "--out", str(fout))
    assert rc2 == 0
    names = {p.name for p in fout.iterdir()}
    assert {"slowdown_cdf.csv", "conditional_slowdown.csv"} <= names


def test_missing_file_exits_2(tmp_path):
    assert run_cli("trace", "--trace", str(tmp_path / "absent.csv")) == 2
    assert run_cli("fairness", "--records", str(tmp_path / "absent.csv")) == 2


def test_outdir_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("SUPERSIM_OUTDIR", str(tmp_path / "envout"))
    rc = run_cli("run", "--lam", "0.5", "--n", "6", "--horizon", "30",
                 "--warmup", "5", "--reps", "1", "--seed", "2")
    assert rc == 0
    assert (tmp_path / "envout" / "results.csv").exists()
