"""Trace pipeline tests.

The replay oracle at the bottom reuses the single-queue trick from
test_engine: with one queue and one candidate the whole schedule is
deterministic, so trace replay must reproduce a hand-simulated timeline.
"""

import csv
import math

import numpy as np
import pytest

from supersim import SimConfig
from supersim.trace import (
    TraceFormatError,
    TraceJob,
    convert_raw,
    load_trace,
    normalize_sizes,
    prepare_trace,
    replay,
    scale_arrivals,
    write_trace,
)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)


def test_load_basic(tmp_path):
    p = tmp_path / "t.csv"
    write_csv(p, ["submission", "size", "prediction"],
              [[2.0, 1.0, 1.5], [1.0, 2.0, 2.5]])
    jobs, meta = load_trace(p)
    assert [j.submission for j in jobs] == [1.0, 2.0]  # sorted
    assert meta.job_count == 2
    assert meta.dropped == 0
    assert meta.mean_size == pytest.approx(1.5)
    assert meta.span == pytest.approx(1.0)


def test_load_column_order_free(tmp_path):
    p = tmp_path / "t.csv"
    write_csv(p, ["prediction", "submission", "size"], [[3.0, 1.0, 2.0]])
    jobs, _ = load_trace(p)
    assert jobs[0].size == 2.0 and jobs[0].prediction == 3.0


def test_load_drops_failed_and_nonpositive(tmp_path):
    p = tmp_path / "t.csv"
    write_csv(p, ["submission", "size", "prediction", "status"], [
        [1.0, 2.0, 2.0, "ok"],
        [2.0, 2.0, 2.0, "failed"],
        [3.0, 0.0, 2.0, "ok"],
        [4.0, 2.0, -1.0, ""],
        [5.0, 1.0, 1.0, "ok"],
    ])
    jobs, meta = load_trace(p)
    assert meta.job_count == 2
    assert meta.dropped == 3


def test_load_rejects_garbage(tmp_path):
    p = tmp_path / "t.csv"
    write_csv(p, ["submission", "size"], [[1.0, 2.0]])
    with pytest.raises(TraceFormatError):
        load_trace(p)

    p2 = tmp_path / "t2.csv"
    write_csv(p2, ["submission", "size", "prediction"], [[1.0, "huge", 2.0]])
    with pytest.raises(TraceFormatError):
        load_trace(p2)

    p3 = tmp_path / "t3.csv"
    write_csv(p3, ["submission", "size", "prediction"], [[1.0, "inf", 2.0]])
    with pytest.raises(TraceFormatError):
        load_trace(p3)

    p4 = tmp_path / "t4.csv"
    write_csv(p4, ["submission", "size", "prediction"],
              [[1.0, -1.0, 2.0]])  # every row filtered -> unusable
    with pytest.raises(TraceFormatError):
        load_trace(p4)


def test_normalize_scales_predictions_by_same_factor():
    jobs = [TraceJob(0.0, 2.0, 4.0), TraceJob(1.0, 6.0, 3.0)]
    out, factor = normalize_sizes(jobs)
    assert factor == pytest.approx(4.0)  # mean size
    assert [j.size for j in out] == pytest.approx([0.5, 1.5])
    assert [j.prediction for j in out] == pytest.approx([1.0, 0.75])
    assert sum(j.size for j in out) / 2 == pytest.approx(1.0)
    # prediction/size ratios survive normalization
    assert out[0].prediction / out[0].size == pytest.approx(2.0)


def test_scale_arrivals_span():
    jobs = [TraceJob(t, 1.0, 1.0) for t in (100.0, 150.0, 400.0)]
    lam, q = 0.8, 100
    out = scale_arrivals(jobs, lam, q)
    assert out[0].submission == 0.0
    assert out[-1].submission == pytest.approx((3 - 1) / (q * lam))
    # relative spacing preserved
    assert out[1].submission / out[-1].submission == pytest.approx(50.0 / 300.0)


def test_scale_arrivals_validation():
    jobs = [TraceJob(1.0, 1.0, 1.0)]
    with pytest.raises(TraceFormatError):
        scale_arrivals(jobs, 0.8)
    with pytest.raises(TraceFormatError):
        scale_arrivals([TraceJob(1.0, 1.0, 1.0), TraceJob(1.0, 1.0, 1.0)], 0.8)
    with pytest.raises(TraceFormatError):
        scale_arrivals([TraceJob(0.0, 1.0, 1.0), TraceJob(1.0, 1.0, 1.0)], 1.2)


def test_prepare_trace_pipeline(tmp_path):
    p = tmp_path / "t.csv"
    write_csv(p, ["submission", "size", "prediction"],
              [[10.0 * i, 2.0 + i, 2.0 + i] for i in range(10)])
    jobs, meta, factor = prepare_trace(p, lam=0.9, q=50)
    assert meta.job_count == 10
    assert sum(j.size for j in jobs) / 10 == pytest.approx(1.0)
    assert jobs[-1].submission == pytest.approx(9 / (50 * 0.9))
    assert factor == pytest.approx(np.mean([2.0 + i for i in range(10)]))


def replay_cfg(**kw):
    base = dict(
        n_queues=1, d_choices=1, arrival_rate=0.5, choice_policy="random",
        sched_policy="fifo", predictor="trace", arrival_source="trace",
        horizon=math.inf, warmup=0.0, replications=1, seed=77,
    )
    base.update(kw)
    return SimConfig(**base)


def test_replay_single_queue_fifo_oracle():
    jobs = [TraceJob(0.0, 2.0, 2.0), TraceJob(0.5, 1.0, 1.0), TraceJob(10.0, 3.0, 3.0)]
    s = replay(jobs, replay_cfg(), keep_records=True)
    rec = s.results[0].records
    order = np.argsort(rec.arrival)
    comps = rec.completion[order].tolist()
    # busy period 0..3 serves jobs back to back; third starts fresh at 10
    assert comps == pytest.approx([2.0, 3.0, 13.0])
    assert s.mean_response == pytest.approx((2.0 + 2.5 + 3.0) / 3)


def test_replay_single_queue_srpt_oracle():
    jobs = [TraceJob(0.0, 5.0, 5.0), TraceJob(1.0, 1.0, 1.0)]
    s = replay(jobs, replay_cfg(sched_policy="srpt"), keep_records=True)
    rec = s.results[0].records
    order = np.argsort(rec.arrival)
    assert rec.completion[order].tolist() == pytest.approx([6.0, 2.0])


def test_replay_conserves_jobs_across_reps():
    jobs = [TraceJob(0.01 * i, 0.5 + (i % 7) * 0.2, 0.6) for i in range(400)]
    cfg = replay_cfg(n_queues=10, d_choices=2, choice_policy="shortest_queue",
                     replications=4)
    s = replay(jobs, cfg, keep_records=False)
    assert s.rep_counts == [400] * 4
    assert len(s.rep_means) == 4
    assert s.results is None


def test_replay_exact_predictions_equal_true_sizes():
    # prediction column == size column must reproduce the true-information run
    sized = [TraceJob(0.05 * i, 1.0 + (i % 5) * 0.3, 1.0 + (i % 5) * 0.3) for i in range(200)]
    cfg_p = replay_cfg(n_queues=8, d_choices=2, choice_policy="least_loaded_updated",
                       sched_policy="sprpt", replications=2)
    cfg_t = replay_cfg(n_queues=8, d_choices=2, choice_policy="least_loaded",
                       sched_policy="srpt", replications=2)
    sp = replay(sized, cfg_p, keep_records=True)
    st = replay(sized, cfg_t, keep_records=True)
    for a, b in zip(sp.results, st.results):
        assert a.records.completion.tobytes() == b.records.completion.tobytes()


def test_replay_empty_rejected():
    with pytest.raises(TraceFormatError):
        replay([], replay_cfg())


def test_write_trace_round_trip(tmp_path):
    jobs = [TraceJob(0.5, 1.25, 2.5), TraceJob(1.0, 0.125, 0.0625)]
    p = tmp_path / "out.csv"
    write_trace(p, jobs)
    back, meta = load_trace(p)
    assert [(j.submission, j.size, j.prediction) for j in back] == [
        (0.5, 1.25, 2.5), (1.0, 0.125, 0.0625),
    ]


def test_convert_raw_maps_columns(tmp_path):
    raw = tmp_path / "raw.csv"
    write_csv(raw, ["ts", "cpu_seconds", "estimate", "state"], [
        [100, 4.0, 5.0, "FINISHED"],
        [200, 2.0, 2.5, "KILLED"],
        [300, 1.0, 1.5, "FINISHED"],
    ])
    out = tmp_path / "canon.csv"
    stats = convert_raw(raw, out, "ts", "cpu_seconds", "estimate",
                        status_col="state", ok_value="FINISHED", time_scale=0.001)
    assert stats == {"written": 3, "failed": 1}
    jobs, meta = load_trace(out)
    assert meta.job_count == 2
    assert meta.dropped == 1
    assert jobs[0].submission == pytest.approx(0.1)


def test_convert_raw_missing_column(tmp_path):
    raw = tmp_path / "raw.csv"
    write_csv(raw, ["a", "b"], [[1, 2]])
    with pytest.raises(TraceFormatError):
        convert_raw(raw, tmp_path / "o.csv", "a", "b", "censored")


def test_bundled_trace_loads():
    jobs, meta = load_trace("data/synthetic_trace.csv")
    assert meta.job_count > 15000
    assert meta.dropped > 0  # generator plants failed/nonpositive rows
    sizes = np.array([j.size for j in jobs])
    assert sizes.max() / np.median(sizes) > 50.0  # heavy tail present
    subs = [j.submission for j in jobs]
    assert subs == sorted(subs)
