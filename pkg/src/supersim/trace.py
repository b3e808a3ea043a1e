"""Trace loading, normalization, and replay.

Canonical trace format: CSV with header columns submission,size,prediction
(times in the trace's native unit, typically seconds) plus an optional
status column; rows whose status is neither empty nor "ok" are dropped, as
are rows with nonpositive size or prediction. The convert helper maps other
schemas onto this format.

The replay pipeline is: load -> normalize_sizes (sizes and predictions both
divided by the mean size, so mean size becomes 1) -> scale_arrivals (affine
map putting the first arrival at 0 with mean gap 1/(q*lam), i.e. offered
load lam on q queues) -> replay (every completion measured, no warmup).
"""

from __future__ import annotations

import csv
import math
import os
from array import array
from dataclasses import dataclass

import numpy as np

from .config import SimConfig
from .engine import ReplicationSummary, RunResult, run_simulation, split_seed


class TraceFormatError(ValueError):
    pass


@dataclass(slots=True)
class TraceJob:
    submission: float
    size: float
    prediction: float


@dataclass
class TraceMeta:
    name: str
    job_count: int
    dropped: int
    mean_size: float
    span: float  # max submission - min submission, native units


def load_trace(path) -> tuple:
    """Read a canonical trace; returns (jobs sorted by submission, meta)."""
    jobs = []
    dropped = 0
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TraceFormatError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        try:
            i_sub = header.index("submission")
            i_size = header.index("size")
            i_pred = header.index("prediction")
        except ValueError:
            raise TraceFormatError(
                f"{path}: header must contain submission,size,prediction (got {header})"
            ) from None
        i_status = header.index("status") if "status" in header else None
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < len(header):
                raise TraceFormatError(f"{path}:{lineno}: expected {len(header)} columns")
            if i_status is not None:
                status = row[i_status].strip().lower()
                if status not in ("", "ok"):
                    dropped += 1
                    continue
            try:
                sub = float(row[i_sub])
                size = float(row[i_size])
                pred = float(row[i_pred])
            except ValueError:
                raise TraceFormatError(f"{path}:{lineno}: non-numeric field") from None
            if not (math.isfinite(sub) and math.isfinite(size) and math.isfinite(pred)):
                raise TraceFormatError(f"{path}:{lineno}: non-finite field")
            if size <= 0.0 or pred <= 0.0:
                dropped += 1
                continue
            jobs.append(TraceJob(sub, size, pred))
    if not jobs:
        raise TraceFormatError(f"{path}: no usable jobs after filtering ({dropped} dropped)")
    jobs.sort(key=lambda j: j.submission)
    meta = TraceMeta(
        name=os.path.splitext(os.path.basename(str(path)))[0],
        job_count=len(jobs),
        dropped=dropped,
        mean_size=sum(j.size for j in jobs) / len(jobs),
        span=jobs[-1].submission - jobs[0].submission,
    )
    return jobs, meta


def normalize_sizes(jobs) -> tuple:
    """Divide sizes AND predictions by the mean size; returns (jobs, factor).

    Using one factor for both keeps each job's prediction error ratio y/x
    intact while giving the trace mean size 1.
    """
    if not jobs:
        raise TraceFormatError("no jobs to normalize")
    factor = sum(j.size for j in jobs) / len(jobs)
    if factor <= 0.0:
        raise TraceFormatError("mean size is nonpositive")
    out = [TraceJob(j.submission, j.size / factor, j.prediction / factor) for j in jobs]
    return out, factor


def scale_arrivals(jobs, lam: float, q: int = 100) -> list:
    """Affinely rescale submissions for offered load lam on q queues.

    After scaling the first arrival is at 0 and the mean gap between
    consecutive arrivals is 1/(q*lam): span/(count-1) maps to 1/(q*lam).
    """
    if len(jobs) < 2:
        raise TraceFormatError("need at least two jobs to scale arrivals")
    if not 0.0 < lam < 1.0:
        raise TraceFormatError(f"target load must be in (0, 1), got {lam!r}")
    lo = jobs[0].submission
    span = jobs[-1].submission - lo
    if span <= 0.0:
        raise TraceFormatError("zero submission span; cannot scale")
    target_span = (len(jobs) - 1) / (q * lam)
    s = target_span / span
    return [TraceJob((j.submission - lo) * s, j.size, j.prediction) for j in jobs]


def prepare_trace(path, lam: float, q: int = 100) -> tuple:
    """load + normalize + scale; returns (jobs, meta, factor)."""
    jobs, meta = load_trace(path)
    jobs, factor = normalize_sizes(jobs)
    jobs = scale_arrivals(jobs, lam, q)
    return jobs, meta, factor


def replay(jobs, config: SimConfig, keep_records: bool = True) -> ReplicationSummary:
    """Replay prepared jobs through the simulator, config.replications times.

    Sizes and predictions come from the trace; randomness only enters through
    candidate sampling and tie-breaking. Every completion is measured.
    """
    if not jobs:
        raise TraceFormatError("no jobs to replay")
    times = array("d", (j.submission for j in jobs))
    sizes = array("d", (j.size for j in jobs))
    preds = array("d", (j.prediction for j in jobs))
    trace = (times, sizes, preds)
    rep_means = []
    rep_counts = []
    results = []
    for rep in range(config.replications):
        seed = split_seed(config.seed, rep)
        res: RunResult = run_simulation(config, seed, trace=trace)
        if res.completions != len(jobs) or res.resident != 0:
            raise TraceFormatError(
                f"replay lost jobs: {res.completions} completed of {len(jobs)}"
            )
        rep_means.append(float(np.mean(res.records.response)))
        rep_counts.append(len(res.records))
        if keep_records:
            results.append(res)
    mean = float(np.mean(rep_means))
    std = float(np.std(rep_means, ddof=1)) if len(rep_means) > 1 else 0.0
    return ReplicationSummary(
        config=config,
        rep_means=rep_means,
        rep_counts=rep_counts,
        mean_response=mean,
        std_response=std,
        results=results if keep_records else None,
        tail_fractions=None,
    )


def write_trace(path, jobs) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["submission", "size", "prediction"])
        for j in jobs:
            w.writerow([repr(j.submission), repr(j.size), repr(j.prediction)])


def convert_raw(
    in_path,
    out_path,
    submission_col: str,
    size_col: str,
    prediction_col: str,
    status_col: str | None = None,
    ok_value: str = "ok",
    time_scale: float = 1.0,
) -> dict:
    """Map an arbitrary CSV schema onto the canonical trace format.

    Rows whose status column differs from ok_value become status=failed (so
    load_trace counts them); nonpositive sizes/predictions pass through for
    the loader to drop. Returns counts {written, failed}.
    """
    written = 0
    failed = 0
    with open(in_path, newline="") as fin, open(out_path, "w", newline="") as fout:
        reader = csv.DictReader(fin)
        if reader.fieldnames is None:
            raise TraceFormatError(f"{in_path}: empty file")
        for col in (submission_col, size_col, prediction_col):
            if col not in reader.fieldnames:
                raise TraceFormatError(f"{in_path}: missing column {col!r}")
        if status_col is not None and status_col not in reader.fieldnames:
            raise TraceFormatError(f"{in_path}: missing status column {status_col!r}")
        w = csv.writer(fout)
        w.writerow(["submission", "size", "prediction", "status"])
        for lineno, row in enumerate(reader, start=2):
            try:
                sub = float(row[submission_col]) * time_scale
                size = float(row[size_col])
                pred = float(row[prediction_col])
            except (TypeError, ValueError):
                raise TraceFormatError(f"{in_path}:{lineno}: non-numeric field") from None
            ok = status_col is None or row[status_col].strip() == ok_value
            w.writerow([repr(sub), repr(size), repr(pred), "ok" if ok else "failed"])
            written += 1
            if not ok:
                failed += 1
    return {"written": written, "failed": failed}
