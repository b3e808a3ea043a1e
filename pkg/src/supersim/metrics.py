"""Response-time and fairness metrics over completed-job records.

Functions accept anything exposing the RecordSet column views (response,
size, prediction as numpy arrays). CSV writers pin the column layouts the
figures tooling consumes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


class MetricsError(ValueError):
    pass


def _response_size(records):
    resp = np.asarray(records.response, dtype=np.float64)
    size = np.asarray(records.size, dtype=np.float64)
    if resp.size == 0:
        raise MetricsError("no records to aggregate")
    return resp, size


def mean_response(records) -> float:
    resp = np.asarray(records.response, dtype=np.float64)
    if resp.size == 0:
        raise MetricsError("no records to aggregate")
    return float(resp.mean())


def slowdowns(records) -> np.ndarray:
    """Per-job response/size; >= 1 whenever the server runs at unit rate."""
    resp, size = _response_size(records)
    return resp / size


def slowdown_cdf(records, grid) -> list:
    """Empirical P(slowdown <= g) for each g in grid; returns (g, p) pairs."""
    grid = list(grid)
    if not grid:
        raise MetricsError("empty evaluation grid")
    s = np.sort(slowdowns(records))
    n = s.size
    return [(float(g), float(np.searchsorted(s, g, side="right")) / n) for g in grid]


def default_slowdown_grid(records, points: int = 60) -> list:
    """Log-spaced grid from 1 to the maximum observed slowdown."""
    s = slowdowns(records)
    top = float(s.max())
    if top <= 1.0:
        return [1.0]
    return list(np.geomspace(1.0, top, points))


def mean_conditional_slowdown(records, bins: int = 50) -> list:
    """Mean slowdown within equal-count size bins.

    Records sort by size and split into `bins` groups; when the count does
    not divide evenly the leftover records go one-per-bin to the smallest
    bins. Returns (bin_mean_size, bin_mean_slowdown, count) triples.
    """
    resp, size = _response_size(records)
    n = size.size
    if n < bins:
        raise MetricsError(f"need at least {bins} records for {bins} bins, got {n}")
    order = np.argsort(size, kind="stable")
    size = size[order]
    slow = (resp / np.asarray(records.size, dtype=np.float64))[order]
    base, extra = divmod(n, bins)
    out = []
    start = 0
    for b in range(bins):
        width = base + (1 if b < extra else 0)
        stop = start + width
        out.append(
            (float(size[start:stop].mean()), float(slow[start:stop].mean()), width)
        )
        start = stop
    return out


def per_period_weights(submissions, sizes, periods: int = 100) -> np.ndarray:
    """Total size submitted per equal-duration period, normalized to mean 1.

    Periods split [min submission, max submission]; the endpoint falls in the
    last period. The normalized weights sum to `periods`.
    """
    sub = np.asarray(submissions, dtype=np.float64)
    size = np.asarray(sizes, dtype=np.float64)
    if sub.size == 0:
        raise MetricsError("no jobs")
    lo, hi = float(sub.min()), float(sub.max())
    if hi <= lo:
        raise MetricsError("all submissions identical; period weights undefined")
    idx = ((sub - lo) * (periods / (hi - lo))).astype(np.int64)
    idx[idx >= periods] = periods - 1
    raw = np.bincount(idx, weights=size, minlength=periods)
    total = raw.sum()
    if total <= 0:
        raise MetricsError("total size is zero")
    return raw * (periods / total)


@dataclass
class Heatmap:
    """Log-binned joint histogram of (size, prediction)."""

    size_edges: np.ndarray
    pred_edges: np.ndarray
    counts: np.ndarray  # shape (size_bins, pred_bins)
    underflow: int  # pairs with a nonpositive coordinate


def size_prediction_heatmap(sizes, predictions, bins: int = 50) -> Heatmap:
    size = np.asarray(sizes, dtype=np.float64)
    pred = np.asarray(predictions, dtype=np.float64)
    if size.size == 0:
        raise MetricsError("no jobs")
    ok = (size > 0) & (pred > 0)
    underflow = int((~ok).sum())
    size, pred = size[ok], pred[ok]
    if size.size == 0:
        raise MetricsError("no positive (size, prediction) pairs")

    def edges(v):
        lo, hi = v.min(), v.max()
        if hi <= lo:
            hi = lo * (1 + 1e-9) + 1e-12
        return np.geomspace(lo, hi, bins + 1)

    se, pe = edges(size), edges(pred)
    counts, _, _ = np.histogram2d(size, pred, bins=[se, pe])
    return Heatmap(se, pe, counts.astype(np.int64), underflow)


# ---------------------------------------------------------------------------
# CSV emission (one file per metric; columns are part of the CLI contract)


def write_slowdown_cdf_csv(path, pairs) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["grid_point", "cdf_value"])
        for g, p in pairs:
            w.writerow([repr(g), repr(p)])


def write_conditional_slowdown_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_mean_size", "bin_mean_slowdown", "count"])
        for ms, msl, c in rows:
            w.writerow([repr(ms), repr(msl), c])


def write_period_weights_csv(path, weights) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["period_index", "weight"])
        for i, v in enumerate(weights):
            w.writerow([i, repr(float(v))])


def write_heatmap_csv(path, hm: Heatmap) -> None:
    """One row per nonempty cell; an index of -1 marks the underflow bucket."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["size_bin", "pred_bin", "size_low", "size_high", "pred_low", "pred_high", "count"]
        )
        if hm.underflow:
            w.writerow([-1, -1, "", "", "", "", hm.underflow])
        nb_s, nb_p = hm.counts.shape
        for i in range(nb_s):
            for j in range(nb_p):
                c = int(hm.counts[i, j])
                if c:
                    w.writerow(
                        [
                            i,
                            j,
                            repr(float(hm.size_edges[i])),
                            repr(float(hm.size_edges[i + 1])),
                            repr(float(hm.pred_edges[j])),
                            repr(float(hm.pred_edges[j + 1])),
                            c,
                        ]
                    )


def write_records_csv(path, records) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["arrival", "completion", "size", "prediction", "queue"])
        arr = records.arrival
        comp = records.completion
        size = records.size
        pred = records.prediction
        qid = records.queue
        for i in range(len(arr)):
            w.writerow(
                [
                    repr(float(arr[i])),
                    repr(float(comp[i])),
                    repr(float(size[i])),
                    repr(float(pred[i])),
                    int(qid[i]),
                ]
            )


def read_records_csv(path):
    """Load a records CSV back into a RecordSet."""
    from .engine import RecordSet

    out = RecordSet()
    with open(path, newline="") as fh:
        r = csv.DictReader(fh)
        need = {"arrival", "completion", "size", "prediction", "queue"}
        if r.fieldnames is None or not need.issubset(r.fieldnames):
            raise MetricsError(f"records file {path} missing columns {need}")
        for row in r:
            out.append(
                float(row["arrival"]),
                float(row["completion"]),
                float(row["size"]),
                float(row["prediction"]),
                int(row["queue"]),
            )
    return out
