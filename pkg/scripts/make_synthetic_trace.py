#!/usr/bin/env python3
"""Generate the bundled synthetic workload trace.

Real cluster traces are proprietary, so the repository ships a generated
stand-in with the same rough shape: heavy-tailed sizes spanning several
orders of magnitude, bursty submission times, multiplicative prediction
noise, and a few malformed rows so the loader's filtering is exercised.

The output is the canonical trace CSV (submission,size,prediction,status).
Timestamps are in arbitrary units; the replay pipeline rescales them anyway.

Usage:
    python scripts/make_synthetic_trace.py --out data/synthetic_trace.csv
"""

import argparse
import csv
import math
import random


def generate(jobs: int, seed: int):
    rng = random.Random(seed)
    rows = []
    t = 0.0
    for i in range(jobs):
        # diurnal-ish burstiness: arrival rate swings by ~3x over the trace
        phase = 2.0 * math.pi * (i / jobs) * 6.0
        rate = 1.0 + 0.7 * math.sin(phase)
        t += rng.expovariate(rate)
        size = rng.lognormvariate(0.0, 1.8)
        pred = size * rng.lognormvariate(0.0, 0.5)
        status = "ok"
        r = rng.random()
        if r < 0.002:
            status = "failed"
        elif r < 0.003:
            size = 0.0  # killed before running; loader must drop it
        rows.append((t, size, pred, status))
    # a little submission jitter so the loader's sort matters
    for i in range(0, len(rows) - 1, 97):
        rows[i], rows[i + 1] = rows[i + 1], rows[i]
    return rows


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="data/synthetic_trace.csv")
    ap.add_argument("--jobs", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=31337)
    args = ap.parse_args()

    rows = generate(args.jobs, args.seed)
    with open(args.out, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["submission", "size", "prediction", "status"])
        for sub, size, pred, status in rows:
            w.writerow([f"{sub:.6f}", f"{size:.9g}", f"{pred:.9g}", status])
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
