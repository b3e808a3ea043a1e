"""Command line interface.

Subcommands:
  run       sweep synthetic configs, write results.csv + manifest.json
  trace     replay a trace across target loads, optionally emit metric CSVs
  oracle    print analytic tail fractions or mean response times
  convert   map a foreign CSV schema onto the canonical trace format
  fairness  compute fairness metric CSVs from a records dump

Result CSVs are deterministic for a fixed seed; wall-clock timings live in
the manifest sidecar so reruns stay byte-identical. SUPERSIM_OUTDIR sets the
default output directory.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

from . import __version__
from .analytics import mean_response_analytic, queue_tail_fraction
from .choice import CHOICE_TAGS
from .config import CONFIG_FIELDS, ConfigError, SimConfig, config_to_row
from .distributions import DIST_TAGS
from .engine import RecordSet, run_replications
from .metrics import (
    default_slowdown_grid,
    mean_conditional_slowdown,
    size_prediction_heatmap,
    slowdown_cdf,
    per_period_weights,
    write_conditional_slowdown_csv,
    write_heatmap_csv,
    write_period_weights_csv,
    write_records_csv,
    write_slowdown_cdf_csv,
    read_records_csv,
)
from .scheduling import SCHED_TAGS
from .trace import convert_raw, load_trace, prepare_trace, replay

DEFAULT_LAMS = (0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.98, 0.99)

RESULT_COLUMNS = CONFIG_FIELDS + ("mean_response", "std_response")


def _out_dir(value) -> str:
    out = value or os.environ.get("SUPERSIM_OUTDIR") or "results"
    os.makedirs(out, exist_ok=True)
    return out


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_results_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RESULT_COLUMNS)
        for row in rows:
            w.writerow([_csv_cell(row[c]) for c in RESULT_COLUMNS])


def read_results_csv(path) -> list:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def parse_predictor_spec(spec: str):
    """'exact' | 'exponential' | 'alpha:A' | 'alpha_beta:A:B' -> (tag, a, b)."""
    parts = spec.split(":")
    tag = parts[0]
    try:
        if tag in ("exact", "exponential", "trace"):
            if len(parts) != 1:
                raise ValueError
            return tag, 0.0, 0.0
        if tag == "alpha":
            if len(parts) != 2:
                raise ValueError
            return tag, float(parts[1]), 0.0
        if tag == "alpha_beta":
            if len(parts) != 3:
                raise ValueError
            return tag, float(parts[1]), float(parts[2])
    except ValueError:
        pass
    raise ConfigError(
        f"bad predictor spec {spec!r}; want exact, exponential, alpha:A or alpha_beta:A:B"
    )


def _split_list(values, cast):
    """Flatten repeated/comma-separated flag values."""
    out = []
    for v in values:
        for part in str(v).split(","):
            part = part.strip()
            if part:
                out.append(cast(part))
    return out


def _config_slug(idx: int, cfg: SimConfig) -> str:
    return f"{idx:03d}_{cfg.choice_policy}_{cfg.sched_policy}_lam{cfg.arrival_rate:g}"


def build_sweep(args, file_cfg) -> list:
    """Cross product of lambda values, policies, and predictor specs."""

    def pick(name, default):
        v = getattr(args, name, None)
        if v is not None:
            return v
        if file_cfg and name in file_cfg:
            return file_cfg[name]
        return default

    lams = _split_list(pick("lam", None) or list(DEFAULT_LAMS), float)
    choices = _split_list(pick("choice", None) or ["shortest_queue"], str)
    scheds = _split_list(pick("sched", None) or ["fifo"], str)
    predictors = _split_list(pick("predictor", None) or ["exact"], str)
    base = dict(
        n_queues=int(pick("n", 1000)),
        d_choices=int(pick("d", 2)),
        service_dist=str(pick("dist", "exponential")),
        horizon=float(pick("horizon", 10000.0)),
        warmup=float(pick("warmup", 1000.0)),
        replications=int(pick("reps", 100)),
        seed=int(pick("seed", 12345)),
        llu_in_service=str(pick("llu_in_service", "remaining")),
    )
    configs = []
    for lam in lams:
        for ch in choices:
            for sc in scheds:
                for pspec in predictors:
                    tag, a, b = parse_predictor_spec(pspec)
                    cfg = SimConfig(
                        arrival_rate=lam,
                        choice_policy=ch,
                        sched_policy=sc,
                        predictor=tag,
                        alpha=a,
                        beta=b,
                        **base,
                    )
                    cfg.validate()
                    configs.append(cfg)
    if not configs:
        raise ConfigError("empty sweep: no configurations to run")
    return configs


def _write_manifest(outdir, payload) -> None:
    payload = dict(payload)
    payload["version"] = __version__
    with open(os.path.join(outdir, "manifest.json"), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def cmd_run(args) -> int:
    file_cfg = None
    if args.config:
        with open(args.config) as fh:
            file_cfg = json.load(fh)
    configs = build_sweep(args, file_cfg)
    print(f"sweep: {len(configs)} configuration(s)")
    if args.dry_run:
        for i, cfg in enumerate(configs):
            print(f"  [{i:03d}] {_config_slug(i, cfg)} predictor={cfg.predictor}"
                  f" alpha={cfg.alpha:g} beta={cfg.beta:g} n={cfg.n_queues} reps={cfg.replications}")
        return 0
    outdir = _out_dir(args.out)
    rows = []
    walls = {}
    failures = {}
    for i, cfg in enumerate(configs):
        slug = _config_slug(i, cfg)
        t0 = time.perf_counter()
        try:
            summary = run_replications(cfg, keep_records=args.dump_records, workers=args.jobs)
        except Exception as exc:
            failures[slug] = str(exc)
            print(f"[{i + 1}/{len(configs)}] {slug} FAILED: {exc}", file=sys.stderr)
            continue
        walls[slug] = time.perf_counter() - t0
        row = config_to_row(cfg)
        row["mean_response"] = summary.mean_response
        row["std_response"] = summary.std_response
        rows.append(row)
        if args.dump_records and summary.results:
            recs = RecordSet.concat([r.records for r in summary.results])
            write_records_csv(os.path.join(outdir, f"records_{slug}.csv"), recs)
        print(f"[{i + 1}/{len(configs)}] {slug} mean={summary.mean_response:.4f}"
              f" std={summary.std_response:.4f} ({walls[slug]:.1f}s)")
    write_results_csv(os.path.join(outdir, "results.csv"), rows)
    _write_manifest(
        outdir,
        {
            "command": "run",
            "seed": configs[0].seed,
            "configs": [config_to_row(c) for c in configs],
            "wall_seconds": walls,
            "failures": failures,
        },
    )
    if failures:
        print(f"{len(failures)} configuration(s) failed", file=sys.stderr)
        return 1
    return 0


def cmd_trace(args) -> int:
    lams = _split_list(args.lam or ["0.9"], float)
    outdir = _out_dir(args.out)
    rows = []
    walls = {}
    failures = {}
    jobs0 = None
    for i, lam in enumerate(lams):
        t0 = time.perf_counter()
        jobs, meta, factor = prepare_trace(args.trace, lam, q=args.q)
        if jobs0 is None:
            jobs0 = jobs
        cfg = SimConfig(
            n_queues=args.q,
            d_choices=args.d,
            arrival_rate=lam,
            service_dist="exponential",  # unused by replay; kept for the row schema
            predictor="trace",
            choice_policy=args.choice,
            sched_policy=args.sched,
            horizon=0.0,
            warmup=0.0,
            replications=args.reps,
            seed=args.seed,
            llu_in_service=args.llu_in_service or "remaining",
            arrival_source=f"trace:{meta.name}",
        )
        slug = _config_slug(i, cfg)
        try:
            summary = replay(jobs, cfg, keep_records=args.emit_metrics or args.dump_records)
        except Exception as exc:
            failures[slug] = str(exc)
            print(f"{slug} FAILED: {exc}", file=sys.stderr)
            continue
        walls[slug] = time.perf_counter() - t0
        row = config_to_row(cfg)
        row["mean_response"] = summary.mean_response
        row["std_response"] = summary.std_response
        rows.append(row)
        print(f"{slug} jobs={meta.job_count} dropped={meta.dropped}"
              f" mean={summary.mean_response:.4f} std={summary.std_response:.4f}")
        if summary.results and args.dump_records:
            recs = RecordSet.concat([r.records for r in summary.results])
            write_records_csv(os.path.join(outdir, f"records_{slug}.csv"), recs)
        if summary.results and args.emit_metrics:
            recs = RecordSet.concat([r.records for r in summary.results])
            grid = default_slowdown_grid(recs)
            write_slowdown_cdf_csv(
                os.path.join(outdir, f"slowdown_cdf_{slug}.csv"), slowdown_cdf(recs, grid)
            )
            write_conditional_slowdown_csv(
                os.path.join(outdir, f"conditional_slowdown_{slug}.csv"),
                mean_conditional_slowdown(recs, bins=args.bins),
            )
    if jobs0 is not None and args.emit_metrics:
        subs = [j.submission for j in jobs0]
        sizes = [j.size for j in jobs0]
        preds = [j.prediction for j in jobs0]
        write_period_weights_csv(
            os.path.join(outdir, "period_weights.csv"), per_period_weights(subs, sizes)
        )
        write_heatmap_csv(
            os.path.join(outdir, "heatmap.csv"), size_prediction_heatmap(sizes, preds)
        )
    write_results_csv(os.path.join(outdir, "results.csv"), rows)
    _write_manifest(
        outdir,
        {
            "command": "trace",
            "trace": str(args.trace),
            "seed": args.seed,
            "wall_seconds": walls,
            "failures": failures,
        },
    )
    return 1 if failures else 0


def cmd_oracle(args) -> int:
    lams = _split_list(args.lam or list(DEFAULT_LAMS), float)
    out = sys.stdout
    close = False
    if args.out:
        out = open(args.out, "w", newline="")
        close = True
    try:
        w = csv.writer(out)
        if args.mean:
            w.writerow(["lambda", "d", "mean_response"])
            for lam in lams:
                w.writerow([repr(lam), args.d, repr(mean_response_analytic(lam, args.d))])
        else:
            w.writerow(["lambda", "d", "i", "tail_fraction"])
            for lam in lams:
                for i in range(args.imax + 1):
                    w.writerow([repr(lam), args.d, i, repr(queue_tail_fraction(lam, args.d, i))])
    finally:
        if close:
            out.close()
    return 0


def cmd_convert(args) -> int:
    counts = convert_raw(
        args.input,
        args.output,
        submission_col=args.submission_col,
        size_col=args.size_col,
        prediction_col=args.prediction_col,
        status_col=args.status_col,
        ok_value=args.ok_value,
        time_scale=args.time_scale,
    )
    print(f"wrote {counts['written']} rows ({counts['failed']} marked failed)")
    return 0


def cmd_fairness(args) -> int:
    outdir = _out_dir(args.out)
    recs = read_records_csv(args.records)
    grid = default_slowdown_grid(recs, points=args.grid_points)
    write_slowdown_cdf_csv(os.path.join(outdir, "slowdown_cdf.csv"), slowdown_cdf(recs, grid))
    write_conditional_slowdown_csv(
        os.path.join(outdir, "conditional_slowdown.csv"),
        mean_conditional_slowdown(recs, bins=args.bins),
    )
    if args.trace:
        jobs, _meta = load_trace(args.trace)
        subs = [j.submission for j in jobs]
        sizes = [j.size for j in jobs]
        preds = [j.prediction for j in jobs]
        write_period_weights_csv(
            os.path.join(outdir, "period_weights.csv"),
            per_period_weights(subs, sizes, periods=args.periods),
        )
        write_heatmap_csv(
            os.path.join(outdir, "heatmap.csv"), size_prediction_heatmap(sizes, preds)
        )
    print(f"fairness metrics written to {outdir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="supersim", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="cmd", required=True)

    run = sub.add_parser("run", help="synthetic sweep")
    run.add_argument("--config", help="JSON file with sweep settings (flags override)")
    run.add_argument("--lam", action="append", help="offered load(s), comma-separated or repeated")
    run.add_argument("--n", type=int, help="number of queues (default 1000)")
    run.add_argument("--d", type=int, help="choices per arrival (default 2)")
    run.add_argument("--dist", choices=DIST_TAGS, help="service distribution")
    run.add_argument("--choice", action="append",
                     help=f"choice policy list, from {', '.join(CHOICE_TAGS)}")
    run.add_argument("--sched", action="append",
                     help=f"scheduling policy list, from {', '.join(SCHED_TAGS)}")
    run.add_argument("--predictor", action="append",
                     help="predictor spec(s): exact, exponential, alpha:A, alpha_beta:A:B")
    run.add_argument("--horizon", type=float)
    run.add_argument("--warmup", type=float)
    run.add_argument("--reps", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--llu-in-service", dest="llu_in_service", choices=["remaining", "full"])
    run.add_argument("--out", help="output directory (default $SUPERSIM_OUTDIR or ./results)")
    run.add_argument("--jobs", type=int, default=1, help="parallel replication workers")
    run.add_argument("--dump-records", action="store_true")
    run.add_argument("--dry-run", action="store_true", help="print the sweep and exit")
    run.set_defaults(func=cmd_run)

    tr = sub.add_parser("trace", help="trace replay")
    tr.add_argument("--trace", required=True, help="canonical trace CSV")
    tr.add_argument("--lam", action="append", help="target load(s), default 0.9")
    tr.add_argument("--q", type=int, default=100, help="number of queues (default 100)")
    tr.add_argument("--d", type=int, default=2)
    tr.add_argument("--choice", default="shortest_queue", choices=CHOICE_TAGS)
    tr.add_argument("--sched", default="fifo", choices=SCHED_TAGS)
    tr.add_argument("--reps", type=int, default=5)
    tr.add_argument("--seed", type=int, default=12345)
    tr.add_argument("--llu-in-service", dest="llu_in_service", choices=["remaining", "full"])
    tr.add_argument("--bins", type=int, default=50)
    tr.add_argument("--out")
    tr.add_argument("--emit-metrics", action="store_true",
                    help="write slowdown/conditional-slowdown/weights/heatmap CSVs")
    tr.add_argument("--dump-records", action="store_true")
    tr.set_defaults(func=cmd_trace)

    orc = sub.add_parser("oracle", help="analytic values")
    orc.add_argument("--lam", action="append")
    orc.add_argument("--d", type=int, default=2)
    orc.add_argument("--imax", type=int, default=8)
    orc.add_argument("--mean", action="store_true", help="mean response instead of tails")
    orc.add_argument("--out")
    orc.set_defaults(func=cmd_oracle)

    cv = sub.add_parser("convert", help="schema conversion")
    cv.add_argument("--in", dest="input", required=True)
    cv.add_argument("--out", dest="output", required=True)
    cv.add_argument("--submission-col", required=True)
    cv.add_argument("--size-col", required=True)
    cv.add_argument("--prediction-col", required=True)
    cv.add_argument("--status-col")
    cv.add_argument("--ok-value", default="ok")
    cv.add_argument("--time-scale", type=float, default=1.0)
    cv.set_defaults(func=cmd_convert)

    fr = sub.add_parser("fairness", help="fairness metrics from a records dump")
    fr.add_argument("--records", required=True)
    fr.add_argument("--out")
    fr.add_argument("--bins", type=int, default=50)
    fr.add_argument("--grid-points", type=int, default=60)
    fr.add_argument("--periods", type=int, default=100)
    fr.add_argument("--trace", help="also emit period weights and heatmap from this trace")
    fr.set_defaults(func=cmd_fairness)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
