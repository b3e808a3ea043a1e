"""Event-driven core: n parallel single-server queues, power-of-d dispatch.

Jobs arrive in one Poisson stream of aggregate rate (arrival_rate * n), or at
trace-given instants. Each arrival samples d distinct candidate queues, joins
the one its choice policy scores lowest, and is served at unit rate under the
queue's scheduling discipline. Service is preempt-resume.

Implementation notes, load-bearing:

* One heap of (time, seq, ...) events; seq makes equal-time ordering
  deterministic. Departure events are invalidated by a per-queue version
  counter instead of heap surgery: any event carrying a stale version is
  dropped when popped.
* Queue load caches advance lazily. advance_service() moves a queue's clock
  by dt; choice scoring reads candidates without mutating them.
* All randomness flows through rng.random() of one per-replication
  random.Random, so a (config, seed) pair fully determines every record.
  Replication seeds come from a splitmix64 counter split of the master seed
  and are independent of execution order.
* true_load and the predicted-load cache are recomputed by summation at each
  completion and zeroed when a queue empties, which flushes float drift and
  keeps exact-predictor runs bit-identical to their true-information twins.
"""

from __future__ import annotations

import math
import random
from array import array
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from heapq import heappop, heappush

import numpy as np

from .choice import choose, update_total_load_on_arrival, update_total_load_on_empty
from .config import SimConfig
from .distributions import make_dist
from .predictors import make_predictor, predict, reversal
from .scheduling import KEY_FUNCS, PREEMPTIVE, on_arrival, select_next

ARRIVAL = 0
DEPARTURE = 1

_M64 = (1 << 64) - 1


class SimulationError(RuntimeError):
    pass


def split_seed(master: int, index: int) -> int:
    """Counter-based seed split (splitmix64): independent of execution order."""
    z = (master + (index + 1) * 0x9E3779B97F4A7C15) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


@dataclass(slots=True, eq=False)
class Job:
    jid: int
    arrival: float
    size: float
    prediction: float
    attained: float = 0.0


@dataclass(slots=True)
class JobRecord:
    arrival: float
    completion: float
    size: float
    prediction: float
    queue: int

    @property
    def response(self) -> float:
        # floored at size: unit-rate service admits nothing faster, and the
        # subtraction alone can undershoot by an ulp of the absolute time
        r = self.completion - self.arrival
        return r if r > self.size else self.size

    @property
    def slowdown(self) -> float:
        return self.response / self.size


class RecordSet:
    """Columnar store of completed-job records.

    Acts as a sequence of JobRecord for inspection while keeping columns in
    flat arrays; metrics read the numpy views. Do not append after taking a
    view (the buffer may reallocate).
    """

    __slots__ = ("_arrival", "_completion", "_size", "_prediction", "_queue")

    def __init__(self):
        self._arrival = array("d")
        self._completion = array("d")
        self._size = array("d")
        self._prediction = array("d")
        self._queue = array("i")

    def append(self, arrival, completion, size, prediction, queue):
        self._arrival.append(arrival)
        self._completion.append(completion)
        self._size.append(size)
        self._prediction.append(prediction)
        self._queue.append(queue)

    def __len__(self):
        return len(self._arrival)

    def __getitem__(self, i) -> JobRecord:
        return JobRecord(
            self._arrival[i],
            self._completion[i],
            self._size[i],
            self._prediction[i],
            self._queue[i],
        )

    def __iter__(self):
        for i in range(len(self._arrival)):
            yield self[i]

    @property
    def arrival(self) -> np.ndarray:
        return np.frombuffer(self._arrival, dtype=np.float64)

    @property
    def completion(self) -> np.ndarray:
        return np.frombuffer(self._completion, dtype=np.float64)

    @property
    def size(self) -> np.ndarray:
        return np.frombuffer(self._size, dtype=np.float64)

    @property
    def prediction(self) -> np.ndarray:
        return np.frombuffer(self._prediction, dtype=np.float64)

    @property
    def queue(self) -> np.ndarray:
        return np.frombuffer(self._queue, dtype=np.int32)

    @property
    def response(self) -> np.ndarray:
        # same floor as JobRecord.response
        return np.maximum(self.completion - self.arrival, self.size)

    @property
    def slowdown(self) -> np.ndarray:
        return self.response / self.size

    @classmethod
    def concat(cls, parts) -> "RecordSet":
        out = cls()
        for p in parts:
            out._arrival.extend(p._arrival)
            out._completion.extend(p._completion)
            out._size.extend(p._size)
            out._prediction.extend(p._prediction)
            out._queue.extend(p._queue)
        return out


@dataclass(slots=True)
class QueueState:
    """One server: resident jobs plus lazily-advanced load caches.

    pred_load holds sum of (y - attained)+ over residents, pred_full the sum
    of raw y, total_load the arrival-incremented unit-decay scalar used by
    least_loaded_total. last_advance is the sim time the caches refer to;
    version stamps departure events so stale ones can be dropped.
    """

    qid: int
    jobs: list = field(default_factory=list)
    serving: Job | None = None
    true_load: float = 0.0
    pred_load: float = 0.0
    pred_full: float = 0.0
    total_load: float = 0.0
    last_advance: float = 0.0
    version: int = 0


class EventQueue:
    """Min-heap of (time, seq, kind, tag, version); seq keeps ties FIFO."""

    __slots__ = ("_heap", "_seq")

    def __init__(self):
        self._heap = []
        self._seq = 0

    def push(self, time, kind, tag, version):
        self._seq += 1
        heappush(self._heap, (time, self._seq, kind, tag, version))

    def pop(self):
        return heappop(self._heap)

    def __len__(self):
        return len(self._heap)


def advance_service(q: QueueState, dt: float) -> None:
    """Run q's server for dt time units; callers update q.last_advance.

    dt must be nonnegative and must not overshoot the in-service job's
    remaining size (a 1e-6 allowance absorbs event-time rounding). Idle
    queues only age; nothing decays because every cache is already 0.
    """
    if dt < 0.0:
        raise SimulationError(f"advance_service got negative dt {dt!r}")
    job = q.serving
    if job is None or dt == 0.0:
        return
    remaining = job.size - job.attained
    if dt > remaining + 1e-6:
        raise SimulationError(
            f"advance_service overshoot: dt={dt!r} > remaining {remaining!r} on queue {q.qid}"
        )
    pred_left = job.prediction - job.attained
    job.attained += dt
    q.true_load -= dt
    if pred_left > 0.0:
        q.pred_load -= dt if dt < pred_left else pred_left
    t = q.total_load - dt
    q.total_load = t if t > 0.0 else 0.0


@dataclass
class RunResult:
    """Output of one replication; behaves as a sequence of JobRecord."""

    records: RecordSet
    arrivals: int
    completions: int
    resident: int
    end_time: float
    window_span: float
    n_queues: int
    completed_work: float
    residual_attained: float
    tail_time: list | None = None

    def __len__(self):
        return len(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def __iter__(self):
        return iter(self.records)

    def tail_fractions(self) -> list:
        """Time-averaged fraction of queues holding >= i jobs, i = 1, 2, ..."""
        if self.tail_time is None:
            raise SimulationError("run was not configured with measure_tails")
        denom = self.window_span * self.n_queues
        return [t / denom for t in self.tail_time]

    def mean_jobs(self) -> float:
        """Time-averaged number of jobs in the whole system."""
        if self.tail_time is None:
            raise SimulationError("run was not configured with measure_tails")
        return sum(self.tail_time) / self.window_span


def run_simulation(config: SimConfig, seed: int, trace=None, generic: bool = False) -> RunResult:
    """Simulate one replication; returns every job completing in the window.

    `trace`, when given, is a (times, sizes, predictions) triple of equal
    length; arrivals then follow the trace, the horizon/warmup window is
    ignored, and every completion is recorded.

    The loop inlines the common-policy paths (exponential sampling,
    shortest-queue / least-loaded scoring, FIFO / remaining-size selection)
    draw-for-draw and float-for-float identically to the library ops it
    shadows; `generic=True` forces the library ops so tests can assert the
    two modes agree record-for-record. Load caches are only maintained when
    the active choice policy reads them.
    """
    config.validate()
    if config.predictor == "trace" and trace is None:
        raise SimulationError("predictor 'trace' requires trace arrivals")

    rng = random.Random(seed)
    ru = rng.random
    n = config.n_queues
    d = config.d_choices
    sched = config.sched_policy
    choice_tag = config.choice_policy
    llu_full = config.llu_in_service == "full"
    dist = make_dist(config.service_dist)
    predictor = make_predictor(
        config.predictor if config.predictor != "trace" else "exact",
        config.alpha,
        config.beta,
        dist,
    )
    sample = dist.sample
    isfinite = math.isfinite
    alpha = config.alpha
    beta = config.beta

    # specialization flags; every fast path must mirror its library op exactly
    fast = not generic
    exp_service = fast and config.service_dist == "exponential"
    pred_exact = config.predictor == "exact"
    pred_alpha = fast and config.predictor == "alpha"
    pred_alpha_beta = fast and config.predictor == "alpha_beta"
    ch_sq = fast and choice_tag == "shortest_queue" and d == 2
    ch_ll = fast and choice_tag == "least_loaded" and d == 2
    sched_fifo = fast and sched == "fifo"
    sched_srpt = fast and sched == "srpt"
    preemptive = sched in PREEMPTIVE
    keyf = KEY_FUNCS[sched]
    # preempt test inlined per discipline; 0 falls back to the key functions
    pk = {"srpt": 1, "psjf": 2, "sprpt": 3, "pspjf": 4}.get(sched, 0) if fast else 0
    if generic:
        track_true = track_pred = track_total = True
    else:
        track_true = choice_tag == "least_loaded"
        track_pred = choice_tag == "least_loaded_updated"
        track_total = choice_tag == "least_loaded_total"

    queues = [QueueState(i) for i in range(n)]
    heap: list = []
    seq = 0
    records = RecordSet()
    r_arr = records._arrival.append
    r_comp = records._completion.append
    r_size = records._size.append
    r_pred = records._prediction.append
    r_q = records._queue.append

    if trace is None:
        horizon = config.horizon
        warmup = config.warmup
        agg_rate = config.arrival_rate * n
        trace_times = trace_sizes = trace_preds = None
        n_trace = 0
        heap.append((-math.log1p(-ru()) / agg_rate, 0, ARRIVAL, 0, 0))
    else:
        horizon = math.inf
        warmup = 0.0
        agg_rate = 0.0
        trace_times, trace_sizes, trace_preds = trace
        n_trace = len(trace_times)
        if n_trace:
            heap.append((trace_times[0], 0, ARRIVAL, 0, 0))

    measure = config.measure_tails
    cnt_ge: list = []  # cnt_ge[i] = number of queues with >= i+1 jobs
    t_ge: list = []
    last_tally = 0.0

    def fold(t):
        nonlocal last_tally
        lo = last_tally if last_tally > warmup else warmup
        hi = t if t < horizon else horizon
        if hi > lo:
            span = hi - lo
            for i, c in enumerate(cnt_ge):
                if c:
                    t_ge[i] += c * span
        last_tally = t

    arrivals = 0
    completions = 0
    completed_work = 0.0
    now = 0.0

    while heap:
        time, _seq, kind, tag, ver = heappop(heap)
        if time >= horizon:
            now = horizon
            break
        now = time
        if kind == DEPARTURE:
            q = queues[tag]
            if ver != q.version:
                continue
            if measure:
                fold(now)
            dt = now - q.last_advance
            if dt:
                if generic:
                    advance_service(q, dt)
                else:
                    job = q.serving
                    if job is not None:
                        pred_left = job.prediction - job.attained
                        job.attained += dt
                        if track_true:
                            q.true_load -= dt
                        if track_pred and pred_left > 0.0:
                            q.pred_load -= dt if dt < pred_left else pred_left
                        if track_total:
                            t = q.total_load - dt
                            q.total_load = t if t > 0.0 else 0.0
            q.last_advance = now
            job = q.serving
            job.attained = job.size  # pin down event-time rounding
            jobs = q.jobs
            jobs.remove(job)
            completions += 1
            completed_work += job.size
            if now >= warmup:
                # unit-rate service cannot finish before arrival + size; pin
                # the record to that floor so slowdowns never dip below 1 on
                # event-time rounding (preempt-resume drift is ~1e-12 relative)
                comp = now
                floor = job.arrival + job.size
                if comp < floor:
                    if comp < floor - 1e-6:
                        raise SimulationError(
                            f"completion {comp!r} undershoots arrival+size {floor!r}"
                        )
                    comp = floor
                r_arr(job.arrival)
                r_comp(comp)
                r_size(job.size)
                r_pred(job.prediction)
                r_q(tag)
            if measure:
                cnt_ge[len(jobs)] -= 1
            if jobs:
                if track_pred:
                    tl = 0.0
                    pl = 0.0
                    pf = 0.0
                    for j in jobs:
                        tl += j.size - j.attained
                        pr = j.prediction - j.attained
                        if pr > 0.0:
                            pl += pr
                        pf += j.prediction
                    q.true_load = tl
                    q.pred_load = pl
                    q.pred_full = pf
                elif track_true:
                    tl = 0.0
                    for j in jobs:
                        tl += j.size - j.attained
                    q.true_load = tl
                q.serving = None
                # pick the next job; fast scans fall back to select_next on ties
                nxt = None
                if sched_fifo:
                    nxt = jobs[0]
                    if len(jobs) > 1 and jobs[1].arrival == nxt.arrival:
                        nxt = None
                elif sched_srpt:
                    best_k = math.inf
                    tie = False
                    for j in jobs:
                        k = j.size - j.attained
                        if k < best_k:
                            best_k = k
                            nxt = j
                            tie = False
                        elif k == best_k:
                            tie = True
                    if tie:
                        nxt = None
                if nxt is None:
                    nxt = select_next(sched, q, now, rng)
                q.serving = nxt
                q.version += 1
                seq += 1
                heappush(
                    heap, (now + (nxt.size - nxt.attained), seq, DEPARTURE, tag, q.version)
                )
            else:
                q.serving = None
                q.true_load = 0.0
                q.pred_load = 0.0
                q.pred_full = 0.0
                update_total_load_on_empty(q)
        else:
            if trace_times is None:
                if exp_service:
                    u = ru()
                    if u < 1e-16:
                        u = 1e-16
                    x = -math.log1p(-u)
                else:
                    x = sample(rng)
                    if not isfinite(x):
                        raise SimulationError(
                            f"service sampler '{config.service_dist}'"
                            f" produced non-finite value {x!r}"
                        )
                if pred_exact:
                    y = x
                elif pred_alpha:
                    y = x * (1.0 - alpha + 2.0 * alpha * ru())
                elif pred_alpha_beta:
                    if ru() < beta:
                        y = reversal(dist, x)
                    else:
                        y = x * (1.0 - alpha + 2.0 * alpha * ru())
                else:
                    y = predict(predictor, x, rng)
                    if not isfinite(y):
                        raise SimulationError(
                            f"predictor '{config.predictor}' produced non-finite value {y!r}"
                        )
                seq += 1
                heappush(heap, (now - math.log1p(-ru()) / agg_rate, seq, ARRIVAL, 0, 0))
            else:
                x = trace_sizes[tag]
                y = trace_preds[tag]
                nxt_idx = tag + 1
                if nxt_idx < n_trace:
                    seq += 1
                    heappush(heap, (trace_times[nxt_idx], seq, ARRIVAL, nxt_idx, 0))
            job = Job(arrivals, now, x, y)
            arrivals += 1
            if d == 2:
                i = int(ru() * n)
                if i >= n:
                    i = n - 1
                j = int(ru() * (n - 1))
                if j >= n - 1:
                    j = n - 2
                if j >= i:
                    j += 1
                if ch_sq:
                    si = len(queues[i].jobs)
                    sj = len(queues[j].jobs)
                    if si < sj:
                        qi = i
                    elif sj < si:
                        qi = j
                    else:
                        qi = i if int(ru() * 2) == 0 else j
                elif ch_ll:
                    qa = queues[i]
                    qb = queues[j]
                    sa = qa.true_load - (
                        (now - qa.last_advance) if qa.serving is not None else 0.0
                    )
                    sb = qb.true_load - (
                        (now - qb.last_advance) if qb.serving is not None else 0.0
                    )
                    if sa < sb:
                        qi = i
                    elif sb < sa:
                        qi = j
                    else:
                        qi = i if int(ru() * 2) == 0 else j
                else:
                    qi = choose(choice_tag, queues, (i, j), job, sched, now, rng, llu_full)
            elif d == 1:
                i = int(ru() * n)
                qi = i if i < n else n - 1
            else:
                cands = []
                while len(cands) < d:
                    c = int(ru() * n)
                    if c < n and c not in cands:
                        cands.append(c)
                qi = choose(choice_tag, queues, cands, job, sched, now, rng, llu_full)
            q = queues[qi]
            if measure:
                fold(now)
            dt = now - q.last_advance
            if dt:
                if generic:
                    advance_service(q, dt)
                else:
                    sj = q.serving
                    if sj is not None:
                        pred_left = sj.prediction - sj.attained
                        sj.attained += dt
                        if track_true:
                            q.true_load -= dt
                        if track_pred and pred_left > 0.0:
                            q.pred_load -= dt if dt < pred_left else pred_left
                        if track_total:
                            t = q.total_load - dt
                            q.total_load = t if t > 0.0 else 0.0
            q.last_advance = now
            q.jobs.append(job)
            if track_true or track_pred:
                q.true_load += x
                q.pred_load += y
                q.pred_full += y
            if track_total:
                update_total_load_on_arrival(q, y)
            serving = q.serving
            if generic:
                _act, serve = on_arrival(sched, q, job)
            elif serving is None:
                serve = job
            elif not preemptive:
                serve = None
            elif pk == 1:
                serve = job if x < serving.size - serving.attained else None
            elif pk == 2:
                serve = job if x < serving.size else None
            elif pk == 3:
                sv = serving.prediction - serving.attained
                ka = y if y > 0.0 else 0.0
                serve = job if ka < (sv if sv > 0.0 else 0.0) else None
            elif pk == 4:
                serve = job if y < serving.prediction else None
            else:
                serve = job if keyf(job) < keyf(serving) else None
            if serve is not None:
                q.serving = serve
                q.version += 1
                seq += 1
                heappush(heap, (now + serve.size, seq, DEPARTURE, qi, q.version))
            if measure:
                length = len(q.jobs)
                if length > len(cnt_ge):
                    cnt_ge.append(0)
                    t_ge.append(0.0)
                cnt_ge[length - 1] += 1

    if trace is None:
        end = horizon
        for q in queues:
            dt = end - q.last_advance
            if dt > 0.0:
                advance_service(q, dt)
            q.last_advance = end
        if measure:
            fold(end)
        window_span = horizon - warmup
    else:
        end = now
        if measure:
            fold(end)
        window_span = end if end > 0.0 else 1.0

    residual = 0.0
    for q in queues:
        for j in q.jobs:
            residual += j.attained

    return RunResult(
        records=records,
        arrivals=arrivals,
        completions=completions,
        resident=arrivals - completions,
        end_time=end,
        window_span=window_span,
        n_queues=n,
        completed_work=completed_work,
        residual_attained=residual,
        tail_time=t_ge if measure else None,
    )


@dataclass
class ReplicationSummary:
    config: SimConfig
    rep_means: list
    rep_counts: list
    mean_response: float
    std_response: float
    results: list | None = None
    tail_fractions: list | None = None


def _replicate(args):
    config, rep, keep = args
    seed = split_seed(config.seed, rep)
    try:
        res = run_simulation(config, seed)
    except SimulationError:
        raise
    except Exception as exc:  # attach the replication index for diagnosis
        raise SimulationError(f"replication {rep} (seed {seed}) failed: {exc}") from exc
    if len(res.records) == 0:
        raise SimulationError(
            f"replication {rep} (seed {seed}) produced no completions in the window"
        )
    mean = float(np.mean(res.records.response))
    tails = res.tail_fractions() if res.tail_time is not None else None
    return rep, mean, len(res.records), tails, (res if keep else None)


def run_replications(
    config: SimConfig,
    keep_records: bool = False,
    workers: int = 1,
) -> ReplicationSummary:
    """Run config.replications independent replications and pool their stats.

    Seeds come from split_seed(config.seed, rep), so results are identical
    whatever the worker count or completion order.
    """
    config.validate()
    reps = config.replications
    tasks = [(config, r, keep_records) for r in range(reps)]
    if workers > 1 and reps > 1:
        with ProcessPoolExecutor(max_workers=min(workers, reps)) as pool:
            raw = list(pool.map(_replicate, tasks))
    else:
        raw = [_replicate(t) for t in tasks]
    raw.sort(key=lambda r: r[0])
    rep_means = [r[1] for r in raw]
    rep_counts = [r[2] for r in raw]
    mean = float(np.mean(rep_means))
    std = float(np.std(rep_means, ddof=1)) if reps > 1 else 0.0
    tails = None
    if raw[0][3] is not None:
        width = max(len(r[3]) for r in raw)
        acc = [0.0] * width
        for r in raw:
            for i, v in enumerate(r[3]):
                acc[i] += v
        tails = [v / reps for v in acc]
    results = [r[4] for r in raw] if keep_records else None
    return ReplicationSummary(
        config=config,
        rep_means=rep_means,
        rep_counts=rep_counts,
        mean_response=mean,
        std_response=std,
        results=results,
        tail_fractions=tails,
    )
