"""Queue-choice policies: score d candidate queues, join the lowest score.

Scores (lower is better):

  random                0 for every queue
  shortest_queue        resident job count
  least_loaded          sum of true remaining sizes
  least_loaded_updated  sum of predicted remaining (y - attained)+; in-service
                        job optionally counted at full y (llu_full)
  least_loaded_total    scalar that grows by y on arrival, decays at unit rate
                        while the queue is busy, floors at 0, resets when the
                        queue empties; never inspects resident jobs
  selfish               work the arrival would wait behind under the queue's
                        own discipline (jobs that stay ahead of it)
  min_add               selfish plus the waiting the arrival inflicts on jobs
                        it jumps ahead of (arrival size times their count)
  selfish_p, min_add_p  same using predicted remaining and predicted size

Scoring is pure: it never mutates queue state and never draws randomness.
Queues are read lazily, adjusting cached loads by the service time elapsed
since the queue's last advance. Score ties (including every comparison under
`random`) break uniformly via the run's RNG inside choose().
"""

from __future__ import annotations

from .scheduling import KEY_FUNCS, PREEMPTIVE

CHOICE_TAGS = (
    "random",
    "shortest_queue",
    "least_loaded",
    "least_loaded_updated",
    "least_loaded_total",
    "min_add",
    "selfish",
    "min_add_p",
    "selfish_p",
)

# policies that read predictions and therefore need a predictor or trace
NEEDS_PREDICTIONS = frozenset(
    ("least_loaded_updated", "least_loaded_total", "min_add_p", "selfish_p")
)


class ChoiceError(ValueError):
    pass


def _position_score(q, job, sched: str, now: float, predicted: bool):
    """(work ahead of `job`, count of jobs it jumps) under no future arrivals.

    A resident stays ahead when its current key is <= the arrival's key
    (resident wins ties; scoring is pure so it cannot roll the tie RNG), or
    unconditionally for the in-service job under a nonpreemptive discipline.
    """
    serving = q.serving
    elapsed = (now - q.last_advance) if serving is not None else 0.0
    key = KEY_FUNCS[sched]
    karr = key(job)
    serving_ahead = sched not in PREEMPTIVE
    ahead = 0.0
    jumped = 0
    for j in q.jobs:
        adj = elapsed if j is serving else 0.0
        if predicted:
            vj = j.prediction - j.attained - adj
        else:
            vj = j.size - j.attained - adj
        if vj < 0.0:
            vj = 0.0
        if j is serving and serving_ahead:
            ahead += vj
            continue
        kj = key(j)
        if adj and sched == "srpt":
            kj -= adj
        elif adj and sched == "sprpt":
            kj -= adj
            if kj < 0.0:
                kj = 0.0
        if kj <= karr:
            ahead += vj
        else:
            jumped += 1
    return ahead, jumped


def queue_score(
    tag: str,
    q,
    job,
    sched: str,
    now: float,
    llu_full: bool = False,
) -> float:
    """Score one candidate queue for `job` arriving at `now`; pure."""
    if tag == "shortest_queue":
        return float(len(q.jobs))
    if tag == "random":
        return 0.0
    serving = q.serving
    elapsed = (now - q.last_advance) if serving is not None else 0.0
    if tag == "least_loaded":
        return q.true_load - elapsed
    if tag == "least_loaded_updated":
        if llu_full:
            return q.pred_full
        if serving is None:
            return q.pred_load
        left = serving.prediction - serving.attained
        if left < 0.0:
            left = 0.0
        return q.pred_load - (elapsed if elapsed < left else left)
    if tag == "least_loaded_total":
        t = q.total_load - elapsed
        return t if t > 0.0 else 0.0
    if tag == "selfish":
        return _position_score(q, job, sched, now, False)[0]
    if tag == "min_add":
        ahead, jumped = _position_score(q, job, sched, now, False)
        return ahead + job.size * jumped
    if tag == "selfish_p":
        return _position_score(q, job, sched, now, True)[0]
    if tag == "min_add_p":
        ahead, jumped = _position_score(q, job, sched, now, True)
        return ahead + job.prediction * jumped
    raise ChoiceError(f"unknown choice policy {tag!r}")


def choose(
    tag: str,
    queues,
    candidates,
    job,
    sched: str,
    now: float,
    rng,
    llu_full: bool = False,
) -> int:
    """Return the id of the chosen queue among `candidates` (queue indices)."""
    if not candidates:
        raise ChoiceError("empty candidate list")
    best_id = -1
    best_score = None
    tied = None
    for qid in candidates:
        s = queue_score(tag, queues[qid], job, sched, now, llu_full)
        if best_score is None or s < best_score:
            best_score = s
            best_id = qid
            tied = None
        elif s == best_score:
            if tied is None:
                tied = [best_id]
            tied.append(qid)
    if tied is None:
        return best_id
    return tied[int(rng.random() * len(tied))]


def update_total_load_on_arrival(q, prediction: float) -> None:
    q.total_load += prediction


def update_total_load_on_empty(q) -> None:
    q.total_load = 0.0
