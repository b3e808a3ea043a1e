"""Within-queue scheduling disciplines.

Every discipline reduces to a priority key (smaller serves first):

  fifo   arrival time
  sjf    total size, nonpreemptive
  psjf   total size, preemptive
  srpt   remaining size, preemptive
  spjf   predicted size, nonpreemptive
  pspjf  predicted size, preemptive
  sprpt  predicted remaining (y - attained, floored at 0), preemptive

Preemption is preempt-resume: attained service is kept. Key ties favor the
currently serving job (a zero-length preemption would change nothing), then
fall to a uniform random pick from the run's RNG.

Callers must advance the queue to the current time first so that attained
service, and therefore every key, is current.
"""

from __future__ import annotations

SCHED_TAGS = ("fifo", "sjf", "psjf", "srpt", "spjf", "pspjf", "sprpt")

PREEMPTIVE = frozenset(("psjf", "srpt", "pspjf", "sprpt"))

# disciplines whose key reads the prediction instead of the true size
PREDICTED_SCHED = frozenset(("spjf", "pspjf", "sprpt"))


class SchedulingError(ValueError):
    pass


def predicted_remaining(prediction: float, attained: float) -> float:
    """(y - t)+ : predicted work left, never negative even when y underestimated."""
    left = prediction - attained
    return left if left > 0.0 else 0.0


def _key_fifo(job):
    return job.arrival


def _key_size(job):
    return job.size


def _key_remaining(job):
    return job.size - job.attained


def _key_prediction(job):
    return job.prediction


def _key_predicted_remaining(job):
    left = job.prediction - job.attained
    return left if left > 0.0 else 0.0


KEY_FUNCS = {
    "fifo": _key_fifo,
    "sjf": _key_size,
    "psjf": _key_size,
    "srpt": _key_remaining,
    "spjf": _key_prediction,
    "pspjf": _key_prediction,
    "sprpt": _key_predicted_remaining,
}


def priority_key(tag: str, job) -> float:
    try:
        return KEY_FUNCS[tag](job)
    except KeyError:
        raise SchedulingError(f"unknown scheduling policy {tag!r}") from None


def select_next(tag: str, queue, now: float, rng):
    """Pick the job the server should run, or None for an empty queue.

    Nonpreemptive disciplines stick with the in-service job. Otherwise the
    minimum-key resident wins; ties keep the in-service job, remaining ties
    are broken uniformly at random.
    """
    jobs = queue.jobs
    if not jobs:
        return None
    serving = queue.serving
    if serving is not None and tag not in PREEMPTIVE:
        return serving
    key = KEY_FUNCS[tag]
    best_key = None
    best = None
    tied = None
    for j in jobs:
        k = key(j)
        if best_key is None or k < best_key:
            best_key = k
            best = j
            tied = None
        elif k == best_key:
            if tied is None:
                tied = [best]
            tied.append(j)
    if tied is None:
        return best
    for j in tied:
        if j is serving:
            return j
    return tied[int(rng.random() * len(tied))]


def on_arrival(tag: str, queue, job):
    """Service decision when `job` has just been appended to `queue`.

    Returns (action, job_to_start):
      ("start", job)    queue was idle, begin serving the arrival
      ("preempt", job)  arrival's key strictly beats the in-service key
      ("continue", None) no change

    Equivalent to rerunning select_next after insertion: under the preemptive
    disciplines the in-service job always holds the minimum key among prior
    residents, so only the arrival can displace it, and a key tie keeps it.
    """
    serving = queue.serving
    if serving is None:
        return ("start", job)
    if tag in PREEMPTIVE:
        key = KEY_FUNCS[tag]
        if key(job) < key(serving):
            return ("preempt", job)
    return ("continue", None)
