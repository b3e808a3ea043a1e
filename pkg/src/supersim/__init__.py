"""supersim: discrete-event simulation of power-of-d-choices dispatching
over parallel single-server queues, with true or predicted service times.
"""

__version__ = "0.1.0"

from .analytics import mean_response_analytic, queue_tail_fraction
from .config import ConfigError, SimConfig
from .distributions import make_dist
from .engine import (
    JobRecord,
    RecordSet,
    RunResult,
    SimulationError,
    run_replications,
    run_simulation,
    split_seed,
)
from .predictors import make_predictor, predict, reversal
from .trace import load_trace, normalize_sizes, prepare_trace, replay, scale_arrivals

__all__ = [
    "ConfigError",
    "JobRecord",
    "RecordSet",
    "RunResult",
    "SimConfig",
    "SimulationError",
    "load_trace",
    "make_dist",
    "make_predictor",
    "mean_response_analytic",
    "normalize_sizes",
    "predict",
    "prepare_trace",
    "queue_tail_fraction",
    "replay",
    "reversal",
    "run_replications",
    "run_simulation",
    "scale_arrivals",
    "split_seed",
]
