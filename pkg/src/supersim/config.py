"""Run configuration: one dataclass describing a single simulated system."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .choice import CHOICE_TAGS
from .distributions import DIST_TAGS
from .predictors import PREDICTOR_TAGS
from .scheduling import SCHED_TAGS


class ConfigError(ValueError):
    pass


@dataclass
class SimConfig:
    """Everything a replication needs besides its seed.

    arrival_rate is the offered load per queue; the aggregate Poisson rate is
    arrival_rate * n_queues. Statistics cover completions in
    [warmup, horizon). Trace replays ignore horizon/warmup and measure every
    completion; arrival_source records where the arrivals came from.
    """

    n_queues: int = 1000
    d_choices: int = 2
    arrival_rate: float = 0.9
    service_dist: str = "exponential"
    predictor: str = "exact"
    alpha: float = 0.0
    beta: float = 0.0
    choice_policy: str = "shortest_queue"
    sched_policy: str = "fifo"
    horizon: float = 10000.0
    warmup: float = 1000.0
    replications: int = 100
    seed: int = 12345
    llu_in_service: str = "remaining"
    arrival_source: str = "poisson"
    measure_tails: bool = False

    def validate(self) -> None:
        if self.n_queues < 1:
            raise ConfigError(f"n_queues must be >= 1, got {self.n_queues}")
        if not 1 <= self.d_choices <= self.n_queues:
            raise ConfigError(
                f"d_choices must be in [1, n_queues], got {self.d_choices} with n={self.n_queues}"
            )
        if not 0.0 < self.arrival_rate < 1.0:
            raise ConfigError(
                f"arrival_rate must be in (0, 1) for stability, got {self.arrival_rate}"
            )
        if self.service_dist not in DIST_TAGS:
            raise ConfigError(f"unknown service_dist {self.service_dist!r}")
        if self.predictor not in PREDICTOR_TAGS:
            raise ConfigError(f"unknown predictor {self.predictor!r}")
        if self.choice_policy not in CHOICE_TAGS:
            raise ConfigError(f"unknown choice_policy {self.choice_policy!r}")
        if self.sched_policy not in SCHED_TAGS:
            raise ConfigError(f"unknown sched_policy {self.sched_policy!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 <= self.beta <= 1.0:
            raise ConfigError(f"beta must be in [0, 1], got {self.beta}")
        if self.llu_in_service not in ("remaining", "full"):
            raise ConfigError(
                f"llu_in_service must be 'remaining' or 'full', got {self.llu_in_service!r}"
            )
        synthetic = self.arrival_source == "poisson"
        if synthetic:
            if self.horizon <= 0:
                raise ConfigError(f"horizon must be positive, got {self.horizon}")
            if not 0.0 <= self.warmup < self.horizon:
                raise ConfigError(
                    f"need 0 <= warmup < horizon, got warmup={self.warmup} horizon={self.horizon}"
                )
            if self.predictor == "trace":
                raise ConfigError("predictor 'trace' is only valid when replaying a trace")
        if self.replications < 1:
            raise ConfigError(f"replications must be >= 1, got {self.replications}")

    def with_(self, **kw) -> "SimConfig":
        return replace(self, **kw)


CONFIG_FIELDS = tuple(f.name for f in fields(SimConfig))


def config_to_row(cfg: SimConfig) -> dict:
    """Flat dict of config fields, CSV-friendly."""
    return {name: getattr(cfg, name) for name in CONFIG_FIELDS}


def config_from_row(row: dict) -> SimConfig:
    """Rebuild a SimConfig from a CSV row (inverse of config_to_row)."""
    kw = {}
    for f in fields(SimConfig):
        if f.name not in row:
            raise ConfigError(f"result row missing config field {f.name!r}")
        raw = row[f.name]
        if f.type in ("int", int):
            kw[f.name] = int(raw)
        elif f.type in ("float", float):
            kw[f.name] = float(raw)
        elif f.type in ("bool", bool):
            kw[f.name] = raw in (True, "True", "true", "1")
        else:
            kw[f.name] = raw
    cfg = SimConfig(**kw)
    cfg.validate()
    return cfg
