"""Prediction models: map a true service time x to a predicted time y.

Models:
  exact        y = x
  exponential  y ~ Exponential with mean x
  alpha        y ~ Uniform[(1-a)x, (1+a)x], unbiased multiplicative noise
  alpha_beta   with probability beta the prediction is reversed through the
               service distribution (S(y) = 1 - S(x), so small jobs look large
               and large jobs look small); otherwise the alpha model applies
  trace        predictions are supplied by a trace, never sampled

All draws go through rng.random() so runs replay exactly from a seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .distributions import ServiceDist

PREDICTOR_TAGS = ("exact", "exponential", "alpha", "alpha_beta", "trace")

# keep exponential-model predictions strictly positive
_U_LO = 1e-16


class PredictorError(ValueError):
    pass


@dataclass(frozen=True)
class Predictor:
    tag: str
    alpha: float = 0.0
    beta: float = 0.0
    dist: ServiceDist | None = None  # reversal target for alpha_beta


def make_predictor(
    tag: str,
    alpha: float = 0.0,
    beta: float = 0.0,
    dist: ServiceDist | None = None,
) -> Predictor:
    if tag not in PREDICTOR_TAGS:
        raise PredictorError(f"unknown predictor {tag!r}; expected one of {PREDICTOR_TAGS}")
    if tag in ("alpha", "alpha_beta") and not 0.0 <= alpha <= 1.0:
        raise PredictorError(f"alpha must be in [0, 1], got {alpha!r}")
    if tag == "alpha_beta":
        if not 0.0 <= beta <= 1.0:
            raise PredictorError(f"beta must be in [0, 1], got {beta!r}")
        if dist is None:
            raise PredictorError("alpha_beta predictor needs the service distribution for reversal")
    return Predictor(tag, alpha, beta, dist)


def reversal(dist: ServiceDist, x: float) -> float:
    """Prediction that lands at the mirrored quantile: S(result) = 1 - S(x).

    Works in exponent space, h = -ln(survival(x)), to stay accurate where the
    CDF saturates. Aborts when S(x) is 0 or 1 in floating point, because the
    mirrored quantile is then meaningless.
    """
    if x <= 0.0:
        raise PredictorError(f"reversal undefined at x={x!r}: S(x) = 0")
    h = dist.exponent(x)
    sf = math.exp(-h)
    if sf == 0.0:
        raise PredictorError(f"reversal overflow at x={x!r}: S(x) = 1 in floating point")
    # target quantile u = 1 - S(x) = sf; inverse CDF needs w = -ln(1 - u)
    if h > 0.6931471805599453:
        w = -math.log1p(-sf)
    else:
        w = -math.log(-math.expm1(-h))
    return dist.from_exponent(w)


def predict(p: Predictor, x: float, rng) -> float:
    """Draw a prediction for a job of true size x."""
    if x <= 0.0:
        raise PredictorError(f"cannot predict for nonpositive size {x!r}")
    tag = p.tag
    if tag == "exact":
        return x
    if tag == "exponential":
        u = rng.random()
        if u < _U_LO:
            u = _U_LO
        return -x * math.log1p(-u)
    if tag == "alpha":
        return x * (1.0 - p.alpha + 2.0 * p.alpha * rng.random())
    if tag == "alpha_beta":
        if rng.random() < p.beta:
            return reversal(p.dist, x)
        return x * (1.0 - p.alpha + 2.0 * p.alpha * rng.random())
    raise PredictorError("trace predictor draws its values from the trace, not from predict()")
