"""Ordinal and exact-time log likelihoods with analytic gradients."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .effects import PrecomputedStatistics
from .errors import ParameterError, ShapeError


@dataclass(frozen=True)
class RateSnapshot:
    """Log hazards across the support at one decision point."""

    logits: np.ndarray
    log_normalizer: float

    @property
    def rates(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.logits)

    @property
    def total_rate(self) -> float:
        with np.errstate(over="ignore"):
            return float(np.exp(self.log_normalizer))

    @property
    def probabilities(self) -> np.ndarray:
        return np.exp(self.logits - self.log_normalizer)


def rate_snapshot(u_step: np.ndarray, theta: np.ndarray) -> RateSnapshot:
    """Hazard snapshot from one (N, K) statistics slice."""
    logits = u_step @ theta
    return RateSnapshot(logits=logits, log_normalizer=float(logsumexp(logits)))


@dataclass(frozen=True)
class LikelihoodResult:
    """Total log likelihood, its per-event terms, and the censoring term.

    ``censoring`` is 0 for ordinal likelihoods; for exact likelihoods it is
    the (negative) survival term of the interval after the last event, and
    ``total`` already includes it.
    """

    total: float
    per_event: np.ndarray
    censoring: float


def _check(stats: PrecomputedStatistics, theta: np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (stats.k,):
        raise ShapeError(f"theta has shape {theta.shape}, expected ({stats.k},)")
    return theta


def _logits(stats: PrecomputedStatistics, theta: np.ndarray) -> np.ndarray:
    return stats.u @ theta


def ordinal_loglik(stats: PrecomputedStatistics, theta: np.ndarray) -> LikelihoodResult:
    """Multinomial choice likelihood: which dyad fired, order only."""
    theta = _check(stats, theta)
    logits = _logits(stats, theta)[: stats.m]
    lse = logsumexp(logits, axis=1)
    per_event = logits[np.arange(stats.m), stats.observed] - lse
    return LikelihoodResult(total=float(per_event.sum()), per_event=per_event, censoring=0.0)


def temporal_loglik(stats: PrecomputedStatistics, theta: np.ndarray) -> LikelihoodResult:
    """Piecewise-constant-hazard likelihood over waiting times.

    Requires statistics built in exact mode (with the trailing censored
    step); the last interval contributes only survival mass.
    """
    if stats.timing != "exact":
        raise ParameterError("temporal likelihood needs exact-mode statistics")
    theta = _check(stats, theta)
    logits = _logits(stats, theta)
    lse = logsumexp(logits, axis=1)
    with np.errstate(over="ignore"):
        total_rates = np.exp(lse)
    m = stats.m
    per_event = logits[np.arange(m), stats.observed] - stats.deltas * total_rates[:m]
    censoring = float(-stats.tail * total_rates[m])
    return LikelihoodResult(
        total=float(per_event.sum() + censoring),
        per_event=per_event,
        censoring=censoring,
    )


def loglik(stats: PrecomputedStatistics, theta: np.ndarray) -> LikelihoodResult:
    if stats.timing == "exact":
        return temporal_loglik(stats, theta)
    return ordinal_loglik(stats, theta)


def loglik_gradient(stats: PrecomputedStatistics, theta: np.ndarray) -> np.ndarray:
    """Analytic gradient of the mode-appropriate log likelihood."""
    theta = _check(stats, theta)
    logits = _logits(stats, theta)
    m = stats.m
    u_obs = stats.u[np.arange(m), stats.observed, :]
    if stats.timing == "exact":
        with np.errstate(over="ignore"):
            rates = np.exp(logits)
        weighted = np.einsum("ia,iak->ik", rates, stats.u)
        grad = u_obs.sum(axis=0)
        grad -= (stats.deltas[:, None] * weighted[:m]).sum(axis=0)
        grad -= stats.tail * weighted[m]
        return grad
    lse = logsumexp(logits, axis=1)
    probs = np.exp(logits - lse[:, None])
    expected = np.einsum("ia,iak->ik", probs, stats.u)
    return u_obs.sum(axis=0) - expected.sum(axis=0)


def value_and_gradient(stats: PrecomputedStatistics, theta: np.ndarray) -> tuple[float, np.ndarray]:
    """One-pass evaluation used by the optimizer."""
    theta = _check(stats, theta)
    logits = _logits(stats, theta)
    m = stats.m
    idx = np.arange(m)
    u_obs = stats.u[idx, stats.observed, :]
    if stats.timing == "exact":
        lse = logsumexp(logits, axis=1)
        with np.errstate(over="ignore"):
            rates = np.exp(logits)
            total_rates = np.exp(lse)
        value = float(
            (logits[idx, stats.observed] - stats.deltas * total_rates[:m]).sum()
            - stats.tail * total_rates[m]
        )
        weighted = np.einsum("ia,iak->ik", rates, stats.u)
        grad = (
            u_obs.sum(axis=0)
            - (stats.deltas[:, None] * weighted[:m]).sum(axis=0)
            - stats.tail * weighted[m]
        )
        return value, grad
    lse = logsumexp(logits, axis=1)
    value = float((logits[idx, stats.observed] - lse).sum())
    probs = np.exp(logits - lse[:, None])
    expected = np.einsum("ia,iak->ik", probs, stats.u)
    return value, u_obs.sum(axis=0) - expected.sum(axis=0)
