"""Model adequacy: deviance residuals, guessing equivalents, ranks, surprise.

The per-event deviance residual is minus twice that event's log-likelihood
contribution, so small values mean the realized event was well predicted.
The ordinal null baseline compares each residual against a uniform guess
over the n(n-1) candidate dyads; exact-time fits have no fixed baseline and
fall back to rank-based surprise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .effects import PrecomputedStatistics
from .errors import ParameterError, UnsupportedFeature
from .history import EventHistory, support_pairs

if TYPE_CHECKING:  # pragma: no cover
    from .estimation import FitResult

RESIDUAL_CUTOFF = 3.0


def null_residual(n: int) -> float:
    """Per-event deviance residual of uniform guessing over the support."""
    if n < 2:
        raise ParameterError("null residual needs n >= 2")
    return 2.0 * math.log(n * (n - 1))


def guessing_equivalent(d):
    """exp(D/2): the uniform-guess pool size matching residual D."""
    return np.exp(np.asarray(d, dtype=np.float64) / 2.0)


def null_guessing_equivalent(n: int) -> float:
    """Pool size equivalent of the null residual.

    Algebraically exp(null_residual(n) / 2) = n(n-1); returned in closed form
    so the identity holds exactly in floating point.
    """
    if n < 2:
        raise ParameterError("null guessing equivalent needs n >= 2")
    return float(n * (n - 1))


@dataclass(frozen=True)
class RankMatch:
    """Per-event observed ranks and exact-prediction indicators."""

    ranks: np.ndarray
    sender_match: np.ndarray
    receiver_match: np.ndarray

    @property
    def all_match(self) -> np.ndarray:
        return self.sender_match & self.receiver_match

    @property
    def any_match(self) -> np.ndarray:
        return self.sender_match | self.receiver_match


def compute_rank_match(stats: PrecomputedStatistics, theta: np.ndarray) -> RankMatch:
    """Ranks and match flags straight from a statistics tensor and theta.

    The observed event's rank counts candidates with strictly higher hazard,
    breaking ties by ascending dyad index. Sender (receiver) match compares
    the realized sender (receiver) with the argmax of hazards summed over
    outgoing (incoming) dyads; argmax ties resolve to the lowest actor id.
    """
    m = stats.m
    logits = stats.u[:m] @ theta
    nn = logits.shape[1]
    idx = np.arange(m)
    obs = stats.observed
    obs_logit = logits[idx, obs][:, None]
    higher = (logits > obs_logit).sum(axis=1)
    tied_before = ((logits == obs_logit) & (np.arange(nn)[None, :] < obs[:, None])).sum(axis=1)
    ranks = 1 + higher + tied_before

    s_arr, r_arr = support_pairs(stats.n)
    # Shift by the per-event max before exponentiating; the argmax of the
    # summed hazards is invariant to that scaling.
    w = np.exp(logits - logits.max(axis=1, keepdims=True))
    actors = np.arange(stats.n)
    sender_onehot = (s_arr[:, None] == actors[None, :]).astype(np.float64)
    receiver_onehot = (r_arr[:, None] == actors[None, :]).astype(np.float64)
    pred_sender = np.argmax(w @ sender_onehot, axis=1)
    pred_receiver = np.argmax(w @ receiver_onehot, axis=1)
    return RankMatch(
        ranks=ranks.astype(np.int64),
        sender_match=pred_sender == s_arr[obs],
        receiver_match=pred_receiver == r_arr[obs],
    )


def rank_and_match(fit: "FitResult") -> RankMatch:
    """Rank/match diagnostics of a fitted model (stored at fit time)."""
    return RankMatch(
        ranks=fit.observed_ranks,
        sender_match=fit.sender_match,
        receiver_match=fit.receiver_match,
    )


def rank_ecdf(ranks: np.ndarray, n: int) -> np.ndarray:
    """(threshold fraction, coverage) pairs at each distinct observed rank."""
    nn = n * (n - 1)
    sorted_ranks = np.sort(np.asarray(ranks))
    m = sorted_ranks.size
    uniq = np.unique(sorted_ranks)
    coverage = np.searchsorted(sorted_ranks, uniq, side="right") / m
    return np.column_stack([uniq / nn, coverage])


def rank_coverage(ranks: np.ndarray, n: int, fraction: float) -> float:
    """Share of events whose rank falls within the top ``fraction`` of dyads."""
    nn = n * (n - 1)
    return float(np.mean(np.asarray(ranks) / nn <= fraction))


def surprise_flags(fit: "FitResult", rule: str = "residual", q: float = 0.05) -> np.ndarray:
    """Boolean per-event surprise indicators under the chosen rule.

    "residual" flags events whose deviance residual exceeds the ordinal null
    residual; "rank" flags events outside the top ceil(q * n(n-1)) predicted
    candidates.
    """
    if rule == "residual":
        if fit.timing != "ordinal":
            raise UnsupportedFeature(
                "the null-residual surprise rule needs an ordinal fit; use the rank rule"
            )
        return fit.residuals > null_residual(fit.n)
    if rule == "rank":
        if not 0 < q < 1:
            raise ParameterError("rank-rule quantile must lie in (0, 1)")
        cutoff = math.ceil(q * fit.n * (fit.n - 1))
        return fit.observed_ranks > cutoff
    raise ParameterError(f"unknown surprise rule {rule!r}")


def surprise_events(fit: "FitResult", rule: str = "residual", q: float = 0.05) -> EventHistory:
    """Sub-history of flagged events, ready for sociomatrix aggregation."""
    flags = surprise_flags(fit, rule, q)
    h = fit.history
    events = tuple(ev for ev, flagged in zip(h.events, flags) if flagged)
    return EventHistory(n=h.n, timing=h.timing, events=events, horizon=h.horizon)


def surprise_fraction(fit: "FitResult") -> tuple[float, float, float]:
    """(below null, below fixed cutoff, above null) residual fractions."""
    if fit.timing != "ordinal":
        raise UnsupportedFeature("surprise fractions need an ordinal fit (no fixed null residual)")
    base = null_residual(fit.n)
    res = fit.residuals
    below = float(np.mean(res < base))
    above = float(np.mean(res > base))
    below_cutoff = float(np.mean(res < RESIDUAL_CUTOFF))
    return below, below_cutoff, above


def scenario_waiting_time(coef_sum: float, multiplicity: int = 1) -> float:
    """Expected waiting time 1 / (m' * exp(sum of coefficients))."""
    if multiplicity < 1:
        raise ParameterError(f"multiplicity must be a positive count, got {multiplicity}")
    return 1.0 / (multiplicity * math.exp(coef_sum))


@dataclass
class AdequacyReport:
    """Bundle of adequacy measures for one fitted model.

    Null-baseline fields are None for exact-time fits, which have no fixed
    null residual.
    """

    m: int
    n: int
    timing: str
    residuals: np.ndarray
    observed_ranks: np.ndarray
    null_residual: float | None
    null_guessing_equivalent: float | None
    frac_below_null: float | None
    frac_at_null: float | None
    frac_above_null: float | None
    frac_below_cutoff: float
    cutoff: float
    guessing_equivalent_quantiles: np.ndarray
    sender_match_rate: float
    receiver_match_rate: float
    all_match_rate: float
    any_match_rate: float
    rank_ecdf: np.ndarray

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "timing": self.timing,
            "null_residual": self.null_residual,
            "null_guessing_equivalent": self.null_guessing_equivalent,
            "frac_below_null": self.frac_below_null,
            "frac_at_null": self.frac_at_null,
            "frac_above_null": self.frac_above_null,
            "frac_below_cutoff": self.frac_below_cutoff,
            "cutoff": self.cutoff,
            "guessing_equivalent_quantiles": {
                label: float(v)
                for label, v in zip(("min", "q25", "median", "q75", "max"),
                                    self.guessing_equivalent_quantiles)
            },
            "sender_match_rate": self.sender_match_rate,
            "receiver_match_rate": self.receiver_match_rate,
            "all_match_rate": self.all_match_rate,
            "any_match_rate": self.any_match_rate,
            "rank_ecdf": [[float(f), float(c)] for f, c in self.rank_ecdf],
            "residuals": [float(x) for x in self.residuals],
            "observed_ranks": [int(r) for r in self.observed_ranks],
        }


def adequacy_report(fit: "FitResult", cutoff: float = RESIDUAL_CUTOFF) -> AdequacyReport:
    """Assemble the adequacy report from a fitted model."""
    res = fit.residuals
    rm = rank_and_match(fit)
    quantiles = np.quantile(guessing_equivalent(res), [0.0, 0.25, 0.5, 0.75, 1.0])
    if fit.timing == "ordinal":
        base = null_residual(fit.n)
        below = float(np.mean(res < base))
        at = float(np.mean(res == base))
        above = float(np.mean(res > base))
        base_ge = null_guessing_equivalent(fit.n)
    else:
        base = base_ge = None
        below = at = above = None
    return AdequacyReport(
        m=fit.m,
        n=fit.n,
        timing=fit.timing,
        residuals=res,
        observed_ranks=rm.ranks,
        null_residual=base,
        null_guessing_equivalent=base_ge,
        frac_below_null=below,
        frac_at_null=at,
        frac_above_null=above,
        frac_below_cutoff=float(np.mean(res < cutoff)),
        cutoff=cutoff,
        guessing_equivalent_quantiles=quantiles,
        sender_match_rate=float(np.mean(rm.sender_match)),
        receiver_match_rate=float(np.mean(rm.receiver_match)),
        all_match_rate=float(np.mean(rm.all_match)),
        any_match_rate=float(np.mean(rm.any_match)),
        rank_ecdf=rank_ecdf(rm.ranks, fit.n),
    )
