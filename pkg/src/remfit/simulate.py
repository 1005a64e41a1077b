"""Forward sampling of relational event histories.

Hazards are exactly piecewise constant between events, so sampling is the
direct competing-risks scheme: draw the total waiting time from an
exponential with rate equal to the summed hazard, then pick the dyad in
proportion to its hazard share. No thinning, no approximation.

The generator is counter-based (Philox) so a fixed seed reproduces the same
history bit for bit on any platform.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .effects import EffectSpecification, SufficientState, statistics_matrix, total_dimension
from .errors import NumericalRangeError, ParameterError, ShapeError, UnsupportedFeature
from .history import CovariateSet, Event, EventHistory, support_pairs
from .likelihood import rate_snapshot

_LOG_RATE_CAP = 700.0


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


@dataclass(frozen=True)
class SimulationConfig:
    """Model, stop rule, and seed for one simulation run.

    Exactly one stop rule applies: ``max_events`` caps the event count,
    ``horizon`` censors at a fixed time.
    """

    n: int
    theta: np.ndarray
    spec: EffectSpecification
    cov: CovariateSet | None = None
    max_events: int | None = None
    horizon: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ParameterError("simulation needs n >= 2")
        if (self.max_events is None) == (self.horizon is None):
            raise ParameterError("exactly one stop rule: max_events or horizon")
        if self.max_events is not None and self.max_events < 0:
            raise ParameterError("max_events must be nonnegative")
        if self.horizon is not None and not self.horizon > 0:
            raise ParameterError("horizon must be positive")
        theta = np.asarray(self.theta, dtype=np.float64)
        object.__setattr__(self, "theta", theta)
        if self.cov is not None and (self.cov.snd_tv is not None or self.cov.event_tv is not None):
            raise UnsupportedFeature("time-varying covariates cannot be simulated")
        k = total_dimension(self.spec, self.n, self.cov)
        if theta.shape != (k,):
            raise ShapeError(f"theta has shape {theta.shape}, expected ({k},)")
        if self.cov is not None:
            for name in ("snd", "rec", "inter"):
                arr = getattr(self.cov, name)
                if arr is not None and arr.shape[0] != self.n:
                    raise ShapeError(f"{name}: {arr.shape[0]} rows for {self.n} actors")
            if self.cov.event is not None and self.cov.event.shape[1:] != (self.n, self.n):
                raise ShapeError("event covariate slices do not match (n, n)")


def draw_next_event(
    state: SufficientState,
    spec: EffectSpecification,
    cov: CovariateSet | None,
    theta: np.ndarray,
    rng: np.random.Generator,
    t0: float = 0.0,
) -> tuple[Event, float]:
    """Sample the next event after time t0 from the current state."""
    snap = rate_snapshot(statistics_matrix(state, spec, cov), theta)
    lse = snap.log_normalizer
    if not np.isfinite(lse) or lse > _LOG_RATE_CAP:
        raise NumericalRangeError(f"total hazard overflows (log rate {lse:.3g})")
    total = math.exp(lse)
    if total == 0.0:
        raise NumericalRangeError("total hazard underflows to zero; no event can occur")
    wait = float(rng.exponential(1.0 / total))
    probs = snap.probabilities
    cum = np.cumsum(probs)
    j = min(int(np.searchsorted(cum, rng.random(), side="right")), probs.size - 1)
    s_arr, r_arr = support_pairs(state.n)
    return Event(t0 + wait, int(s_arr[j]), int(r_arr[j])), wait


def simulate_history(cfg: SimulationConfig) -> EventHistory:
    """Run the sampler to the stop rule; returns an exact-mode history.

    With the event-count rule the horizon is the last event time; with the
    time rule it is the configured horizon and the final (over-running) draw
    is discarded as censored.
    """
    rng = make_rng(cfg.seed)
    state = SufficientState(cfg.n, cfg.spec.group_actor)
    events: list[Event] = []
    t = 0.0
    if cfg.max_events is not None:
        for _ in range(cfg.max_events):
            ev, _wait = draw_next_event(state, cfg.spec, cfg.cov, cfg.theta, rng, t)
            events.append(ev)
            state.push(ev.s, ev.r)
            t = ev.t
        horizon = t
    else:
        while True:
            ev, _wait = draw_next_event(state, cfg.spec, cfg.cov, cfg.theta, rng, t)
            if ev.t > cfg.horizon:
                break
            events.append(ev)
            state.push(ev.s, ev.r)
            t = ev.t
        horizon = cfg.horizon
    return EventHistory(n=cfg.n, timing="exact", events=tuple(events), horizon=float(horizon))
