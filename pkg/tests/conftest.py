import numpy as np
import pytest

from remfit import CovariateSet, Event, EventHistory


def random_events(rng, n, m, timing="ordinal"):
    """Valid random event tuples plus a horizon for exact mode."""
    events = []
    t = 0.0
    for i in range(m):
        s = int(rng.integers(n))
        r = int(rng.integers(n - 1))
        if r >= s:
            r += 1
        if timing == "exact":
            t += float(rng.exponential(1.0)) + 1e-9
        else:
            t = float(i + 1)
        events.append(Event(t, s, r))
    horizon = (t + float(rng.exponential(1.0)) + 1e-9) if timing == "exact" else None
    if timing == "exact" and m == 0:
        horizon = float(rng.exponential(1.0)) + 1e-9
    return events, horizon


def random_history(rng, n, m, timing="ordinal"):
    events, horizon = random_events(rng, n, m, timing)
    return EventHistory(n=n, timing=timing, events=tuple(events), horizon=horizon)


def random_covariates(rng, n, p_snd=1, p_rec=1, p_int=1, p_event=1):
    return CovariateSet(
        snd=rng.normal(size=(n, p_snd)),
        rec=rng.normal(size=(n, p_rec)),
        inter=rng.normal(size=(n, p_int)),
        event=rng.normal(size=(p_event, n, n)),
    )


def cov_as_lists(cov):
    """CovariateSet slots as nested lists for the brute oracle."""
    out = {}
    if cov is None:
        return out
    if cov.snd is not None:
        out["snd"] = cov.snd.tolist()
    if cov.rec is not None:
        out["rec"] = cov.rec.tolist()
    if cov.inter is not None:
        out["inter"] = cov.inter.tolist()
    if cov.event is not None:
        out["event"] = cov.event.tolist()
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)
