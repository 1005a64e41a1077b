"""Effect catalog, sequential sufficient state, and statistic evaluation.

Every effect maps the pair (history-so-far, candidate dyad) to a real number.
Two evaluation routes are provided: a scalar route for one candidate dyad
(``compute_statistics``) and a vectorized route for the whole support
(``statistics_matrix``). They must agree to the last bit; tests hold them to
exact float equality against a third, brute-force route.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    BindingError,
    IdRangeError,
    ParameterError,
    UnknownEffectError,
    UnsupportedFeature,
)
from .history import CovariateSet, Event, EventHistory, dyad_index, support_pairs

PShiftLabel = str

PSHIFT_LABELS: tuple[PShiftLabel, ...] = (
    "AB-BA", "AB-B0", "AB-BY",
    "A0-X0", "A0-XA", "A0-XY",
    "AB-X0", "AB-XA", "AB-XB", "AB-XY",
    "AB-A0", "AB-AY", "A0-AY",
)

DEGREE_EFFECTS = ("NIDSnd", "NIDRec", "NODSnd", "NODRec", "NTDegSnd", "NTDegRec")
FRACTION_EFFECTS = ("FrPSndSnd", "FrRecSnd")
RECENCY_EFFECTS = ("RRecSnd", "RSndSnd")
COVARIATE_EFFECTS = ("CovSnd", "CovRec", "CovInt", "CovEvent")
TRIAD_EFFECTS = ("OTPSnd", "ITPSnd", "OSPSnd", "ISPSnd")
FIXED_EFFECTS = ("FESnd", "FERec", "FEInt")
PSHIFT_EFFECTS = tuple("PS" + lab for lab in PSHIFT_LABELS)

EFFECT_NAMES: tuple[str, ...] = (
    DEGREE_EFFECTS
    + FRACTION_EFFECTS
    + RECENCY_EFFECTS
    + COVARIATE_EFFECTS
    + TRIAD_EFFECTS
    + FIXED_EFFECTS
    + PSHIFT_EFFECTS
)

# P-shift targets written as "0" address the group actor; they are undefined
# without one.
_GROUP_ONLY = tuple(e for e in PSHIFT_EFFECTS if "0" in e)


@dataclass(frozen=True)
class EffectSpecification:
    """Ordered selection of effects, plus the optional group pseudo-actor."""

    entries: tuple[str, ...]
    group_actor: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.entries:
            raise ParameterError("effect specification is empty")
        seen = set()
        for name in self.entries:
            if name not in EFFECT_NAMES:
                raise UnknownEffectError(f"unknown effect {name!r}")
            if name in seen:
                raise ParameterError(f"effect {name!r} listed twice")
            seen.add(name)
            if name in _GROUP_ONLY and self.group_actor is None:
                raise UnsupportedFeature(
                    f"{name} addresses the group target and needs a group actor"
                )


def classify_pshift(
    prev: tuple[int, int] | None,
    cand: tuple[int, int],
    group: int | None = None,
) -> PShiftLabel:
    """Participation-shift label of ``cand`` given the previous event.

    Returns "none" when no shift applies (no previous event, or an exact
    repeat of it). When the previous receiver is the group actor the A0-*
    family applies; named roles (A, B) win over the group role on clashes.
    """
    if prev is None:
        return "none"
    a, b = prev
    s, r = cand
    if group is not None and b == group:
        if s == a:
            return "none" if r == group else "A0-AY"
        if r == group:
            return "A0-X0"
        if r == a:
            return "A0-XA"
        return "A0-XY"
    if s == b:
        if r == a:
            return "AB-BA"
        if group is not None and r == group:
            return "AB-B0"
        return "AB-BY"
    if s == a:
        if r == b:
            return "none"
        if group is not None and r == group:
            return "AB-A0"
        return "AB-AY"
    if r == a:
        return "AB-XA"
    if r == b:
        return "AB-XB"
    if group is not None and r == group:
        return "AB-X0"
    return "AB-XY"


class SufficientState:
    """Incrementally maintained summaries of the history seen so far.

    Tracks event count, degrees, dyad counts, the binary edge structure,
    per-actor recency lists (distinct partners, most recent first), and the
    previous event. ``push`` applies one event in place.
    """

    __slots__ = (
        "n", "group", "m", "indeg", "outdeg",
        "dyad_count", "edge", "senders_to", "targets_of", "prev",
    )

    def __init__(self, n: int, group: int | None = None):
        if group is not None and not 0 <= group < n:
            raise IdRangeError(f"group actor {group} outside 0..{n - 1}")
        self.n = n
        self.group = group
        self.m = 0
        self.indeg = np.zeros(n, dtype=np.int64)
        self.outdeg = np.zeros(n, dtype=np.int64)
        self.dyad_count = np.zeros((n, n), dtype=np.int64)
        self.edge = np.zeros((n, n), dtype=bool)
        self.senders_to: list[list[int]] = [[] for _ in range(n)]
        self.targets_of: list[list[int]] = [[] for _ in range(n)]
        self.prev: tuple[int, int] | None = None

    def push(self, s: int, r: int) -> None:
        self.m += 1
        self.outdeg[s] += 1
        self.indeg[r] += 1
        self.dyad_count[s, r] += 1
        self.edge[s, r] = True
        lst = self.senders_to[r]
        if s in lst:
            lst.remove(s)
        lst.insert(0, s)
        lst = self.targets_of[s]
        if r in lst:
            lst.remove(r)
        lst.insert(0, r)
        self.prev = (s, r)


def update_state(state: SufficientState, event: Event) -> SufficientState:
    state.push(event.s, event.r)
    return state


def _covariate_for(name: str, cov: CovariateSet | None) -> np.ndarray:
    slot = {"CovSnd": "snd", "CovRec": "rec", "CovInt": "inter", "CovEvent": "event"}[name]
    arr = None if cov is None else getattr(cov, slot)
    if arr is None:
        tv = None if cov is None else getattr(cov, slot + "_tv", None)
        if tv is not None:
            raise UnsupportedFeature(f"{name}: time-varying covariates are not supported")
        raise BindingError(f"{name} requires a bound {slot!r} covariate array")
    return arr


def effect_dimension(name: str, n: int, cov: CovariateSet | None = None) -> int:
    """Number of parameters the effect contributes."""
    if name not in EFFECT_NAMES:
        raise UnknownEffectError(f"unknown effect {name!r}")
    if name in COVARIATE_EFFECTS:
        arr = _covariate_for(name, cov)
        return arr.shape[0] if name == "CovEvent" else arr.shape[1]
    if name in FIXED_EFFECTS:
        return n
    return 1


def parameter_names(spec: EffectSpecification, n: int, cov: CovariateSet | None = None) -> list[str]:
    """Expanded per-parameter labels, in entry order."""
    out = []
    for name in spec.entries:
        p = effect_dimension(name, n, cov)
        if name in COVARIATE_EFFECTS or name in FIXED_EFFECTS:
            out.extend(f"{name}.{j + 1}" for j in range(p))
        else:
            out.append(name)
    return out


def total_dimension(spec: EffectSpecification, n: int, cov: CovariateSet | None = None) -> int:
    return sum(effect_dimension(name, n, cov) for name in spec.entries)


def compute_statistics(
    state: SufficientState,
    spec: EffectSpecification,
    cov: CovariateSet | None,
    s: int,
    r: int,
) -> np.ndarray:
    """Statistic vector for one candidate dyad (s, r), scalar route."""
    m_t = state.m
    vals: list[float] = []
    for name in spec.entries:
        if name == "NIDSnd":
            vals.append(state.indeg[s] / m_t if m_t else 0.0)
        elif name == "NIDRec":
            vals.append(state.indeg[r] / m_t if m_t else 0.0)
        elif name == "NODSnd":
            vals.append(state.outdeg[s] / m_t if m_t else 0.0)
        elif name == "NODRec":
            vals.append(state.outdeg[r] / m_t if m_t else 0.0)
        elif name == "NTDegSnd":
            vals.append((state.indeg[s] + state.outdeg[s]) / (2 * m_t) if m_t else 0.0)
        elif name == "NTDegRec":
            vals.append((state.indeg[r] + state.outdeg[r]) / (2 * m_t) if m_t else 0.0)
        elif name == "FrPSndSnd":
            d = state.outdeg[s]
            vals.append(state.dyad_count[s, r] / d if d else 0.0)
        elif name == "FrRecSnd":
            d = state.indeg[s]
            vals.append(state.dyad_count[r, s] / d if d else 0.0)
        elif name == "RRecSnd":
            lst = state.senders_to[s]
            vals.append(1.0 / (lst.index(r) + 1) if r in lst else 0.0)
        elif name == "RSndSnd":
            lst = state.targets_of[s]
            vals.append(1.0 / (lst.index(r) + 1) if r in lst else 0.0)
        elif name == "OTPSnd":
            vals.append(float(np.count_nonzero(state.edge[s, :] & state.edge[:, r])))
        elif name == "ITPSnd":
            vals.append(float(np.count_nonzero(state.edge[r, :] & state.edge[:, s])))
        elif name == "OSPSnd":
            vals.append(float(np.count_nonzero(state.edge[s, :] & state.edge[r, :])))
        elif name == "ISPSnd":
            vals.append(float(np.count_nonzero(state.edge[:, s] & state.edge[:, r])))
        elif name == "CovSnd":
            vals.extend(_covariate_for(name, cov)[s, :].tolist())
        elif name == "CovRec":
            vals.extend(_covariate_for(name, cov)[r, :].tolist())
        elif name == "CovInt":
            x = _covariate_for(name, cov)
            vals.extend((x[s, :] + x[r, :]).tolist())
        elif name == "CovEvent":
            vals.extend(_covariate_for(name, cov)[:, s, r].tolist())
        elif name == "FESnd":
            vals.extend(1.0 if s == i else 0.0 for i in range(state.n))
        elif name == "FERec":
            vals.extend(1.0 if r == i else 0.0 for i in range(state.n))
        elif name == "FEInt":
            vals.extend(
                (1.0 if s == i else 0.0) + (1.0 if r == i else 0.0) for i in range(state.n)
            )
        elif name.startswith("PS"):
            label = classify_pshift(state.prev, (s, r), spec.group_actor)
            vals.append(1.0 if label == name[2:] else 0.0)
        else:  # pragma: no cover - catalog is closed
            raise UnknownEffectError(f"unknown effect {name!r}")
    return np.asarray(vals, dtype=np.float64)


def _pshift_masks(
    prev: tuple[int, int] | None,
    group: int | None,
    s_arr: np.ndarray,
    r_arr: np.ndarray,
) -> dict[PShiftLabel, np.ndarray]:
    """Boolean support masks per label, mirroring classify_pshift exactly."""
    none = np.zeros(s_arr.shape, dtype=bool)
    masks = {lab: none for lab in PSHIFT_LABELS}
    if prev is None:
        return masks
    a, b = prev
    r_g = (r_arr == group) if group is not None else none
    if group is not None and b == group:
        s_a = s_arr == a
        r_a = r_arr == a
        masks["A0-AY"] = s_a & ~r_g
        masks["A0-X0"] = ~s_a & r_g
        masks["A0-XA"] = ~s_a & ~r_g & r_a
        masks["A0-XY"] = ~s_a & ~r_g & ~r_a
        return masks
    s_a, s_b = s_arr == a, s_arr == b
    r_a, r_b = r_arr == a, r_arr == b
    s_x = ~s_a & ~s_b
    masks["AB-BA"] = s_b & r_a
    masks["AB-B0"] = s_b & ~r_a & r_g
    masks["AB-BY"] = s_b & ~r_a & ~r_g
    masks["AB-A0"] = s_a & ~r_b & r_g
    masks["AB-AY"] = s_a & ~r_b & ~r_g
    masks["AB-XA"] = s_x & r_a
    masks["AB-XB"] = s_x & ~r_a & r_b
    masks["AB-X0"] = s_x & ~r_a & ~r_b & r_g
    masks["AB-XY"] = s_x & ~r_a & ~r_b & ~r_g
    return masks


def statistics_matrix(
    state: SufficientState,
    spec: EffectSpecification,
    cov: CovariateSet | None,
) -> np.ndarray:
    """Statistics for every dyad in the support at once, (N, K)."""
    n = state.n
    s_arr, r_arr = support_pairs(n)
    nn = s_arr.size
    m_t = state.m
    zeros = np.zeros(nn, dtype=np.float64)
    masks = None
    edge_f = None
    cols: list[np.ndarray] = []

    def ratio(num: np.ndarray, den) -> np.ndarray:
        den = np.asarray(den, dtype=np.float64)
        return np.divide(num, den, out=np.zeros(nn), where=den > 0)

    for name in spec.entries:
        if name == "NIDSnd":
            cols.append(state.indeg[s_arr] / m_t if m_t else zeros)
        elif name == "NIDRec":
            cols.append(state.indeg[r_arr] / m_t if m_t else zeros)
        elif name == "NODSnd":
            cols.append(state.outdeg[s_arr] / m_t if m_t else zeros)
        elif name == "NODRec":
            cols.append(state.outdeg[r_arr] / m_t if m_t else zeros)
        elif name == "NTDegSnd":
            cols.append((state.indeg[s_arr] + state.outdeg[s_arr]) / (2 * m_t) if m_t else zeros)
        elif name == "NTDegRec":
            cols.append((state.indeg[r_arr] + state.outdeg[r_arr]) / (2 * m_t) if m_t else zeros)
        elif name == "FrPSndSnd":
            cols.append(ratio(state.dyad_count[s_arr, r_arr], state.outdeg[s_arr]))
        elif name == "FrRecSnd":
            cols.append(ratio(state.dyad_count[r_arr, s_arr], state.indeg[s_arr]))
        elif name in RECENCY_EFFECTS:
            lists = state.senders_to if name == "RRecSnd" else state.targets_of
            rank = np.zeros((n, n), dtype=np.float64)
            for i, lst in enumerate(lists):
                for pos, k in enumerate(lst):
                    rank[i, k] = 1.0 / (pos + 1)
            cols.append(rank[s_arr, r_arr])
        elif name in TRIAD_EFFECTS:
            if edge_f is None:
                edge_f = state.edge.astype(np.float64)
            if name == "OTPSnd":
                cols.append((edge_f @ edge_f)[s_arr, r_arr])
            elif name == "ITPSnd":
                cols.append((edge_f @ edge_f)[r_arr, s_arr])
            elif name == "OSPSnd":
                cols.append((edge_f @ edge_f.T)[s_arr, r_arr])
            else:
                cols.append((edge_f.T @ edge_f)[s_arr, r_arr])
        elif name == "CovSnd":
            cols.extend(_covariate_for(name, cov)[s_arr, :].T)
        elif name == "CovRec":
            cols.extend(_covariate_for(name, cov)[r_arr, :].T)
        elif name == "CovInt":
            x = _covariate_for(name, cov)
            cols.extend((x[s_arr, :] + x[r_arr, :]).T)
        elif name == "CovEvent":
            cols.extend(_covariate_for(name, cov)[:, s_arr, r_arr])
        elif name == "FESnd":
            cols.extend((s_arr == i).astype(np.float64) for i in range(n))
        elif name == "FERec":
            cols.extend((r_arr == i).astype(np.float64) for i in range(n))
        elif name == "FEInt":
            cols.extend(
                (s_arr == i).astype(np.float64) + (r_arr == i).astype(np.float64)
                for i in range(n)
            )
        elif name.startswith("PS"):
            if masks is None:
                masks = _pshift_masks(state.prev, spec.group_actor, s_arr, r_arr)
            cols.append(masks[name[2:]].astype(np.float64))
        else:  # pragma: no cover - catalog is closed
            raise UnknownEffectError(f"unknown effect {name!r}")
    return np.column_stack(cols)


@dataclass
class PrecomputedStatistics:
    """Statistic tensor over all decision points, built once per fit.

    ``u[i]`` holds the (N, K) statistics in force just before step i. For
    ordinal likelihoods there are m steps; exact likelihoods append one
    trailing step covering the censored interval after the last event.
    """

    u: np.ndarray
    observed: np.ndarray
    deltas: np.ndarray
    tail: float
    names: tuple[str, ...]
    timing: str
    n: int

    @property
    def m(self) -> int:
        return self.observed.size

    @property
    def k(self) -> int:
        return self.u.shape[2]


def build_statistics(
    h: EventHistory,
    spec: EffectSpecification,
    cov: CovariateSet | None = None,
    mode: str | None = None,
) -> PrecomputedStatistics:
    """Walk the history once and record statistics at every decision point."""
    mode = mode or h.timing
    if mode == "exact" and h.timing == "ordinal":
        raise ParameterError("exact likelihood needs exact-time data")
    trailing = mode == "exact"
    m = h.m
    steps = m + 1 if trailing else m
    state = SufficientState(h.n, spec.group_actor)
    k = total_dimension(spec, h.n, cov)
    u = np.empty((steps, h.support_size, k), dtype=np.float64)
    observed = np.empty(m, dtype=np.int64)
    for i in range(steps):
        u[i] = statistics_matrix(state, spec, cov)
        if i < m:
            ev = h.events[i]
            observed[i] = dyad_index(h.n, ev.s, ev.r)
            state.push(ev.s, ev.r)
    if trailing:
        times = np.array([ev.t for ev in h.events], dtype=np.float64)
        deltas = np.diff(times, prepend=0.0)
        tail = float(h.horizon - (times[-1] if m else 0.0))
    else:
        deltas = np.zeros(0, dtype=np.float64)
        tail = 0.0
    return PrecomputedStatistics(
        u=u,
        observed=observed,
        deltas=deltas,
        tail=tail,
        names=tuple(parameter_names(spec, h.n, cov)),
        timing=mode,
        n=h.n,
    )
