"""Event sequences, dyadic support, covariate containers, and file ingestion.

Actor ids are 1-based in files and wire payloads and 0-based everywhere in
memory. The support is the fixed set of ordered non-self dyads, enumerated
lexicographically by (sender, receiver); that enumeration defines the dyad
index used for ranks and tie-breaking throughout the package.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    IdRangeError,
    MissingValueError,
    OrderingError,
    ParameterError,
    ShapeError,
    SimultaneityError,
    SupportError,
)

TIMING_MODES = ("ordinal", "exact")


class Event(NamedTuple):
    """One directed interaction: time (or order index), sender, receiver."""

    t: float
    s: int
    r: int


@dataclass(frozen=True)
class EventHistory:
    """Validated, immutable sequence of events over n actors.

    ``horizon`` is the observation end time and is required in exact mode
    (it must be at or after the last event); ordinal histories carry none.
    """

    n: int
    timing: str
    events: tuple[Event, ...]
    horizon: float | None = None

    def __post_init__(self):
        if self.timing not in TIMING_MODES:
            raise ParameterError(f"unknown timing mode {self.timing!r}")
        if not isinstance(self.n, int) or self.n < 2:
            raise ParameterError("actor count n must be an integer >= 2")
        prev_t = None
        for i, ev in enumerate(self.events):
            if not (0 <= ev.s < self.n and 0 <= ev.r < self.n):
                raise IdRangeError(f"event {i + 1}: actor id outside 0..{self.n - 1}")
            if ev.s == ev.r:
                raise SupportError(f"event {i + 1}: self-loop {ev.s}->{ev.r} is outside the support")
            if ev.t < 0:
                raise OrderingError(f"event {i + 1}: negative time {ev.t}")
            if prev_t is not None and ev.t <= prev_t:
                if self.timing == "exact" and ev.t == prev_t:
                    raise SimultaneityError(f"event {i + 1}: timestamp {ev.t} repeats")
                raise OrderingError(f"event {i + 1}: first column not strictly increasing")
            prev_t = ev.t
        if self.timing == "exact":
            if self.horizon is None:
                raise MissingValueError("exact-mode history requires a horizon")
            if self.events and self.horizon < self.events[-1].t:
                raise OrderingError("horizon precedes the last event")
        elif self.horizon is not None:
            raise ParameterError("ordinal histories carry no horizon")

    @property
    def m(self) -> int:
        return len(self.events)

    @property
    def support_size(self) -> int:
        return self.n * (self.n - 1)


@lru_cache(maxsize=None)
def support_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Sender and receiver index arrays for all n(n-1) dyads, lexicographic."""
    idx = np.arange(n)
    s_grid, r_grid = np.meshgrid(idx, idx, indexing="ij")
    mask = s_grid != r_grid
    s = s_grid[mask].copy()
    r = r_grid[mask].copy()
    s.setflags(write=False)
    r.setflags(write=False)
    return s, r


def dyad_index(n: int, s: int, r: int) -> int:
    """Position of dyad (s, r) in the lexicographic support enumeration."""
    return s * (n - 1) + r - (r > s)


def _is_missing(x) -> bool:
    if x is None:
        return True
    if isinstance(x, str):
        return x.strip() == ""
    if isinstance(x, float) and math.isnan(x):
        return True
    return False


def _as_actor_id(x, n: int, row: int, col: str) -> int:
    v = float(x)
    if not v.is_integer():
        raise IdRangeError(f"row {row}: {col}={x!r} is not an integer actor id")
    k = int(v)
    if not 1 <= k <= n:
        raise IdRangeError(f"row {row}: {col}={k} outside 1..{n}")
    return k - 1


def parse_edgelist(rows: Sequence[Sequence], n: int, timing: str) -> EventHistory:
    """Build an EventHistory from m x 3 rows of (time, sender, receiver).

    Ordinal mode accepts any strictly increasing first column and reindexes
    it 1..m. Exact mode consumes the final row as the observation horizon:
    its time is required, its sender/receiver are ignored (they mark the
    censoring point, not an event). Ids are 1-based in rows.
    """
    if timing not in TIMING_MODES:
        raise ParameterError(f"unknown timing mode {timing!r}")
    rows = list(rows)
    if not rows:
        raise MissingValueError("empty edgelist")

    horizon = None
    event_rows = rows
    if timing == "exact":
        last = rows[-1]
        if _is_missing(last[0]):
            raise MissingValueError(f"row {len(rows)}: terminal row needs a time")
        horizon = float(last[0])
        event_rows = rows[:-1]

    events = []
    prev_t = None
    for i, row in enumerate(event_rows, start=1):
        if len(row) != 3:
            raise ShapeError(f"row {i}: expected 3 fields, got {len(row)}")
        t_raw, s_raw, r_raw = row
        for col, val in (("t", t_raw), ("s", s_raw), ("r", r_raw)):
            if _is_missing(val):
                raise MissingValueError(f"row {i}: missing {col}")
        t = float(t_raw)
        if t < 0:
            raise OrderingError(f"row {i}: negative time {t}")
        if prev_t is not None and t <= prev_t:
            if timing == "exact" and t == prev_t:
                raise SimultaneityError(f"row {i}: timestamp {t} repeats")
            raise OrderingError(f"row {i}: first column not strictly increasing")
        prev_t = t
        s = _as_actor_id(s_raw, n, i, "s")
        r = _as_actor_id(r_raw, n, i, "r")
        if s == r:
            raise SupportError(f"row {i}: self-loop {s + 1}->{r + 1} is outside the support")
        if timing == "ordinal":
            t = float(i)
        events.append(Event(t, s, r))

    if timing == "exact" and events and horizon < events[-1].t:
        raise OrderingError(f"row {len(rows)}: horizon {horizon} precedes the last event")
    return EventHistory(n=n, timing=timing, events=tuple(events), horizon=horizon)


def to_rows(h: EventHistory) -> list[tuple]:
    """Serialize back to the m x 3 layout (1-based ids, terminal null row in exact mode)."""
    rows = [(ev.t, ev.s + 1, ev.r + 1) for ev in h.events]
    if h.timing == "exact":
        rows.append((h.horizon, None, None))
    return rows


def write_edgelist_csv(h: EventHistory, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "s", "r"])
        for t, s, r in to_rows(h):
            writer.writerow([repr(float(t)), "" if s is None else s, "" if r is None else r])


def _read_csv_rows(path) -> list[tuple]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MissingValueError(f"{path}: empty file") from None
        if [c.strip().lower() for c in header] != ["t", "s", "r"]:
            raise ShapeError(f"{path}: expected header t,s,r, got {','.join(header)!r}")
        return [tuple(cell.strip() for cell in row) for row in reader if row]


def read_edgelist_csv(path, n: int, timing: str) -> EventHistory:
    return parse_edgelist(_read_csv_rows(path), n, timing)


def read_edgelist_json(path, n: int, timing: str) -> EventHistory:
    """Read an edgelist stored as a JSON array of [t, s, r] triples."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise ShapeError(f"{path}: expected a JSON array of triples")
    return parse_edgelist(data, n, timing)


def read_edgelist(path, n: int, timing: str) -> EventHistory:
    if str(path).endswith(".json"):
        return read_edgelist_json(path, n, timing)
    return read_edgelist_csv(path, n, timing)


def aggregate_sociomatrix(h: EventHistory) -> np.ndarray:
    """n x n matrix of event counts; cell (i, j) counts events i->j."""
    mat = np.zeros((h.n, h.n), dtype=np.int64)
    for ev in h.events:
        mat[ev.s, ev.r] += 1
    return mat


def _to_2d(name: str, arr) -> np.ndarray:
    a = np.asarray(arr, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise ShapeError(f"{name}: expected an (n, p) array, got ndim={a.ndim}")
    return a


def _to_3d(name: str, arr) -> np.ndarray:
    a = np.asarray(arr, dtype=np.float64)
    if a.ndim == 2:
        a = a[None, :, :]
    if a.ndim != 3:
        raise ShapeError(f"{name}: expected a (p, n, n) array, got ndim={a.ndim}")
    return a


@dataclass
class CovariateSet:
    """Named covariate arrays bound to the Cov* effects.

    ``snd``/``rec``/``inter`` are (n, p) actor arrays, ``event`` is a
    (p, n, n) dyad array. The time-varying slots are ingested and shape
    checked only; binding them to an effect raises UnsupportedFeature.
    """

    snd: np.ndarray | None = None
    rec: np.ndarray | None = None
    inter: np.ndarray | None = None
    event: np.ndarray | None = None
    snd_tv: np.ndarray | None = None
    event_tv: np.ndarray | None = None

    def __post_init__(self):
        if self.snd is not None:
            self.snd = _to_2d("snd", self.snd)
        if self.rec is not None:
            self.rec = _to_2d("rec", self.rec)
        if self.inter is not None:
            self.inter = _to_2d("inter", self.inter)
        if self.event is not None:
            self.event = _to_3d("event", self.event)
        if self.snd_tv is not None:
            a = np.asarray(self.snd_tv, dtype=np.float64)
            if a.ndim != 3:
                raise ShapeError(f"snd_tv: expected an (m, p, n) array, got ndim={a.ndim}")
            self.snd_tv = a
        if self.event_tv is not None:
            a = np.asarray(self.event_tv, dtype=np.float64)
            if a.ndim != 4:
                raise ShapeError(f"event_tv: expected an (m, p, n, n) array, got ndim={a.ndim}")
            self.event_tv = a


def validate_covariates(c: CovariateSet, h: EventHistory) -> CovariateSet:
    """Check every bound array against the history's n (and m for time-varying)."""
    n, m = h.n, h.m
    for name in ("snd", "rec", "inter"):
        a = getattr(c, name)
        if a is not None and a.shape[0] != n:
            raise ShapeError(f"{name}: {a.shape[0]} rows for {n} actors")
    if c.event is not None and c.event.shape[1:] != (n, n):
        raise ShapeError(f"event: slices {c.event.shape[1:]} do not match ({n}, {n})")
    if c.snd_tv is not None and (c.snd_tv.shape[0] != m or c.snd_tv.shape[2] != n):
        raise ShapeError(f"snd_tv: shape {c.snd_tv.shape} does not match m={m}, n={n}")
    if c.event_tv is not None and (c.event_tv.shape[0] != m or c.event_tv.shape[2:] != (n, n)):
        raise ShapeError(f"event_tv: shape {c.event_tv.shape} does not match m={m}, n={n}")
    for name in ("snd", "rec", "inter", "event", "snd_tv", "event_tv"):
        a = getattr(c, name)
        if a is not None and not np.all(np.isfinite(a)):
            raise MissingValueError(f"{name}: contains non-finite entries")
    return c
