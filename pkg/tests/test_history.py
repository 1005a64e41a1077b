import json

import numpy as np
import pytest

from remfit import (
    CovariateSet,
    Event,
    EventHistory,
    IdRangeError,
    MissingValueError,
    OrderingError,
    ParameterError,
    ShapeError,
    SimultaneityError,
    SupportError,
    aggregate_sociomatrix,
    dyad_index,
    parse_edgelist,
    read_edgelist_csv,
    read_edgelist_json,
    support_pairs,
    to_rows,
    validate_covariates,
    write_edgelist_csv,
)
from conftest import random_history


def test_support_enumeration_matches_index():
    for n in (2, 3, 5, 8):
        snd, rec = support_pairs(n)
        assert len(snd) == n * (n - 1)
        seen = set()
        for k in range(len(snd)):
            s, r = int(snd[k]), int(rec[k])
            assert s != r
            assert dyad_index(n, s, r) == k
            seen.add((s, r))
        assert len(seen) == n * (n - 1)
        # lexicographic by (sender, receiver)
        pairs = list(zip(snd.tolist(), rec.tolist()))
        assert pairs == sorted(pairs)


def test_support_pairs_read_only():
    snd, _ = support_pairs(3)
    with pytest.raises(ValueError):
        snd[0] = 9


def test_history_basic_properties():
    h = EventHistory(
        n=3,
        timing="exact",
        events=(Event(0.5, 0, 1), Event(1.0, 2, 0)),
        horizon=4.0,
    )
    assert h.m == 2
    assert h.support_size == 6


@pytest.mark.parametrize(
    "kwargs,err",
    [
        (dict(n=1, timing="ordinal", events=()), ParameterError),
        (dict(n=3, timing="weird", events=()), ParameterError),
        (dict(n=3, timing="ordinal", events=(), horizon=1.0), ParameterError),
        (dict(n=3, timing="exact", events=()), MissingValueError),
        (dict(n=3, timing="exact", events=(Event(1.0, 0, 1),), horizon=0.5), OrderingError),
        (dict(n=3, timing="exact", events=(Event(-1.0, 0, 1),), horizon=2.0), OrderingError),
        (dict(n=3, timing="exact", events=(Event(1.0, 0, 3),), horizon=2.0), IdRangeError),
        (dict(n=3, timing="exact", events=(Event(1.0, 1, 1),), horizon=2.0), SupportError),
        (
            dict(n=3, timing="exact", events=(Event(1.0, 0, 1), Event(1.0, 1, 2)), horizon=2.0),
            SimultaneityError,
        ),
        (
            dict(n=3, timing="exact", events=(Event(2.0, 0, 1), Event(1.0, 1, 2)), horizon=3.0),
            OrderingError,
        ),
    ],
)
def test_history_validation(kwargs, err):
    with pytest.raises(err):
        EventHistory(**kwargs)


def test_ordinal_reindexes_strictly_increasing_column():
    rows = [(3.0, 1, 2), (7.5, 2, 1)]
    h = parse_edgelist(rows, n=3, timing="ordinal")
    assert [e.t for e in h.events] == [1.0, 2.0]
    assert h.events[0].s == 0 and h.events[0].r == 1
    # ties make the order ambiguous and are rejected even in ordinal mode
    with pytest.raises(OrderingError):
        parse_edgelist([(3.0, 1, 2), (3.0, 2, 1)], n=3, timing="ordinal")


def test_parse_exact_consumes_terminal_row():
    rows = [(0.5, 1, 2), (1.25, 2, 1), (2.0, None, None)]
    h = parse_edgelist(rows, n=2, timing="exact")
    assert h.m == 2
    assert h.horizon == 2.0
    # ids on the terminal row are ignored even when present
    rows2 = [(0.5, 1, 2), (1.25, 2, 1), (2.0, 1, 2)]
    h2 = parse_edgelist(rows2, n=2, timing="exact")
    assert h2 == h


def test_parse_errors_carry_row_numbers():
    with pytest.raises(OrderingError) as ei:
        parse_edgelist([(1.0, 1, 2), (0.5, 2, 1), (3.0, None, None)], n=2, timing="exact")
    assert "row 2" in str(ei.value)
    with pytest.raises(IdRangeError) as ei:
        parse_edgelist([(0.0, 1, 4)], n=3, timing="ordinal")
    assert "row 1" in str(ei.value)
    with pytest.raises(IdRangeError):
        parse_edgelist([(0.0, 1.5, 2)], n=3, timing="ordinal")
    with pytest.raises(MissingValueError):
        parse_edgelist([(0.0, 1, None)], n=3, timing="ordinal")
    with pytest.raises(MissingValueError):
        # exact mode requires a terminal horizon row beyond the events
        parse_edgelist([], n=3, timing="exact")


def test_roundtrip_csv(tmp_path, rng):
    for timing in ("ordinal", "exact"):
        h = random_history(rng, 4, 7, timing)
        path = tmp_path / f"{timing}.csv"
        write_edgelist_csv(h, path)
        back = read_edgelist_csv(path, n=4, timing=timing)
        assert back == h


def test_csv_header_required(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("time,from,to\n1,1,2\n")
    with pytest.raises(ShapeError):
        read_edgelist_csv(p, n=3, timing="ordinal")


def test_read_json(tmp_path):
    p = tmp_path / "h.json"
    p.write_text(json.dumps([[0.5, 1, 2], [1.5, 2, 3], [2.5, None, None]]))
    h = read_edgelist_json(p, n=3, timing="exact")
    assert h.m == 2
    assert h.horizon == 2.5
    assert h.events[1] == Event(1.5, 1, 2)


def test_to_rows_one_based_and_terminal():
    h = EventHistory(n=3, timing="exact", events=(Event(1.0, 0, 2),), horizon=3.5)
    assert to_rows(h) == [(1.0, 1, 3), (3.5, None, None)]
    h2 = EventHistory(n=3, timing="ordinal", events=(Event(1.0, 2, 1),))
    assert to_rows(h2) == [(1.0, 3, 2)]


def test_aggregate_sociomatrix():
    h = parse_edgelist([(0.0, 1, 2), (1.0, 1, 2), (2.0, 3, 1)], n=3, timing="ordinal")
    mat = aggregate_sociomatrix(h)
    assert mat.dtype == np.int64
    expect = np.zeros((3, 3), dtype=np.int64)
    expect[0, 1] = 2
    expect[2, 0] = 1
    assert np.array_equal(mat, expect)


def test_covariate_normalization():
    c = CovariateSet(snd=np.ones(4), event=np.ones((4, 4)))
    assert c.snd.shape == (4, 1)
    assert c.event.shape == (1, 4, 4)
    with pytest.raises(ShapeError):
        CovariateSet(snd=np.ones((2, 2, 2)))


def test_validate_covariates():
    h = parse_edgelist([(0.0, 1, 2)], n=3, timing="ordinal")
    validate_covariates(CovariateSet(snd=np.ones((3, 2))), h)
    with pytest.raises(ShapeError):
        validate_covariates(CovariateSet(snd=np.ones((4, 2))), h)
    with pytest.raises(ShapeError):
        validate_covariates(CovariateSet(event=np.ones((2, 3, 4))), h)
    bad = np.ones((3, 1))
    bad[1, 0] = np.nan
    with pytest.raises(MissingValueError):
        validate_covariates(CovariateSet(rec=bad), h)


def test_history_is_hashable_value_object():
    h1 = parse_edgelist([(0.0, 1, 2)], n=3, timing="ordinal")
    h2 = parse_edgelist([(5.0, 1, 2)], n=3, timing="ordinal")
    assert h1 == h2  # ordinal times are order indices
    assert hash(h1) == hash(h2)
