import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sashadow import (
    GridIndex,
    PatternError,
    Point,
    PointPattern,
    Window,
    count_close_pairs,
    count_close_pairs_bruteforce,
    read_pattern_csv,
    stat_delta_insert,
    stat_delta_remove,
    suff_stats,
    write_pattern_csv,
)
from sashadow.pattern import PatternParseError

from .conftest import random_pattern

W = Window()


def brute_pairs(xy, r):
    # itertools-free, distance-based recount used as the independent oracle
    n = len(xy)
    return sum(
        1
        for i in range(n)
        for j in range(i + 1, n)
        if math.hypot(xy[i][0] - xy[j][0], xy[i][1] - xy[j][1]) <= r
    )


def test_window_validation():
    assert Window(0, 2, 0, 3).area == 6
    with pytest.raises(PatternError):
        Window(1, 1, 0, 1)
    with pytest.raises(PatternError):
        Window(0, 1, 0, math.inf)


def test_pattern_rejects_outside_points():
    with pytest.raises(PatternError):
        PointPattern(W, [(0.5, 0.5), (1.2, 0.5)])
    with pytest.raises(PatternError):
        PointPattern(W, [(math.nan, 0.5)])


def test_boundary_points_are_inside():
    p = PointPattern(W, [(0.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
    assert p.n == 3


def test_pattern_is_read_only():
    p = PointPattern(W, [(0.1, 0.2)])
    with pytest.raises(ValueError):
        p.xy[0, 0] = 0.5


@pytest.mark.parametrize(
    "points, expected",
    [
        ([], 0),
        ([(0.10, 0.10), (0.15, 0.10)], 1),
        ([(0, 0), (0.05, 0), (0.20, 0), (0.26, 0)], 2),
    ],
)
def test_count_close_pairs_examples(points, expected):
    p = PointPattern(W, points)
    assert count_close_pairs(p, 0.1) == expected
    assert count_close_pairs_bruteforce(p, 0.1) == expected


def test_pair_at_exactly_r_counts():
    p = PointPattern(W, [(0.0, 0.0), (0.5, 0.0)])
    assert count_close_pairs(p, 0.5) == 1
    assert count_close_pairs(p, 0.4999999) == 0


@pytest.mark.parametrize("r", [0.0, -0.1, math.inf, math.nan])
def test_invalid_radius(r):
    with pytest.raises(PatternError):
        count_close_pairs(PointPattern(W, [(0.1, 0.1)]), r)


def test_suff_stats_examples():
    assert suff_stats(PointPattern.empty(), 0.1).tolist() == [0, 0]
    assert suff_stats(PointPattern(W, [(0.10, 0.10), (0.15, 0.10)]), 0.1).tolist() == [2, 1]


def test_suff_stats_fifty_points_against_oracle(rng):
    p = random_pattern(rng, 50)
    assert suff_stats(p, 0.1).tolist() == [50, brute_pairs(p.xy.tolist(), 0.1)]


def test_all_pairs_close_gives_maximum():
    p = PointPattern(W, [(0.5 + 0.01 * i, 0.5) for i in range(6)])
    assert count_close_pairs(p, 0.1) == 6 * 5 // 2


def test_grid_index_neighbours_match_linear_scan(rng):
    p = random_pattern(rng, 120, Window(-1, 2, 0.5, 1.5))
    grid = GridIndex(p, 0.13)
    for u in rng.random((50, 2)) * [3, 1] + [-1, 0.5]:
        d = np.hypot(*(p.xy - u).T)
        assert sorted(grid.neighbours(*u)) == np.flatnonzero(d <= 0.13).tolist()


def test_delta_insert_examples():
    assert stat_delta_insert(PointPattern.empty(), (0.3, 0.3), 0.1).tolist() == [1, 0]
    p = PointPattern(W, [(0.10, 0.10)])
    assert stat_delta_insert(p, (0.15, 0.10), 0.1).tolist() == [1, 1]
    with pytest.raises(PatternError):
        stat_delta_insert(p, (1.5, 0.1), 0.1)


def test_delta_remove_examples():
    assert stat_delta_remove(PointPattern(W, [(0.3, 0.3)]), 0, 0.1).tolist() == [1, 0]
    p = PointPattern(W, [(0.10, 0.10), (0.15, 0.10)])
    assert stat_delta_remove(p, 0, 0.1).tolist() == [1, 1]
    assert stat_delta_remove(p, 1, 0.1).tolist() == [1, 1]
    with pytest.raises(PatternError):
        stat_delta_remove(p, 2, 0.1)


def test_deltas_on_random_pattern(rng):
    p = random_pattern(rng, 100)
    u = Point(*rng.random(2))
    full = suff_stats(p.with_point(u), 0.1) - suff_stats(p, 0.1)
    assert stat_delta_insert(p, u, 0.1).tolist() == full.tolist()
    for idx in (0, 37, 99):
        full = suff_stats(p, 0.1) - suff_stats(p.without_point(idx), 0.1)
        assert stat_delta_remove(p, idx, 0.1).tolist() == full.tolist()


def test_randomized_insert_remove_sequences(rng):
    r = 0.1
    p = random_pattern(rng, 30)
    t = suff_stats(p, r)
    for _ in range(1000):
        if p.n == 0 or rng.random() < 0.5:
            u = Point(*rng.random(2))
            t = t + stat_delta_insert(p, u, r)
            p = p.with_point(u)
        else:
            idx = int(rng.integers(p.n))
            t = t - stat_delta_remove(p, idx, r)
            p = p.without_point(idx)
        if rng.random() < 0.05:
            assert t.tolist() == suff_stats(p, r).tolist()
    assert t.tolist() == suff_stats(p, r).tolist()


coords = st.floats(0.0, 1.0, allow_nan=False)
point_lists = st.lists(st.tuples(coords, coords), max_size=40)


@settings(max_examples=200, deadline=None)
@given(point_lists, st.floats(0.01, 0.8))
def test_grid_count_equals_bruteforce(points, r):
    p = PointPattern(W, points)
    n = p.n
    s = count_close_pairs(p, r)
    assert s == count_close_pairs_bruteforce(p, r)
    assert 0 <= s <= n * (n - 1) // 2


@settings(max_examples=100, deadline=None)
@given(point_lists, st.randoms(use_true_random=False))
def test_pair_count_permutation_invariant(points, rnd):
    shuffled = list(points)
    rnd.shuffle(shuffled)
    assert count_close_pairs(PointPattern(W, points), 0.1) == count_close_pairs(PointPattern(W, shuffled), 0.1)


@settings(max_examples=100, deadline=None)
@given(point_lists, st.tuples(coords, coords))
def test_insert_then_remove_restores(points, u):
    p = PointPattern(W, points)
    grown = p.with_point(u)
    t0 = suff_stats(p, 0.1)
    t1 = t0 + stat_delta_insert(p, u, 0.1)
    assert (t1 - stat_delta_remove(grown, grown.n - 1, 0.1)).tolist() == t0.tolist()


def test_csv_round_trip(tmp_path, rng):
    p = random_pattern(rng, 25)
    path = tmp_path / "p.csv"
    write_pattern_csv(p, path)
    assert path.read_text().splitlines()[0] == "x,y"
    q = read_pattern_csv(path)
    assert q == p


def test_csv_header_only_is_empty(tmp_path):
    path = tmp_path / "e.csv"
    path.write_text("x,y\n")
    assert read_pattern_csv(path).n == 0


def test_csv_parse_error_reports_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n0.1,0.2\n0.3,abc\n")
    with pytest.raises(PatternParseError) as exc:
        read_pattern_csv(path)
    assert exc.value.lineno == 3
    assert ":3:" in str(exc.value)


def test_csv_point_outside_window(tmp_path):
    path = tmp_path / "out.csv"
    path.write_text("x,y\n0.1,0.2\n1.5,0.2\n")
    with pytest.raises(PatternParseError, match=":3:"):
        read_pattern_csv(path)
