import numpy as np
import pytest
from hypothesis import given, strategies as st

from teampursuit.encoding import (ALL_ORDERS, RiderOrder, TrackGeometry, TransitionStrategy,
                                  atomic_unit_count, effective_length, random_strategy,
                                  rotate, segment_distances, standard_strategy)

GEOM = TrackGeometry()
hl_vectors = st.lists(st.integers(1, 3), min_size=23, max_size=23)


def test_geometry_defaults():
    assert GEOM.race_distance == 3000
    assert GEOM.half_lap_length == 125
    assert GEOM.half_laps == 24


@pytest.mark.parametrize("laps, units", [(12, 23), (2, 3)])
def test_atomic_unit_count(laps, units):
    assert atomic_unit_count(TrackGeometry(laps=laps)) == units


def test_parameter_count():
    n_minus_1 = atomic_unit_count(GEOM)
    assert 2 * n_minus_1 == 46


def test_too_short_race_rejected():
    with pytest.raises(ValueError):
        atomic_unit_count(TrackGeometry(laps=1))


@pytest.mark.parametrize("hl, m", [
    ([3] * 23, 8),
    ([1] + [2] * 22, 12),
    ([1] * 23, 23),
])
def test_effective_length(hl, m):
    assert effective_length(TransitionStrategy(tuple(hl))) == m


def test_strategy_bounds_enforced():
    with pytest.raises(ValueError):
        TransitionStrategy((0,) + (2,) * 22)
    with pytest.raises(ValueError):
        TransitionStrategy((4,) + (2,) * 22)


def test_segments_standard():
    d = segment_distances(standard_strategy(), GEOM)
    assert d.tolist() == [187.5] + [250.0] * 10 + [312.5]
    assert d.sum() == 3000.0


def test_segments_all_threes():
    d = segment_distances(TransitionStrategy((3,) * 23), GEOM)
    assert len(d) == 8
    assert d[0] == 187.5 + 125 + 125
    # 8 turns of 3 units overshoot the 23 units by one: the last turn is cut to 2
    assert d[-1] == 125 + 187.5
    assert d.sum() == 3000.0


def test_segments_all_ones():
    d = segment_distances(TransitionStrategy((1,) * 23), GEOM)
    assert d.tolist() == [187.5] + [125.0] * 21 + [187.5]


def test_exact_cover_not_truncated():
    s = TransitionStrategy((2,) * 11 + (1,) + (3,) * 11)
    d = segment_distances(s, GEOM)
    assert len(d) == 12
    assert d[-1] == 187.5


@given(hl_vectors)
def test_segments_always_close(hl):
    assert segment_distances(TransitionStrategy(tuple(hl)), GEOM).sum() == 3000.0


@given(hl_vectors, st.integers(0, 22))
def test_effective_length_monotone(hl, i):
    s = TransitionStrategy(tuple(hl))
    if hl[i] < 3:
        bumped = list(hl)
        bumped[i] += 1
        assert effective_length(TransitionStrategy(tuple(bumped))) <= effective_length(s)


def test_rotation():
    abc = RiderOrder.parse("ABC")
    assert rotate(abc) == RiderOrder.parse("BCA")
    assert rotate(RiderOrder.parse("BCA")) == RiderOrder.parse("CAB")
    for order in ALL_ORDERS:
        assert rotate(rotate(rotate(order))) == order


def test_order_validation():
    assert len(set(ALL_ORDERS)) == 6
    with pytest.raises(ValueError):
        RiderOrder.parse("AAB")


def test_standard_strategy():
    s = standard_strategy()
    assert len(s) == 23
    assert s.effective_length == 12
    assert sum(s.hl[:12]) == 23
    assert s.live == (1,) + (2,) * 11


def test_random_strategy_valid():
    rng = np.random.default_rng(3)
    for _ in range(50):
        s = random_strategy(rng)
        assert len(s) == 23 and all(1 <= h <= 3 for h in s.hl)
