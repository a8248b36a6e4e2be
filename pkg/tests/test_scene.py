import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from driversa.errors import InvalidLaneError
from driversa.scene import (
    RoadFrame,
    SceneFrame,
    Timepoint,
    TrafficVehicle,
    check_lane,
    coerce_lane,
    lane_adjacent,
    lateral_coordinate,
    longitudinal_coordinate,
    to_road_plane,
)
from conftest import make_frame, tv


def test_timepoint_at():
    t = Timepoint.at(300, 1.0 / 30.0)
    assert t.tick == 300
    assert t.sim_time == pytest.approx(10.0)


def test_timepoint_rejects_negative_tick():
    with pytest.raises(ValueError):
        Timepoint(tick=-1, sim_time=0.0)


def test_longitudinal_coordinate_oracle():
    # hand value: s = h . (p - o) = 0.6*6 + 0.8*8 = 10
    road = RoadFrame(origin=(0, 0, 0), heading=(0.6, 0.8, 0.0), lane_width=3.5,
                     drivable_lanes=frozenset({-1}))
    assert longitudinal_coordinate((6.0, 8.0, 0.0), road) == pytest.approx(10.0)


def test_lateral_coordinate_left_positive(road):
    # heading +x, so left is +y
    assert lateral_coordinate((5.0, 2.0, 0.0), road) == pytest.approx(2.0)
    assert lateral_coordinate((5.0, -1.75, 0.0), road) == pytest.approx(-1.75)


def test_to_road_plane_decomposes_velocity(road):
    s, lat, vs, vlat = to_road_plane((10.0, -1.75, 0.0), (30.0, 1.5, 0.0), road)
    assert (s, lat) == (pytest.approx(10.0), pytest.approx(-1.75))
    assert (vs, vlat) == (pytest.approx(30.0), pytest.approx(1.5))


def test_road_rejects_non_unit_heading():
    with pytest.raises(ValueError):
        RoadFrame(origin=(0, 0, 0), heading=(1.0, 1.0, 0.0), lane_width=3.5,
                  drivable_lanes=frozenset({-1}))


def test_road_rejects_lane_zero():
    with pytest.raises(InvalidLaneError):
        RoadFrame(origin=(0, 0, 0), heading=(1, 0, 0), lane_width=3.5,
                  drivable_lanes=frozenset({0, -1}))


def test_lane_center_lateral_oracle(road):
    # lane n center sits (|n| - 0.5) widths from the middle, sign of n
    assert road.lane_center_lateral(-1) == pytest.approx(-1.75)
    assert road.lane_center_lateral(-2) == pytest.approx(-5.25)
    assert road.lane_center_lateral(1) == pytest.approx(1.75)


def test_lateral_to_lane_boundaries(road):
    assert road.lateral_to_lane(-1.75) == -1
    assert road.lateral_to_lane(-3.4999) == -1
    assert road.lateral_to_lane(-3.5) == -1  # boundary belongs to the outer edge
    assert road.lateral_to_lane(-3.5001) == -2
    assert road.lateral_to_lane(0.0) == 1
    assert road.lateral_to_lane(3.6) == 2


@given(lane=st.integers(min_value=-6, max_value=6).filter(lambda n: n != 0))
def test_lane_center_roundtrip(lane):
    road = RoadFrame(origin=(0, 0, 0), heading=(1, 0, 0), lane_width=3.5,
                     drivable_lanes=frozenset({-1}))
    assert road.lateral_to_lane(road.lane_center_lateral(lane)) == lane


@given(lat=st.floats(min_value=-30.0, max_value=30.0, allow_nan=False))
def test_lateral_to_lane_never_zero(lat):
    road = RoadFrame(origin=(0, 0, 0), heading=(1, 0, 0), lane_width=3.5,
                     drivable_lanes=frozenset({-1}))
    assert road.lateral_to_lane(lat) != 0


def test_lane_adjacent_same_side_only():
    assert lane_adjacent(-1, -2)
    assert lane_adjacent(2, 3)
    assert not lane_adjacent(-1, -3)
    assert not lane_adjacent(-1, 1)  # across the road middle
    assert not lane_adjacent(-1, -1)


def test_check_lane_rejects_zero():
    with pytest.raises(InvalidLaneError):
        check_lane(0)


def test_coerce_lane():
    assert coerce_lane(-1.1) == -1
    assert coerce_lane(2.2) == 2
    with pytest.raises(InvalidLaneError):
        coerce_lane(-1.3)  # too far from any lane id
    with pytest.raises(InvalidLaneError):
        coerce_lane(0.1)


def test_traffic_vehicle_validates_fixation():
    with pytest.raises(ValueError):
        tv("v1", 0.0, fix=1.5)
    with pytest.raises(ValueError):
        tv("v1", 0.0, fix=-0.1)


def test_vehicle_length_is_first_dimension():
    v = tv("v1", 0.0, length=12.0)
    assert v.length == 12.0


def test_frame_rejects_duplicate_ids(road):
    with pytest.raises(ValueError):
        make_frame(road, 0, traffic=[tv("v1", 10.0), tv("v1", 20.0)])


def test_frame_rejects_ego_id_collision(road):
    with pytest.raises(ValueError):
        make_frame(road, 0, traffic=[tv("ego", 10.0)])


def test_frame_rejects_ego_off_drivable_lanes(road):
    with pytest.raises(InvalidLaneError):
        make_frame(road, 0, ego_lane=-3)


def test_frame_lookup(road):
    frame = make_frame(road, 0, traffic=[tv("v1", 10.0)])
    assert frame.vehicle("v1").id == "v1"
    with pytest.raises(KeyError):
        frame.vehicle("v9")


def test_automation_state_validation():
    from driversa.scene import AutomationState
    with pytest.raises(ValueError):
        AutomationState(takeover_request=True, time_until_odd_boundary=-1.0,
                        criticality_level=1, takeover_reason="x",
                        ego_automation_state=True)


def test_non_axis_aligned_road_roundtrip():
    # oblique unit heading; projections must still be exact
    road = RoadFrame(origin=(100.0, -50.0, 0.0), heading=(0.6, 0.8, 0.0),
                     lane_width=3.0, drivable_lanes=frozenset({-1, -2}))
    h = np.array([0.6, 0.8, 0.0])
    left = np.array(road.left_vector)
    p = np.array(road.origin) + 42.0 * h + (-4.5) * left
    assert longitudinal_coordinate(tuple(p), road) == pytest.approx(42.0)
    assert lateral_coordinate(tuple(p), road) == pytest.approx(-4.5)
    assert math.isclose(np.dot(h, left), 0.0, abs_tol=1e-12)
