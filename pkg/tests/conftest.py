import numpy as np
import pytest

from driversa.belief import BeliefObject
from driversa.scene import (
    AutomationState,
    EgoVehicle,
    RoadFrame,
    SceneFrame,
    Timepoint,
    TrafficVehicle,
)

DT = 1.0 / 30.0


@pytest.fixture
def road():
    return RoadFrame(origin=(0.0, 0.0, 0.0), heading=(1.0, 0.0, 0.0), lane_width=3.5,
                     drivable_lanes=frozenset({-1, -2}), construction_site_s=800.0)


@pytest.fixture
def road3():
    return RoadFrame(origin=(0.0, 0.0, 0.0), heading=(1.0, 0.0, 0.0), lane_width=3.5,
                     drivable_lanes=frozenset({-1, -2, -3}))


def bo(oid, s, lane=-1, lat=None, vs=30.0, vlat=0.0, length=4.5, tick=0,
       lane_width=3.5, cov=None, fixation_ms=0):
    """Belief object at road coordinates; lateral defaults to the lane center."""
    if lat is None:
        lat = np.copysign((abs(lane) - 0.5) * lane_width, lane)
    return BeliefObject(
        id=oid,
        state=np.array([s, lat, vs, vlat], dtype=float),
        covariance=np.zeros((4, 4)) if cov is None else cov,
        believed_lane=lane,
        dimension=(length, 1.8, 1.5),
        last_fixation_tick=Timepoint.at(tick, DT),
        last_fixation_duration=fixation_ms,
    )


def tv(vid, s, lane=-1, speed=30.0, fix=1.0, fix_ms=0, length=4.5, lane_width=3.5,
       vtype="car"):
    """Traffic vehicle on a straight +x road at its lane center."""
    lat = np.copysign((abs(lane) - 0.5) * lane_width, lane)
    return TrafficVehicle(
        id=vid, type=vtype,
        position=(s, lat, 0.0),
        orientation=(0.0, 0.0, 0.0),
        velocity=(speed, 0.0, 0.0),
        acceleration=(0.0, 0.0, 0.0),
        dimension=(length, 1.8, 1.5),
        lane=lane,
        fixation_probability=fix,
        fixation_time=fix_ms,
    )


def tiny_scenario_data():
    """Two seconds that touch every event: signal, take-over, lane change."""
    return {
        "meta": {"name": "tiny", "description": "two second smoke scenario"},
        "duration": 2.0,
        "tick_rate": 30,
        "road": {"lane_width": 3.5, "drivable_lanes": [-1, -2],
                 "construction_site_s": 200.0},
        "ego": {"id": "ego", "start_s": 0.0, "phases": [
            {"from": 0.0, "to": 1.2, "lane": -2, "speed": 20.0, "automation": True},
            {"from": 1.2, "to": 1.5, "lane": -2, "speed": 20.0, "automation": False},
            {"from": 1.5, "to": 2.0, "lane": -1, "speed": 20.0, "automation": False},
        ]},
        "traffic": [
            {"id": "v1", "type": "car", "segments": [
                {"from": 0.0, "to": 2.0, "lane": -1, "speed": 20.0, "start_s": 40.0}]},
            {"id": "v2", "type": "car", "segments": [
                {"from": 0.0, "to": 2.0, "lane": -1, "speed": 20.0, "start_s": -30.0}]},
        ],
        "automation": {"takeover_request_at": 0.5, "criticality_level": 2,
                       "takeover_reason": "lane closed"},
        "gaze": {"mode": "full_attention"},
    }


def tiny_scenario():
    from driversa.simulator import scenario_from_dict
    return scenario_from_dict(tiny_scenario_data(), "<tiny>")


def make_frame(road, tick, ego_s=0.0, ego_lane=-2, ego_speed=30.0, traffic=(),
               automation_on=True, takeover_request=False, time_until=0.0,
               criticality=0):
    lat = np.copysign((abs(ego_lane) - 0.5) * road.lane_width, ego_lane)
    ego = EgoVehicle(
        id="ego", type="car",
        position=(ego_s, lat, 0.0),
        orientation=(0.0, 0.0, 0.0),
        velocity=(ego_speed, 0.0, 0.0),
        indicator_left=False, indicator_right=False,
        acceleration=0.0,
        current_speed_limit=120,
        current_lane=ego_lane,
        dimension=(4.8, 1.9, 1.4),
    )
    return SceneFrame(
        t=Timepoint.at(tick, DT),
        ego=ego,
        automation=AutomationState(
            takeover_request=takeover_request,
            time_until_odd_boundary=time_until,
            criticality_level=criticality,
            takeover_reason="lane closed" if takeover_request else "",
            ego_automation_state=automation_on,
        ),
        traffic=tuple(traffic),
        road=road,
    )
