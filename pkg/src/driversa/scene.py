"""Ground-truth scene data model: road frame, vehicles, automation state.

Lane ids follow OpenDRIVE-style signed indexing: 0 is the road middle and is
never drivable, negative ids are the ego's driving side (right-hand traffic),
and within one side id + 1 is one lane to the left. All geometry lives on a
straight road: the longitudinal coordinate s is a linear projection onto the
road heading, the lateral coordinate is the left-positive offset from the
road middle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidLaneError

Vec3 = tuple[float, float, float]

LaneId = int  # non-zero signed integer


def check_lane(lane: int, where: str = "lane") -> int:
    if lane == 0:
        raise InvalidLaneError(f"{where}: lane id 0 is the road middle, not drivable")
    return int(lane)


def coerce_lane(value: float, where: str = "lane") -> int:
    """Round a sensed float lane index to the nearest non-zero integer id.

    Values farther than 0.25 from an integer are rejected: the indexing is
    discrete and anything in between indicates a broken feed.
    """
    nearest = round(value)
    if abs(value - nearest) > 0.25:
        raise InvalidLaneError(f"{where}: {value!r} is not within 0.25 of an integer lane id")
    return check_lane(int(nearest), where)


def lane_adjacent(a: LaneId, b: LaneId) -> bool:
    """True iff a and b are neighbouring lanes on the same driving side.

    Adjacency never crosses the road middle (lane 0): -1 and 1 are not
    adjacent even though their ids differ by 2 with nothing between.
    """
    check_lane(a, "a")
    check_lane(b, "b")
    return abs(a - b) == 1 and (a > 0) == (b > 0)


@dataclass(frozen=True)
class Timepoint:
    tick: int       # strictly increases by 1 per engine step
    sim_time: float  # seconds, tick * dt

    def __post_init__(self):
        if self.tick < 0:
            raise ValueError(f"tick must be non-negative, got {self.tick}")
        if self.sim_time < 0:
            raise ValueError(f"sim_time must be non-negative, got {self.sim_time}")

    @classmethod
    def at(cls, tick: int, dt: float) -> "Timepoint":
        return cls(tick=tick, sim_time=tick * dt)


@dataclass(frozen=True)
class RoadFrame:
    origin: Vec3
    heading: Vec3                  # unit vector along the road
    lane_width: float              # m
    drivable_lanes: frozenset[int]
    construction_site_s: float | None = None  # where the closing lane ends

    def __post_init__(self):
        h = np.asarray(self.heading, dtype=float)
        if abs(np.linalg.norm(h) - 1.0) > 1e-9:
            raise ValueError(f"heading must have unit norm, got {self.heading}")
        if self.lane_width <= 0:
            raise ValueError("lane_width must be > 0")
        if not self.drivable_lanes:
            raise ValueError("drivable_lanes must be non-empty")
        for lane in self.drivable_lanes:
            check_lane(lane, "drivable_lanes")
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        object.__setattr__(self, "heading", tuple(float(v) for v in self.heading))
        object.__setattr__(self, "drivable_lanes", frozenset(int(l) for l in self.drivable_lanes))

    @property
    def left_vector(self) -> Vec3:
        # up x heading: lateral axis, positive to the left of travel
        hx, hy, _ = self.heading
        return (-hy, hx, 0.0)

    def lane_center_lateral(self, lane: LaneId) -> float:
        check_lane(lane)
        return math.copysign((abs(lane) - 0.5) * self.lane_width, lane)

    def lateral_to_lane(self, lateral: float) -> LaneId:
        """Lane id containing a lateral offset; the middle itself maps to +1."""
        k = math.floor(lateral / self.lane_width)
        return k + 1 if lateral >= 0 else k


def longitudinal_coordinate(position, road: RoadFrame) -> float:
    """Longitudinal road coordinate s of a world position (straight road)."""
    p = np.asarray(position, dtype=float)
    o = np.asarray(road.origin, dtype=float)
    h = np.asarray(road.heading, dtype=float)
    return float((p - o) @ h)


def lateral_coordinate(position, road: RoadFrame) -> float:
    """Left-positive lateral offset of a world position from the road middle."""
    p = np.asarray(position, dtype=float)
    o = np.asarray(road.origin, dtype=float)
    left = np.asarray(road.left_vector, dtype=float)
    return float((p - o) @ left)


def to_road_plane(position, velocity, road: RoadFrame) -> tuple[float, float, float, float]:
    """Project a world position/velocity pair into (s, lat, vs, vlat)."""
    h = np.asarray(road.heading, dtype=float)
    left = np.asarray(road.left_vector, dtype=float)
    v = np.asarray(velocity, dtype=float)
    return (
        longitudinal_coordinate(position, road),
        lateral_coordinate(position, road),
        float(v @ h),
        float(v @ left),
    )


@dataclass(frozen=True)
class TrafficVehicle:
    id: str
    type: str
    position: Vec3        # m, world frame
    orientation: Vec3     # rad
    velocity: Vec3        # m/s
    acceleration: Vec3    # m/s^2
    dimension: Vec3       # m, length x width x height
    lane: LaneId
    fixation_probability: float = 0.0
    fixation_time: int = 0  # ms, current consecutive fixation

    def __post_init__(self):
        check_lane(self.lane, f"traffic[{self.id}].lane")
        if any(d <= 0 for d in self.dimension):
            raise ValueError(f"traffic[{self.id}].dimension components must be > 0")
        if not 0.0 <= self.fixation_probability <= 1.0:
            raise ValueError(f"traffic[{self.id}].fixation_probability must be in [0,1]")
        if self.fixation_time < 0:
            raise ValueError(f"traffic[{self.id}].fixation_time must be non-negative")

    @property
    def length(self) -> float:
        return self.dimension[0]


@dataclass(frozen=True)
class EgoVehicle:
    id: str
    type: str
    position: Vec3
    orientation: Vec3
    velocity: Vec3
    indicator_left: bool
    indicator_right: bool
    acceleration: float       # m/s^2, longitudinal
    current_speed_limit: int  # km/h
    current_lane: LaneId
    dimension: Vec3

    def __post_init__(self):
        check_lane(self.current_lane, "ego.current_lane")
        if any(d <= 0 for d in self.dimension):
            raise ValueError("ego.dimension components must be > 0")

    @property
    def length(self) -> float:
        return self.dimension[0]


@dataclass(frozen=True)
class AutomationState:
    takeover_request: bool
    time_until_odd_boundary: float  # s
    criticality_level: int
    takeover_reason: str
    ego_automation_state: bool

    def __post_init__(self):
        if self.takeover_request and self.time_until_odd_boundary < 0:
            raise ValueError("time_until_odd_boundary must be >= 0 while a take-over is requested")


@dataclass(frozen=True)
class SceneFrame:
    t: Timepoint
    ego: EgoVehicle
    automation: AutomationState
    traffic: tuple[TrafficVehicle, ...]
    road: RoadFrame = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "traffic", tuple(self.traffic))
        ids = [v.id for v in self.traffic]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate traffic ids: {dupes}")
        if self.ego.id in ids:
            raise ValueError(f"traffic id collides with ego id {self.ego.id!r}")
        if self.ego.current_lane not in self.road.drivable_lanes:
            raise InvalidLaneError(
                f"ego.current_lane {self.ego.current_lane} not in drivable lanes "
                f"{sorted(self.road.drivable_lanes)}"
            )

    def vehicle(self, vid: str) -> TrafficVehicle:
        for v in self.traffic:
            if v.id == vid:
                return v
        raise KeyError(vid)
