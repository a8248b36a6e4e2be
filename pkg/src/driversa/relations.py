"""Qualitative spatial relations between believed vehicles.

Everything here is computed from belief objects, never from raw scene frames:
relations describe what the driver thinks the configuration is. Longitudinal
relations compare road-aligned centers against the half-length sum, lane
relations compare signed lane ids on the same side of the road, ordering
counts believed vehicles in between, and gaps/free locations turn the
per-lane occupancy into bumper-to-bumper intervals a vehicle could move into.
"""

from __future__ import annotations

from dataclasses import dataclass

from .belief import BeliefObject
from .errors import UnsupportedSideError
from .scene import check_lane

AHEAD = "ahead"
BEHIND = "behind"
OVERLAPPING = "overlapping"

SAME_LANE = "same"
LEFT_OF = "left"
RIGHT_OF = "right"


@dataclass(frozen=True)
class RelLong:
    kind: str        # ahead | behind | overlapping, object relative to ego
    delta_s: float   # center distance, object minus ego (m)
    gap: float       # bumper distance, clamped at zero (m)


@dataclass(frozen=True)
class RelLane:
    kind: str            # same | left | right, object relative to ego
    lane_distance: int   # lane count between the two


def rel_long(ego: BeliefObject, obj: BeliefObject) -> RelLong:
    delta = obj.s - ego.s
    half_sum = (ego.length + obj.length) / 2.0
    if abs(delta) <= half_sum:
        kind = OVERLAPPING
    elif delta > 0:
        kind = AHEAD
    else:
        kind = BEHIND
    return RelLong(kind=kind, delta_s=delta, gap=max(0.0, abs(delta) - half_sum))


def rel_lane(ego_lane: int, obj_lane: int) -> RelLane:
    """Lane relation on signed ids; ids increase toward the left edge.

    Opposite-side pairs have no left/right reading in this road model, so
    they are rejected rather than guessed.
    """
    check_lane(ego_lane)
    check_lane(obj_lane)
    if (ego_lane > 0) != (obj_lane > 0):
        raise UnsupportedSideError(
            f"lanes {ego_lane} and {obj_lane} are on opposite sides of the road"
        )
    if obj_lane == ego_lane:
        kind = SAME_LANE
    elif obj_lane > ego_lane:
        kind = LEFT_OF
    else:
        kind = RIGHT_OF
    return RelLane(kind=kind, lane_distance=abs(obj_lane - ego_lane))


def rel_order(ego: BeliefObject, obj: BeliefObject, believed) -> int:
    """1-based rank of obj on its lane, counted outward from the ego.

    Rank n+1 means n other believed vehicles sit on obj's lane strictly
    between the two (by road-aligned center).
    """
    lo, hi = sorted((ego.s, obj.s))
    between = sum(
        1
        for v in believed
        if v.id not in (ego.id, obj.id)
        and v.believed_lane == obj.believed_lane
        and lo < v.s < hi
    )
    return between + 1


@dataclass(frozen=True)
class GapArtifact:
    lane: int
    rear_id: str
    front_id: str
    size: float   # bumper-to-bumper (m), zero when the pair overlaps
    s_min: float  # front bumper of the rear vehicle
    s_max: float  # rear bumper of the front vehicle


def detect_gaps(traffic) -> tuple[GapArtifact, ...]:
    """Gaps between consecutive believed vehicles sharing a lane.

    The ego is not part of the traffic picture here; callers pass believed
    traffic only. Output is sorted by (lane, s_min).
    """
    by_lane: dict[int, list[BeliefObject]] = {}
    for v in traffic:
        by_lane.setdefault(v.believed_lane, []).append(v)
    gaps: list[GapArtifact] = []
    for lane in sorted(by_lane):
        row = sorted(by_lane[lane], key=lambda v: (v.s, v.id))
        for rear, front in zip(row, row[1:]):
            s_min = rear.s + rear.length / 2.0
            s_max = front.s - front.length / 2.0
            gaps.append(
                GapArtifact(
                    lane=lane,
                    rear_id=rear.id,
                    front_id=front.id,
                    size=max(0.0, s_max - s_min),
                    s_min=s_min,
                    s_max=s_max,
                )
            )
    # overlapping bodies can put a later pair's rear bumper behind an
    # earlier one's, so pair order is not automatically s_min order
    return tuple(sorted(gaps, key=lambda g: (g.lane, g.s_min, g.rear_id)))


EMPTY_LANE = "empty_lane"
GAP = "gap"
AHEAD_OF = "ahead_of"
BEHIND_VEHICLE = "behind"


@dataclass(frozen=True)
class FreeLocation:
    kind: str    # empty_lane | gap | ahead_of | behind
    lane: int
    s_min: float
    s_max: float
    label: str

    @property
    def length(self) -> float:
        return self.s_max - self.s_min

    @property
    def midpoint(self) -> float:
        return (self.s_min + self.s_max) / 2.0

    def contains(self, s: float) -> bool:
        return self.s_min <= s <= self.s_max


def free_locations(occupants, lane: int, anchor_s: float, min_gap: float,
                   sensor_range: float) -> tuple[FreeLocation, ...]:
    """Free intervals on one lane, windowed around the anchor position.

    Occupants not on the requested lane are ignored, so callers can pass the
    full belief set. An unoccupied lane yields a single interval spanning the
    whole window; otherwise the space splits into behind the rearmost, the
    gaps in between, and ahead of the frontmost. Intervals shorter than
    min_gap are not usable and are dropped. Sorted by s_min.
    """
    check_lane(lane)
    lo = anchor_s - sensor_range
    hi = anchor_s + sensor_range
    bodies = sorted(
        ((v.s - v.length / 2.0, v.s + v.length / 2.0, v.id)
         for v in occupants if v.believed_lane == lane),
        key=lambda b: (b[0], b[2]),
    )
    # believed bodies may overlap (beliefs drift), so merge them into
    # occupied runs; a free span is bounded by run edges, never a body
    runs: list[list] = []  # [lo, hi, rear edge id, front edge id]
    for b_lo, b_hi, vid in bodies:
        if runs and b_lo <= runs[-1][1]:
            if b_hi > runs[-1][1]:
                runs[-1][1] = b_hi
                runs[-1][3] = vid
        else:
            runs.append([b_lo, b_hi, vid, vid])

    spans: list[FreeLocation] = []
    if not runs:
        spans.append(FreeLocation(EMPTY_LANE, lane, lo, hi, EMPTY_LANE))
    else:
        spans.append(
            FreeLocation(BEHIND_VEHICLE, lane, lo, runs[0][0],
                         f"{BEHIND_VEHICLE}:{runs[0][2]}")
        )
        for rear, front in zip(runs, runs[1:]):
            spans.append(
                FreeLocation(GAP, lane, rear[1], front[0],
                             f"{GAP}:{rear[3]}:{front[2]}")
            )
        spans.append(
            FreeLocation(AHEAD_OF, lane, runs[-1][1], hi,
                         f"{AHEAD_OF}:{runs[-1][3]}")
        )
    usable = [loc for loc in spans if loc.length >= min_gap]
    return tuple(sorted(usable, key=lambda loc: loc.s_min))
