"""Comparison of the believed situation against the actual scene.

Four divergence kinds: a vehicle in sensor range the driver has never
admitted (missing_object), a believed position too far from the actual one
(position_divergence), a believed lane that is wrong (lane_divergence), and
an active take-over request the driver has not interpreted yet
(missed_takeover_signal). Each divergence gets a relevance from the actual
configuration, a magnitude from the size of the error, and a staleness from
how long the belief has gone without a fixation; the three fold into one
priority used to rank what to cue first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .belief import MentalBeliefState
from .domain import term
from .interpretation import InterpretationModel, ProjectionModel
from .scene import (
    SceneFrame,
    TrafficVehicle,
    lane_adjacent,
    longitudinal_coordinate,
    to_road_plane,
)

MISSING_OBJECT = "missing_object"
POSITION_DIVERGENCE = "position_divergence"
LANE_DIVERGENCE = "lane_divergence"
MISSED_TAKEOVER_SIGNAL = "missed_takeover_signal"

# rank used to break priority ties, most alarming first
_KIND_RANK = {
    MISSED_TAKEOVER_SIGNAL: 0,
    MISSING_OBJECT: 1,
    LANE_DIVERGENCE: 2,
    POSITION_DIVERGENCE: 3,
}

_MAGNITUDE_CAP = 3.0   # magnitudes saturate here in the priority mix
_STALENESS_CAP = 10.0  # s


@dataclass(frozen=True)
class ComparisonParams:
    position_tolerance: float = 2.0  # m of believed drift that counts as wrong
    relevance_range: float = 50.0    # m around the ego where nearby lanes dominate
    sensor_range: float = 150.0      # m, matches the awareness window

    def __post_init__(self):
        if min(self.position_tolerance, self.relevance_range, self.sensor_range) <= 0:
            raise ValueError("comparison distances must be > 0")


@dataclass(frozen=True)
class Divergence:
    kind: str
    object_id: str      # empty for the take-over signal
    magnitude: float    # error size in kind-specific units
    staleness: float    # s since the belief was last refreshed
    relevance: float    # 0..1
    detail: str
    priority: float = 0.0

    def sort_key(self):
        return (-self.priority, _KIND_RANK[self.kind], self.object_id)


@dataclass(frozen=True)
class DivergenceReport:
    t_tick: int
    divergences: tuple[Divergence, ...]  # highest priority first

    @property
    def top(self) -> Divergence | None:
        return self.divergences[0] if self.divergences else None


def _projection_anchor_ids(pm: ProjectionModel | None) -> frozenset[str]:
    if pm is None:
        return frozenset()
    ids: set[str] = set()
    for ev in pm.events:
        ids.update(ev.location.label.split(":")[1:])
    return frozenset(ids)


def relevance(vehicle: TrafficVehicle, frame: SceneFrame,
              anchors: frozenset[str], params: ComparisonParams) -> float:
    """How much the vehicle matters right now, from the actual configuration.

    Anchors of a projected maneuver always matter fully, as does anything on
    the ego's or an adjacent lane close by; the rest decays linearly with
    longitudinal distance out to the sensor range.
    """
    if vehicle.id in anchors:
        return 1.0
    ego_s = longitudinal_coordinate(frame.ego.position, frame.road)
    s_dist = abs(longitudinal_coordinate(vehicle.position, frame.road) - ego_s)
    near_lane = vehicle.lane == frame.ego.current_lane or lane_adjacent(
        vehicle.lane, frame.ego.current_lane)
    if near_lane and s_dist <= params.relevance_range:
        return 1.0
    return max(0.0, 1.0 - s_dist / params.sensor_range)


def _priority(d: Divergence) -> float:
    return (
        0.5 * d.relevance
        + 0.3 * min(d.magnitude, _MAGNITUDE_CAP) / _MAGNITUDE_CAP
        + 0.2 * min(d.staleness, _STALENESS_CAP) / _STALENESS_CAP
    )


def attach_priorities(divergences) -> tuple[Divergence, ...]:
    return tuple(replace(d, priority=_priority(d)) for d in divergences)


def prioritize(divergences) -> tuple[Divergence, ...]:
    """Descending priority; ties break on kind rank, then object id."""
    return tuple(sorted(attach_priorities(divergences), key=Divergence.sort_key))


def compute_divergences(frame: SceneFrame, mbs: MentalBeliefState,
                        im: InterpretationModel, pm: ProjectionModel | None,
                        params: ComparisonParams = ComparisonParams(),
                        ) -> tuple[Divergence, ...]:
    """Raw divergence list for one tick, in frame order, priorities unset."""
    anchors = _projection_anchor_ids(pm)
    out: list[Divergence] = []
    now = frame.t.sim_time
    ego_s = longitudinal_coordinate(frame.ego.position, frame.road)

    for vehicle in frame.traffic:
        s, lat, _, _ = to_road_plane(vehicle.position, vehicle.velocity, frame.road)
        rel = relevance(vehicle, frame, anchors, params)
        believed = mbs.objects.get(vehicle.id)
        if believed is None:
            if math.hypot(s - ego_s, lat) <= params.sensor_range:
                out.append(Divergence(
                    kind=MISSING_OBJECT, object_id=vehicle.id,
                    magnitude=1.0, staleness=now, relevance=rel,
                    detail=f"{vehicle.id} is in sensor range but not believed",
                ))
            continue
        stale = now - believed.last_fixation_tick.sim_time
        drift = math.hypot(believed.s - s, believed.lateral - lat)
        if drift > params.position_tolerance:
            out.append(Divergence(
                kind=POSITION_DIVERGENCE, object_id=vehicle.id,
                magnitude=drift / params.position_tolerance, staleness=stale,
                relevance=rel,
                detail=f"{vehicle.id} believed {drift:.1f} m from its actual position",
            ))
        if believed.believed_lane != vehicle.lane:
            out.append(Divergence(
                kind=LANE_DIVERGENCE, object_id=vehicle.id,
                magnitude=1.0, staleness=stale, relevance=rel,
                detail=(f"{vehicle.id} believed on lane {believed.believed_lane}, "
                        f"actually on {vehicle.lane}"),
            ))

    auto = frame.automation
    started = any(occ.event.name == "audio_signal_start" for occ in im.occurred)
    if auto.takeover_request and not im.fluents.get(term("audio_signal"), False) and not started:
        out.append(Divergence(
            kind=MISSED_TAKEOVER_SIGNAL, object_id="",
            magnitude=float(auto.criticality_level) if auto.criticality_level > 0 else 1.0,
            staleness=0.0, relevance=1.0,
            detail="take-over request active but not part of the interpretation",
        ))
    return tuple(out)


def build_divergence_report(frame: SceneFrame, mbs: MentalBeliefState,
                            im: InterpretationModel, pm: ProjectionModel | None,
                            params: ComparisonParams = ComparisonParams(),
                            ) -> DivergenceReport:
    raw = compute_divergences(frame, mbs, im, pm, params)
    return DivergenceReport(t_tick=frame.t.tick, divergences=prioritize(raw))
