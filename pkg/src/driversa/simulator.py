"""Deterministic scenario playback: scripted vehicles, automation, and gaze.

A scenario is a JSON document (`.scenario`) with sections road / ego /
traffic / automation / gaze / meta. Motion is piecewise constant-velocity:
every ego phase and traffic segment integrates exactly from its own start
position, so frame content is a pure function of the tick and never
accumulates float error. Lane changes happen instantly at segment
boundaries. A traffic vehicle exists only while some segment covers the
current time; outside its segments it is not part of the frame.

Gaze comes in four modes. `full_attention` fixates everything, `none`
fixates nothing, `samples` plays back scripted gaze directions (a raw
3-vector or `look_at` a vehicle id), and `interactive` expects directions to
be injected from outside per tick. Fixation probability falls off as a
Gaussian over the visual angle between gaze ray and vehicle center; the
angular spread folds the assumed tracker accuracy into the attention width.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import InvalidGazeError, ScenarioError
from .scene import (
    AutomationState,
    EgoVehicle,
    RoadFrame,
    SceneFrame,
    Timepoint,
    TrafficVehicle,
    check_lane,
)

GAZE_NONE = "none"
GAZE_FULL_ATTENTION = "full_attention"
GAZE_SAMPLES = "samples"
GAZE_INTERACTIVE = "interactive"
GAZE_MODES = (GAZE_NONE, GAZE_FULL_ATTENTION, GAZE_SAMPLES, GAZE_INTERACTIVE)


@dataclass(frozen=True)
class GazeModelParams:
    attention_sigma_deg: float = 2.0   # angular spread of covert attention
    tracker_accuracy_deg: float = 0.6  # reported accuracy of the eye tracker
    fixation_threshold: float = 0.5    # probability above which time accrues

    def __post_init__(self):
        if self.attention_sigma_deg <= 0 or self.tracker_accuracy_deg < 0:
            raise ValueError("gaze model angles must be positive")

    @property
    def sigma_deg(self) -> float:
        # tracker error widens the effective attention spread
        return math.hypot(self.attention_sigma_deg, self.tracker_accuracy_deg)


def fixation_probability(gaze_direction, eye_position, target_position,
                         params: GazeModelParams = GazeModelParams()) -> float:
    """Gaussian falloff over the visual angle between gaze ray and target."""
    g = np.asarray(gaze_direction, dtype=float)
    norm = np.linalg.norm(g)
    if norm < 1e-12:
        raise InvalidGazeError("gaze direction must not be the zero vector")
    to_target = np.asarray(target_position, dtype=float) - np.asarray(eye_position, dtype=float)
    dist = np.linalg.norm(to_target)
    if dist < 1e-9:
        return 1.0
    cosang = float(np.clip(np.dot(g / norm, to_target / dist), -1.0, 1.0))
    theta_deg = math.degrees(math.acos(cosang))
    return math.exp(-(theta_deg**2) / (2.0 * params.sigma_deg**2))


class GazeFixationModel:
    """Tracks consecutive fixation time per vehicle across ticks.

    Fixation time is the milliseconds a vehicle has stayed above the
    fixation threshold without interruption; one tick below resets it.
    """

    def __init__(self, dt: float, params: GazeModelParams = GazeModelParams()):
        self.dt = dt
        self.params = params
        self._ms: dict[str, float] = {}

    def update(self, probabilities: dict[str, float]) -> dict[str, int]:
        tick_ms = self.dt * 1000.0
        times: dict[str, int] = {}
        next_ms: dict[str, float] = {}
        for vid, p in probabilities.items():
            if p > self.params.fixation_threshold:
                next_ms[vid] = self._ms.get(vid, 0.0) + tick_ms
            else:
                next_ms[vid] = 0.0
            times[vid] = int(next_ms[vid])
        self._ms = next_ms
        return times


# --- scenario data model ----------------------------------------------------

@dataclass(frozen=True)
class MotionSegment:
    t_from: float
    t_to: float
    lane: int
    speed: float   # m/s along the road
    start_s: float  # road coordinate at t_from

    def s_at(self, sim_time: float) -> float:
        return self.start_s + self.speed * (sim_time - self.t_from)

    def covers(self, sim_time: float) -> bool:
        return self.t_from <= sim_time < self.t_to


@dataclass(frozen=True)
class EgoPhase(MotionSegment):
    automation: bool = True


@dataclass(frozen=True)
class TrafficSpec:
    id: str
    type: str
    dimension: tuple[float, float, float]
    segments: tuple[MotionSegment, ...]

    def segment_at(self, sim_time: float) -> MotionSegment | None:
        for seg in self.segments:
            if seg.covers(sim_time):
                return seg
        return None


@dataclass(frozen=True)
class EgoSpec:
    id: str
    dimension: tuple[float, float, float]
    phases: tuple[EgoPhase, ...]
    speed_limit: int  # km/h

    def phase_at(self, sim_time: float) -> EgoPhase:
        for ph in self.phases:
            if ph.covers(sim_time):
                return ph
        return self.phases[-1]  # closed upper end of the last phase


@dataclass(frozen=True)
class AutomationSpec:
    takeover_request_at: float | None  # s, None for never
    criticality_level: int
    takeover_reason: str


@dataclass(frozen=True)
class GazeSample:
    at: float  # s, active until the next sample
    direction: tuple[float, float, float] | None = None
    look_at: str | None = None


@dataclass(frozen=True)
class GazeSpec:
    mode: str
    samples: tuple[GazeSample, ...] = ()
    params: GazeModelParams = field(default_factory=GazeModelParams)

    def sample_at(self, sim_time: float) -> GazeSample | None:
        active = None
        for s in self.samples:
            if s.at <= sim_time:
                active = s
            else:
                break
        return active


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    road: RoadFrame
    duration: float  # s
    tick_rate: int   # Hz
    ego: EgoSpec
    traffic: tuple[TrafficSpec, ...]
    automation: AutomationSpec
    gaze: GazeSpec

    @property
    def dt(self) -> float:
        return 1.0 / self.tick_rate

    @property
    def tick_count(self) -> int:
        return round(self.duration * self.tick_rate)

    def traffic_spec(self, vid: str) -> TrafficSpec:
        for spec in self.traffic:
            if spec.id == vid:
                return spec
        raise KeyError(vid)


# --- loading ----------------------------------------------------------------

def _expect(data: dict, key: str, path: str):
    if key not in data:
        raise ScenarioError(path, f"missing key {key!r}")
    return data[key]


def _vec3(value, path: str) -> tuple[float, float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ScenarioError(path, "expected a list of 3 numbers")
    try:
        x, y, z = (float(v) for v in value)
    except (TypeError, ValueError):
        raise ScenarioError(path, "expected a list of 3 numbers") from None
    return (x, y, z)


def _number(value, path: str, minimum: float | None = None) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
        raise ScenarioError(path, f"expected a finite number, got {value!r}")
    if minimum is not None and value < minimum:
        raise ScenarioError(path, f"must be >= {minimum}, got {value}")
    return float(value)


def _lane(value, path: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ScenarioError(path, f"expected an integer lane id, got {value!r}")
    try:
        return check_lane(value)
    except Exception as exc:
        raise ScenarioError(path, str(exc)) from None


def _chain_segments(raw_segments, path: str, start_s: float | None,
                    make) -> tuple:
    """Build motion segments, carrying the position across contiguous ones."""
    if not raw_segments:
        raise ScenarioError(path, "needs at least one segment")
    segments = []
    prev = None
    for i, raw in enumerate(raw_segments):
        here = f"{path}[{i}]"
        t_from = _number(_expect(raw, "from", here), f"{here}.from", minimum=0.0)
        t_to = _number(_expect(raw, "to", here), f"{here}.to")
        if t_to <= t_from:
            raise ScenarioError(here, f"'to' ({t_to}) must be after 'from' ({t_from})")
        if prev is not None and t_from < prev.t_to:
            raise ScenarioError(here, "segments overlap the previous one")
        lane = _lane(_expect(raw, "lane", here), f"{here}.lane")
        speed = _number(_expect(raw, "speed", here), f"{here}.speed")
        if "start_s" in raw:
            seg_start = _number(raw["start_s"], f"{here}.start_s")
        elif prev is not None and prev.t_to == t_from:
            seg_start = prev.s_at(t_from)
        elif i == 0 and start_s is not None:
            seg_start = start_s
        else:
            raise ScenarioError(here, "needs start_s (no contiguous previous segment)")
        prev = make(t_from=t_from, t_to=t_to, lane=lane, speed=speed,
                    start_s=seg_start, raw=raw, path=here)
        segments.append(prev)
    return tuple(segments)


def scenario_from_dict(data: dict, path: str = "<scenario>") -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError(path, "top level must be an object")

    meta = data.get("meta", {})
    duration = _number(_expect(data, "duration", path), f"{path}.duration", minimum=1e-9)
    tick_rate_f = _number(_expect(data, "tick_rate", path), f"{path}.tick_rate", minimum=1.0)
    if tick_rate_f != int(tick_rate_f):
        raise ScenarioError(f"{path}.tick_rate", "must be an integer")
    tick_rate = int(tick_rate_f)

    r = _expect(data, "road", path)
    rpath = f"{path}.road"
    lanes = _expect(r, "drivable_lanes", rpath)
    if not isinstance(lanes, list) or not lanes:
        raise ScenarioError(f"{rpath}.drivable_lanes", "expected a non-empty list")
    drivable = frozenset(_lane(l, f"{rpath}.drivable_lanes") for l in lanes)
    site = r.get("construction_site_s")
    road = RoadFrame(
        origin=_vec3(r.get("origin", [0, 0, 0]), f"{rpath}.origin"),
        heading=_vec3(r.get("heading", [1, 0, 0]), f"{rpath}.heading"),
        lane_width=_number(_expect(r, "lane_width", rpath), f"{rpath}.lane_width", minimum=1e-9),
        drivable_lanes=drivable,
        construction_site_s=None if site is None else _number(site, f"{rpath}.construction_site_s"),
    )

    e = _expect(data, "ego", path)
    epath = f"{path}.ego"

    def make_phase(t_from, t_to, lane, speed, start_s, raw, path):
        if lane not in drivable:
            raise ScenarioError(f"{path}.lane", f"ego lane {lane} is not drivable")
        automation = raw.get("automation", True)
        if not isinstance(automation, bool):
            raise ScenarioError(f"{path}.automation", "expected true or false")
        return EgoPhase(t_from=t_from, t_to=t_to, lane=lane, speed=speed,
                        start_s=start_s, automation=automation)

    phases = _chain_segments(
        _expect(e, "phases", epath), f"{epath}.phases",
        start_s=_number(e.get("start_s", 0.0), f"{epath}.start_s"), make=make_phase,
    )
    if phases[0].t_from != 0.0 or phases[-1].t_to < duration:
        raise ScenarioError(f"{epath}.phases", f"must cover [0, {duration}] without holes")
    for a, b in zip(phases, phases[1:]):
        if b.t_from != a.t_to:
            raise ScenarioError(f"{epath}.phases", f"hole between t={a.t_to} and t={b.t_from}")
    ego = EgoSpec(
        id=str(e.get("id", "ego")),
        dimension=_vec3(e.get("dimension", [4.8, 1.9, 1.4]), f"{epath}.dimension"),
        phases=phases,
        speed_limit=int(_number(e.get("speed_limit", 120), f"{epath}.speed_limit", minimum=0)),
    )

    def make_segment(t_from, t_to, lane, speed, start_s, raw, path):
        return MotionSegment(t_from=t_from, t_to=t_to, lane=lane, speed=speed, start_s=start_s)

    traffic: list[TrafficSpec] = []
    seen: set[str] = {ego.id}
    for i, v in enumerate(data.get("traffic", [])):
        vpath = f"{path}.traffic[{i}]"
        vid = str(_expect(v, "id", vpath))
        if vid in seen:
            raise ScenarioError(vpath, f"duplicate vehicle id {vid!r}")
        seen.add(vid)
        traffic.append(TrafficSpec(
            id=vid,
            type=str(v.get("type", "car")),
            dimension=_vec3(v.get("dimension", [4.5, 1.8, 1.5]), f"{vpath}.dimension"),
            segments=_chain_segments(_expect(v, "segments", vpath), f"{vpath}.segments",
                                     start_s=None, make=make_segment),
        ))

    a = data.get("automation", {})
    apath = f"{path}.automation"
    tor_at = a.get("takeover_request_at")
    automation = AutomationSpec(
        takeover_request_at=None if tor_at is None else _number(tor_at, f"{apath}.takeover_request_at", minimum=0.0),
        criticality_level=int(_number(a.get("criticality_level", 0), f"{apath}.criticality_level", minimum=0)),
        takeover_reason=str(a.get("takeover_reason", "")),
    )

    g = data.get("gaze", {"mode": GAZE_FULL_ATTENTION})
    gpath = f"{path}.gaze"
    mode = _expect(g, "mode", gpath)
    if mode not in GAZE_MODES:
        raise ScenarioError(f"{gpath}.mode", f"unknown mode {mode!r}, expected one of {GAZE_MODES}")
    samples: list[GazeSample] = []
    if mode == GAZE_SAMPLES:
        raw_samples = _expect(g, "samples", gpath)
        if not isinstance(raw_samples, list) or not raw_samples:
            raise ScenarioError(f"{gpath}.samples", "expected a non-empty list")
        last_at = -1.0
        for i, s in enumerate(raw_samples):
            spath = f"{gpath}.samples[{i}]"
            at = _number(_expect(s, "at", spath), f"{spath}.at", minimum=0.0)
            if at <= last_at:
                raise ScenarioError(spath, "samples must be in strictly increasing time order")
            last_at = at
            if ("direction" in s) == ("look_at" in s):
                raise ScenarioError(spath, "needs exactly one of 'direction' or 'look_at'")
            if "direction" in s:
                samples.append(GazeSample(at=at, direction=_vec3(s["direction"], f"{spath}.direction")))
            else:
                target = str(s["look_at"])
                if target not in seen or target == ego.id:
                    raise ScenarioError(f"{spath}.look_at", f"unknown vehicle reference {target!r}")
                samples.append(GazeSample(at=at, look_at=target))
    gaze_params = GazeModelParams(
        attention_sigma_deg=_number(g.get("attention_sigma_deg", 2.0), f"{gpath}.attention_sigma_deg", minimum=1e-9),
        tracker_accuracy_deg=_number(g.get("tracker_accuracy_deg", 0.6), f"{gpath}.tracker_accuracy_deg", minimum=0.0),
    )

    return Scenario(
        name=str(meta.get("name", Path(path).stem)),
        description=str(meta.get("description", "")),
        road=road,
        duration=duration,
        tick_rate=tick_rate,
        ego=ego,
        traffic=tuple(traffic),
        automation=automation,
        gaze=GazeSpec(mode=mode, samples=tuple(samples), params=gaze_params),
    )


def load_scenario(path: str | Path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ScenarioError(str(p), f"cannot read scenario: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(str(p), f"invalid JSON: {exc}") from None
    return scenario_from_dict(data, str(p))


def bundled_scenario_path(name: str = "construction_site") -> Path:
    return Path(str(resources.files("driversa").joinpath("data", f"{name}.scenario")))


# --- frame synthesis ---------------------------------------------------------

def _world_position(road: RoadFrame, s: float, lane: int) -> np.ndarray:
    origin = np.asarray(road.origin, dtype=float)
    heading = np.asarray(road.heading, dtype=float)
    left = np.asarray(road.left_vector, dtype=float)
    return origin + heading * s + left * road.lane_center_lateral(lane)


def _active_traffic(scenario: Scenario, sim_time: float):
    for spec in scenario.traffic:
        seg = spec.segment_at(sim_time)
        if seg is not None:
            yield spec, seg


def gaze_probabilities(scenario: Scenario, sim_time: float, eye_position,
                       vehicles: dict[str, np.ndarray],
                       interactive_direction=None) -> dict[str, float]:
    """Fixation probability per active vehicle id for this tick."""
    gaze = scenario.gaze
    if gaze.mode == GAZE_FULL_ATTENTION:
        return {vid: 1.0 for vid in vehicles}
    if gaze.mode == GAZE_NONE:
        return {vid: 0.0 for vid in vehicles}
    if gaze.mode == GAZE_INTERACTIVE:
        if interactive_direction is None:
            return {vid: 0.0 for vid in vehicles}
        return {vid: fixation_probability(interactive_direction, eye_position, pos, gaze.params)
                for vid, pos in vehicles.items()}
    sample = gaze.sample_at(sim_time)
    if sample is None:
        return {vid: 0.0 for vid in vehicles}
    if sample.look_at is not None:
        target = vehicles.get(sample.look_at)
        if target is None:
            return {vid: 0.0 for vid in vehicles}  # looked-at vehicle not active
        direction = target - np.asarray(eye_position, dtype=float)
        if np.linalg.norm(direction) < 1e-9:
            return {vid: 1.0 if vid == sample.look_at else 0.0 for vid in vehicles}
    else:
        direction = sample.direction
    return {vid: fixation_probability(direction, eye_position, pos, gaze.params)
            for vid, pos in vehicles.items()}


def step_scenario(scenario: Scenario, tick: int,
                  fixation_model: GazeFixationModel | None = None,
                  interactive_direction=None,
                  automation_override: bool | None = None) -> SceneFrame:
    """Scene frame at one tick; pure in everything except fixation time.

    The fixation model is the only stateful piece (consecutive fixation time
    needs tick history); pass the same instance tick after tick. The
    automation override models the driver taking over out of script.
    """
    if not 0 <= tick < scenario.tick_count:
        raise ValueError(f"tick {tick} outside scenario [0, {scenario.tick_count})")
    t = Timepoint.at(tick, scenario.dt)
    road = scenario.road
    heading = np.asarray(road.heading, dtype=float)

    phase = scenario.ego.phase_at(t.sim_time)
    ego_s = phase.s_at(t.sim_time)
    automation_on = phase.automation if automation_override is None else automation_override
    ego_position = _world_position(road, ego_s, phase.lane)

    active = list(_active_traffic(scenario, t.sim_time))
    positions = {spec.id: _world_position(road, seg.s_at(t.sim_time), seg.lane)
                 for spec, seg in active}
    probabilities = gaze_probabilities(scenario, t.sim_time, ego_position, positions,
                                       interactive_direction)
    if fixation_model is not None:
        fixation_times = fixation_model.update(probabilities)
    else:
        fixation_times = {vid: 0 for vid in probabilities}

    traffic = tuple(
        TrafficVehicle(
            id=spec.id,
            type=spec.type,
            position=tuple(positions[spec.id]),
            orientation=(0.0, 0.0, 0.0),
            velocity=tuple(heading * seg.speed),
            acceleration=(0.0, 0.0, 0.0),
            dimension=spec.dimension,
            lane=seg.lane,
            fixation_probability=probabilities[spec.id],
            fixation_time=fixation_times[spec.id],
        )
        for spec, seg in active
    )

    tor_at = scenario.automation.takeover_request_at
    takeover_request = (tor_at is not None and t.sim_time >= tor_at and automation_on)
    if takeover_request and road.construction_site_s is not None and phase.speed > 1e-9:
        time_until = max(0.0, (road.construction_site_s - ego_s) / phase.speed)
    else:
        time_until = 0.0

    ego = EgoVehicle(
        id=scenario.ego.id,
        type="car",
        position=tuple(ego_position),
        orientation=(0.0, 0.0, 0.0),
        velocity=tuple(heading * phase.speed),
        indicator_left=False,
        indicator_right=False,
        acceleration=0.0,
        current_speed_limit=scenario.ego.speed_limit,
        current_lane=phase.lane,
        dimension=scenario.ego.dimension,
    )
    automation = AutomationState(
        takeover_request=takeover_request,
        time_until_odd_boundary=time_until,
        criticality_level=scenario.automation.criticality_level if takeover_request else 0,
        takeover_reason=scenario.automation.takeover_reason if takeover_request else "",
        ego_automation_state=automation_on,
    )
    return SceneFrame(t=t, ego=ego, automation=automation, traffic=traffic, road=road)


def make_benchmark_scenario(vehicle_count: int, duration: float = 400.0,
                            tick_rate: int = 30) -> Scenario:
    """Procedural load scenario: N vehicles on three lanes, full attention.

    Includes a take-over request, a manual take-over, an ego lane change,
    and periodic traffic lane changes so every pipeline stage does real work.
    """
    if vehicle_count < 0:
        raise ValueError("vehicle_count must be >= 0")
    switch = duration * 0.5
    merge = duration * 0.6
    traffic = []
    for i in range(vehicle_count):
        lane = (-1, -2, -3)[i % 3]
        speed = 26.0 + (i % 7)
        start_s = 40.0 + 17.0 * (i + 1) * (1 if i % 2 == 0 else -1)
        if i % 4 == 0:
            other = lane + 1 if lane < -1 else lane - 1
            segments = [
                {"from": 0.0, "to": float(switch), "lane": lane, "speed": speed,
                 "start_s": start_s},
                {"from": float(switch), "to": duration, "lane": other, "speed": speed},
            ]
        else:
            segments = [{"from": 0.0, "to": duration, "lane": lane, "speed": speed,
                         "start_s": start_s}]
        traffic.append({"id": f"v{i + 1}", "type": "car", "segments": segments})
    data = {
        "meta": {"name": f"bench-{vehicle_count}",
                 "description": f"procedural load scenario, {vehicle_count} vehicles"},
        "duration": duration,
        "tick_rate": tick_rate,
        "road": {"lane_width": 3.5, "drivable_lanes": [-1, -2, -3],
                 "construction_site_s": 30.0 * duration},
        "ego": {
            "id": "ego",
            "start_s": 0.0,
            "phases": [
                {"from": 0.0, "to": float(switch), "lane": -2, "speed": 30.0,
                 "automation": True},
                {"from": float(switch), "to": float(merge), "lane": -2, "speed": 30.0,
                 "automation": False},
                {"from": float(merge), "to": duration, "lane": -1, "speed": 30.0,
                 "automation": False},
            ],
        },
        "traffic": traffic,
        "automation": {"takeover_request_at": duration * 0.3, "criticality_level": 2,
                       "takeover_reason": "lane closed ahead"},
        "gaze": {"mode": GAZE_FULL_ATTENTION},
    }
    return scenario_from_dict(data, f"<benchmark:{vehicle_count}>")
