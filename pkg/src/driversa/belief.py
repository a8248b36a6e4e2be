"""Driver mental-belief tracking: fixation-gated admission plus a
constant-velocity Kalman filter per believed object.

Per tick the update runs in a fixed order: every believed object is advanced
by the motion model first, then objects whose fixation probability clears the
threshold are admitted (new) or measurement-updated (known). Objects that are
never fixated never enter the belief state; objects that leave the sensor feed
are kept and predicted blind. The ego is exempt from gating: the driver has
proprioceptive access to it, so the ego belief is synchronized from the frame
every tick.

State is planar, [px, py, vx, vy] in road coordinates (s, lateral): vertical
motion is irrelevant to lane reasoning.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NumericError
from .domain import FluentStore
from .scene import (
    AutomationState,
    RoadFrame,
    SceneFrame,
    Timepoint,
    TrafficVehicle,
    to_road_plane,
)

log = logging.getLogger(__name__)

H = np.eye(4)  # position and velocity are both measured


@dataclass(frozen=True)
class TrackerParams:
    fixation_threshold: float = 0.5
    dt: float = 1.0 / 30.0
    process_noise: float = 0.1    # (m/s^2)^2, white-acceleration spectral scale
    meas_noise_pos: float = 0.5   # m
    meas_noise_vel: float = 0.2   # m/s
    eviction_ttl: float | None = None  # s without fixation before forgetting

    def __post_init__(self):
        if not 0.0 < self.fixation_threshold < 1.0:
            raise ValueError("fixation_threshold must be in (0,1)")
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.meas_noise_pos <= 0 or self.meas_noise_vel <= 0:
            raise ValueError("measurement noise must be > 0")

    def measurement_noise(self) -> np.ndarray:
        sp2 = self.meas_noise_pos**2
        sv2 = self.meas_noise_vel**2
        return np.diag([sp2, sp2, sv2, sv2])


def transition_matrix(dt: float) -> np.ndarray:
    F = np.eye(4)
    F[0, 2] = dt
    F[1, 3] = dt
    return F


def process_noise_matrix(q: float, dt: float) -> np.ndarray:
    # discrete white-noise acceleration, independent per axis
    dt2, dt3, dt4 = dt * dt, dt**3, dt**4
    return q * np.array(
        [
            [dt4 / 4, 0, dt3 / 2, 0],
            [0, dt4 / 4, 0, dt3 / 2],
            [dt3 / 2, 0, dt2, 0],
            [0, dt3 / 2, 0, dt2],
        ]
    )


@dataclass(frozen=True)
class BeliefObject:
    id: str
    state: np.ndarray        # [px, py, vx, vy], road plane
    covariance: np.ndarray   # 4x4 symmetric PSD
    believed_lane: int
    dimension: tuple[float, float, float]
    last_fixation_tick: Timepoint
    last_fixation_duration: int  # ms

    def __post_init__(self):
        state = np.asarray(self.state, dtype=float).reshape(4)
        cov = np.asarray(self.covariance, dtype=float).reshape(4, 4)
        if not np.all(np.isfinite(state)):
            raise NumericError(f"belief state for {self.id!r} is not finite: {state}")
        if np.max(np.abs(cov - cov.T)) > 1e-9:
            raise NumericError(f"covariance for {self.id!r} is not symmetric")
        if np.min(np.diag(cov)) < 0:
            raise NumericError(f"covariance for {self.id!r} has a negative diagonal")
        object.__setattr__(self, "state", state)
        object.__setattr__(self, "covariance", cov)

    @property
    def s(self) -> float:
        return float(self.state[0])

    @property
    def lateral(self) -> float:
        return float(self.state[1])

    @property
    def length(self) -> float:
        return self.dimension[0]


@dataclass(frozen=True)
class MentalBeliefState:
    road: RoadFrame
    objects: dict[str, BeliefObject] = field(default_factory=dict)
    ego_belief: BeliefObject | None = None
    fluents: FluentStore = field(default_factory=FluentStore)
    sensed_automation: AutomationState | None = None
    tick: int = -1  # last frame tick folded in; -1 before the first

    @classmethod
    def empty(cls, road: RoadFrame) -> "MentalBeliefState":
        return cls(road=road)

    def believed_ids(self) -> list[str]:
        return list(self.objects.keys())

    def with_fluents(self, fluents: FluentStore) -> "MentalBeliefState":
        return replace(self, fluents=fluents)


def _measurement_from(observed: TrafficVehicle, road: RoadFrame) -> np.ndarray:
    s, lat, vs, vlat = to_road_plane(observed.position, observed.velocity, road)
    return np.array([s, lat, vs, vlat])


def kalman_predict(obj: BeliefObject, dt: float, q: float, road: RoadFrame) -> BeliefObject:
    """Advance one object by the constant-velocity model.

    The believed lane is recomputed from the predicted lateral offset, so a
    believed object can drift across a lane boundary without being fixated.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if not np.all(np.isfinite(obj.state)):
        raise NumericError(f"belief state for {obj.id!r} is not finite")
    F = transition_matrix(dt)
    state = F @ obj.state
    cov = F @ obj.covariance @ F.T + process_noise_matrix(q, dt)
    cov = (cov + cov.T) / 2.0
    return replace(
        obj,
        state=state,
        covariance=cov,
        believed_lane=road.lateral_to_lane(float(state[1])),
    )


def kalman_update(obj: BeliefObject, observed: TrafficVehicle, params: TrackerParams,
                  road: RoadFrame) -> BeliefObject:
    """Fold a fixated observation into the belief (standard linear update).

    On a singular innovation covariance the prior is kept and the incident is
    logged; it cannot occur with positive measurement noise but the guard keeps
    one bad tick from killing a session.
    """
    if observed.id != obj.id:
        raise ValueError(f"observation id {observed.id!r} does not match belief {obj.id!r}")
    z = _measurement_from(observed, road)
    R = params.measurement_noise()
    P = obj.covariance
    S = P + R  # H = I
    try:
        K = np.linalg.solve(S.T, P.T).T
    except np.linalg.LinAlgError:
        log.warning("singular innovation covariance for %s; keeping prior", obj.id)
        return obj
    state = obj.state + K @ (z - obj.state)
    IK = np.eye(4) - K
    cov = IK @ P @ IK.T + K @ R @ K.T  # Joseph form keeps P symmetric PSD
    cov = (cov + cov.T) / 2.0
    return replace(obj, state=state, covariance=cov, believed_lane=observed.lane)


def _admit(observed: TrafficVehicle, params: TrackerParams, road: RoadFrame,
           t: Timepoint) -> BeliefObject:
    return BeliefObject(
        id=observed.id,
        state=_measurement_from(observed, road),
        covariance=params.measurement_noise(),
        believed_lane=observed.lane,
        dimension=tuple(observed.dimension),
        last_fixation_tick=t,
        last_fixation_duration=observed.fixation_time,
    )


def _sync_ego(frame: SceneFrame) -> BeliefObject:
    s, lat, vs, vlat = to_road_plane(frame.ego.position, frame.ego.velocity, frame.road)
    return BeliefObject(
        id=frame.ego.id,
        state=np.array([s, lat, vs, vlat]),
        covariance=np.zeros((4, 4)),
        believed_lane=frame.ego.current_lane,
        dimension=tuple(frame.ego.dimension),
        last_fixation_tick=frame.t,
        last_fixation_duration=0,
    )


def belief_tick(mbs: MentalBeliefState, frame: SceneFrame,
                params: TrackerParams) -> MentalBeliefState:
    """Fold one scene frame into the mental belief state.

    Order per tick: predict all, admit newly fixated, update re-fixated,
    sync ego. Returns a fresh snapshot; the input is not mutated.
    """
    if frame.t.tick != mbs.tick + 1:
        raise ValueError(f"frame tick {frame.t.tick} does not follow belief tick {mbs.tick}")

    objects: dict[str, BeliefObject] = {}
    if mbs.tick >= 0:
        for oid, obj in mbs.objects.items():
            if params.eviction_ttl is not None:
                stale = (frame.t.tick - obj.last_fixation_tick.tick) * params.dt
                if stale > params.eviction_ttl:
                    continue
            objects[oid] = kalman_predict(obj, params.dt, params.process_noise, mbs.road)
    else:
        objects.update(mbs.objects)

    fixated = [v for v in frame.traffic if v.fixation_probability > params.fixation_threshold]
    admitted: set[str] = set()
    for v in fixated:
        if v.id not in objects:
            objects[v.id] = _admit(v, params, mbs.road, frame.t)
            admitted.add(v.id)
    for v in fixated:
        if v.id not in admitted:
            updated = kalman_update(objects[v.id], v, params, mbs.road)
            objects[v.id] = replace(
                updated,
                last_fixation_tick=frame.t,
                last_fixation_duration=v.fixation_time,
            )

    return replace(
        mbs,
        objects=objects,
        ego_belief=_sync_ego(frame),
        sensed_automation=frame.automation,
        tick=frame.t.tick,
    )
