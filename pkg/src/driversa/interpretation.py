"""Interpretation and projection on top of the belief state.

Interpretation relates believed vehicles to the ego (longitudinal, lane,
ordering), finds the gaps between them, and advances the event layer one
step: detect which events occur at this tick given the fluents and the
sensed signals, then apply their effects to get the fluent values holding at
the next tick. Fluents not touched by any event keep their value (inertia).

Projection enumerates which occurrences of the current task's goal event are
possible next, one candidate per adjacent drivable lane and free location,
filtered by the event's possibility conditions. Tasks without a goal project
nothing; a task value the domain does not declare is an error, not an empty
result.
"""

from __future__ import annotations

from dataclasses import dataclass

from .belief import BeliefObject, MentalBeliefState
from .domain import (
    DomainDefinition,
    EvalContext,
    EventDecl,
    EventOccurrence,
    FluentStore,
    SensedState,
    Term,
    initial_fluents,
    term,
)
from .errors import DomainConflictError, EngineError, UnknownTaskError, UnsupportedSideError
from .relations import (
    FreeLocation,
    GapArtifact,
    RelLane,
    RelLong,
    detect_gaps,
    free_locations,
    rel_lane,
    rel_long,
    rel_order,
)
from .scene import Timepoint, lane_adjacent


@dataclass(frozen=True)
class ReasoningParams:
    min_gap: float = 13.0        # m, shortest span a vehicle fits into
    sensor_range: float = 150.0  # m, awareness window radius around the ego

    def __post_init__(self):
        if self.min_gap <= 0 or self.sensor_range <= 0:
            raise ValueError("min_gap and sensor_range must be > 0")


@dataclass(frozen=True)
class ObjectRelations:
    object_id: str
    longitudinal: RelLong
    lane: RelLane
    order: int


@dataclass(frozen=True)
class InterpretationModel:
    t: Timepoint
    relations: tuple[ObjectRelations, ...]
    gaps: tuple[GapArtifact, ...]
    fluents: FluentStore                     # values holding at t
    occurred: tuple[EventOccurrence, ...]    # events detected at t

    def relation(self, object_id: str) -> ObjectRelations:
        for row in self.relations:
            if row.object_id == object_id:
                return row
        raise KeyError(object_id)


_CLEAR = object()  # terminate marker during effect resolution


def _believed_entities(mbs: MentalBeliefState) -> list[BeliefObject]:
    out = [mbs.ego_belief] if mbs.ego_belief is not None else []
    out.extend(mbs.objects.values())
    return out


def _locate(mbs: MentalBeliefState, mover: BeliefObject, lane_to: int,
            params: ReasoningParams) -> str:
    """Label of the free location the mover ended up in on its new lane."""
    ego = mbs.ego_belief
    occupants = [v for v in _believed_entities(mbs) if v.id != mover.id]
    anchor = ego.s if ego is not None else mover.s
    for loc in free_locations(occupants, lane_to, anchor, params.min_gap,
                              params.sensor_range):
        if loc.contains(mover.s):
            return loc.label
    return "unknown"


def ec_step(fluents: FluentStore, sensed: SensedState, mbs: MentalBeliefState,
            domain: DomainDefinition, t: Timepoint,
            params: ReasoningParams = ReasoningParams(),
            ) -> tuple[FluentStore, tuple[EventOccurrence, ...], FluentStore]:
    """One event-layer step; returns (holding at t, occurred at t, holding at t+1).

    Before detection the store is aligned with the belief state: every
    believed entity gets an on_lane term when it has none yet (first sight is
    not an event), and entities no longer believed lose theirs. Detection
    walks events in declaration order; lane-change style events fire once per
    entity whose believed lane left its on_lane value, ego first. Effects of
    all occurrences apply together; contradictory assignments to one fluent
    are a domain conflict.
    """
    entities = _believed_entities(mbs)

    inits: dict[Term, bool | int | str] = {}
    for ent in entities:
        key = term("on_lane", ent.id)
        if key not in fluents:
            inits[key] = ent.believed_lane
    known = {term("on_lane", ent.id) for ent in entities}
    stale = [k for k, _ in fluents.items() if k.name == "on_lane" and k not in known]
    current = fluents.with_updates(inits).without(stale)

    occurred: list[tuple[EventDecl, dict, EventOccurrence]] = []
    ctx = EvalContext(fluents=current, sensed=sensed)
    for decl in domain.events:
        if decl.detect_lane_change:
            for ent in entities:
                lane_from = current.value("on_lane", ent.id)
                lane_to = ent.believed_lane
                if lane_from == lane_to:
                    continue
                location = _locate(mbs, ent, lane_to, params)
                binding = dict(zip(decl.params, (ent.id, lane_from, lane_to, location)))
                ev = Term(decl.name, (ent.id, lane_from, lane_to, location))
                occurred.append((decl, binding, EventOccurrence(ev, t)))
        elif decl.detect and all(ctx.holds(c) for c in decl.detect):
            occurred.append((decl, {}, EventOccurrence(Term(decl.name), t)))

    proposals: dict[Term, list[tuple[object, str]]] = {}
    for decl, binding, occ in occurred:
        for eff in decl.effects:
            args = (binding[eff.entity_arg],) if eff.entity_arg else ()
            target = Term(eff.fluent, args)
            value = binding[eff.value.param] if hasattr(eff.value, "param") else eff.value
            if eff.op == "terminates":
                if value is True:
                    value = False  # boolean switch off
                elif current.get(target) == value:
                    value = _CLEAR  # drop this symbol value unless replaced
                else:
                    continue
            proposals.setdefault(target, []).append((value, str(occ.event)))

    updates: dict[Term, bool | int | str] = {}
    cleared: list[Term] = []
    for target, props in proposals.items():
        values = {v for v, _ in props if v is not _CLEAR}
        if len(values) > 1:
            raise DomainConflictError(target, sorted({name for _, name in props}))
        if values:
            updates[target] = values.pop()
        else:
            cleared.append(target)
    for target in cleared:
        if target not in updates:
            raise EngineError(
                f"fluent {target} terminated with no replacement value at tick {t.tick}"
            )

    nxt = current.with_updates(updates)
    return current, tuple(occ for _, _, occ in occurred), nxt


def build_interpretation_model(
    mbs: MentalBeliefState,
    domain: DomainDefinition,
    t: Timepoint,
    params: ReasoningParams = ReasoningParams(),
) -> tuple[InterpretationModel, MentalBeliefState]:
    """Interpret the belief state at t; also returns the belief state with
    the fluent layer advanced to t+1.

    Relations are defined within the ego's side of the road; an object
    believed across the middle keeps its track but gets no relation row.
    """
    ego = mbs.ego_belief
    if ego is None or mbs.sensed_automation is None:
        raise EngineError("belief state has no ego yet; fold in a frame first")
    sensed = SensedState(automation=mbs.sensed_automation, ego_lane=ego.believed_lane)

    fluents = mbs.fluents
    if len(fluents) == 0:
        fluents = initial_fluents(sensed.automation.ego_automation_state,
                                  ego.id, ego.believed_lane)

    current, occurred, nxt = ec_step(fluents, sensed, mbs, domain, t, params)

    rows = []
    for oid in sorted(mbs.objects):
        obj = mbs.objects[oid]
        try:
            lane = rel_lane(ego.believed_lane, obj.believed_lane)
        except UnsupportedSideError:
            continue
        rows.append(
            ObjectRelations(
                object_id=oid,
                longitudinal=rel_long(ego, obj),
                lane=lane,
                order=rel_order(ego, obj, mbs.objects.values()),
            )
        )

    im = InterpretationModel(
        t=t,
        relations=tuple(rows),
        gaps=detect_gaps(mbs.objects.values()),
        fluents=current,
        occurred=occurred,
    )
    return im, mbs.with_fluents(nxt)


@dataclass(frozen=True)
class ProjectedEvent:
    event: Term
    location: FreeLocation


@dataclass(frozen=True)
class ProjectionModel:
    t: Timepoint
    task: str
    events: tuple[ProjectedEvent, ...]


def project(mbs: MentalBeliefState, im: InterpretationModel,
            domain: DomainDefinition,
            params: ReasoningParams = ReasoningParams()) -> ProjectionModel:
    """Enumerate possible next occurrences of the current task's goal event.

    Maneuver events ground to the ego: one candidate per adjacent drivable
    lane and free location on it, kept when the possibility conditions hold.
    Candidates are ordered by target lane, then location start.
    """
    task = im.fluents.get(term("curr_task"))
    if task not in domain.tasks:
        raise UnknownTaskError(f"cannot project for unknown task {task!r}")
    goal_events = domain.goal_events(task)
    ego = mbs.ego_belief
    if not goal_events or ego is None:
        return ProjectionModel(t=im.t, task=task, events=())

    sensed = SensedState(automation=mbs.sensed_automation, ego_lane=ego.believed_lane)
    lane_from = ego.believed_lane
    targets = sorted(
        lane for lane in mbs.road.drivable_lanes if lane_adjacent(lane_from, lane)
    )
    locations = {
        lane: free_locations(mbs.objects.values(), lane, ego.s,
                             params.min_gap, params.sensor_range)
        for lane in targets
    }
    free_lanes = frozenset(lane for lane, locs in locations.items() if locs)

    candidates: list[ProjectedEvent] = []
    for decl in goal_events:
        if not decl.detect_lane_change:
            continue  # only ego maneuvers are projected in this domain
        for lane_to in targets:
            for loc in locations[lane_to]:
                binding = dict(zip(decl.params, (ego.id, lane_from, lane_to, loc.label)))
                ctx = EvalContext(fluents=im.fluents, sensed=sensed, binding=binding,
                                  lanes_with_free_location=free_lanes)
                if all(ctx.holds(c) for c in decl.possible_when):
                    event = Term(decl.name, (ego.id, lane_from, lane_to, loc.label))
                    candidates.append(ProjectedEvent(event=event, location=loc))
    return ProjectionModel(t=im.t, task=task, events=tuple(candidates))
