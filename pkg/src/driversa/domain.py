"""Event dynamics of the driving domain: fluents, events, and their effects.

Fluents are functional: each term (name plus optional entity argument) carries
exactly one value per tick, booleans for switches like the automation state,
symbols for the driver task, lane ids for on_lane. Events occur at single
timepoints, initiate/terminate fluent values, and carry possibility conditions
drawn from a small fixed vocabulary (fluent-holds, sensed-flag, lane-adjacent,
free-location-exists). Inertia is implicit: a fluent untouched at t keeps its
value at t+1.

The built-in take-over domain registers the lane-change, audio-signal, and
take-over events; `describe_domain` renders the active domain as stable text
for documentation and golden tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .scene import AutomationState, Timepoint


@dataclass(frozen=True, order=True)
class Term:
    name: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.name
        return f"{self.name}({','.join(str(a) for a in self.args)})"


def term(name: str, *args) -> Term:
    return Term(name, tuple(args))


@dataclass(frozen=True)
class FluentAssignment:
    fluent: Term
    value: bool | int | str
    t: Timepoint


@dataclass(frozen=True)
class EventOccurrence:
    event: Term
    t: Timepoint

    def __str__(self):
        return f"occurs_at({self.event}, {self.t.tick})"


class FluentStore:
    """Immutable mapping from fluent terms to current values."""

    __slots__ = ("_values",)

    def __init__(self, values: dict[Term, bool | int | str] | None = None):
        self._values = dict(values) if values else {}

    def value(self, name: str, *args):
        return self._values[term(name, *args)]

    def get(self, t: Term, default=None):
        return self._values.get(t, default)

    def __contains__(self, t: Term) -> bool:
        return t in self._values

    def __len__(self) -> int:
        return len(self._values)

    def __eq__(self, other) -> bool:
        return isinstance(other, FluentStore) and self._values == other._values

    def items(self) -> list[tuple[Term, bool | int | str]]:
        return sorted(self._values.items(), key=lambda kv: str(kv[0]))

    def with_updates(self, updates: dict[Term, bool | int | str]) -> "FluentStore":
        merged = dict(self._values)
        merged.update(updates)
        return FluentStore(merged)

    def without(self, terms) -> "FluentStore":
        drop = set(terms)
        return FluentStore({k: v for k, v in self._values.items() if k not in drop})

    def assignments(self, t: Timepoint) -> tuple[FluentAssignment, ...]:
        return tuple(FluentAssignment(k, v, t) for k, v in self.items())


@dataclass(frozen=True)
class SensedState:
    """Directly sensed signals the driver gets without fixating anything."""
    automation: AutomationState
    ego_lane: int

    def flag(self, name: str):
        if name == "ego_lane":
            return self.ego_lane
        return getattr(self.automation, name)


# --- condition vocabulary -------------------------------------------------

@dataclass(frozen=True)
class FluentHolds:
    fluent: str
    value: bool | int | str = True

    def describe(self) -> str:
        return f"holds({self.fluent}, {self.value})"


@dataclass(frozen=True)
class SensedFlag:
    flag: str
    value: bool | int | str = True

    def describe(self) -> str:
        return f"sensed({self.flag}) = {self.value}"


@dataclass(frozen=True)
class LaneAdjacent:
    lane_a: str  # event parameter names
    lane_b: str

    def describe(self) -> str:
        return f"lane_adjacent({self.lane_a}, {self.lane_b})"


@dataclass(frozen=True)
class FreeLocationExists:
    lane: str  # event parameter name

    def describe(self) -> str:
        return f"free_location_exists({self.lane})"


Condition = FluentHolds | SensedFlag | LaneAdjacent | FreeLocationExists


@dataclass(frozen=True)
class EvalContext:
    fluents: FluentStore
    sensed: SensedState | None = None
    binding: dict = field(default_factory=dict)
    lanes_with_free_location: frozenset[int] = frozenset()

    def holds(self, cond: Condition) -> bool:
        if isinstance(cond, FluentHolds):
            return self.fluents.get(term(cond.fluent)) == cond.value
        if isinstance(cond, SensedFlag):
            return self.sensed is not None and self.sensed.flag(cond.flag) == cond.value
        if isinstance(cond, LaneAdjacent):
            from .scene import lane_adjacent
            return lane_adjacent(self.binding[cond.lane_a], self.binding[cond.lane_b])
        if isinstance(cond, FreeLocationExists):
            return self.binding[cond.lane] in self.lanes_with_free_location
        raise TypeError(f"unknown condition {cond!r}")


# --- declarations -----------------------------------------------------------

@dataclass(frozen=True)
class ArgRef:
    """Effect value taken from an event argument instead of a literal."""
    param: str


@dataclass(frozen=True)
class Effect:
    op: str                      # initiates | terminates
    fluent: str
    value: bool | int | str | ArgRef = True
    entity_arg: str | None = None  # event param providing the fluent's entity

    def describe(self) -> str:
        target = self.fluent if self.entity_arg is None else f"{self.fluent}({self.entity_arg})"
        if self.op == "terminates":
            if self.value is True:
                return f"terminates {target}"
            return f"terminates {target} = {_value_str(self.value)}"
        return f"initiates {target} := {_value_str(self.value)}"


def _value_str(v) -> str:
    return v.param if isinstance(v, ArgRef) else str(v)


@dataclass(frozen=True)
class FluentDecl:
    name: str
    kind: str                 # boolean | symbol | lane
    per_entity: bool = False
    values: tuple[str, ...] = ()  # symbol vocabulary, informational


@dataclass(frozen=True)
class EventDecl:
    name: str
    params: tuple[str, ...] = ()
    detect: tuple[Condition, ...] = ()
    detect_lane_change: bool = False  # fires when an entity's believed lane changes
    effects: tuple[Effect, ...] = ()
    possible_when: tuple[Condition, ...] = ()


@dataclass(frozen=True)
class DomainDefinition:
    name: str
    fluents: tuple[FluentDecl, ...]
    events: tuple[EventDecl, ...]
    tasks: tuple[str, ...]
    task_goals: dict[str, str]  # task -> fluent its completing event initiates

    def __post_init__(self):
        declared = {f.name for f in self.fluents}
        for ev in self.events:
            for eff in ev.effects:
                if eff.fluent not in declared:
                    raise ValueError(f"event {ev.name} references undeclared fluent {eff.fluent}")
        for task, goal in self.task_goals.items():
            if task not in self.tasks:
                raise ValueError(f"task_goals names unknown task {task}")
            if goal not in declared:
                raise ValueError(f"goal fluent {goal} of task {task} is undeclared")

    def event(self, name: str) -> EventDecl:
        for ev in self.events:
            if ev.name == name:
                return ev
        raise KeyError(name)

    def goal_events(self, task: str) -> tuple[EventDecl, ...]:
        goal = self.task_goals.get(task)
        if goal is None:
            return ()
        return tuple(
            ev for ev in self.events
            if any(eff.op == "initiates" and eff.fluent == goal for eff in ev.effects)
        )


TASK_MONITOR = "monitor"
TASK_BUILD_SIT_AWARE = "build_sit_aware"
TASK_CHANGE_LANE = "change_lane"


def builtin_domain() -> DomainDefinition:
    """Take-over driving domain: lane changes, audio signal, control hand-over."""
    return DomainDefinition(
        name="takeover-driving",
        fluents=(
            FluentDecl("automation", "boolean"),
            FluentDecl("audio_signal", "boolean"),
            FluentDecl("curr_task", "symbol",
                       values=(TASK_MONITOR, TASK_BUILD_SIT_AWARE, TASK_CHANGE_LANE)),
            FluentDecl("on_lane", "lane", per_entity=True),
        ),
        events=(
            EventDecl(
                name="change_lane",
                params=("entity", "lane_from", "lane_to", "location"),
                detect_lane_change=True,
                effects=(
                    Effect("initiates", "on_lane", ArgRef("lane_to"), entity_arg="entity"),
                ),
                possible_when=(
                    LaneAdjacent("lane_from", "lane_to"),
                    FreeLocationExists("lane_to"),
                ),
            ),
            EventDecl(
                name="audio_signal_start",
                detect=(SensedFlag("takeover_request", True), FluentHolds("audio_signal", False)),
                effects=(
                    Effect("initiates", "audio_signal", True),
                    Effect("initiates", "curr_task", TASK_BUILD_SIT_AWARE),
                ),
            ),
            EventDecl(
                name="audio_signal_end",
                detect=(SensedFlag("takeover_request", False), FluentHolds("audio_signal", True)),
                effects=(Effect("terminates", "audio_signal"),),
            ),
            EventDecl(
                name="takeover_manual",
                detect=(FluentHolds("automation", True), SensedFlag("ego_automation_state", False)),
                effects=(
                    Effect("initiates", "curr_task", TASK_CHANGE_LANE),
                    Effect("terminates", "automation"),
                    Effect("terminates", "curr_task", TASK_BUILD_SIT_AWARE),
                ),
            ),
            EventDecl(
                name="takeover_automation",
                detect=(FluentHolds("automation", False), SensedFlag("ego_automation_state", True)),
                effects=(
                    Effect("initiates", "automation", True),
                    Effect("initiates", "curr_task", TASK_MONITOR),
                ),
            ),
        ),
        tasks=(TASK_MONITOR, TASK_BUILD_SIT_AWARE, TASK_CHANGE_LANE),
        task_goals={TASK_CHANGE_LANE: "on_lane"},
    )


def initial_fluents(automation_on: bool, ego_id: str, ego_lane: int) -> FluentStore:
    return FluentStore({
        term("automation"): automation_on,
        term("audio_signal"): False,
        term("curr_task"): TASK_MONITOR,
        term("on_lane", ego_id): ego_lane,
    })


def describe_domain(domain: DomainDefinition) -> str:
    """Stable textual dump of the active domain for docs and golden tests."""
    lines = [f"domain: {domain.name}", "", "fluents:"]
    for f in domain.fluents:
        sig = f"{f.name}(entity)" if f.per_entity else f.name
        kind = f.kind if not f.values else f"{f.kind} in {{{', '.join(f.values)}}}"
        lines.append(f"  {sig}: {kind}")
    lines.append("")
    lines.append("events:")
    for ev in domain.events:
        sig = ev.name if not ev.params else f"{ev.name}({', '.join(ev.params)})"
        lines.append(f"  {sig}")
        if ev.detect_lane_change:
            lines.append("    occurs-when: believed lane of entity changes lane_from -> lane_to")
        elif ev.detect:
            lines.append("    occurs-when: " + " and ".join(c.describe() for c in ev.detect))
        for eff in ev.effects:
            lines.append(f"    {eff.describe()}")
        if ev.possible_when:
            lines.append("    possible-when: " + " and ".join(c.describe() for c in ev.possible_when))
    lines.append("")
    lines.append("tasks:")
    for task in domain.tasks:
        goal = domain.task_goals.get(task)
        lines.append(f"  {task}: goal fluent {goal}" if goal else f"  {task}: no goal (nothing projected)")
    return "\n".join(lines) + "\n"
