"""The per-tick engine loop: simulate, believe, interpret, project, compare.

One `SessionEngine.step()` runs the whole pipeline for the next tick and
returns everything it produced, with per-stage wall-clock latencies measured
around each stage. The engine owns the mutable bits (belief state, fixation
history, fluent store inside the belief state); all stage outputs are
immutable snapshots, so records can be buffered or serialized freely.

`run_session` drives a scenario front to back in virtual time, optionally
streaming a canonical trace; pacing to real time is the service's job.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .belief import MentalBeliefState, TrackerParams, belief_tick
from .divergence import ComparisonParams, DivergenceReport, build_divergence_report
from .domain import DomainDefinition, builtin_domain
from .interpretation import (
    InterpretationModel,
    ProjectionModel,
    ReasoningParams,
    build_interpretation_model,
    project,
)
from .scene import SceneFrame
from .simulator import GazeFixationModel, Scenario
from .simulator import step_scenario as _simulate
from .trace import TraceWriter

STAGES = ("simulate", "belief", "interpretation", "projection", "comparison")


@dataclass(frozen=True)
class SessionConfig:
    tracker: TrackerParams = field(default_factory=TrackerParams)
    reasoning: ReasoningParams = field(default_factory=ReasoningParams)
    comparison: ComparisonParams = field(default_factory=ComparisonParams)
    domain: DomainDefinition = field(default_factory=builtin_domain)

    @classmethod
    def for_scenario(cls, scenario: Scenario, **overrides) -> "SessionConfig":
        tracker = overrides.pop("tracker", TrackerParams(dt=scenario.dt))
        return cls(tracker=tracker, **overrides)


@dataclass(frozen=True)
class TickRecord:
    frame: SceneFrame
    mbs: MentalBeliefState
    im: InterpretationModel
    pm: ProjectionModel
    report: DivergenceReport
    latencies: dict[str, float]  # ms per stage, non-deterministic
    total_ms: float


class SessionEngine:
    """Stateful pipeline over one scenario; one step per tick, in order."""

    def __init__(self, scenario: Scenario, config: SessionConfig | None = None):
        self.scenario = scenario
        self.config = config or SessionConfig.for_scenario(scenario)
        if abs(self.config.tracker.dt - scenario.dt) > 1e-12:
            raise ValueError(
                f"tracker dt {self.config.tracker.dt} does not match scenario "
                f"tick rate {scenario.tick_rate} Hz")
        self.mbs = MentalBeliefState.empty(scenario.road)
        self.fixation_model = GazeFixationModel(scenario.dt, scenario.gaze.params)
        self.next_tick = 0
        self.automation_override: bool | None = None

    @property
    def finished(self) -> bool:
        return self.next_tick >= self.scenario.tick_count

    def force_manual(self) -> None:
        """Driver takes over out of script; automation stays off from here."""
        self.automation_override = False

    def step(self, interactive_direction=None) -> TickRecord:
        if self.finished:
            raise RuntimeError("scenario is exhausted")
        cfg = self.config
        latencies: dict[str, float] = {}
        t0 = time.perf_counter_ns()

        frame = _simulate(self.scenario, self.next_tick, self.fixation_model,
                          interactive_direction, self.automation_override)
        t1 = time.perf_counter_ns()
        latencies["simulate"] = (t1 - t0) / 1e6

        self.mbs = belief_tick(self.mbs, frame, cfg.tracker)
        t2 = time.perf_counter_ns()
        latencies["belief"] = (t2 - t1) / 1e6

        im, self.mbs = build_interpretation_model(self.mbs, cfg.domain, frame.t,
                                                  cfg.reasoning)
        t3 = time.perf_counter_ns()
        latencies["interpretation"] = (t3 - t2) / 1e6

        pm = project(self.mbs, im, cfg.domain, cfg.reasoning)
        t4 = time.perf_counter_ns()
        latencies["projection"] = (t4 - t3) / 1e6

        report = build_divergence_report(frame, self.mbs, im, pm, cfg.comparison)
        t5 = time.perf_counter_ns()
        latencies["comparison"] = (t5 - t4) / 1e6

        self.next_tick += 1
        return TickRecord(frame=frame, mbs=self.mbs, im=im, pm=pm, report=report,
                          latencies=latencies, total_ms=(t5 - t0) / 1e6)


@dataclass
class SessionSummary:
    scenario: str
    ticks: int
    events: list[str]           # "tick:event" in occurrence order
    divergence_ticks: int       # ticks with at least one divergence
    peak_divergence: float      # highest priority seen


def run_session(scenario: Scenario, config: SessionConfig | None = None,
                trace_path=None, timings_path=None,
                on_record=None) -> SessionSummary:
    """Run a scenario front to back in virtual time.

    Streams records to the optional trace writer and `on_record` callback
    instead of buffering them; scenario runs are long and records are wide.
    """
    engine = SessionEngine(scenario, config)
    summary = SessionSummary(scenario=scenario.name, ticks=0, events=[],
                             divergence_ticks=0, peak_divergence=0.0)
    writer = TraceWriter(trace_path, scenario, timings_path) if trace_path else None
    try:
        while not engine.finished:
            rec = engine.step()
            summary.ticks += 1
            for occ in rec.im.occurred:
                summary.events.append(f"{rec.frame.t.tick}:{occ.event}")
            if rec.report.divergences:
                summary.divergence_ticks += 1
                summary.peak_divergence = max(summary.peak_divergence,
                                              rec.report.divergences[0].priority)
            if writer is not None:
                writer.write(rec)
            if on_record is not None:
                on_record(rec)
    finally:
        if writer is not None:
            writer.close()
    return summary
