"""Headless latency benchmark over procedural scenarios.

Runs the full pipeline in virtual time (no pacing, no I/O per tick) across a
sweep of traffic densities and reports per-stage and end-to-end latency
medians and tails. The interesting number is the end-to-end median against
the tick budget: at 30 Hz every step must fit into 33.3 ms.
"""

from __future__ import annotations

import json
import platform
import statistics
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .session import STAGES, SessionEngine
from .simulator import make_benchmark_scenario

DEFAULT_COUNTS = (1, 5, 10, 20, 50)


@dataclass(frozen=True)
class StageStats:
    median_ms: float
    p99_ms: float
    max_ms: float

    @classmethod
    def from_samples(cls, samples) -> "StageStats":
        arr = np.asarray(samples, dtype=float)
        return cls(
            median_ms=float(statistics.median(samples)),
            p99_ms=float(np.percentile(arr, 99)),
            max_ms=float(arr.max()),
        )

    def to_dict(self) -> dict:
        return {"median_ms": self.median_ms, "p99_ms": self.p99_ms, "max_ms": self.max_ms}


@dataclass(frozen=True)
class BenchCase:
    vehicle_count: int
    ticks: int
    tick_budget_ms: float
    stages: dict[str, StageStats]
    total: StageStats

    @property
    def realtime(self) -> bool:
        return self.total.median_ms < self.tick_budget_ms

    def to_dict(self) -> dict:
        return {
            "vehicle_count": self.vehicle_count,
            "ticks": self.ticks,
            "tick_budget_ms": self.tick_budget_ms,
            "stages": {name: st.to_dict() for name, st in self.stages.items()},
            "total": self.total.to_dict(),
            "realtime": self.realtime,
        }


@dataclass(frozen=True)
class BenchReport:
    tick_rate: int
    cases: tuple[BenchCase, ...]
    generated_at: str
    machine: str

    def case(self, vehicle_count: int) -> BenchCase:
        for c in self.cases:
            if c.vehicle_count == vehicle_count:
                return c
        raise KeyError(vehicle_count)

    def to_dict(self) -> dict:
        return {
            "tick_rate": self.tick_rate,
            "generated_at": self.generated_at,
            "machine": self.machine,
            "cases": [c.to_dict() for c in self.cases],
        }

    def save(self, path: str | Path) -> Path:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(json.dumps(self.to_dict(), indent=2) + "\n")
        return p


def run_case(vehicle_count: int, ticks: int, tick_rate: int = 30) -> BenchCase:
    scenario = make_benchmark_scenario(vehicle_count, duration=ticks / tick_rate,
                                       tick_rate=tick_rate)
    engine = SessionEngine(scenario)
    per_stage: dict[str, list[float]] = {name: [] for name in STAGES}
    totals: list[float] = []
    while not engine.finished:
        rec = engine.step()
        for name in STAGES:
            per_stage[name].append(rec.latencies[name])
        totals.append(rec.total_ms)
    return BenchCase(
        vehicle_count=vehicle_count,
        ticks=len(totals),
        tick_budget_ms=1000.0 / tick_rate,
        stages={name: StageStats.from_samples(samples)
                for name, samples in per_stage.items()},
        total=StageStats.from_samples(totals),
    )


def run_bench(counts=DEFAULT_COUNTS, ticks: int = 2000,
              tick_rate: int = 30) -> BenchReport:
    cases = tuple(run_case(c, ticks, tick_rate) for c in counts)
    return BenchReport(
        tick_rate=tick_rate,
        cases=cases,
        generated_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        machine=f"{platform.system()} {platform.machine()}, python {platform.python_version()}",
    )


def format_report(report: BenchReport) -> str:
    head = (f"{'vehicles':>8}  {'ticks':>6}  {'median':>8}  {'p99':>8}  {'max':>8}  "
            f"{'budget':>7}  ok")
    lines = [f"latency per tick (ms), {report.tick_rate} Hz budget", head,
             "-" * len(head)]
    for c in report.cases:
        lines.append(
            f"{c.vehicle_count:>8}  {c.ticks:>6}  {c.total.median_ms:>8.3f}  "
            f"{c.total.p99_ms:>8.3f}  {c.total.max_ms:>8.3f}  "
            f"{c.tick_budget_ms:>7.1f}  {'yes' if c.realtime else 'NO'}")
    slowest = max(report.cases, key=lambda c: c.total.median_ms)
    lines.append("")
    lines.append("stage medians (ms) at the heaviest case "
                 f"({slowest.vehicle_count} vehicles):")
    for name, st in slowest.stages.items():
        lines.append(f"  {name:<14} {st.median_ms:>8.3f}  (p99 {st.p99_ms:.3f})")
    return "\n".join(lines)
