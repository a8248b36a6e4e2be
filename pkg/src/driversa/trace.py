"""Canonical NDJSON traces of engine sessions.

A trace starts with one header record (schema version, scenario identity,
tick count) followed by one record per tick. Records are serialized with
sorted keys and no whitespace, so two runs of the same scenario produce
byte-identical files; anything non-deterministic (stage latencies) stays out
of the trace and goes to an optional timings sidecar instead.

The reader returns plain dicts. Rendering for the replay command works from
those dicts, so a trace is self-contained: no scenario file is needed to
inspect one.
"""

from __future__ import annotations

import json
from pathlib import Path

from . import __version__
from .errors import TraceError

TRACE_SCHEMA = 1


def _vec(v) -> list[float]:
    return [float(x) for x in v]


def _frame_dict(frame) -> dict:
    return {
        "ego": {
            "id": frame.ego.id,
            "position": _vec(frame.ego.position),
            "velocity": _vec(frame.ego.velocity),
            "lane": int(frame.ego.current_lane),
            "speed_limit": int(frame.ego.current_speed_limit),
            "dimension": _vec(frame.ego.dimension),
        },
        "automation": {
            "takeover_request": frame.automation.takeover_request,
            "time_until_odd_boundary": float(frame.automation.time_until_odd_boundary),
            "criticality_level": int(frame.automation.criticality_level),
            "takeover_reason": frame.automation.takeover_reason,
            "ego_automation_state": frame.automation.ego_automation_state,
        },
        "traffic": [
            {
                "id": v.id,
                "type": v.type,
                "position": _vec(v.position),
                "velocity": _vec(v.velocity),
                "dimension": _vec(v.dimension),
                "lane": int(v.lane),
                "fixation_probability": float(v.fixation_probability),
                "fixation_time": int(v.fixation_time),
            }
            for v in frame.traffic
        ],
    }


def _belief_dict(mbs) -> dict:
    def obj_dict(o) -> dict:
        return {
            "id": o.id,
            "state": _vec(o.state),
            "covariance": [_vec(row) for row in o.covariance],
            "lane": int(o.believed_lane),
            "last_fixation_tick": int(o.last_fixation_tick.tick),
            "last_fixation_ms": int(o.last_fixation_duration),
        }

    return {
        "ego": None if mbs.ego_belief is None else obj_dict(mbs.ego_belief),
        "objects": [obj_dict(mbs.objects[oid]) for oid in sorted(mbs.objects)],
    }


def _interpretation_dict(im) -> dict:
    return {
        "fluents": [[str(t), v] for t, v in im.fluents.items()],
        "occurred": [str(occ.event) for occ in im.occurred],
        "relations": [
            {
                "object_id": r.object_id,
                "long": {"kind": r.longitudinal.kind,
                         "delta_s": float(r.longitudinal.delta_s),
                         "gap": float(r.longitudinal.gap)},
                "lane": {"kind": r.lane.kind, "distance": int(r.lane.lane_distance)},
                "order": int(r.order),
            }
            for r in im.relations
        ],
        "gaps": [
            {"lane": int(g.lane), "rear": g.rear_id, "front": g.front_id,
             "size": float(g.size), "s_min": float(g.s_min), "s_max": float(g.s_max)}
            for g in im.gaps
        ],
    }


def _location_dict(loc) -> dict:
    return {"kind": loc.kind, "lane": int(loc.lane), "s_min": float(loc.s_min),
            "s_max": float(loc.s_max), "label": loc.label}


def _projection_dict(pm) -> dict:
    return {
        "task": pm.task,
        "events": [
            {"event": str(ev.event), "location": _location_dict(ev.location)}
            for ev in pm.events
        ],
    }


def _divergence_dict(report) -> list[dict]:
    return [
        {
            "kind": d.kind,
            "object_id": d.object_id,
            "magnitude": float(d.magnitude),
            "staleness": float(d.staleness),
            "relevance": float(d.relevance),
            "priority": float(d.priority),
            "detail": d.detail,
        }
        for d in report.divergences
    ]


def tick_record_dict(rec) -> dict:
    """Canonical dict for one tick; latencies are deliberately absent."""
    return {
        "record": "tick",
        "tick": int(rec.frame.t.tick),
        "sim_time": float(rec.frame.t.sim_time),
        "frame": _frame_dict(rec.frame),
        "belief": _belief_dict(rec.mbs),
        "interpretation": _interpretation_dict(rec.im),
        "projection": _projection_dict(rec.pm),
        "divergences": _divergence_dict(rec.report),
    }


def header_dict(scenario) -> dict:
    return {
        "record": "header",
        "schema": TRACE_SCHEMA,
        "engine": f"driversa {__version__}",
        "scenario": scenario.name,
        "description": scenario.description,
        "tick_rate": int(scenario.tick_rate),
        "duration": float(scenario.duration),
        "tick_count": int(scenario.tick_count),
    }


def dump_line(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


class TraceWriter:
    """Streams canonical records to a trace file, one JSON object per line."""

    def __init__(self, path: str | Path, scenario, timings_path: str | Path | None = None):
        self.path = Path(path)
        self._fh = self.path.open("w")
        self._fh.write(dump_line(header_dict(scenario)) + "\n")
        self._timings = Path(timings_path).open("w") if timings_path else None

    def write(self, rec) -> None:
        self._fh.write(dump_line(tick_record_dict(rec)) + "\n")
        if self._timings is not None:
            line = {"tick": int(rec.frame.t.tick), "total_ms": rec.total_ms,
                    "stages_ms": rec.latencies}
            self._timings.write(json.dumps(line, sort_keys=True) + "\n")

    def close(self) -> None:
        self._fh.close()
        if self._timings is not None:
            self._timings.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_trace(path: str | Path) -> tuple[dict, list[dict]]:
    """Load a trace file; returns (header, tick records in order)."""
    p = Path(path)
    try:
        lines = p.read_text().splitlines()
    except OSError as exc:
        raise TraceError(f"{p}: cannot read trace: {exc}") from None
    if not lines:
        raise TraceError(f"{p}: empty trace")
    records = []
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise TraceError(f"{p}:{i + 1}: corrupt record: {exc}") from None
    header = records[0]
    if header.get("record") != "header":
        raise TraceError(f"{p}: first record is not a header")
    if header.get("schema") != TRACE_SCHEMA:
        raise TraceError(f"{p}: unsupported trace schema {header.get('schema')!r}")
    ticks = records[1:]
    for rec in ticks:
        if rec.get("record") != "tick":
            raise TraceError(f"{p}: unexpected record type {rec.get('record')!r}")
    return header, ticks


def render_header(header: dict) -> str:
    return (f"trace of {header['scenario']!r}: {header['tick_count']} ticks "
            f"at {header['tick_rate']} Hz ({header['duration']:g} s)")


def render_tick(rec: dict, events_only: bool = False,
                object_id: str | None = None) -> list[str]:
    """Compact per-tick lines for replay: occurred events and divergences."""
    tick = rec["tick"]
    lines: list[str] = []
    occurred = rec["interpretation"]["occurred"]
    divergences = rec["divergences"]
    if object_id is not None:
        divergences = [d for d in divergences if d["object_id"] == object_id]
        occurred = [e for e in occurred
                    if f"({object_id}," in e or e.endswith(f"({object_id})")]
    for event in occurred:
        lines.append(f"[{tick:6d}] event {event}")
    if events_only:
        return lines
    if object_id is not None:
        for o in rec["belief"]["objects"]:
            if o["id"] == object_id:
                s, lat = o["state"][0], o["state"][1]
                lines.append(f"[{tick:6d}] belief {object_id}: s={s:.2f} lat={lat:.2f} "
                             f"lane={o['lane']}")
    for d in divergences:
        what = f" {d['object_id']}" if d["object_id"] else ""
        lines.append(f"[{tick:6d}] divergence {d['kind']}{what} "
                     f"priority={d['priority']:.3f}: {d['detail']}")
    return lines


def render_tick_detail(rec: dict) -> list[str]:
    """Full view of one tick: beliefs, fluents, relations, projections."""
    lines = [f"tick {rec['tick']} (t={rec['sim_time']:.3f} s)"]
    ego = rec["belief"]["ego"]
    if ego is not None:
        lines.append(f"  ego: s={ego['state'][0]:.2f} lane={ego['lane']}")
    for o in rec["belief"]["objects"]:
        s, lat, vs, _ = o["state"]
        lines.append(f"  belief {o['id']}: s={s:.2f} lat={lat:.2f} vs={vs:.2f} "
                     f"lane={o['lane']}")
    for name, value in rec["interpretation"]["fluents"]:
        lines.append(f"  holds {name} = {value}")
    for event in rec["interpretation"]["occurred"]:
        lines.append(f"  occurs {event}")
    for r in rec["interpretation"]["relations"]:
        lines.append(f"  rel {r['object_id']}: {r['long']['kind']} "
                     f"(gap {r['long']['gap']:.1f} m), lane {r['lane']['kind']}, "
                     f"order {r['order']}")
    for g in rec["interpretation"]["gaps"]:
        lines.append(f"  gap lane {g['lane']}: {g['rear']} -> {g['front']} "
                     f"({g['size']:.1f} m)")
    task = rec["projection"]["task"]
    lines.append(f"  task {task}")
    for ev in rec["projection"]["events"]:
        lines.append(f"  projected {ev['event']}")
    for d in rec["divergences"]:
        what = f" {d['object_id']}" if d["object_id"] else ""
        lines.append(f"  divergence {d['kind']}{what} priority={d['priority']:.3f}: "
                     f"{d['detail']}")
    return lines
