"""Wire types of the web service.

Inbound websocket messages are validated strictly: a malformed message gets
an error reply and changes nothing. Outbound messages reuse the canonical
trace serialization so a browser client and a recorded trace see identical
shapes.
"""

from __future__ import annotations

import math
from typing import Annotated, Literal, Union

from pydantic import BaseModel, Field, TypeAdapter, ValidationError, field_validator

from ..domain import DomainDefinition, describe_domain
from ..session import TickRecord
from ..simulator import Scenario
from ..trace import tick_record_dict


class GazeMessage(BaseModel):
    type: Literal["gaze"]
    direction: tuple[float, float, float]

    @field_validator("direction")
    @classmethod
    def _usable_direction(cls, v):
        if not all(math.isfinite(x) for x in v):
            raise ValueError("direction must be finite")
        if math.hypot(*v) < 1e-9:
            raise ValueError("direction must not be the zero vector")
        return v


ControlAction = Literal["pause", "resume", "restart", "takeover_now"]


class ControlMessage(BaseModel):
    type: Literal["control"]
    action: ControlAction


InboundMessage = Annotated[Union[GazeMessage, ControlMessage], Field(discriminator="type")]
_inbound = TypeAdapter(InboundMessage)


def parse_inbound(text: str) -> GazeMessage | ControlMessage:
    """Raises pydantic.ValidationError on anything malformed."""
    return _inbound.validate_json(text)


def validation_detail(exc: ValidationError) -> str:
    first = exc.errors()[0]
    where = ".".join(str(p) for p in first["loc"]) or "message"
    return f"{where}: {first['msg']}"


# --- outbound ----------------------------------------------------------------

def road_dict(scenario: Scenario) -> dict:
    road = scenario.road
    return {
        "origin": [float(x) for x in road.origin],
        "heading": [float(x) for x in road.heading],
        "lane_width": float(road.lane_width),
        "drivable_lanes": sorted(road.drivable_lanes),
        "construction_site_s": None if road.construction_site_s is None
        else float(road.construction_site_s),
    }


def snapshot_message(scenario: Scenario) -> dict:
    return {
        "type": "snapshot",
        "data": {
            "scenario": scenario.name,
            "description": scenario.description,
            "tick_rate": int(scenario.tick_rate),
            "duration": float(scenario.duration),
            "tick_count": int(scenario.tick_count),
            "gaze_mode": scenario.gaze.mode,
            "ego_id": scenario.ego.id,
            "road": road_dict(scenario),
        },
    }


def state_message(rec: TickRecord, finished: bool) -> dict:
    data = tick_record_dict(rec)
    data["finished"] = finished
    return {"type": "state", "data": data, "latency_ms": rec.total_ms}


def error_message(message: str) -> dict:
    return {"type": "error", "message": message}


# --- REST responses -----------------------------------------------------------

class HealthResponse(BaseModel):
    status: str
    engine: str
    scenario: str


class DomainResponse(BaseModel):
    name: str
    fluents: list[str]
    events: list[str]
    tasks: list[str]
    text: str

    @classmethod
    def from_domain(cls, domain: DomainDefinition) -> "DomainResponse":
        return cls(
            name=domain.name,
            fluents=[f.name for f in domain.fluents],
            events=[e.name for e in domain.events],
            tasks=list(domain.tasks),
            text=describe_domain(domain),
        )


class ScenarioResponse(BaseModel):
    name: str
    description: str
    duration: float
    tick_rate: int
    tick_count: int
    gaze_mode: str
    vehicles: list[str]
    road: dict

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> "ScenarioResponse":
        return cls(
            name=scenario.name,
            description=scenario.description,
            duration=scenario.duration,
            tick_rate=scenario.tick_rate,
            tick_count=scenario.tick_count,
            gaze_mode=scenario.gaze.mode,
            vehicles=[v.id for v in scenario.traffic],
            road=road_dict(scenario),
        )
