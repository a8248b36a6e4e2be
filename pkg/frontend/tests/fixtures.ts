/** Hand-built wire messages shaped exactly like the server's output. */

import {
  BelievedObject,
  DivergenceInfo,
  FrameVehicle,
  ServerMessage,
  SnapshotData,
  StateData,
} from "../src/protocol";

export function snapshotData(overrides: Partial<SnapshotData> = {}): SnapshotData {
  return {
    scenario: "tiny",
    description: "two second smoke scenario",
    tick_rate: 30,
    duration: 2.0,
    tick_count: 60,
    gaze_mode: "interactive",
    ego_id: "ego",
    road: {
      origin: [0, 0, 0],
      heading: [1, 0, 0],
      lane_width: 3.5,
      drivable_lanes: [-2, -1],
      construction_site_s: 200.0,
    },
    ...overrides,
  };
}

export function vehicle(
  id: string,
  s: number,
  lane: number,
  overrides: Partial<FrameVehicle> = {},
): FrameVehicle {
  const lat = Math.sign(lane) * (Math.abs(lane) - 0.5) * 3.5;
  return {
    id,
    type: "car",
    position: [s, lat, 0],
    velocity: [20, 0, 0],
    dimension: [4.5, 1.8, 1.5],
    lane,
    fixation_probability: 1.0,
    fixation_time: 100,
    ...overrides,
  };
}

export function believed(
  id: string,
  s: number,
  lane: number,
  overrides: Partial<BelievedObject> = {},
): BelievedObject {
  const lat = Math.sign(lane) * (Math.abs(lane) - 0.5) * 3.5;
  const zeros = [0, 0, 0, 0];
  return {
    id,
    state: [s, lat, 20, 0],
    covariance: [zeros, zeros, zeros, zeros],
    lane,
    last_fixation_tick: 10,
    last_fixation_ms: 133,
    ...overrides,
  };
}

export function divergence(
  kind: string,
  objectId: string,
  priority: number,
  overrides: Partial<DivergenceInfo> = {},
): DivergenceInfo {
  return {
    kind,
    object_id: objectId,
    magnitude: 1.0,
    staleness: 0.5,
    relevance: 1.0,
    priority,
    detail: `${kind} of ${objectId || "signal"}`,
    ...overrides,
  };
}

export function stateData(overrides: Partial<StateData> = {}): StateData {
  return {
    record: "tick",
    tick: 12,
    sim_time: 0.4,
    frame: {
      ego: {
        id: "ego",
        position: [8.0, -5.25, 0],
        velocity: [20, 0, 0],
        lane: -2,
        speed_limit: 120,
        dimension: [4.8, 1.9, 1.4],
      },
      automation: {
        takeover_request: false,
        time_until_odd_boundary: 0.0,
        criticality_level: 0,
        takeover_reason: "",
        ego_automation_state: true,
      },
      traffic: [vehicle("v1", 48.0, -1), vehicle("v2", -22.0, -1)],
    },
    belief: {
      ego: believed("ego", 8.0, -2),
      objects: [believed("v1", 48.0, -1)],
    },
    interpretation: {
      fluents: [
        ["automation", true],
        ["audio_signal", false],
        ["curr_task", "monitor"],
        ["on_lane(ego)", -2],
        ["on_lane(v1)", -1],
      ],
      occurred: [],
      relations: [
        {
          object_id: "v1",
          long: { kind: "ahead", delta_s: 40.0, gap: 35.35 },
          lane: { kind: "left", distance: 1 },
          order: 1,
        },
      ],
      gaps: [
        { lane: -1, rear: "v2", front: "v1", size: 65.5, s_min: -19.75, s_max: 45.75 },
      ],
    },
    projection: {
      task: "change_lane",
      events: [
        {
          event: "change_lane(ego,-2,-1,gap:v2:v1)",
          location: { kind: "gap", lane: -1, s_min: -19.75, s_max: 45.75, label: "gap:v2:v1" },
        },
      ],
    },
    divergences: [],
    finished: false,
    ...overrides,
  };
}

export function snapshotMessage(overrides: Partial<SnapshotData> = {}): ServerMessage {
  return { type: "snapshot", data: snapshotData(overrides) };
}

export function stateMessage(
  overrides: Partial<StateData> = {},
  latencyMs = 2.5,
): ServerMessage {
  return { type: "state", data: stateData(overrides), latency_ms: latencyMs };
}
