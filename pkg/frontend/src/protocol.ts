/**
 * Wire types of the session websocket, mirrored from the server.
 *
 * The playground never computes domain logic; these types carry the engine's
 * output verbatim and the UI renders it. Parsing is structural: enough to
 * reject garbage with a usable error, trusting the field details beyond that.
 */

export interface RoadInfo {
  origin: number[];
  heading: number[];
  lane_width: number;
  drivable_lanes: number[];
  construction_site_s: number | null;
}

export interface SnapshotData {
  scenario: string;
  description: string;
  tick_rate: number;
  duration: number;
  tick_count: number;
  gaze_mode: string;
  ego_id: string;
  road: RoadInfo;
}

export interface FrameEgo {
  id: string;
  position: number[];
  velocity: number[];
  lane: number;
  speed_limit: number;
  dimension: number[];
}

export interface FrameVehicle {
  id: string;
  type: string;
  position: number[];
  velocity: number[];
  dimension: number[];
  lane: number;
  fixation_probability: number;
  fixation_time: number;
}

export interface AutomationInfo {
  takeover_request: boolean;
  time_until_odd_boundary: number;
  criticality_level: number;
  takeover_reason: string;
  ego_automation_state: boolean;
}

export interface BelievedObject {
  id: string;
  state: number[];
  covariance: number[][];
  lane: number;
  last_fixation_tick: number;
  last_fixation_ms: number;
}

export interface RelationInfo {
  object_id: string;
  long: { kind: string; delta_s: number; gap: number };
  lane: { kind: string; distance: number };
  order: number;
}

export interface GapInfo {
  lane: number;
  rear: string;
  front: string;
  size: number;
  s_min: number;
  s_max: number;
}

export interface LocationInfo {
  kind: string;
  lane: number;
  s_min: number;
  s_max: number;
  label: string;
}

export interface DivergenceInfo {
  kind: string;
  object_id: string;
  magnitude: number;
  staleness: number;
  relevance: number;
  priority: number;
  detail: string;
}

export interface StateData {
  record: "tick";
  tick: number;
  sim_time: number;
  frame: { ego: FrameEgo; automation: AutomationInfo; traffic: FrameVehicle[] };
  belief: { ego: BelievedObject | null; objects: BelievedObject[] };
  interpretation: {
    fluents: [string, boolean | number | string][];
    occurred: string[];
    relations: RelationInfo[];
    gaps: GapInfo[];
  };
  projection: { task: string; events: { event: string; location: LocationInfo }[] };
  divergences: DivergenceInfo[];
  finished: boolean;
}

export type ServerMessage =
  | { type: "snapshot"; data: SnapshotData }
  | { type: "state"; data: StateData; latency_ms: number }
  | { type: "error"; message: string };

export type ControlAction = "pause" | "resume" | "restart" | "takeover_now";

export interface GazeMessage {
  type: "gaze";
  direction: [number, number, number];
}

export interface ControlMessage {
  type: "control";
  action: ControlAction;
}

export type ClientMessage = GazeMessage | ControlMessage;

export class ProtocolError extends Error {}

function isRecord(x: unknown): x is Record<string, unknown> {
  return typeof x === "object" && x !== null && !Array.isArray(x);
}

export function parseServerMessage(text: string): ServerMessage {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    throw new ProtocolError("message is not valid JSON");
  }
  if (!isRecord(raw) || typeof raw.type !== "string") {
    throw new ProtocolError("message has no type");
  }
  if (raw.type === "snapshot") {
    if (!isRecord(raw.data)) throw new ProtocolError("snapshot without data");
    return raw as unknown as ServerMessage;
  }
  if (raw.type === "state") {
    if (!isRecord(raw.data) || raw.data.record !== "tick") {
      throw new ProtocolError("state without a tick record");
    }
    return raw as unknown as ServerMessage;
  }
  if (raw.type === "error") {
    if (typeof raw.message !== "string") throw new ProtocolError("error without message");
    return raw as unknown as ServerMessage;
  }
  throw new ProtocolError(`unknown message type ${raw.type}`);
}
