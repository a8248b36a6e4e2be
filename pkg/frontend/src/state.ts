/**
 * View state of the playground: the last complete state message plus purely
 * presentational knobs (camera, layer toggles, connection, banner).
 *
 * State is immutable; every transition returns a new object so the render
 * loop can read a consistent snapshot at any time.
 */

import {
  ProtocolError,
  ServerMessage,
  SnapshotData,
  StateData,
  parseServerMessage,
} from "./protocol";

export type Connection = "connecting" | "open" | "closed";

export type Layer = "ground_truth" | "belief" | "gaps" | "projections" | "divergences";

export interface Camera {
  centerS: number;
  centerLat: number;
  metersPerPixel: number;
}

export interface ViewState {
  connection: Connection;
  snapshot: SnapshotData | null;
  last: StateData | null;
  banner: string | null;
  layers: Record<Layer, boolean>;
  camera: Camera;
  droppedGaze: number;
}

const LOOK_AHEAD_M = 30;

export function initialView(): ViewState {
  return {
    connection: "connecting",
    snapshot: null,
    last: null,
    banner: null,
    layers: {
      ground_truth: true,
      belief: true,
      gaps: true,
      projections: true,
      divergences: true,
    },
    camera: { centerS: 0, centerLat: 0, metersPerPixel: 0.25 },
    droppedGaze: 0,
  };
}

export function laneCenter(lane: number, laneWidth: number): number {
  return Math.sign(lane) * (Math.abs(lane) - 0.5) * laneWidth;
}

function cameraForSnapshot(camera: Camera, snapshot: SnapshotData): Camera {
  const lanes = snapshot.road.drivable_lanes;
  const mid =
    lanes.reduce((acc, lane) => acc + laneCenter(lane, snapshot.road.lane_width), 0) /
    Math.max(1, lanes.length);
  return { ...camera, centerLat: mid };
}

export function applyMessage(view: ViewState, msg: ServerMessage): ViewState {
  switch (msg.type) {
    case "snapshot":
      // a snapshot opens a session or follows a restart; the belief layer
      // must be empty until the first tick arrives
      return {
        ...view,
        snapshot: msg.data,
        last: null,
        banner: null,
        camera: cameraForSnapshot(view.camera, msg.data),
      };
    case "state": {
      const egoS = msg.data.frame.ego.position[0] ?? view.camera.centerS;
      const camera = { ...view.camera, centerS: egoS + LOOK_AHEAD_M };
      return { ...view, last: msg.data, camera, banner: null };
    }
    case "error":
      return { ...view, banner: msg.message };
  }
}

export function applyServerText(view: ViewState, text: string): ViewState {
  let msg: ServerMessage;
  try {
    msg = parseServerMessage(text);
  } catch (err) {
    const reason = err instanceof ProtocolError ? err.message : String(err);
    return { ...view, banner: reason };
  }
  return applyMessage(view, msg);
}

export function withConnection(view: ViewState, connection: Connection): ViewState {
  const banner = connection === "closed" ? "connection lost" : view.banner;
  return { ...view, connection, banner };
}

export function withLayer(view: ViewState, layer: Layer, on: boolean): ViewState {
  return { ...view, layers: { ...view.layers, [layer]: on } };
}

export function withDroppedGaze(view: ViewState, dropped: number): ViewState {
  return { ...view, droppedGaze: dropped };
}
