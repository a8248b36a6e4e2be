/**
 * Rendering as data: a state message and view state produce a flat list of
 * draw operations in road coordinates, which the canvas executor then maps
 * to pixels. Tests assert on the operation list; the executor stays dumb.
 *
 * Everything drawn comes verbatim from the engine's message. The only
 * arithmetic here is presentational (lane centers, drift distance for the
 * dual glyph connector, cue arrow endpoints).
 */

import { DivergenceInfo, StateData } from "./protocol";
import { Camera, ViewState, laneCenter } from "./state";

export interface Size {
  width: number;
  height: number;
}

export type DrawOp =
  | { kind: "banner"; text: string }
  | { kind: "lane"; lane: number; lat: number; width: number }
  | { kind: "site"; s: number }
  | {
      kind: "vehicle";
      id: string;
      s: number;
      lat: number;
      length: number;
      width: number;
      style: "ego" | "outline";
    }
  | {
      kind: "belief";
      id: string;
      s: number;
      lat: number;
      length: number;
      width: number;
      drift: number | null;
    }
  | { kind: "belief_link"; id: string; fromS: number; fromLat: number; toS: number; toLat: number }
  | { kind: "gap"; lane: number; lat: number; sMin: number; sMax: number; rear: string; front: string }
  | { kind: "location"; lane: number; lat: number; sMin: number; sMax: number; locKind: string; label: string }
  | {
      kind: "cue";
      target: string;
      divergence: string;
      fromS: number;
      fromLat: number;
      toS: number;
      toLat: number;
      priority: number;
    };

/** Drift beyond which believed and actual positions get an explicit connector. */
export const DUAL_GLYPH_MIN_M = 2.0;

const DEFAULT_DIMENSION: [number, number] = [4.5, 1.8];

export function worldToScreen(camera: Camera, size: Size, s: number, lat: number): { x: number; y: number } {
  return {
    x: size.width / 2 + (s - camera.centerS) / camera.metersPerPixel,
    y: size.height / 2 - (lat - camera.centerLat) / camera.metersPerPixel,
  };
}

export function screenToWorld(camera: Camera, size: Size, x: number, y: number): { s: number; lat: number } {
  return {
    s: camera.centerS + (x - size.width / 2) * camera.metersPerPixel,
    lat: camera.centerLat - (y - size.height / 2) * camera.metersPerPixel,
  };
}

function cueTarget(head: DivergenceInfo, st: StateData): { s: number; lat: number } {
  for (const v of st.frame.traffic) {
    if (v.id === head.object_id) return { s: v.position[0] ?? 0, lat: v.position[1] ?? 0 };
  }
  for (const b of st.belief.objects) {
    if (b.id === head.object_id) return { s: b.state[0] ?? 0, lat: b.state[1] ?? 0 };
  }
  return { s: st.frame.ego.position[0] ?? 0, lat: st.frame.ego.position[1] ?? 0 };
}

export function renderFrame(view: ViewState): DrawOp[] {
  const ops: DrawOp[] = [];
  if (view.banner) ops.push({ kind: "banner", text: view.banner });
  if (!view.snapshot || !view.last) {
    if (!view.banner) ops.push({ kind: "banner", text: "waiting for session" });
    return ops;
  }
  const road = view.snapshot.road;
  const st = view.last;

  for (const lane of [...road.drivable_lanes].sort((a, b) => a - b)) {
    ops.push({ kind: "lane", lane, lat: laneCenter(lane, road.lane_width), width: road.lane_width });
  }
  if (road.construction_site_s !== null) {
    ops.push({ kind: "site", s: road.construction_site_s });
  }

  if (view.layers.ground_truth) {
    const ego = st.frame.ego;
    ops.push({
      kind: "vehicle",
      id: ego.id,
      s: ego.position[0] ?? 0,
      lat: ego.position[1] ?? 0,
      length: ego.dimension[0] ?? DEFAULT_DIMENSION[0],
      width: ego.dimension[1] ?? DEFAULT_DIMENSION[1],
      style: "ego",
    });
    for (const v of st.frame.traffic) {
      ops.push({
        kind: "vehicle",
        id: v.id,
        s: v.position[0] ?? 0,
        lat: v.position[1] ?? 0,
        length: v.dimension[0] ?? DEFAULT_DIMENSION[0],
        width: v.dimension[1] ?? DEFAULT_DIMENSION[1],
        style: "outline",
      });
    }
  }

  if (view.layers.belief) {
    const actual = new Map(st.frame.traffic.map((v) => [v.id, v]));
    for (const b of st.belief.objects) {
      const truth = actual.get(b.id);
      const s = b.state[0] ?? 0;
      const lat = b.state[1] ?? 0;
      const drift = truth
        ? Math.hypot(s - (truth.position[0] ?? 0), lat - (truth.position[1] ?? 0))
        : null;
      ops.push({
        kind: "belief",
        id: b.id,
        s,
        lat,
        length: truth?.dimension[0] ?? DEFAULT_DIMENSION[0],
        width: truth?.dimension[1] ?? DEFAULT_DIMENSION[1],
        drift,
      });
      if (truth && drift !== null && drift > DUAL_GLYPH_MIN_M) {
        ops.push({
          kind: "belief_link",
          id: b.id,
          fromS: truth.position[0] ?? 0,
          fromLat: truth.position[1] ?? 0,
          toS: s,
          toLat: lat,
        });
      }
    }
  }

  if (view.layers.gaps) {
    for (const g of st.interpretation.gaps) {
      ops.push({
        kind: "gap",
        lane: g.lane,
        lat: laneCenter(g.lane, road.lane_width),
        sMin: g.s_min,
        sMax: g.s_max,
        rear: g.rear,
        front: g.front,
      });
    }
  }

  if (view.layers.projections) {
    for (const ev of st.projection.events) {
      const loc = ev.location;
      ops.push({
        kind: "location",
        lane: loc.lane,
        lat: laneCenter(loc.lane, road.lane_width),
        sMin: loc.s_min,
        sMax: loc.s_max,
        locKind: loc.kind,
        label: loc.label,
      });
    }
  }

  const head = st.divergences[0];
  if (view.layers.divergences && head) {
    const target = cueTarget(head, st);
    ops.push({
      kind: "cue",
      target: head.object_id,
      divergence: head.kind,
      fromS: st.frame.ego.position[0] ?? 0,
      fromLat: st.frame.ego.position[1] ?? 0,
      toS: target.s,
      toLat: target.lat,
      priority: head.priority,
    });
  }

  if (st.finished) ops.push({ kind: "banner", text: "scenario finished" });
  return ops;
}

export interface PanelModel {
  status: string;
  automation: string;
  task: string;
  fluents: string[];
  occurred: string[];
  projected: string[];
  divergences: string[];
  cue: string;
  gazeNote: string;
}

function fmt(x: number): string {
  return x.toFixed(2);
}

export function renderPanel(view: ViewState): PanelModel {
  const st = view.last;
  const gazeNote =
    view.droppedGaze > 0 ? `${view.droppedGaze} gaze samples dropped while offline` : "";
  if (!st || !view.snapshot) {
    return {
      status: view.connection,
      automation: "",
      task: "",
      fluents: [],
      occurred: [],
      projected: [],
      divergences: [],
      cue: "",
      gazeNote,
    };
  }
  const auto = st.frame.automation;
  const head = st.divergences[0];
  return {
    status: `${view.connection}, tick ${st.tick}/${view.snapshot.tick_count}`,
    automation: auto.takeover_request
      ? `take-over requested: ${auto.takeover_reason} (${auto.time_until_odd_boundary.toFixed(1)} s)`
      : auto.ego_automation_state
        ? "automation driving"
        : "manual driving",
    task: `task: ${st.projection.task}`,
    fluents: st.interpretation.fluents.map(([t, v]) => `${t} = ${v}`),
    occurred: st.interpretation.occurred,
    projected: st.projection.events.map((ev) => ev.event),
    divergences: st.divergences.map(
      (d) => `${d.kind} ${d.object_id || "(signal)"} p=${fmt(d.priority)} ${d.detail}`,
    ),
    cue: head ? `look: ${head.object_id || "dashboard"} (${head.kind}, p=${fmt(head.priority)})` : "all clear",
    gazeNote,
  };
}

const COLORS = {
  road: "#2b2e33",
  laneLine: "#4b4f57",
  site: "#c0392b",
  ego: "#7fb4ff",
  outline: "#aab2bf",
  belief: "rgba(126, 211, 134, 0.85)",
  link: "#e0b050",
  gap: "rgba(110, 140, 200, 0.25)",
  location: "rgba(126, 211, 134, 0.2)",
  cue: "#ff8c42",
  banner: "#e8eaed",
} as const;

export function drawToCanvas(
  ctx: CanvasRenderingContext2D,
  ops: DrawOp[],
  camera: Camera,
  size: Size,
): void {
  const px = (m: number) => m / camera.metersPerPixel;
  ctx.clearRect(0, 0, size.width, size.height);
  ctx.fillStyle = "#17191c";
  ctx.fillRect(0, 0, size.width, size.height);

  const rect = (s: number, lat: number, length: number, width: number) => {
    const p = worldToScreen(camera, size, s, lat);
    return { x: p.x - px(length) / 2, y: p.y - px(width) / 2, w: px(length), h: px(width) };
  };

  for (const op of ops) {
    switch (op.kind) {
      case "lane": {
        const p = worldToScreen(camera, size, camera.centerS, op.lat);
        ctx.fillStyle = COLORS.road;
        ctx.fillRect(0, p.y - px(op.width) / 2, size.width, px(op.width));
        ctx.strokeStyle = COLORS.laneLine;
        ctx.setLineDash([12, 10]);
        ctx.beginPath();
        ctx.moveTo(0, p.y - px(op.width) / 2);
        ctx.lineTo(size.width, p.y - px(op.width) / 2);
        ctx.stroke();
        ctx.setLineDash([]);
        break;
      }
      case "site": {
        const p = worldToScreen(camera, size, op.s, camera.centerLat);
        ctx.strokeStyle = COLORS.site;
        ctx.lineWidth = 3;
        ctx.beginPath();
        ctx.moveTo(p.x, 0);
        ctx.lineTo(p.x, size.height);
        ctx.stroke();
        ctx.lineWidth = 1;
        break;
      }
      case "vehicle": {
        const r = rect(op.s, op.lat, op.length, op.width);
        ctx.strokeStyle = op.style === "ego" ? COLORS.ego : COLORS.outline;
        ctx.lineWidth = op.style === "ego" ? 2.5 : 1.5;
        ctx.strokeRect(r.x, r.y, r.w, r.h);
        if (op.style === "ego") {
          ctx.fillStyle = "rgba(127, 180, 255, 0.25)";
          ctx.fillRect(r.x, r.y, r.w, r.h);
        }
        ctx.fillStyle = COLORS.outline;
        ctx.font = "11px system-ui";
        ctx.fillText(op.id, r.x, r.y - 4);
        ctx.lineWidth = 1;
        break;
      }
      case "belief": {
        const r = rect(op.s, op.lat, op.length, op.width);
        ctx.fillStyle = COLORS.belief;
        ctx.fillRect(r.x, r.y, r.w, r.h);
        break;
      }
      case "belief_link": {
        const a = worldToScreen(camera, size, op.fromS, op.fromLat);
        const b = worldToScreen(camera, size, op.toS, op.toLat);
        ctx.strokeStyle = COLORS.link;
        ctx.setLineDash([4, 4]);
        ctx.beginPath();
        ctx.moveTo(a.x, a.y);
        ctx.lineTo(b.x, b.y);
        ctx.stroke();
        ctx.setLineDash([]);
        break;
      }
      case "gap": {
        const a = worldToScreen(camera, size, op.sMin, op.lat);
        const w = px(op.sMax - op.sMin);
        ctx.fillStyle = COLORS.gap;
        ctx.fillRect(a.x, a.y - px(1.2), w, px(2.4));
        break;
      }
      case "location": {
        const a = worldToScreen(camera, size, op.sMin, op.lat);
        const w = px(op.sMax - op.sMin);
        ctx.fillStyle = COLORS.location;
        ctx.fillRect(a.x, a.y - px(1.5), w, px(3.0));
        ctx.strokeStyle = COLORS.belief;
        ctx.strokeRect(a.x, a.y - px(1.5), w, px(3.0));
        ctx.fillStyle = COLORS.banner;
        ctx.font = "10px system-ui";
        ctx.fillText(op.label, a.x + 2, a.y - px(1.5) - 3);
        break;
      }
      case "cue": {
        const a = worldToScreen(camera, size, op.fromS, op.fromLat);
        const b = worldToScreen(camera, size, op.toS, op.toLat);
        ctx.strokeStyle = COLORS.cue;
        ctx.lineWidth = 2;
        ctx.beginPath();
        ctx.moveTo(a.x, a.y);
        ctx.lineTo(b.x, b.y);
        ctx.stroke();
        ctx.beginPath();
        ctx.arc(b.x, b.y, 14, 0, Math.PI * 2);
        ctx.stroke();
        ctx.lineWidth = 1;
        break;
      }
      case "banner": {
        ctx.fillStyle = "rgba(0, 0, 0, 0.65)";
        ctx.fillRect(0, 0, size.width, 28);
        ctx.fillStyle = COLORS.banner;
        ctx.font = "13px system-ui";
        ctx.fillText(op.text, 10, 18);
        break;
      }
    }
  }
}
