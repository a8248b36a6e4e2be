import { describe, expect, it } from "vitest";

import { DrawOp, renderFrame, renderPanel, screenToWorld, worldToScreen } from "../src/render";
import { ViewState, applyMessage, initialView } from "../src/state";
import { believed, divergence, snapshotMessage, stateMessage, vehicle } from "./fixtures";
import { StateData } from "../src/protocol";

function viewWith(state: Partial<StateData> = {}): ViewState {
  return applyMessage(applyMessage(initialView(), snapshotMessage()), stateMessage(state));
}

function ofKind<K extends DrawOp["kind"]>(ops: DrawOp[], kind: K) {
  return ops.filter((op) => op.kind === kind) as Extract<DrawOp, { kind: K }>[];
}

describe("renderFrame", () => {
  it("renders the canonical frame as a stable op list", () => {
    expect(renderFrame(viewWith())).toMatchSnapshot();
  });

  it("waits with a banner before the first state arrives", () => {
    const ops = renderFrame(applyMessage(initialView(), snapshotMessage()));
    expect(ops).toEqual([{ kind: "banner", text: "waiting for session" }]);
  });

  it("renders only outlines when nothing is believed", () => {
    const ops = renderFrame(viewWith({ belief: { ego: believed("ego", 8, -2), objects: [] } }));
    expect(ofKind(ops, "belief")).toEqual([]);
    expect(ofKind(ops, "vehicle").map((op) => op.id)).toEqual(["ego", "v1", "v2"]);
  });

  it("renders believed glyphs only for ids in the believed set", () => {
    const ops = renderFrame(viewWith());
    expect(ofKind(ops, "belief").map((op) => op.id)).toEqual(["v1"]);
  });

  it("shows a dual glyph when belief and truth disagree by meters", () => {
    const ops = renderFrame(
      viewWith({
        belief: { ego: believed("ego", 8, -2), objects: [believed("v1", 44.0, -1)] },
      }),
    );
    const glyph = ofKind(ops, "belief")[0]!;
    expect(glyph.drift).toBeCloseTo(4.0, 9);
    const link = ofKind(ops, "belief_link")[0]!;
    expect(link).toMatchObject({ id: "v1", fromS: 48.0, toS: 44.0 });
    // the actual outline stays where the vehicle really is
    const outline = ofKind(ops, "vehicle").find((op) => op.id === "v1")!;
    expect(outline.s).toBe(48.0);
  });

  it("keeps belief and truth as one glyph pair without a link at small drift", () => {
    const ops = renderFrame(
      viewWith({
        belief: { ego: believed("ego", 8, -2), objects: [believed("v1", 47.0, -1)] },
      }),
    );
    expect(ofKind(ops, "belief_link")).toEqual([]);
  });

  it("cues the head of the divergence list", () => {
    const ops = renderFrame(
      viewWith({
        divergences: [
          divergence("missing_object", "v2", 0.8),
          divergence("position_divergence", "v1", 0.55),
        ],
      }),
    );
    const cues = ofKind(ops, "cue");
    expect(cues).toHaveLength(1);
    expect(cues[0]).toMatchObject({ target: "v2", divergence: "missing_object" });
    // the arrow points from the ego to the missed vehicle's actual position
    expect(cues[0]!.toS).toBe(-22.0);
  });

  it("moves the cue when the list order changes", () => {
    const ops = renderFrame(
      viewWith({
        divergences: [
          divergence("position_divergence", "v1", 0.9),
          divergence("missing_object", "v2", 0.7),
        ],
      }),
    );
    expect(ofKind(ops, "cue")[0]).toMatchObject({ target: "v1" });
  });

  it("cues the dashboard for signal divergences without an object", () => {
    const ops = renderFrame(
      viewWith({ divergences: [divergence("missed_takeover_signal", "", 1.0)] }),
    );
    const cue = ofKind(ops, "cue")[0]!;
    expect(cue.toS).toBe(8.0);
    expect(cue.toLat).toBe(-5.25);
  });

  it("omits layers that are toggled off", () => {
    const base = viewWith({ divergences: [divergence("missing_object", "v2", 0.8)] });
    const noBelief = { ...base, layers: { ...base.layers, belief: false } };
    expect(ofKind(renderFrame(noBelief), "belief")).toEqual([]);
    const noTruth = { ...base, layers: { ...base.layers, ground_truth: false } };
    expect(ofKind(renderFrame(noTruth), "vehicle")).toEqual([]);
    const noCue = { ...base, layers: { ...base.layers, divergences: false } };
    expect(ofKind(renderFrame(noCue), "cue")).toEqual([]);
    const noGaps = { ...base, layers: { ...base.layers, gaps: false } };
    expect(ofKind(renderFrame(noGaps), "gap")).toEqual([]);
    const noProj = { ...base, layers: { ...base.layers, projections: false } };
    expect(ofKind(renderFrame(noProj), "location")).toEqual([]);
  });

  it("draws projected locations on their target lane", () => {
    const ops = renderFrame(viewWith());
    const loc = ofKind(ops, "location")[0]!;
    expect(loc).toMatchObject({ lane: -1, label: "gap:v2:v1" });
    expect(loc.lat).toBeCloseTo(-1.75, 12);
  });

  it("keeps the last good frame under an error banner", () => {
    const good = viewWith();
    const banner = { ...good, banner: "message is not valid JSON" };
    const ops = renderFrame(banner);
    expect(ofKind(ops, "banner")[0]).toEqual({ kind: "banner", text: "message is not valid JSON" });
    expect(ofKind(ops, "vehicle").length).toBeGreaterThan(0);
  });

  it("announces the end of the scenario", () => {
    const ops = renderFrame(viewWith({ finished: true }));
    expect(ofKind(ops, "banner").map((op) => op.text)).toContain("scenario finished");
  });
});

describe("renderPanel", () => {
  it("summarizes the cue from the head of the divergence list", () => {
    const panel = renderPanel(
      viewWith({
        divergences: [
          divergence("missing_object", "v2", 0.8),
          divergence("position_divergence", "v1", 0.55),
        ],
      }),
    );
    expect(panel.cue).toBe("look: v2 (missing_object, p=0.80)");
    expect(panel.divergences[0]).toContain("missing_object v2");
  });

  it("reports all clear when nothing diverges", () => {
    expect(renderPanel(viewWith()).cue).toBe("all clear");
  });

  it("renders fluents and projections verbatim", () => {
    const panel = renderPanel(viewWith());
    expect(panel.fluents).toContain("curr_task = monitor");
    expect(panel.fluents).toContain("on_lane(ego) = -2");
    expect(panel.projected).toEqual(["change_lane(ego,-2,-1,gap:v2:v1)"]);
    expect(panel.task).toBe("task: change_lane");
  });

  it("surfaces a pending take-over request", () => {
    const panel = renderPanel(
      viewWith({
        frame: {
          ...stateMessageFrame(),
          automation: {
            takeover_request: true,
            time_until_odd_boundary: 9.6,
            criticality_level: 2,
            takeover_reason: "lane closed",
            ego_automation_state: true,
          },
        },
      }),
    );
    expect(panel.automation).toBe("take-over requested: lane closed (9.6 s)");
  });

  it("notes dropped gaze samples", () => {
    const view = { ...viewWith(), droppedGaze: 3 };
    expect(renderPanel(view).gazeNote).toBe("3 gaze samples dropped while offline");
  });
});

function stateMessageFrame() {
  return {
    ego: {
      id: "ego",
      position: [8.0, -5.25, 0],
      velocity: [20, 0, 0],
      lane: -2,
      speed_limit: 120,
      dimension: [4.8, 1.9, 1.4],
    },
    traffic: [vehicle("v1", 48.0, -1), vehicle("v2", -22.0, -1)],
  };
}

describe("coordinate mapping", () => {
  const camera = { centerS: 38.0, centerLat: -3.5, metersPerPixel: 0.25 };
  const size = { width: 1200, height: 560 };

  it("round-trips world to screen and back", () => {
    const p = worldToScreen(camera, size, 48.0, -1.75);
    const w = screenToWorld(camera, size, p.x, p.y);
    expect(w.s).toBeCloseTo(48.0, 9);
    expect(w.lat).toBeCloseTo(-1.75, 9);
  });

  it("puts the camera center in the middle of the canvas", () => {
    const p = worldToScreen(camera, size, 38.0, -3.5);
    expect(p).toEqual({ x: 600, y: 280 });
  });
});
