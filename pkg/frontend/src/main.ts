/**
 * Playground entry point: wires the websocket, the canvas, the pointer and
 * the control panel together. All logic lives in the imported modules; this
 * file only moves data between them and the DOM.
 */

import { connectSession, sessionUrl } from "./client";
import { CONTROL_ACTIONS, CONTROL_LABELS, controlMessage, controlsEnabled } from "./controls";
import { GazeThrottle, PendingGaze, gazeDirection, gazeMessage } from "./gaze";
import { drawToCanvas, renderFrame, renderPanel, screenToWorld } from "./render";
import {
  Layer,
  ViewState,
  applyServerText,
  initialView,
  withConnection,
  withDroppedGaze,
  withLayer,
} from "./state";

let view: ViewState = initialView();

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusEl = document.getElementById("status")!;
const automationEl = document.getElementById("automation")!;
const cueEl = document.getElementById("cue")!;
const taskEl = document.getElementById("task")!;
const fluentsEl = document.getElementById("fluents")!;
const occurredEl = document.getElementById("occurred")!;
const projectedEl = document.getElementById("projected")!;
const divergencesEl = document.getElementById("divergences")!;
const gazeNoteEl = document.getElementById("gaze-note")!;
const controlsEl = document.getElementById("controls")!;
const layersEl = document.getElementById("layers")!;

const throttle = new GazeThrottle();
const pending = new PendingGaze();

const socket = connectSession(sessionUrl(window.location), {
  onOpen() {
    view = withConnection(view, "open");
    for (const msg of pending.flush(performance.now())) socket.send(msg);
    syncControls();
  },
  onText(text) {
    view = applyServerText(view, text);
  },
  onClose() {
    view = withConnection(view, "closed");
    syncControls();
  },
});

const buttons: HTMLButtonElement[] = [];
for (const action of CONTROL_ACTIONS) {
  const b = document.createElement("button");
  b.textContent = CONTROL_LABELS[action];
  b.addEventListener("click", () => socket.send(controlMessage(action)));
  controlsEl.appendChild(b);
  buttons.push(b);
}

function syncControls(): void {
  const enabled = controlsEnabled(view.connection);
  for (const b of buttons) b.disabled = !enabled;
}
syncControls();

const LAYERS: Layer[] = ["ground_truth", "belief", "gaps", "projections", "divergences"];
for (const layer of LAYERS) {
  const label = document.createElement("label");
  const box = document.createElement("input");
  box.type = "checkbox";
  box.checked = view.layers[layer];
  box.addEventListener("change", () => {
    view = withLayer(view, layer, box.checked);
  });
  label.appendChild(box);
  label.appendChild(document.createTextNode(layer.replace("_", " ")));
  layersEl.appendChild(label);
}

canvas.addEventListener("pointermove", (ev) => {
  const st = view.last;
  if (!st || !throttle.accept(performance.now())) return;
  const rect = canvas.getBoundingClientRect();
  const size = { width: canvas.width, height: canvas.height };
  const world = screenToWorld(view.camera, size, ev.clientX - rect.left, ev.clientY - rect.top);
  const ego = { s: st.frame.ego.position[0] ?? 0, lat: st.frame.ego.position[1] ?? 0 };
  const msg = gazeMessage(gazeDirection(world, ego));
  if (!socket.send(msg)) {
    pending.push(msg, performance.now());
    view = withDroppedGaze(view, pending.dropped);
  }
});

function fill(el: Element, lines: string[]): void {
  el.textContent = lines.join("\n");
}

function frame(): void {
  const dpr = window.devicePixelRatio || 1;
  const w = canvas.clientWidth * dpr;
  const h = canvas.clientHeight * dpr;
  if (canvas.width !== w || canvas.height !== h) {
    canvas.width = w;
    canvas.height = h;
  }
  const size = { width: canvas.width, height: canvas.height };
  drawToCanvas(ctx, renderFrame(view), view.camera, size);

  const panel = renderPanel(view);
  statusEl.textContent = panel.status;
  automationEl.textContent = panel.automation;
  cueEl.textContent = panel.cue;
  taskEl.textContent = panel.task;
  fill(fluentsEl, panel.fluents);
  fill(occurredEl, panel.occurred);
  fill(projectedEl, panel.projected);
  fill(divergencesEl, panel.divergences);
  gazeNoteEl.textContent = panel.gazeNote;

  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
