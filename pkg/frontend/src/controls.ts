/** Control panel actions mapped onto the wire protocol. */

import { ControlAction, ControlMessage } from "./protocol";
import { Connection } from "./state";

export const CONTROL_ACTIONS: readonly ControlAction[] = [
  "pause",
  "resume",
  "restart",
  "takeover_now",
];

export const CONTROL_LABELS: Record<ControlAction, string> = {
  pause: "Pause",
  resume: "Resume",
  restart: "Restart",
  takeover_now: "Take over now",
};

export function controlMessage(action: ControlAction): ControlMessage {
  return { type: "control", action };
}

export function controlsEnabled(connection: Connection): boolean {
  return connection === "open";
}
