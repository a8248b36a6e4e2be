/**
 * Pointer to gaze plumbing.
 *
 * The bird's-eye view makes the mapping unambiguous: a screen point is a
 * road-plane point, and the gaze direction is simply that point minus the
 * ego position, z zero. The engine turns direction into fixation; no
 * attention math lives here.
 */

import { GazeMessage } from "./protocol";

export function gazeDirection(
  world: { s: number; lat: number },
  ego: { s: number; lat: number },
): [number, number, number] {
  return [world.s - ego.s, world.lat - ego.lat, 0];
}

export function gazeMessage(direction: [number, number, number]): GazeMessage {
  return { type: "gaze", direction };
}

/** Caps the sample rate; extra samples carry no information (latest wins). */
export class GazeThrottle {
  private lastMs = -Infinity;

  constructor(private readonly intervalMs: number = 1000 / 30) {}

  accept(nowMs: number): boolean {
    if (nowMs - this.lastMs < this.intervalMs) return false;
    this.lastMs = nowMs;
    return true;
  }
}

/** Holds samples while the socket is down; entries expire after windowMs. */
export class PendingGaze {
  dropped = 0;
  private entries: { at: number; message: GazeMessage }[] = [];

  constructor(private readonly windowMs: number = 1000) {}

  push(message: GazeMessage, nowMs: number): void {
    this.expire(nowMs);
    this.entries.push({ at: nowMs, message });
  }

  flush(nowMs: number): GazeMessage[] {
    this.expire(nowMs);
    const out = this.entries.map((e) => e.message);
    this.entries = [];
    return out;
  }

  get size(): number {
    return this.entries.length;
  }

  private expire(nowMs: number): void {
    const fresh = this.entries.filter((e) => nowMs - e.at <= this.windowMs);
    this.dropped += this.entries.length - fresh.length;
    this.entries = fresh;
  }
}
