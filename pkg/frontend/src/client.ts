/** Thin websocket wrapper; all message handling stays in the caller. */

import { ClientMessage } from "./protocol";

export interface SocketHooks {
  onOpen(): void;
  onText(text: string): void;
  onClose(): void;
}

export interface SessionSocket {
  send(message: ClientMessage): boolean;
  close(): void;
}

export function sessionUrl(loc: { protocol: string; host: string }): string {
  const scheme = loc.protocol === "https:" ? "wss" : "ws";
  return `${scheme}://${loc.host}/ws/session`;
}

export function connectSession(
  url: string,
  hooks: SocketHooks,
  factory: (url: string) => WebSocket = (u) => new WebSocket(u),
): SessionSocket {
  const ws = factory(url);
  ws.onopen = () => hooks.onOpen();
  ws.onmessage = (ev) => hooks.onText(String(ev.data));
  ws.onclose = () => hooks.onClose();
  ws.onerror = () => {
    // the close event follows; nothing useful to surface here
  };
  return {
    send(message: ClientMessage): boolean {
      if (ws.readyState !== WebSocket.OPEN) return false;
      ws.send(JSON.stringify(message));
      return true;
    },
    close(): void {
      ws.close();
    },
  };
}
