// WebSocket client for /session with automatic reconnect. On reconnect the
// charts refill from the snapshot stream alone; no state is kept here.

import { decodeServerMessage, encodeCommand } from "./wire.js";
import type { Command, ServerMessage } from "./wire.js";

export interface SocketHandlers {
  onMessage(msg: ServerMessage): void;
  onStatus(state: "connecting" | "open" | "closed"): void;
}

const RECONNECT_DELAY_MS = 1000;

export class SessionSocket {
  private ws: WebSocket | null = null;
  private closedByUser = false;

  constructor(
    private readonly url: string,
    private readonly handlers: SocketHandlers,
  ) {}

  connect(): void {
    this.closedByUser = false;
    this.handlers.onStatus("connecting");
    this.ws = new WebSocket(this.url);
    this.ws.onopen = () => this.handlers.onStatus("open");
    this.ws.onmessage = (ev) => {
      const msg = decodeServerMessage(String(ev.data));
      if (msg !== null) this.handlers.onMessage(msg);
    };
    this.ws.onclose = () => {
      this.handlers.onStatus("closed");
      this.ws = null;
      if (!this.closedByUser) {
        setTimeout(() => this.connect(), RECONNECT_DELAY_MS);
      }
    };
    this.ws.onerror = () => {
      // onclose follows; nothing to do here
    };
  }

  close(): void {
    this.closedByUser = true;
    this.ws?.close();
  }

  send(cmd: Command): boolean {
    if (this.ws === null || this.ws.readyState !== WebSocket.OPEN) return false;
    this.ws.send(encodeCommand(cmd));
    return true;
  }
}

export function defaultSessionUrl(): string {
  const proto = location.protocol === "https:" ? "wss" : "ws";
  return `${proto}://${location.host}/session`;
}
