/**
 * Thin wrapper over a WebSocket: parses server frames, exposes send-if-open.
 *
 * The socket constructor is injectable so tests can drive the client with a
 * fake socket or with the "ws" package under Node; the browser entry point
 * just uses the native WebSocket.
 */

import {
  parseServerMessage,
  type ClientMessage,
  type ServerMessage,
} from "./schema.js";
import type { ConnectionStatus } from "./model.js";

export const SOCKET_OPEN = 1;

/** The slice of the WebSocket API this client relies on. */
export interface SocketLike {
  readyState: number;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  send(data: string): void;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ClientHooks {
  onStatus(status: ConnectionStatus): void;
  onMessage(msg: ServerMessage): void;
}

export class ServiceClient {
  private sock: SocketLike | null = null;

  constructor(
    private readonly hooks: ClientHooks,
    private readonly factory: SocketFactory = (url) =>
      new WebSocket(url) as unknown as SocketLike,
  ) {}

  connect(url: string): void {
    this.sock?.close();
    this.hooks.onStatus("connecting");
    const sock = this.factory(url);
    this.sock = sock;
    // stale-socket guard: callbacks from a replaced connection are ignored
    sock.onopen = () => {
      if (sock === this.sock) this.hooks.onStatus("connected");
    };
    sock.onclose = () => {
      if (sock === this.sock) this.hooks.onStatus("disconnected");
    };
    sock.onerror = () => {
      // close fires right after; nothing extra to do
    };
    sock.onmessage = (ev) => {
      if (sock !== this.sock) return;
      const msg = parseServerMessage(String(ev.data));
      if (msg) this.hooks.onMessage(msg);
    };
  }

  get open(): boolean {
    return this.sock !== null && this.sock.readyState === SOCKET_OPEN;
  }

  /** Returns false (and sends nothing) unless the socket is open. */
  send(msg: ClientMessage): boolean {
    if (!this.open || !this.sock) return false;
    this.sock.send(JSON.stringify(msg));
    return true;
  }

  close(): void {
    const sock = this.sock;
    this.sock = null;
    sock?.close();
  }
}
