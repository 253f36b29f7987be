/**
 * Client-side state.
 *
 * Everything the renderer shows lives here. Socket callbacks and input
 * handlers only enqueue into this model; the frame loop reads it back out
 * once per animation frame. No engagement math happens on this side: pi,
 * polygons, and pattern states are taken verbatim from server snapshots.
 */

import type {
  BindingView,
  PatternEvent,
  ServerMessage,
  Snapshot,
  Vec2,
} from "./schema.js";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export const EVENT_LOG_CAPACITY = 20;

export interface LoggedEvent {
  t: number;
  kind: string;
  actor: string;
  device: string;
  detail: string; // "" except "1 -> 2" style for level changes
}

export function describeEvent(binding: BindingView, event: PatternEvent): LoggedEvent {
  const detail =
    event.kind === "level_changed" ? `${event.from} -> ${event.to}` : "";
  return {
    t: event.t,
    kind: event.kind,
    actor: binding.actor,
    device: binding.device,
    detail,
  };
}

/** Fixed-capacity event log; newest entry first. */
export class EventLog {
  private items: LoggedEvent[] = [];

  constructor(readonly capacity: number = EVENT_LOG_CAPACITY) {}

  push(entry: LoggedEvent): void {
    this.items.unshift(entry);
    if (this.items.length > this.capacity) this.items.length = this.capacity;
  }

  entries(): readonly LoggedEvent[] {
    return this.items;
  }

  /** Download format: one JSON object per line, oldest first. */
  toJsonl(): string {
    return [...this.items]
      .reverse()
      .map((e) => JSON.stringify(e))
      .join("\n");
  }

  clear(): void {
    this.items = [];
  }
}

/** Lets one message through per animation frame. */
export class FrameGate {
  private lastFrame = -1;

  tryTake(frame: number): boolean {
    if (frame === this.lastFrame) return false;
    this.lastFrame = frame;
    return true;
  }
}

/**
 * Per-control rate limiter: at most one send per minIntervalMs, trailing
 * value delivered on flush once the interval has passed. 100 ms keeps each
 * slider under 10 messages a second.
 */
export class Debouncer<T> {
  private lastSent = -Infinity;
  private pending: T | undefined;
  private hasPending = false;

  constructor(readonly minIntervalMs = 100) {}

  /** Returns the value to send now, or undefined if it was deferred. */
  submit(value: T, now: number): T | undefined {
    if (now - this.lastSent >= this.minIntervalMs) {
      this.lastSent = now;
      this.hasPending = false;
      this.pending = undefined;
      return value;
    }
    this.pending = value;
    this.hasPending = true;
    return undefined;
  }

  /** Called each frame; releases the latest deferred value when allowed. */
  flush(now: number): T | undefined {
    if (!this.hasPending || now - this.lastSent < this.minIntervalMs) {
      return undefined;
    }
    const value = this.pending as T;
    this.pending = undefined;
    this.hasPending = false;
    this.lastSent = now;
    return value;
  }
}

export type ParamValue = number | number[];

/**
 * One tunable parameter bound to a server path. The committed value only
 * moves on an ack; an error reply surfaces inline and the widget snaps back.
 */
export class ParamControl {
  committed: ParamValue;
  error: string | null = null;
  private readonly debounce = new Debouncer<ParamValue>();
  private readonly inFlight = new Map<number, ParamValue>();

  constructor(
    readonly name: string,
    initial: ParamValue,
  ) {
    this.committed = initial;
  }

  change(value: ParamValue, now: number): ParamValue | undefined {
    return this.debounce.submit(value, now);
  }

  flush(now: number): ParamValue | undefined {
    return this.debounce.flush(now);
  }

  /** Record a SetParam that went out under the given message id. */
  sent(id: number, value: ParamValue): void {
    this.inFlight.set(id, value);
  }

  /** True when the ack belonged to this control. */
  onAck(id: number | null): boolean {
    if (id === null || !this.inFlight.has(id)) return false;
    this.committed = this.inFlight.get(id)!;
    this.inFlight.delete(id);
    this.error = null;
    return true;
  }

  /** True when the error belonged to this control; committed is untouched. */
  onError(id: number | null, reason: string): boolean {
    if (id === null || !this.inFlight.has(id)) return false;
    this.inFlight.delete(id);
    this.error = reason;
    return true;
  }
}

export interface DragState {
  actor: string;
  /** last pointer position in canvas pixels */
  screen: Vec2;
  /** arena-space target not yet sent, if any */
  pendingTarget: Vec2 | null;
}

export class ViewModel {
  snapshot: Snapshot | null = null;
  status: ConnectionStatus = "connecting";
  drag: DragState | null = null;
  readonly log = new EventLog();
  readonly controls = new Map<string, ParamControl>();

  private nextId = 1;
  private lastLoggedTick: number | null = null;

  allocId(): number {
    return this.nextId++;
  }

  control(name: string, initial: ParamValue): ParamControl {
    let c = this.controls.get(name);
    if (!c) {
      c = new ParamControl(name, initial);
      this.controls.set(name, c);
    }
    return c;
  }

  applyServer(msg: ServerMessage): void {
    if (msg.type === "snapshot") {
      this.acceptSnapshot(msg);
      return;
    }
    for (const control of this.controls.values()) {
      const handled =
        msg.type === "ack"
          ? control.onAck(msg.id)
          : control.onError(msg.id, msg.reason);
      if (handled) return;
    }
  }

  private acceptSnapshot(snap: Snapshot): void {
    this.snapshot = snap;
    // each snapshot only carries events that fired on its own tick; guard
    // against logging a tick twice if the server ever re-sends one
    if (snap.tick === this.lastLoggedTick) return;
    this.lastLoggedTick = snap.tick;
    for (const binding of snap.bindings) {
      for (const event of binding.events) {
        this.log.push(describeEvent(binding, event));
      }
    }
  }
}
