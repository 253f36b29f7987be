/**
 * Wire schema for the engagement service, protocol version "1".
 *
 * This file is the shared contract: the Python service emits exactly these
 * shapes as JSON text frames over the WebSocket, and everything the UI draws
 * is read straight out of them. Keep it in sync with the server by hand; the
 * round-trip tests will catch drift.
 */

export const SCHEMA_VERSION = "1";

/** [x, y] in arena meters. */
export type Vec2 = [number, number];

export interface ArenaSize {
  width: number;
  height: number;
}

export interface ActorPose {
  name: string;
  position: Vec2;
  velocity: Vec2;
  heading: number;
  /** true once a client has grabbed this actor; scripted motion stops then */
  client_driven: boolean;
}

export type DeviceDirectionality = "directional" | "non_directional";

export interface DevicePose {
  name: string;
  position: Vec2;
  facing: number;
  radius: number;
  directionality: DeviceDirectionality;
}

export interface UserFieldPolygon {
  actor: string;
  vertices: Vec2[];
}

export interface DeviceFieldPolygon {
  device: string;
  vertices: Vec2[];
}

export type PatternEventKind =
  | "wake_up"
  | "sleep"
  | "pause"
  | "resume"
  | "level_changed";

export interface PatternEvent {
  kind: PatternEventKind;
  t: number;
  /** present for level_changed only */
  from?: number;
  to?: number;
}

export type PatternName = "greeting" | "turn_taking" | "revealing";

export interface BindingView {
  actor: string;
  device: string;
  pattern: PatternName;
  pi: number;
  state: string;
  events: PatternEvent[];
  /** overlap polygon of the two fields; empty list when disjoint */
  intersection: Vec2[];
}

export interface Snapshot {
  type: "snapshot";
  schema_version: string;
  tick: number;
  t: number;
  paused: boolean;
  arena: ArenaSize;
  actors: ActorPose[];
  devices: DevicePose[];
  user_fields: UserFieldPolygon[];
  device_fields: DeviceFieldPolygon[];
  bindings: BindingView[];
}

export interface Ack {
  type: "ack";
  schema_version: string;
  id: number | null;
}

export interface ErrorReply {
  type: "error";
  schema_version: string;
  id: number | null;
  reason: string;
}

export type ServerMessage = Snapshot | Ack | ErrorReply;

// ---- client -> server ----

export interface MoveActor {
  type: "move_actor";
  id?: number;
  name: string;
  position: Vec2;
}

export interface SetParam {
  type: "set_param";
  id?: number;
  /**
   * Dotted path into the running scenario, e.g. "actors[0].k",
   * "devices[0].radius", "bindings[0].greeting.t1".
   */
  path: string;
  value: unknown;
}

export interface PauseResume {
  type: "pause_resume";
  id?: number;
}

export interface Reset {
  type: "reset";
  id?: number;
}

export interface LoadScenario {
  type: "load_scenario";
  id?: number;
  document: unknown;
}

export type ClientMessage =
  | MoveActor
  | SetParam
  | PauseResume
  | Reset
  | LoadScenario;

/** Parse one server frame; null for anything that is not a known message. */
export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const type = (data as { type?: unknown }).type;
  if (type === "snapshot" || type === "ack" || type === "error") {
    return data as ServerMessage;
  }
  return null;
}
