import { describe, expect, it } from "vitest";

import { parseServerMessage } from "../src/schema.js";

const SNAPSHOT_FRAME = JSON.stringify({
  type: "snapshot",
  schema_version: "1",
  tick: 3,
  t: 0.15,
  paused: false,
  arena: { width: 5, height: 5 },
  actors: [
    {
      name: "reader",
      position: [0.5, 4.5],
      velocity: [0, 0],
      heading: 0,
      client_driven: false,
    },
  ],
  devices: [
    {
      name: "tablet",
      position: [2.5, 2.5],
      facing: 0,
      radius: 1,
      directionality: "non_directional",
    },
  ],
  user_fields: [{ actor: "reader", vertices: [[1, 4], [2, 4], [1.5, 5]] }],
  device_fields: [{ device: "tablet", vertices: [[2, 2], [3, 2], [2.5, 3]] }],
  bindings: [
    {
      actor: "reader",
      device: "tablet",
      pattern: "greeting",
      pi: 0,
      state: "sleep",
      events: [],
      intersection: [],
    },
  ],
});

describe("parseServerMessage", () => {
  it("accepts a snapshot frame and preserves its payload", () => {
    const msg = parseServerMessage(SNAPSHOT_FRAME);
    expect(msg?.type).toBe("snapshot");
    if (msg?.type !== "snapshot") return;
    expect(msg.tick).toBe(3);
    expect(msg.actors[0].name).toBe("reader");
    expect(msg.user_fields[0].vertices).toHaveLength(3);
    expect(msg.bindings[0].pattern).toBe("greeting");
  });

  it("accepts ack and error frames", () => {
    const ack = parseServerMessage('{"type": "ack", "schema_version": "1", "id": 5}');
    expect(ack).toEqual({ type: "ack", schema_version: "1", id: 5 });
    const err = parseServerMessage(
      '{"type": "error", "schema_version": "1", "id": null, "reason": "nope"}',
    );
    expect(err?.type).toBe("error");
    if (err?.type === "error") expect(err.reason).toBe("nope");
  });

  it("returns null for junk", () => {
    expect(parseServerMessage("not json")).toBeNull();
    expect(parseServerMessage("42")).toBeNull();
    expect(parseServerMessage("null")).toBeNull();
    expect(parseServerMessage('{"type": "mystery"}')).toBeNull();
    expect(parseServerMessage('["snapshot"]')).toBeNull();
  });
});
