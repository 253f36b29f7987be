import { describe, expect, it } from "vitest";

import {
  Debouncer,
  EVENT_LOG_CAPACITY,
  EventLog,
  FrameGate,
  ParamControl,
  ViewModel,
  describeEvent,
  type LoggedEvent,
} from "../src/model.js";
import type { BindingView, Snapshot } from "../src/schema.js";

function entry(i: number): LoggedEvent {
  return { t: i, kind: "pause", actor: "a", device: "d", detail: "" };
}

function binding(partial: Partial<BindingView> = {}): BindingView {
  return {
    actor: "reader",
    device: "tablet",
    pattern: "greeting",
    pi: 0.5,
    state: "active",
    events: [],
    intersection: [],
    ...partial,
  };
}

function snapshot(tick: number, bindings: BindingView[]): Snapshot {
  return {
    type: "snapshot",
    schema_version: "1",
    tick,
    t: tick / 20,
    paused: false,
    arena: { width: 5, height: 5 },
    actors: [],
    devices: [],
    user_fields: [],
    device_fields: [],
    bindings,
  };
}

describe("EventLog", () => {
  it("keeps only the newest entries, newest first", () => {
    const log = new EventLog();
    for (let i = 0; i < 25; i++) log.push(entry(i));
    const entries = log.entries();
    expect(entries).toHaveLength(EVENT_LOG_CAPACITY);
    expect(entries[0].t).toBe(24);
    expect(entries[19].t).toBe(5);
  });

  it("serializes to JSON-lines, oldest first", () => {
    const log = new EventLog(3);
    log.push(entry(1));
    log.push(entry(2));
    const lines = log.toJsonl().split("\n");
    expect(lines).toHaveLength(2);
    expect(JSON.parse(lines[0]).t).toBe(1);
    expect(JSON.parse(lines[1]).t).toBe(2);
  });
});

describe("FrameGate", () => {
  it("admits one message per frame", () => {
    const gate = new FrameGate();
    expect(gate.tryTake(1)).toBe(true);
    expect(gate.tryTake(1)).toBe(false);
    expect(gate.tryTake(1)).toBe(false);
    expect(gate.tryTake(2)).toBe(true);
  });
});

describe("Debouncer", () => {
  it("sends immediately when idle, defers within the interval", () => {
    const d = new Debouncer<number>(100);
    expect(d.submit(1, 0)).toBe(1);
    expect(d.submit(2, 50)).toBeUndefined();
    expect(d.flush(99)).toBeUndefined();
    expect(d.flush(100)).toBe(2);
    expect(d.flush(150)).toBeUndefined(); // nothing pending anymore
  });

  it("coalesces rapid submits to the latest value", () => {
    const d = new Debouncer<number>(100);
    d.submit(1, 0);
    for (let i = 2; i <= 9; i++) d.submit(i, i * 10);
    expect(d.flush(120)).toBe(9);
  });

  it("never exceeds 10 sends in a simulated second", () => {
    const d = new Debouncer<number>(100);
    let sends = 0;
    // a slider generating an event every 16 ms plus a flush per frame
    for (let now = 0; now < 1000; now += 16) {
      if (d.submit(now, now) !== undefined) sends++;
      if (d.flush(now) !== undefined) sends++;
    }
    expect(sends).toBeLessThanOrEqual(10);
    expect(sends).toBeGreaterThan(5); // still responsive, not starved
  });
});

describe("ParamControl", () => {
  it("commits on ack and clears any prior error", () => {
    const c = new ParamControl("k", 0.25);
    c.sent(7, 0.5);
    c.error = "old";
    expect(c.onAck(7)).toBe(true);
    expect(c.committed).toBe(0.5);
    expect(c.error).toBeNull();
  });

  it("keeps the committed value on error and surfaces the reason", () => {
    const c = new ParamControl("t2", 0.4);
    c.sent(3, 0.9);
    expect(c.onError(3, "need 0 <= t2 <= t1 <= 1")).toBe(true);
    expect(c.committed).toBe(0.4); // slider snaps back to this
    expect(c.error).toContain("t2 <= t1");
  });

  it("ignores replies for ids it never sent", () => {
    const c = new ParamControl("k", 0.25);
    c.sent(1, 0.3);
    expect(c.onAck(2)).toBe(false);
    expect(c.onError(null, "nope")).toBe(false);
    expect(c.committed).toBe(0.25);
  });
});

describe("ViewModel", () => {
  it("stores the latest snapshot and logs its events once", () => {
    const vm = new ViewModel();
    const withEvent = snapshot(4, [
      binding({ events: [{ kind: "wake_up", t: 0.2 }] }),
    ]);
    vm.applyServer(withEvent);
    vm.applyServer(withEvent); // duplicate tick must not double-log
    expect(vm.snapshot?.tick).toBe(4);
    expect(vm.log.entries()).toHaveLength(1);
    expect(vm.log.entries()[0].kind).toBe("wake_up");
  });

  it("keeps logging across ticks and trims to the window", () => {
    const vm = new ViewModel();
    for (let tick = 0; tick < 30; tick++) {
      vm.applyServer(
        snapshot(tick, [binding({ events: [{ kind: "pause", t: tick }] })]),
      );
    }
    expect(vm.log.entries()).toHaveLength(EVENT_LOG_CAPACITY);
    expect(vm.log.entries()[0].t).toBe(29);
  });

  it("routes acks and errors to the owning control", () => {
    const vm = new ViewModel();
    const k = vm.control("k", 0.25);
    const t2 = vm.control("t2", 0.4);
    k.sent(1, 0.5);
    t2.sent(2, 0.9);
    vm.applyServer({ type: "ack", schema_version: "1", id: 1 });
    vm.applyServer({ type: "error", schema_version: "1", id: 2, reason: "bad" });
    expect(k.committed).toBe(0.5);
    expect(k.error).toBeNull();
    expect(t2.committed).toBe(0.4);
    expect(t2.error).toBe("bad");
  });

  it("drops replies no control is waiting for", () => {
    const vm = new ViewModel();
    vm.control("k", 0.25);
    // must not throw or disturb anything
    vm.applyServer({ type: "ack", schema_version: "1", id: 99 });
    vm.applyServer({ type: "error", schema_version: "1", id: null, reason: "x" });
    expect(vm.controls.get("k")?.committed).toBe(0.25);
  });
});

describe("describeEvent", () => {
  it("formats level changes with their endpoints", () => {
    const e = describeEvent(binding({ pattern: "revealing" }), {
      kind: "level_changed",
      t: 1.5,
      from: 1,
      to: 2,
    });
    expect(e.detail).toBe("1 -> 2");
    expect(e.kind).toBe("level_changed");
  });

  it("leaves plain transitions undecorated", () => {
    const e = describeEvent(binding(), { kind: "sleep", t: 3 });
    expect(e.detail).toBe("");
  });
});
