/**
 * Entry point: wires the socket, the view model, the canvas, and the panel.
 *
 * Single event loop: socket callbacks and input handlers write into the
 * ViewModel; one requestAnimationFrame loop reads it, flushes outbound
 * messages (drag + debounced sliders), and redraws. Rendering happens at
 * snapshot rate with no interpolation between ticks.
 */

import { ArenaMapping } from "./transform.js";
import { FrameGate, ViewModel, type ParamValue } from "./model.js";
import { ServiceClient } from "./wsclient.js";
import { drawScene } from "./render.js";
import type { Snapshot, Vec2 } from "./schema.js";

const canvas = document.getElementById("arena") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusEl = document.getElementById("status")!;
const urlInput = document.getElementById("url") as HTMLInputElement;
const gaugesEl = document.getElementById("gauges")!;
const controlsEl = document.getElementById("controls")!;
const logEl = document.getElementById("log")!;
const clockEl = document.getElementById("clock")!;

const vm = new ViewModel();
const client = new ServiceClient({
  onStatus: (s) => {
    vm.status = s;
  },
  onMessage: (m) => vm.applyServer(m),
});

let mapping: ArenaMapping | null = null;
let mappedArena = "";

function mappingFor(snap: Snapshot): ArenaMapping {
  const key = `${snap.arena.width}x${snap.arena.height}`;
  if (!mapping || mappedArena !== key) {
    mapping = new ArenaMapping(snap.arena, {
      width: canvas.width,
      height: canvas.height,
    });
    mappedArena = key;
  }
  return mapping;
}

// ---- parameter panel ----

interface ControlSpec {
  key: string;
  label: string;
  min: number;
  max: number;
  step: number;
  initial: number;
  /** null disables the control for the current scenario shape */
  pathFor(snap: Snapshot): string | null;
}

function bindingPath(snap: Snapshot, field: string, kinds: string[]): string | null {
  const b = snap.bindings[0];
  if (!b || !kinds.includes(b.pattern)) return null;
  return `bindings[0].${b.pattern}.${field}`;
}

const SLIDERS: ControlSpec[] = [
  {
    key: "k",
    label: "k speed gain",
    min: 0,
    max: 1,
    step: 0.01,
    initial: 0.25,
    pathFor: (s) => (s.actors.length ? "actors[0].k" : null),
  },
  {
    key: "rest_radius",
    label: "rest radius m",
    min: 0.3,
    max: 3,
    step: 0.05,
    initial: 1.2,
    pathFor: (s) => (s.actors.length ? "actors[0].rest_radius" : null),
  },
  {
    key: "radius",
    label: "device radius m",
    min: 0.2,
    max: 5,
    step: 0.1,
    initial: 1,
    pathFor: (s) => (s.devices.length ? "devices[0].radius" : null),
  },
  {
    key: "facing",
    label: "device facing rad",
    min: -3.14,
    max: 3.14,
    step: 0.01,
    initial: 0,
    pathFor: (s) => (s.devices.length ? "devices[0].facing" : null),
  },
  {
    key: "t1",
    label: "t1 enter",
    min: 0,
    max: 1,
    step: 0.01,
    initial: 0.6,
    pathFor: (s) => bindingPath(s, "t1", ["greeting", "turn_taking"]),
  },
  {
    key: "t2",
    label: "t2 exit",
    min: 0,
    max: 1,
    step: 0.01,
    initial: 0.4,
    pathFor: (s) => bindingPath(s, "t2", ["greeting"]),
  },
  {
    key: "dwell",
    label: "dwell s",
    min: 0,
    max: 2,
    step: 0.05,
    initial: 0.3,
    pathFor: (s) => bindingPath(s, "dwell", ["greeting", "turn_taking", "revealing"]),
  },
];

interface Widget {
  spec: ControlSpec | null;
  input: HTMLInputElement;
  errorEl: HTMLElement;
  pathFor(snap: Snapshot): string | null;
  read(): ParamValue | null;
  reset(): void;
}

const widgets: Widget[] = [];

function sendParam(widget: Widget, value: ParamValue): void {
  const snap = vm.snapshot;
  if (!snap || vm.status !== "connected") return;
  const path = widget.pathFor(snap);
  if (!path) return;
  const id = vm.allocId();
  const control = vm.control(widget.input.id, value);
  if (client.send({ type: "set_param", id, path, value })) {
    control.sent(id, value);
  }
}

for (const spec of SLIDERS) {
  const row = document.createElement("div");
  row.className = "control";
  const input = document.createElement("input");
  input.type = "range";
  input.id = `slider-${spec.key}`;
  input.min = String(spec.min);
  input.max = String(spec.max);
  input.step = String(spec.step);
  input.value = String(spec.initial);
  const labelEl = document.createElement("label");
  labelEl.textContent = spec.label;
  const valueEl = document.createElement("span");
  valueEl.className = "value";
  valueEl.textContent = String(spec.initial);
  const errorEl = document.createElement("div");
  errorEl.className = "control-error";
  row.append(labelEl, input, valueEl, errorEl);
  controlsEl.appendChild(row);

  const widget: Widget = {
    spec,
    input,
    errorEl,
    pathFor: spec.pathFor,
    read: () => Number(input.value),
    reset: () => {
      const c = vm.controls.get(input.id);
      if (c && typeof c.committed === "number") {
        input.value = String(c.committed);
        valueEl.textContent = c.committed.toFixed(2);
      }
    },
  };
  widgets.push(widget);

  input.addEventListener("input", () => {
    valueEl.textContent = Number(input.value).toFixed(2);
    const control = vm.control(input.id, spec.initial);
    const release = control.change(Number(input.value), performance.now());
    if (release !== undefined) sendParam(widget, release);
  });
}

// revealing thresholds are a list, so they get a text box instead of a slider
{
  const row = document.createElement("div");
  row.className = "control";
  const labelEl = document.createElement("label");
  labelEl.textContent = "thresholds";
  const input = document.createElement("input");
  input.type = "text";
  input.id = "field-thresholds";
  input.placeholder = "0.2, 0.4, 0.6";
  const errorEl = document.createElement("div");
  errorEl.className = "control-error";
  row.append(labelEl, input, errorEl);
  controlsEl.appendChild(row);

  const widget: Widget = {
    spec: null,
    input,
    errorEl,
    pathFor: (snap) => bindingPath(snap, "thresholds", ["revealing"]),
    read: () => {
      const parts = input.value
        .split(",")
        .map((p) => Number(p.trim()))
        .filter((v) => Number.isFinite(v));
      return parts.length ? parts : null;
    },
    reset: () => {
      const c = vm.controls.get(input.id);
      if (c && Array.isArray(c.committed)) {
        input.value = c.committed.join(", ");
      }
    },
  };
  widgets.push(widget);

  input.addEventListener("change", () => {
    const value = widget.read();
    if (value === null) {
      errorEl.textContent = "need a comma-separated list of numbers";
      return;
    }
    const control = vm.control(input.id, value);
    const release = control.change(value, performance.now());
    if (release !== undefined) sendParam(widget, release);
  });
}

// ---- dragging ----

const dragGate = new FrameGate();

function hitActor(snap: Snapshot, map: ArenaMapping, screen: Vec2): string | null {
  for (const actor of snap.actors) {
    const [x, y] = map.toScreen(actor.position);
    if (Math.hypot(screen[0] - x, screen[1] - y) <= 14) return actor.name;
  }
  return null;
}

function canvasPoint(ev: PointerEvent): Vec2 {
  const rect = canvas.getBoundingClientRect();
  return [ev.clientX - rect.left, ev.clientY - rect.top];
}

canvas.addEventListener("pointerdown", (ev) => {
  const snap = vm.snapshot;
  if (!snap || !mapping) return;
  const screen = canvasPoint(ev);
  const actor = hitActor(snap, mapping, screen);
  if (!actor) return;
  canvas.setPointerCapture(ev.pointerId);
  vm.drag = { actor, screen, pendingTarget: mapping.dragTarget(screen) };
});

canvas.addEventListener("pointermove", (ev) => {
  if (!vm.drag || !mapping) return;
  const screen = canvasPoint(ev);
  vm.drag.screen = screen;
  vm.drag.pendingTarget = mapping.dragTarget(screen);
});

canvas.addEventListener("pointerup", () => {
  vm.drag = null;
});

// ---- header buttons ----

document.getElementById("connect")!.addEventListener("click", () => {
  client.connect(urlInput.value);
});
document.getElementById("pause")!.addEventListener("click", () => {
  client.send({ type: "pause_resume", id: vm.allocId() });
});
document.getElementById("reset")!.addEventListener("click", () => {
  client.send({ type: "reset", id: vm.allocId() });
});
document.getElementById("download")!.addEventListener("click", () => {
  const blob = new Blob([vm.log.toJsonl() + "\n"], {
    type: "application/jsonl",
  });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = "events.jsonl";
  a.click();
  URL.revokeObjectURL(a.href);
});

// ---- per-frame panel refresh ----

function refreshPanel(snap: Snapshot | null): void {
  statusEl.textContent = vm.status;
  statusEl.className = `status ${vm.status}`;
  if (!snap) return;
  clockEl.textContent = `t=${snap.t.toFixed(2)}s tick ${snap.tick}`;

  const rows: string[] = [];
  for (const b of snap.bindings) {
    const pct = Math.round(b.pi * 100);
    rows.push(
      `<div class="gauge"><div class="gauge-head">` +
        `<span>${b.actor} &rarr; ${b.device}</span>` +
        `<span class="pi">${b.pi.toFixed(3)}</span></div>` +
        `<div class="bar"><div class="bar-fill" style="width:${pct}%"></div></div>` +
        `<div class="pattern">${b.pattern}: <b>${b.state}</b></div></div>`,
    );
  }
  gaugesEl.innerHTML = rows.join("");

  const items = vm.log
    .entries()
    .map(
      (e) =>
        `<li><span class="t">${e.t.toFixed(2)}s</span> ${e.kind}` +
        `${e.detail ? " " + e.detail : ""} <span class="who">${e.actor}/${e.device}</span></li>`,
    );
  logEl.innerHTML = items.join("");

  for (const widget of widgets) {
    const enabled = widget.pathFor(snap) !== null && vm.status === "connected";
    widget.input.disabled = !enabled;
    const control = vm.controls.get(widget.input.id);
    widget.errorEl.textContent = control?.error ?? "";
    if (control?.error) widget.reset();
  }
}

let frame = 0;

function loop(): void {
  frame += 1;

  // one MoveActor per frame at most; dropped entirely while not connected
  if (vm.drag?.pendingTarget && vm.status === "connected") {
    if (dragGate.tryTake(frame)) {
      const sent = client.send({
        type: "move_actor",
        id: vm.allocId(),
        name: vm.drag.actor,
        position: vm.drag.pendingTarget,
      });
      if (sent) vm.drag.pendingTarget = null;
    }
  } else if (vm.drag && vm.status !== "connected") {
    vm.drag.pendingTarget = null;
  }

  const now = performance.now();
  for (const widget of widgets) {
    const control = vm.controls.get(widget.input.id);
    const release = control?.flush(now);
    if (release !== undefined) sendParam(widget, release);
  }

  if (vm.snapshot) {
    drawScene(ctx, vm, mappingFor(vm.snapshot));
  } else {
    drawScene(ctx, vm, new ArenaMapping({ width: 5, height: 5 }, canvas));
  }
  refreshPanel(vm.snapshot);
  requestAnimationFrame(loop);
}

client.connect(urlInput.value);
requestAnimationFrame(loop);
