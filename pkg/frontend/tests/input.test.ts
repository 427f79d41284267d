import { describe, expect, it } from "vitest";

import { InputTracker, attachKeyboard } from "../src/input.js";

describe("stick axes", () => {
  it("maps WASD/RF/QE onto the four axes", () => {
    const t = new InputTracker();
    t.keyDown("KeyW");
    t.keyDown("KeyD");
    t.keyDown("KeyR");
    t.keyDown("KeyE");
    expect(t.axes()).toEqual([1, 1, 1, 1]);
    t.keyUp("KeyW");
    t.keyDown("KeyS");
    expect(t.axes()[0]).toBe(-1);
  });

  it("opposing keys cancel", () => {
    const t = new InputTracker();
    t.keyDown("KeyA");
    t.keyDown("KeyD");
    expect(t.axes()[1]).toBe(0);
  });

  it("released keys stop contributing", () => {
    const t = new InputTracker();
    t.keyDown("KeyW");
    t.keyUp("KeyW");
    expect(t.axes()).toEqual([0, 0, 0, 0]);
  });
});

describe("button edges", () => {
  it("a held button fires in exactly one sampled frame", () => {
    const t = new InputTracker();
    t.keyDown("KeyT");
    expect(t.sample().takeoff).toBe(true);
    expect(t.sample().takeoff).toBe(false); // still held, no repeat
    t.keyDown("KeyT"); // auto-repeat while held: still no edge
    expect(t.sample().takeoff).toBe(false);
    t.keyUp("KeyT");
    t.keyDown("KeyT"); // genuine re-press
    expect(t.sample().takeoff).toBe(true);
  });

  it("each button maps to its own field", () => {
    const t = new InputTracker();
    t.keyDown("Space");
    t.keyDown("KeyH");
    const frame = t.sample();
    expect(frame.autopilot_toggle).toBe(true);
    expect(frame.rth).toBe(true);
    expect(frame.takeoff).toBe(false);
  });
});

describe("defect marks", () => {
  it("a click is delivered once, clamped to the unit square", () => {
    const t = new InputTracker();
    t.mark(1.2, -0.1);
    expect(t.sample().mark).toEqual([1, 0]);
    expect(t.sample().mark).toBeNull();
  });
});

describe("gamepad merge", () => {
  it("applies a deadzone and clamps the merged axes", () => {
    const t = new InputTracker();
    t.keyDown("KeyW");
    const frame = t.sample();
    const merged = t.applyGamepad(frame, {
      axes: [0.05, -0.5, 0.0, 0.0], // tiny strafe ignored, half forward added
      buttons: [],
    });
    expect(merged.axes[0]).toBe(1); // 1 + 0.5 clamped
    expect(merged.axes[1]).toBe(0); // below deadzone
  });
});

describe("keyboard attachment", () => {
  it("subscribes and unsubscribes key handlers", () => {
    const handlers = new Map<string, (ev: unknown) => void>();
    const target = {
      addEventListener: (type: string, h: (ev: unknown) => void) => handlers.set(type, h),
      removeEventListener: (type: string) => handlers.delete(type),
    };
    const t = new InputTracker();
    const detach = attachKeyboard(t, target as any);
    handlers.get("keydown")!({ code: "KeyW" });
    expect(t.axes()[0]).toBe(1);
    handlers.get("keyup")!({ code: "KeyW" });
    expect(t.axes()[0]).toBe(0);
    detach();
    expect(handlers.size).toBe(0);
  });
});
