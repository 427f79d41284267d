/**
 * Pilot input: keyboard (and optional gamepad) state folded into the wire
 * protocol's InputFrame once per sampled tick. Button presses are edges —
 * they fire in exactly one frame no matter how long the key is held.
 */

import { idleInput, type Axes, type InputFrame } from "./protocol.js";

/** axes: [forward, right, up, yaw], each in [-1, 1] */
const KEY_AXES: Record<string, [number, number]> = {
  KeyW: [0, 1],
  KeyS: [0, -1],
  KeyD: [1, 1],
  KeyA: [1, -1],
  KeyR: [2, 1],
  KeyF: [2, -1],
  KeyE: [3, 1],
  KeyQ: [3, -1],
};

const KEY_BUTTONS: Record<string, "takeoff" | "rth" | "autopilot_toggle"> = {
  KeyT: "takeoff",
  KeyH: "rth",
  Space: "autopilot_toggle",
};

export class InputTracker {
  private held = new Set<string>();
  private pendingButtons = new Set<"takeoff" | "rth" | "autopilot_toggle">();
  private pendingMark: [number, number] | null = null;
  private gazeOrigin: [number, number, number] = [0, 0, 1.7];
  private gazeDirection: [number, number, number] = [0, 1, 0];

  keyDown(code: string): void {
    const button = KEY_BUTTONS[code];
    if (button !== undefined && !this.held.has(code)) {
      this.pendingButtons.add(button);
    }
    this.held.add(code);
  }

  keyUp(code: string): void {
    this.held.delete(code);
  }

  /** Click on the camera view: normalized pixel in [0,1]^2. */
  mark(px: number, py: number): void {
    this.pendingMark = [Math.min(1, Math.max(0, px)), Math.min(1, Math.max(0, py))];
  }

  setGaze(origin: [number, number, number], direction: [number, number, number]): void {
    this.gazeOrigin = origin;
    this.gazeDirection = direction;
  }

  axes(): Axes {
    const a: Axes = [0, 0, 0, 0];
    for (const code of this.held) {
      const mapping = KEY_AXES[code];
      if (mapping !== undefined) {
        const [index, sign] = mapping;
        a[index] = Math.min(1, Math.max(-1, a[index]! + sign));
      }
    }
    return a;
  }

  /** Drain the pending edges into one InputFrame; axes reflect held keys. */
  sample(): InputFrame {
    const frame: InputFrame = {
      ...idleInput(),
      axes: this.axes(),
      takeoff: this.pendingButtons.has("takeoff"),
      rth: this.pendingButtons.has("rth"),
      autopilot_toggle: this.pendingButtons.has("autopilot_toggle"),
      mark: this.pendingMark,
      gaze_origin: [...this.gazeOrigin],
      gaze_direction: [...this.gazeDirection],
    };
    this.pendingButtons.clear();
    this.pendingMark = null;
    return frame;
  }

  /** Fold the first connected gamepad on top of the keyboard axes. */
  applyGamepad(frame: InputFrame, pad: { axes: readonly number[]; buttons: readonly { pressed: boolean }[] }): InputFrame {
    const dead = (v: number | undefined) => (v !== undefined && Math.abs(v) > 0.12 ? v : 0);
    const merged: Axes = [
      clamp(frame.axes[0] + -dead(pad.axes[1])),
      clamp(frame.axes[1] + dead(pad.axes[0])),
      clamp(frame.axes[2] + -dead(pad.axes[3])),
      clamp(frame.axes[3] + dead(pad.axes[2])),
    ];
    return { ...frame, axes: merged };
  }
}

function clamp(v: number): number {
  return Math.min(1, Math.max(-1, v));
}

/** Wire a tracker to DOM events; returns an unsubscribe function. */
export function attachKeyboard(tracker: InputTracker, target: Pick<Window, "addEventListener" | "removeEventListener">): () => void {
  const down = (ev: Event) => tracker.keyDown((ev as KeyboardEvent).code);
  const up = (ev: Event) => tracker.keyUp((ev as KeyboardEvent).code);
  target.addEventListener("keydown", down);
  target.addEventListener("keyup", up);
  return () => {
    target.removeEventListener("keydown", down);
    target.removeEventListener("keyup", up);
  };
}
