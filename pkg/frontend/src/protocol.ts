/**
 * Wire protocol spoken with the session service over its WebSocket endpoint
 * (see docs/protocol.md in the repository root). One JSON object per text
 * message, tagged by `type`. This module is pure: encoding, decoding, and
 * validation only.
 */

export const PROTOCOL_VERSION = 1;

export type Vec3 = [number, number, number];
export type Axes = [number, number, number, number];

export interface InputFrame {
  axes: Axes;
  takeoff: boolean;
  rth: boolean;
  autopilot_toggle: boolean;
  mark: [number, number] | null;
  gaze_origin: Vec3;
  gaze_direction: Vec3;
}

export function idleInput(): InputFrame {
  return {
    axes: [0, 0, 0, 0],
    takeoff: false,
    rth: false,
    autopilot_toggle: false,
    mark: null,
    gaze_origin: [0, 0, 1.7],
    gaze_direction: [0, 1, 0],
  };
}

export interface HelloMsg {
  type: "hello";
  mode: string;
  schema_version: number;
}

export interface InputMsg {
  type: "input";
  frame: InputFrame;
}

export interface PauseMsg {
  type: "pause";
}

export interface ResumeMsg {
  type: "resume";
}

export interface WelcomeMsg {
  type: "welcome";
  schema_version: number;
  scenario_digest: string;
  mode: string;
  scenario: Record<string, unknown>;
  tick_rate_hz: number;
}

export interface DroneStateWire {
  pos_true: Vec3;
  vel: Vec3;
  yaw: number;
  pos_est: Vec3;
  gps_signal: number;
  gps_lost: boolean;
  uncertainty_radius: number;
  battery: number;
  airborne: boolean;
  control_mode: string;
  collision: { distances: number[]; levels: string[] };
}

export interface HudElement {
  kind: string;
  pose: Vec3;
  scale: number;
  color: [number, number, number, number];
  payload: Record<string, unknown>;
}

export interface HudFrame {
  schema_version: number;
  view: { phase: string; active_issues: string[] };
  panel: { anchor: string; alpha: number };
  elements: HudElement[];
}

export interface FrameMsg {
  type: "frame";
  tick: number;
  drone: DroneStateWire;
  hud: HudFrame;
  events: string[];
}

export interface MissionEndMsg {
  type: "mission_end";
  metrics: Record<string, unknown>;
}

export interface ErrorMsg {
  type: "error";
  message: string;
}

export type ServerMessage = WelcomeMsg | FrameMsg | MissionEndMsg | ErrorMsg;
export type ClientMessage = HelloMsg | InputMsg | PauseMsg | ResumeMsg;

export class ProtocolError extends Error {}

/**
 * The wire encodes non-finite floats as tagged objects because JSON has no
 * Infinity/NaN. Convert them back, recursively.
 */
export function reviveNonFinite(value: unknown): unknown {
  if (Array.isArray(value)) {
    return value.map(reviveNonFinite);
  }
  if (value !== null && typeof value === "object") {
    const obj = value as Record<string, unknown>;
    const keys = Object.keys(obj);
    if (keys.length === 1 && keys[0] === "inf" && (obj.inf === 1 || obj.inf === -1)) {
      return obj.inf === 1 ? Infinity : -Infinity;
    }
    if (keys.length === 1 && keys[0] === "nan") {
      return NaN;
    }
    const out: Record<string, unknown> = {};
    for (const k of keys) {
      out[k] = reviveNonFinite(obj[k]);
    }
    return out;
  }
  return value;
}

export function encodeHello(mode: string): string {
  const msg: HelloMsg = { type: "hello", mode, schema_version: PROTOCOL_VERSION };
  return JSON.stringify(msg);
}

export function encodeInput(frame: InputFrame): string {
  const msg: InputMsg = { type: "input", frame };
  return JSON.stringify(msg);
}

export function encodePause(): string {
  return JSON.stringify({ type: "pause" });
}

export function encodeResume(): string {
  return JSON.stringify({ type: "resume" });
}

function expect(cond: boolean, where: string): asserts cond {
  if (!cond) {
    throw new ProtocolError(`invalid message at ${where}`);
  }
}

function isVec3(v: unknown): v is Vec3 {
  return Array.isArray(v) && v.length === 3 && v.every((c) => typeof c === "number");
}

function validateHud(hud: unknown): HudFrame {
  expect(hud !== null && typeof hud === "object", "frame.hud");
  const h = hud as HudFrame;
  expect(typeof h.schema_version === "number", "hud.schema_version");
  expect(typeof h.view === "object" && typeof h.view.phase === "string", "hud.view");
  expect(Array.isArray(h.view.active_issues), "hud.view.active_issues");
  expect(typeof h.panel === "object" && typeof h.panel.anchor === "string", "hud.panel");
  expect(typeof h.panel.alpha === "number", "hud.panel.alpha");
  expect(Array.isArray(h.elements), "hud.elements");
  h.elements.forEach((e, i) => {
    expect(typeof e.kind === "string", `hud.elements[${i}].kind`);
    expect(isVec3(e.pose), `hud.elements[${i}].pose`);
    expect(typeof e.scale === "number", `hud.elements[${i}].scale`);
    expect(Array.isArray(e.color) && e.color.length === 4, `hud.elements[${i}].color`);
    expect(e.payload !== null && typeof e.payload === "object", `hud.elements[${i}].payload`);
  });
  return h;
}

function validateDrone(drone: unknown): DroneStateWire {
  expect(drone !== null && typeof drone === "object", "frame.drone");
  const d = drone as DroneStateWire;
  expect(isVec3(d.pos_true) && isVec3(d.pos_est) && isVec3(d.vel), "drone positions");
  expect(typeof d.yaw === "number" && typeof d.battery === "number", "drone scalars");
  expect(typeof d.gps_signal === "number" && typeof d.gps_lost === "boolean", "drone gps");
  expect(typeof d.uncertainty_radius === "number", "drone.uncertainty_radius");
  expect(typeof d.airborne === "boolean" && typeof d.control_mode === "string", "drone mode");
  expect(
    typeof d.collision === "object" &&
      Array.isArray(d.collision.distances) &&
      Array.isArray(d.collision.levels),
    "drone.collision",
  );
  return d;
}

/** Decode and validate one server message. Throws ProtocolError on garbage. */
export function decodeServerMessage(text: string): ServerMessage {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    throw new ProtocolError("malformed message: not JSON");
  }
  if (raw === null || typeof raw !== "object" || Array.isArray(raw)) {
    throw new ProtocolError("message must be an object with a 'type' tag");
  }
  const doc = reviveNonFinite(raw) as Record<string, unknown>;
  switch (doc.type) {
    case "welcome": {
      expect(typeof doc.schema_version === "number", "welcome.schema_version");
      expect(typeof doc.scenario_digest === "string", "welcome.scenario_digest");
      expect(typeof doc.mode === "string", "welcome.mode");
      expect(doc.scenario !== null && typeof doc.scenario === "object", "welcome.scenario");
      expect(typeof doc.tick_rate_hz === "number", "welcome.tick_rate_hz");
      return doc as unknown as WelcomeMsg;
    }
    case "frame": {
      expect(typeof doc.tick === "number", "frame.tick");
      expect(Array.isArray(doc.events), "frame.events");
      return {
        type: "frame",
        tick: doc.tick as number,
        drone: validateDrone(doc.drone),
        hud: validateHud(doc.hud),
        events: doc.events as string[],
      };
    }
    case "mission_end": {
      expect(doc.metrics !== null && typeof doc.metrics === "object", "mission_end.metrics");
      return doc as unknown as MissionEndMsg;
    }
    case "error": {
      expect(typeof doc.message === "string", "error.message");
      return doc as unknown as ErrorMsg;
    }
    default:
      throw new ProtocolError(`unknown message type ${JSON.stringify(doc.type)}`);
  }
}
