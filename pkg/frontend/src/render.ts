/**
 * HUD frame renderer, split in two for testability:
 *
 *  - `composeDrawList` is pure: HUD frame JSON in, schematic draw commands
 *    out (front-elevation orthographic projection, one command per HUD
 *    element plus one for the panel);
 *  - `paint` executes a draw list on a canvas 2D context.
 *
 * The renderer adds no logic of its own — what the engine put in the frame
 * is exactly what gets drawn (docs/hud-frames.md).
 */

import type { HudElement, HudFrame, Vec3 } from "./protocol.js";

export interface Viewport {
  width: number;
  height: number;
  /** pixels per world meter */
  scale: number;
  /** world point shown at the viewport center */
  center: Vec3;
}

export type Rgba = [number, number, number, number];

export type DrawCmd =
  | { op: "rect"; x: number; y: number; w: number; h: number; color: Rgba; fill: boolean }
  | { op: "polyline"; points: [number, number][]; color: Rgba }
  | { op: "circle"; x: number; y: number; r: number; color: Rgba; fill: boolean }
  | { op: "ring"; x: number; y: number; r: number; color: Rgba }
  | { op: "arrow"; x: number; y: number; angle: number; length: number; color: Rgba }
  | { op: "arc"; x: number; y: number; r: number; start: number; end: number; color: Rgba }
  | { op: "marker"; x: number; y: number; size: number; color: Rgba }
  | {
      op: "rthbar";
      from: [number, number];
      to: [number, number];
      green: number;
      yellow: number;
      red: number;
    }
  | { op: "text"; x: number; y: number; text: string; color: Rgba }
  | { op: "panel"; anchor: string; alpha: number; lines: string[] };

const RING_BASE_PX = 18;
const WAYPOINT_PX = 5;
const MARKER_PX = 7;

/** Orthographic front elevation: world x maps right, world z maps up. */
export function project(p: Vec3, vp: Viewport): [number, number] {
  const sx = vp.width / 2 + (p[0] - vp.center[0]) * vp.scale;
  const sy = vp.height / 2 - (p[2] - vp.center[2]) * vp.scale;
  return [sx, sy];
}

function elementCmd(e: HudElement, vp: Viewport): DrawCmd {
  const [x, y] = project(e.pose, vp);
  const color = e.color;
  switch (e.kind) {
    case "boundary_box": {
      const size = e.payload.size as [number, number, number];
      const w = size[0] * vp.scale;
      const h = size[2] * vp.scale;
      return { op: "rect", x: x - w / 2, y: y - h / 2, w, h, color, fill: false };
    }
    case "path_line": {
      const points = (e.payload.points as Vec3[]).map((p) => project(p, vp));
      return { op: "polyline", points, color };
    }
    case "waypoint":
      return { op: "circle", x, y, r: WAYPOINT_PX, color, fill: e.payload.role === "next" };
    case "coverage_patch":
      return { op: "circle", x, y, r: WAYPOINT_PX, color, fill: true };
    case "defect_mark":
      return { op: "marker", x, y, size: MARKER_PX, color };
    case "locator_ring":
      return { op: "ring", x, y, r: RING_BASE_PX * e.scale, color };
    case "heading_arrow":
      return {
        op: "arrow",
        x,
        y,
        angle: e.payload.yaw as number,
        length: RING_BASE_PX * e.scale,
        color,
      };
    case "collision_arc": {
      // sectors fan out from the drone heading, 45 degrees each
      const sector = e.payload.sector as number;
      const start = sector * (Math.PI / 4) - Math.PI / 8;
      return { op: "arc", x, y, r: RING_BASE_PX * e.scale + 6, start, end: start + Math.PI / 4, color };
    }
    case "ground_projection":
      return { op: "circle", x, y, r: 4, color, fill: false };
    case "uncertainty_disc":
      return { op: "circle", x, y, r: e.scale * vp.scale, color, fill: true };
    case "rth_path": {
      const home = project(e.payload.home as Vec3, vp);
      return {
        op: "rthbar",
        from: home,
        to: [x, y],
        green: e.payload.green as number,
        yellow: e.payload.yellow as number,
        red: e.payload.red as number,
      };
    }
    case "status_message":
      return { op: "text", x, y: y - 24, text: e.payload.text as string, color };
    default:
      // unknown kinds still occupy their pose so nothing silently vanishes
      return { op: "marker", x, y, size: MARKER_PX, color };
  }
}

/**
 * One draw command per HUD element (in the frame's own order) followed by a
 * single panel command.
 */
export function composeDrawList(frame: HudFrame, vp: Viewport, panelLines: string[] = []): DrawCmd[] {
  const cmds: DrawCmd[] = frame.elements.map((e) => elementCmd(e, vp));
  cmds.push({
    op: "panel",
    anchor: frame.panel.anchor,
    alpha: frame.panel.alpha,
    lines: panelLines,
  });
  return cmds;
}

function css(color: Rgba, alphaScale = 1): string {
  const [r, g, b, a] = color;
  return `rgba(${Math.round(r * 255)},${Math.round(g * 255)},${Math.round(b * 255)},${a * alphaScale})`;
}

/** Execute a draw list on a canvas context. No logic here beyond drawing. */
export function paint(ctx: CanvasRenderingContext2D, cmds: DrawCmd[], vp: Viewport): void {
  ctx.clearRect(0, 0, vp.width, vp.height);
  for (const cmd of cmds) {
    switch (cmd.op) {
      case "rect":
        ctx.strokeStyle = css(cmd.color);
        ctx.fillStyle = css(cmd.color);
        if (cmd.fill) ctx.fillRect(cmd.x, cmd.y, cmd.w, cmd.h);
        else ctx.strokeRect(cmd.x, cmd.y, cmd.w, cmd.h);
        break;
      case "polyline": {
        ctx.strokeStyle = css(cmd.color);
        ctx.beginPath();
        cmd.points.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
        ctx.stroke();
        break;
      }
      case "circle":
      case "ring": {
        ctx.beginPath();
        ctx.arc(cmd.x, cmd.y, cmd.r, 0, 2 * Math.PI);
        if (cmd.op === "circle" && cmd.fill) {
          ctx.fillStyle = css(cmd.color);
          ctx.fill();
        } else {
          ctx.strokeStyle = css(cmd.color);
          ctx.stroke();
        }
        break;
      }
      case "arrow": {
        ctx.strokeStyle = css(cmd.color);
        ctx.beginPath();
        ctx.moveTo(cmd.x, cmd.y);
        ctx.lineTo(cmd.x + Math.cos(cmd.angle) * cmd.length, cmd.y - Math.sin(cmd.angle) * cmd.length);
        ctx.stroke();
        break;
      }
      case "arc":
        ctx.strokeStyle = css(cmd.color);
        ctx.lineWidth = 4;
        ctx.beginPath();
        ctx.arc(cmd.x, cmd.y, cmd.r, cmd.start, cmd.end);
        ctx.stroke();
        ctx.lineWidth = 1;
        break;
      case "marker": {
        ctx.strokeStyle = css(cmd.color);
        ctx.beginPath();
        ctx.moveTo(cmd.x - cmd.size, cmd.y - cmd.size);
        ctx.lineTo(cmd.x + cmd.size, cmd.y + cmd.size);
        ctx.moveTo(cmd.x - cmd.size, cmd.y + cmd.size);
        ctx.lineTo(cmd.x + cmd.size, cmd.y - cmd.size);
        ctx.stroke();
        break;
      }
      case "rthbar": {
        const [x0, y0] = cmd.from;
        const [x1, y1] = cmd.to;
        const stops: [number, string][] = [
          [cmd.green, "rgba(50,230,80,0.9)"],
          [cmd.yellow, "rgba(255,215,25,0.9)"],
          [cmd.red, "rgba(255,50,40,0.95)"],
        ];
        let t = 0;
        ctx.lineWidth = 3;
        for (const [frac, style] of stops) {
          if (frac <= 0) continue;
          ctx.strokeStyle = style;
          ctx.beginPath();
          ctx.moveTo(x0 + (x1 - x0) * t, y0 + (y1 - y0) * t);
          t += frac;
          ctx.lineTo(x0 + (x1 - x0) * t, y0 + (y1 - y0) * t);
          ctx.stroke();
        }
        ctx.lineWidth = 1;
        break;
      }
      case "text":
        ctx.fillStyle = css(cmd.color);
        ctx.font = "12px monospace";
        ctx.fillText(cmd.text, cmd.x, cmd.y);
        break;
      case "panel": {
        ctx.globalAlpha = cmd.alpha;
        ctx.fillStyle = "rgba(20,24,32,0.85)";
        const h = 20 + cmd.lines.length * 16;
        ctx.fillRect(8, vp.height - h - 8, 230, h);
        ctx.fillStyle = "#dde4ee";
        ctx.font = "12px monospace";
        cmd.lines.forEach((line, i) => ctx.fillText(line, 16, vp.height - h + 8 + i * 16));
        ctx.globalAlpha = 1;
        break;
      }
    }
  }
}
