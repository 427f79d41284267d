/**
 * Browser entry point: connects to a running session service, samples pilot
 * input at the display rate, and paints the schematic HUD view. Serve the
 * compiled bundle next to public/index.html and run `safespect serve`.
 */

import { SessionClient } from "./client.js";
import { attachKeyboard, InputTracker } from "./input.js";
import { composeDrawList, paint, type Viewport } from "./render.js";
import type { FrameMsg, WelcomeMsg } from "./protocol.js";

export function startCockpit(canvas: HTMLCanvasElement, statusEl: HTMLElement, url: string, mode: string): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("canvas 2d context unavailable");

  const vp: Viewport = {
    width: canvas.width,
    height: canvas.height,
    scale: 10,
    center: [10, 0, 12],
  };

  const tracker = new InputTracker();
  attachKeyboard(tracker, window);
  canvas.addEventListener("click", (ev) => {
    const rect = canvas.getBoundingClientRect();
    tracker.mark((ev.clientX - rect.left) / rect.width, (ev.clientY - rect.top) / rect.height);
  });

  let latest: FrameMsg | null = null;

  const client = new SessionClient(new WebSocket(url), mode, {
    onWelcome(msg: WelcomeMsg) {
      const size = msg.scenario.building_size_m as [number, number, number];
      vp.center = [size[0] / 2, 0, size[2] / 2];
      vp.scale = Math.min(vp.width / (size[0] + 40), vp.height / (size[2] + 20));
      statusEl.textContent = `connected (${msg.mode}, ${msg.tick_rate_hz} Hz)`;
    },
    onFrame(msg: FrameMsg) {
      latest = msg;
    },
    onMissionEnd(msg) {
      statusEl.textContent = `mission over: ${JSON.stringify(msg.metrics)}`;
    },
    onError(msg) {
      statusEl.textContent = `error: ${msg.message}`;
    },
    onClose() {
      statusEl.textContent = "disconnected";
    },
  });

  const sendLoop = setInterval(() => {
    if (client.isWelcomed) {
      let frame = tracker.sample();
      const pads = navigator.getGamepads?.() ?? [];
      const pad = pads.find((p) => p !== null);
      if (pad) frame = tracker.applyGamepad(frame, pad);
      client.sendInput(frame);
    }
  }, 50);

  function draw(): void {
    if (latest) {
      const d = latest.drone;
      const lines = [
        `battery ${(d.battery * 100).toFixed(0)}%  gps ${(d.gps_signal * 100).toFixed(0)}%${d.gps_lost ? " LOST" : ""}`,
        `mode ${d.control_mode}  alt ${d.pos_true[2].toFixed(1)} m`,
        `view ${latest.hud.view.phase}  ${latest.hud.view.active_issues.join(", ")}`,
      ];
      paint(ctx!, composeDrawList(latest.hud, vp, lines), vp);
    }
    requestAnimationFrame(draw);
  }
  requestAnimationFrame(draw);

  window.addEventListener("beforeunload", () => {
    clearInterval(sendLoop);
    client.disconnect();
  });
}
