/**
 * WebSocket session client: handshake, decoded message callbacks, and input
 * sending. Transport-agnostic — anything with the WebSocket send/close/event
 * surface works, which is what the tests exploit.
 */

import {
  decodeServerMessage,
  encodeHello,
  encodeInput,
  encodePause,
  encodeResume,
  type ErrorMsg,
  type FrameMsg,
  type InputFrame,
  type MissionEndMsg,
  type WelcomeMsg,
} from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: "open" | "message" | "close", handler: (ev: any) => void): void;
}

export interface SessionCallbacks {
  onWelcome?(msg: WelcomeMsg): void;
  onFrame?(msg: FrameMsg): void;
  onMissionEnd?(msg: MissionEndMsg): void;
  onError?(msg: ErrorMsg): void;
  onClose?(): void;
}

export class SessionClient {
  private welcomed = false;

  constructor(
    private readonly socket: SocketLike,
    private readonly mode: string,
    private readonly callbacks: SessionCallbacks,
  ) {
    socket.addEventListener("open", () => socket.send(encodeHello(this.mode)));
    socket.addEventListener("message", (ev: { data: string }) => this.handle(ev.data));
    socket.addEventListener("close", () => callbacks.onClose?.());
  }

  get isWelcomed(): boolean {
    return this.welcomed;
  }

  private handle(data: string): void {
    let msg;
    try {
      msg = decodeServerMessage(data);
    } catch (err) {
      this.callbacks.onError?.({ type: "error", message: String(err) });
      return;
    }
    switch (msg.type) {
      case "welcome":
        this.welcomed = true;
        this.callbacks.onWelcome?.(msg);
        break;
      case "frame":
        this.callbacks.onFrame?.(msg);
        break;
      case "mission_end":
        this.callbacks.onMissionEnd?.(msg);
        break;
      case "error":
        this.callbacks.onError?.(msg);
        break;
    }
  }

  sendInput(frame: InputFrame): void {
    this.socket.send(encodeInput(frame));
  }

  pause(): void {
    this.socket.send(encodePause());
  }

  resume(): void {
    this.socket.send(encodeResume());
  }

  disconnect(): void {
    this.socket.close();
  }
}
