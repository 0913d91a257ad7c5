// Wires the XY pad, gesture palette and feedback panes to the bridge.

import { gestureFrame, parseServerFrame, stimulusFrame } from "./protocol.js";
import { ChannelRateLimiter } from "./rateLimiter.js";
import { GESTURE_PRESETS } from "./presets.js";
import {
  ControllerState,
  applyServerFrame,
  clamp01,
  initialState,
  withConnection,
  withGesture,
  withNotice,
  withPad,
} from "./state.js";

export const SEND_RATE_HZ = 30;
const RECONNECT_BASE_MS = 500;
const RECONNECT_MAX_MS = 8000;

interface Elements {
  pad: HTMLElement;
  padDot: HTMLElement;
  palette: HTMLElement;
  badge: HTMLElement;
  banner: HTMLElement;
  log: HTMLElement;
}

export class Controller {
  private state: ControllerState = initialState();
  private ws: WebSocket | null = null;
  private limiter: ChannelRateLimiter;
  private reconnectDelay = RECONNECT_BASE_MS;
  private dragging = false;

  constructor(private url: string, private el: Elements) {
    this.limiter = new ChannelRateLimiter(SEND_RATE_HZ, (channel, value) => {
      this.ws?.send(stimulusFrame(channel, value));
    });
    this.bindPad();
    this.bindPalette();
    this.render();
  }

  connect(): void {
    this.update(withConnection(this.state, "connecting"));
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.reconnectDelay = RECONNECT_BASE_MS;
      this.update(withConnection(this.state, "open"));
    };
    ws.onmessage = (event) => {
      const frame = parseServerFrame(String(event.data));
      if (frame) this.update(applyServerFrame(this.state, frame));
    };
    ws.onclose = () => {
      this.ws = null;
      this.update(withConnection(this.state, "closed"));
      setTimeout(() => this.connect(), this.reconnectDelay);
      this.reconnectDelay = Math.min(this.reconnectDelay * 2, RECONNECT_MAX_MS);
    };
  }

  private connected(): boolean {
    return this.ws !== null && this.ws.readyState === WebSocket.OPEN;
  }

  private bindPad(): void {
    const move = (event: PointerEvent) => {
      if (!this.dragging) return;
      const rect = this.el.pad.getBoundingClientRect();
      const x = clamp01((event.clientX - rect.left) / rect.width);
      const y = clamp01(1 - (event.clientY - rect.top) / rect.height); // up = louder
      this.update(withPad(this.state, x, y));
      if (this.connected()) {
        this.limiter.push("pitch", x);
        this.limiter.push("volume", y);
      }
    };
    this.el.pad.addEventListener("pointerdown", (event) => {
      this.dragging = true;
      this.el.pad.setPointerCapture(event.pointerId);
      move(event);
    });
    this.el.pad.addEventListener("pointermove", move);
    this.el.pad.addEventListener("pointerup", () => {
      this.dragging = false;
    });
  }

  private bindPalette(): void {
    this.el.palette.addEventListener("click", (event) => {
      const button = (event.target as HTMLElement).closest("button");
      if (!button) return;
      this.pressGesture(button.dataset.gesture ?? "");
    });
  }

  pressGesture(label: string): void {
    const preset = GESTURE_PRESETS[label];
    if (!preset) {
      this.update(withNotice(this.state, `no preset for gesture "${label}"`));
      return;
    }
    if (!this.connected()) {
      this.update(withNotice(this.state, "not connected: gesture dropped"));
      return;
    }
    this.ws!.send(gestureFrame(preset));
    this.update(withGesture(this.state, label));
  }

  private update(next: ControllerState): void {
    this.state = next;
    this.render();
  }

  private render(): void {
    const s = this.state;
    this.el.banner.textContent =
      s.connection === "open"
        ? `connected to ${s.device ?? "device"} (${this.url})`
        : `${s.connection}... ${s.notices[s.notices.length - 1] ?? ""}`;
    this.el.banner.dataset.connection = s.connection;

    this.el.badge.textContent = s.lastClass
      ? `${s.lastClass.label} ${(s.lastClass.confidence * 100).toFixed(0)}%`
      : "no gesture yet";

    this.el.padDot.style.left = `${s.pad.x * 100}%`;
    this.el.padDot.style.top = `${(1 - s.pad.y) * 100}%`;

    const rows = s.oscLog
      .slice(-12)
      .map((row) => `<tr><td>${(row.t_us / 1000).toFixed(1)}ms</td><td>${row.address}</td><td>${row.args
        .map((a) => (typeof a === "number" ? a.toFixed(3) : String(a)))
        .join(" ")}</td></tr>`)
      .reverse()
      .join("");
    this.el.log.innerHTML = rows;
  }
}

export function boot(doc: Document, wsUrl: string): Controller {
  const get = (id: string) => {
    const node = doc.getElementById(id);
    if (!node) throw new Error(`missing #${id}`);
    return node;
  };
  const controller = new Controller(wsUrl, {
    pad: get("pad"),
    padDot: get("pad-dot"),
    palette: get("palette"),
    badge: get("class-badge"),
    banner: get("banner"),
    log: get("osc-log"),
  });
  controller.connect();
  return controller;
}
