// Controller state and its pure reducers.
//
// Server frames are the only way rows enter the OSC log, so the log can
// never show traffic the device did not report. The log and the notice
// list are bounded; pad values are clamped to [0, 1].

import { ServerFrame } from "./protocol.js";

export const OSC_LOG_LIMIT = 200;
export const NOTICE_LIMIT = 5;

export interface OscLogRow {
  address: string;
  args: unknown[];
  t_us: number;
}

export type Connection = "connecting" | "open" | "closed";

export interface ControllerState {
  connection: Connection;
  device: string | null;
  pad: { x: number; y: number };
  activeGesture: string | null;
  lastClass: { label: string; confidence: number } | null;
  oscLog: OscLogRow[];
  notices: string[];
}

export function initialState(): ControllerState {
  return {
    connection: "connecting",
    device: null,
    pad: { x: 0, y: 0 },
    activeGesture: null,
    lastClass: null,
    oscLog: [],
    notices: [],
  };
}

export function clamp01(v: number): number {
  if (Number.isNaN(v)) return 0;
  return Math.min(1, Math.max(0, v));
}

export function withPad(state: ControllerState, x: number, y: number): ControllerState {
  return { ...state, pad: { x: clamp01(x), y: clamp01(y) } };
}

export function withConnection(state: ControllerState, connection: Connection): ControllerState {
  return { ...state, connection };
}

export function withNotice(state: ControllerState, notice: string): ControllerState {
  return { ...state, notices: [...state.notices, notice].slice(-NOTICE_LIMIT) };
}

export function withGesture(state: ControllerState, label: string): ControllerState {
  return { ...state, activeGesture: label };
}

export function applyServerFrame(state: ControllerState, frame: ServerFrame): ControllerState {
  switch (frame.type) {
    case "status":
      return { ...state, device: frame.device };
    case "class":
      return { ...state, lastClass: { label: frame.label, confidence: frame.confidence } };
    case "osc_out": {
      const row: OscLogRow = { address: frame.address, args: frame.args, t_us: frame.t_us };
      return { ...state, oscLog: [...state.oscLog, row].slice(-OSC_LOG_LIMIT) };
    }
    case "error":
      return withNotice(state, `device: ${frame.reason}`);
  }
}
