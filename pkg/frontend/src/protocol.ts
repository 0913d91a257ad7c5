// Bridge frame schema: one JSON object per WebSocket text frame.

export type ClientFrame =
  | { type: "stimulus"; channel: string; value: number }
  | { type: "gesture"; features: number[] };

export interface StatusFrame {
  type: "status";
  device: string;
  version: string;
}

export interface ClassFrame {
  type: "class";
  label: string;
  confidence: number;
}

export interface OscOutFrame {
  type: "osc_out";
  address: string;
  args: unknown[];
  t_us: number;
}

export interface ErrorFrame {
  type: "error";
  reason: string;
}

export type ServerFrame = StatusFrame | ClassFrame | OscOutFrame | ErrorFrame;

export function parseServerFrame(text: string): ServerFrame | null {
  let obj: unknown;
  try {
    obj = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof obj !== "object" || obj === null) return null;
  const frame = obj as Record<string, unknown>;
  switch (frame.type) {
    case "status":
      if (typeof frame.device === "string" && typeof frame.version === "string") {
        return { type: "status", device: frame.device, version: frame.version };
      }
      return null;
    case "class":
      if (typeof frame.label === "string" && typeof frame.confidence === "number") {
        return { type: "class", label: frame.label, confidence: frame.confidence };
      }
      return null;
    case "osc_out":
      if (typeof frame.address === "string" && Array.isArray(frame.args) && typeof frame.t_us === "number") {
        return { type: "osc_out", address: frame.address, args: frame.args, t_us: frame.t_us };
      }
      return null;
    case "error":
      if (typeof frame.reason === "string") {
        return { type: "error", reason: frame.reason };
      }
      return null;
    default:
      return null;
  }
}

export function stimulusFrame(channel: string, value: number): string {
  return JSON.stringify({ type: "stimulus", channel, value });
}

export function gestureFrame(features: number[]): string {
  return JSON.stringify({ type: "gesture", features });
}
