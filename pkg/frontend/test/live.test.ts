// Live steering smoke test against a real `faime run --live` process:
// a pad drag plus a gesture press must update the class badge and add
// an OSC log row within 100 ms, with the send-rate limiter holding each
// stimulus channel at or under 30 frames per second.

import { spawn, ChildProcess } from "node:child_process";
import * as dgram from "node:dgram";
import { once } from "node:events";
import * as path from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { gestureFrame, parseServerFrame, ServerFrame } from "../src/protocol.js";
import { ChannelRateLimiter } from "../src/rateLimiter.js";
import { GESTURE_PRESETS } from "../src/presets.js";
import { applyServerFrame, initialState, ControllerState } from "../src/state.js";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const CONFIG = path.resolve(HERE, "../../demo/theralmin.json");

let device: ChildProcess;
let wsPort = 0;
let synth: dgram.Socket; // stands in for the OSC consumer
let datagrams = 0;

function startDevice(targetPort: number): Promise<number> {
  device = spawn(
    "python3",
    ["-m", "faime", "run", CONFIG, "--live", "--ws-port", "0", "--target", `127.0.0.1:${targetPort}`],
    {
      env: { ...process.env, PYTHONUNBUFFERED: "1" },
      stdio: ["ignore", "pipe", "pipe"],
    },
  );
  return new Promise((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("device never printed ws_port")), 15000);
    let buffer = "";
    device.stdout!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const match = buffer.match(/^ws_port: (\d+)$/m);
      if (match) {
        clearTimeout(timer);
        resolve(Number(match[1]));
      }
    });
    device.stderr!.on("data", (chunk: Buffer) => process.stderr.write(chunk));
    device.on("exit", (code) => reject(new Error(`device exited early (${code})`)));
  });
}

beforeAll(async () => {
  synth = dgram.createSocket("udp4");
  synth.on("message", () => {
    datagrams += 1;
  });
  synth.bind(0, "127.0.0.1");
  await once(synth, "listening");
  wsPort = await startDevice(synth.address().port);
}, 30000);

afterAll(async () => {
  synth?.close();
  if (device && device.exitCode === null) {
    device.removeAllListeners("exit");
    device.kill("SIGINT");
    await Promise.race([once(device, "exit"), new Promise((r) => setTimeout(r, 5000))]);
    if (device.exitCode === null) device.kill("SIGKILL");
  }
});

describe("live steering", () => {
  it(
    "pad drag + gesture press -> class badge and osc_out log within 100 ms, <= 30 frames/s",
    async () => {
      const ws = new WebSocket(`ws://127.0.0.1:${wsPort}`);
      await once(ws, "open");

      let state: ControllerState = initialState();
      const received: Array<{ frame: ServerFrame; at: number }> = [];
      ws.on("message", (data) => {
        const frame = parseServerFrame(data.toString());
        if (frame) {
          received.push({ frame, at: performance.now() });
          state = applyServerFrame(state, frame);
        }
      });

      // count what the limiter actually puts on the wire, per channel
      const sent: Array<{ channel: string; at: number }> = [];
      const limiter = new ChannelRateLimiter(30, (channel, value) => {
        sent.push({ channel, at: performance.now() });
        ws.send(JSON.stringify({ type: "stimulus", channel, value }));
      });

      // drag: ~300 pad moves per second for ~1.05 s
      const dragStart = performance.now();
      const DRAG_MS = 1050;
      await new Promise<void>((resolve) => {
        const timer = setInterval(() => {
          const t = (performance.now() - dragStart) / DRAG_MS;
          if (t >= 1) {
            clearInterval(timer);
            resolve();
            return;
          }
          limiter.push("pitch", Math.min(1, 0.2 + 0.6 * t));
          limiter.push("volume", Math.min(1, 0.9 - 0.3 * t));
        }, 1000 / 300);
      });

      // gesture press mid-stream
      const pressAt = performance.now();
      ws.send(gestureFrame(GESTURE_PRESETS.fist));
      // keep the drag alive briefly so throttled notes keep flowing
      const tailTimer = setInterval(() => limiter.push("pitch", Math.random()), 10);
      await new Promise((r) => setTimeout(r, 300));
      clearInterval(tailTimer);
      limiter.dispose();
      ws.close();

      // badge updated, and quickly
      const classFrame = received.find((r) => r.frame.type === "class" && r.at >= pressAt);
      expect(classFrame, "no class frame after the gesture press").toBeDefined();
      expect(classFrame!.at - pressAt).toBeLessThan(100);
      expect(state.lastClass?.label).toBe("fist");

      // an osc_out log row lands within 100 ms of the press
      const noteAfterPress = received.find((r) => r.frame.type === "osc_out" && r.at >= pressAt);
      expect(noteAfterPress, "no osc_out frame after the gesture press").toBeDefined();
      expect(noteAfterPress!.at - pressAt).toBeLessThan(100);
      expect(state.oscLog.length).toBeGreaterThan(0);
      expect(state.oscLog.every((row) => row.address === "/theralmin/note")).toBe(true);

      // limiter held each channel at <= 30 frames/s during the drag
      for (const channel of ["pitch", "volume"]) {
        const times = sent.filter((s) => s.channel === channel && s.at <= dragStart + DRAG_MS);
        const seconds = DRAG_MS / 1000;
        expect(times.length, `${channel} sent ${times.length} frames`).toBeLessThanOrEqual(
          Math.ceil(30 * seconds) + 1,
        );
      }

      // every osc_out the client saw also went out over UDP to the synth
      await new Promise((r) => setTimeout(r, 100));
      const oscOutFrames = received.filter((r) => r.frame.type === "osc_out").length;
      expect(datagrams).toBeGreaterThanOrEqual(oscOutFrames);
      expect(datagrams).toBeGreaterThan(0);
    },
    30000,
  );
});
