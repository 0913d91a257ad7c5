// Keep-latest rate limiter, per channel.
//
// The first value on a quiet channel goes out immediately; while the
// channel is inside its rate window, newer values replace the pending
// one and a trailing timer flushes the latest at the window edge. Each
// channel therefore never exceeds `ratePerSec` sends, and the last
// value of a burst always arrives.

export class ChannelRateLimiter {
  private intervalMs: number;
  private lastSent = new Map<string, number>();
  private pending = new Map<string, number>();
  private timers = new Map<string, ReturnType<typeof setTimeout>>();

  constructor(
    ratePerSec: number,
    private emit: (channel: string, value: number) => void,
    private now: () => number = () => performance.now(),
  ) {
    if (ratePerSec <= 0) throw new Error(`rate must be positive, got ${ratePerSec}`);
    this.intervalMs = 1000 / ratePerSec;
  }

  push(channel: string, value: number): void {
    const t = this.now();
    const last = this.lastSent.get(channel);
    if (last === undefined || t - last >= this.intervalMs) {
      // the fresh value supersedes any still-scheduled flush
      this.cancel(channel);
      this.lastSent.set(channel, t);
      this.emit(channel, value);
      return;
    }
    this.pending.set(channel, value);
    if (!this.timers.has(channel)) {
      this.schedule(channel, last + this.intervalMs - t);
    }
  }

  private schedule(channel: string, delayMs: number): void {
    this.timers.set(
      channel,
      setTimeout(() => this.flush(channel), Math.max(0, Math.ceil(delayMs))),
    );
  }

  private flush(channel: string): void {
    this.timers.delete(channel);
    const value = this.pending.get(channel);
    if (value === undefined) return;
    const t = this.now();
    const last = this.lastSent.get(channel)!;
    if (t - last < this.intervalMs) {
      // timer fired inside the window (ms truncation); try again
      this.schedule(channel, last + this.intervalMs - t);
      return;
    }
    this.pending.delete(channel);
    this.lastSent.set(channel, t);
    this.emit(channel, value);
  }

  private cancel(channel: string): void {
    const timer = this.timers.get(channel);
    if (timer !== undefined) {
      clearTimeout(timer);
      this.timers.delete(channel);
    }
    this.pending.delete(channel);
  }

  dispose(): void {
    for (const timer of this.timers.values()) clearTimeout(timer);
    this.timers.clear();
    this.pending.clear();
  }
}
