// Virtual joystick -> velocity commands.
//
// Differential-drive mapping: forward deflection (y) drives linear.x,
// sideways deflection (x) drives -angular.z. While engaged, the current
// twist streams at the configured rate; releasing always emits one
// final all-zero twist, so the robot never keeps the last command.

import type { PanelConfig } from "./config.js";
import type { TwistPayload } from "./types.js";

export interface JoystickState {
  x: number; // [-1, 1], positive = right
  y: number; // [-1, 1], positive = forward
  engaged: boolean;
}

export function clampDeflection(x: number, y: number): { x: number; y: number } {
  const magnitude = Math.hypot(x, y);
  if (magnitude <= 1 || magnitude === 0) return { x, y };
  return { x: x / magnitude, y: y / magnitude };
}

export function joystickToTwist(state: JoystickState, config: PanelConfig): TwistPayload {
  const { x, y } = state.engaged ? clampDeflection(state.x, state.y) : { x: 0, y: 0 };
  const unsignedZero = (v: number) => (v === 0 ? 0 : v);
  return {
    linear_x: unsignedZero(y * config.maxLinearMps),
    linear_y: 0,
    linear_z: 0,
    angular_x: 0,
    angular_y: 0,
    angular_z: unsignedZero(-x * config.maxAngularRps),
  };
}

export const ZERO_TWIST: TwistPayload = {
  linear_x: 0,
  linear_y: 0,
  linear_z: 0,
  angular_x: 0,
  angular_y: 0,
  angular_z: 0,
};

export interface TwistSink {
  publish(topic: string, payload: unknown): boolean;
}

export interface TwistStreamOptions {
  setInterval?: (fn: () => void, ms: number) => unknown;
  clearInterval?: (handle: unknown) => void;
  topic?: string;
}

export class TwistStream {
  readonly topic: string;
  private sink: TwistSink;
  private config: PanelConfig;
  private state: JoystickState = { x: 0, y: 0, engaged: false };
  private timer: unknown = null;
  private setIntervalFn: (fn: () => void, ms: number) => unknown;
  private clearIntervalFn: (handle: unknown) => void;
  published: TwistPayload[] = [];

  constructor(sink: TwistSink, config: PanelConfig, options: TwistStreamOptions = {}) {
    this.sink = sink;
    this.config = config;
    this.topic = options.topic ?? "cmd_vel_wheel";
    this.setIntervalFn = options.setInterval ?? ((fn, ms) => setInterval(fn, ms));
    this.clearIntervalFn = options.clearInterval ?? ((h) => clearInterval(h as number));
  }

  private emit(payload: TwistPayload): void {
    this.published.push(payload);
    this.sink.publish(this.topic, payload);
  }

  move(x: number, y: number): void {
    const clamped = clampDeflection(x, y);
    const wasEngaged = this.state.engaged;
    this.state = { ...clamped, engaged: true };
    if (!wasEngaged) {
      this.emit(joystickToTwist(this.state, this.config));
      this.timer = this.setIntervalFn(
        () => this.emit(joystickToTwist(this.state, this.config)),
        1000 / this.config.publishRateHz,
      );
    }
  }

  release(): void {
    if (this.timer !== null) {
      this.clearIntervalFn(this.timer);
      this.timer = null;
    }
    const wasEngaged = this.state.engaged;
    this.state = { x: 0, y: 0, engaged: false };
    if (wasEngaged) this.emit(ZERO_TWIST);
  }

  /** Safety stop on connection loss: halt the stream; the zero twist
   * is sent best-effort (the bridge may already be gone). */
  handleDisconnect(): void {
    this.release();
  }

  get engaged(): boolean {
    return this.state.engaged;
  }
}
