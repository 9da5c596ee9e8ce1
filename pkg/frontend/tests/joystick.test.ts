import { describe, expect, it } from "vitest";

import { DEFAULT_CONFIG, validateConfig } from "../src/config.js";
import { TwistStream, ZERO_TWIST, clampDeflection, joystickToTwist } from "../src/joystick.js";
import { FakeClock } from "./fakes.js";

const sinkOf = (log: unknown[]) => ({
  publish: (topic: string, payload: unknown) => {
    log.push({ topic, payload });
    return true;
  },
});

describe("config invariants", () => {
  it("accepts the defaults", () => {
    expect(validateConfig(DEFAULT_CONFIG)).toBe(DEFAULT_CONFIG);
  });

  it("rejects bad speeds and rates", () => {
    expect(() => validateConfig({ ...DEFAULT_CONFIG, maxLinearMps: 0 })).toThrow();
    expect(() => validateConfig({ ...DEFAULT_CONFIG, maxAngularRps: -1 })).toThrow();
    expect(() => validateConfig({ ...DEFAULT_CONFIG, publishRateHz: 0.5 })).toThrow();
    expect(() => validateConfig({ ...DEFAULT_CONFIG, publishRateHz: 31 })).toThrow();
  });
});

describe("joystickToTwist", () => {
  it("maps center to the zero twist", () => {
    const twist = joystickToTwist({ x: 0, y: 0, engaged: true }, DEFAULT_CONFIG);
    expect(twist).toEqual(ZERO_TWIST);
  });

  it("maps full forward to max linear speed", () => {
    const twist = joystickToTwist({ x: 0, y: 1, engaged: true }, DEFAULT_CONFIG);
    expect(twist.linear_x).toBe(0.5);
    expect(twist.angular_z).toBe(0);
    expect(twist.linear_y).toBe(0);
  });

  it("maps right deflection to negative angular z", () => {
    const twist = joystickToTwist({ x: 1, y: 0, engaged: true }, DEFAULT_CONFIG);
    expect(twist.angular_z).toBe(-1.0);
    expect(twist.linear_x).toBe(0);
  });

  it("treats a disengaged stick as centered", () => {
    const twist = joystickToTwist({ x: 0.9, y: 0.9, engaged: false }, DEFAULT_CONFIG);
    expect(twist).toEqual(ZERO_TWIST);
  });

  it("clamps deflection to the unit disc", () => {
    const clamped = clampDeflection(3, 4);
    expect(Math.hypot(clamped.x, clamped.y)).toBeCloseTo(1, 12);
    expect(clamped.x / clamped.y).toBeCloseTo(3 / 4, 12);
  });
});

describe("TwistStream", () => {
  it("streams at the configured rate while engaged", () => {
    const clock = new FakeClock();
    const log: Array<{ topic: string; payload: unknown }> = [];
    const stream = new TwistStream(sinkOf(log), DEFAULT_CONFIG, {
      setInterval: clock.setInterval,
      clearInterval: clock.clear,
    });
    stream.move(0, 1);
    clock.advance(1000); // 10 Hz -> 10 ticks + the initial emit
    expect(log.length).toBe(11);
    expect(log.every((entry) => entry.topic === "cmd_vel_wheel")).toBe(true);
    stream.release();
  });

  it("always ends with one all-zero twist on release", () => {
    const clock = new FakeClock();
    const log: Array<{ topic: string; payload: unknown }> = [];
    const stream = new TwistStream(sinkOf(log), DEFAULT_CONFIG, {
      setInterval: clock.setInterval,
      clearInterval: clock.clear,
    });
    stream.move(0, 1);
    clock.advance(350);
    stream.release();
    const last = log[log.length - 1].payload;
    expect(last).toEqual(ZERO_TWIST);
    const count = log.length;
    clock.advance(2000); // nothing streams after release
    expect(log.length).toBe(count);
  });

  it("release without engagement publishes nothing", () => {
    const log: unknown[] = [];
    const stream = new TwistStream(sinkOf(log), DEFAULT_CONFIG, {
      setInterval: () => 0,
      clearInterval: () => undefined,
    });
    stream.release();
    expect(log.length).toBe(0);
  });

  it("disconnect acts as a safety stop", () => {
    const clock = new FakeClock();
    const log: Array<{ topic: string; payload: unknown }> = [];
    const stream = new TwistStream(sinkOf(log), DEFAULT_CONFIG, {
      setInterval: clock.setInterval,
      clearInterval: clock.clear,
    });
    stream.move(0.5, 0.5);
    clock.advance(200);
    stream.handleDisconnect();
    expect(log[log.length - 1].payload).toEqual(ZERO_TWIST);
    expect(stream.engaged).toBe(false);
  });
});
