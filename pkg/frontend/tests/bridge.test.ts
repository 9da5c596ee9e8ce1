import { describe, expect, it } from "vitest";

import { BridgeClient } from "../src/bridge.js";
import { FakeClock, FakeSockets } from "./fakes.js";

function makeClient(sockets: FakeSockets, clock: FakeClock) {
  return new BridgeClient("ws://test/ws", {
    socketFactory: sockets.factory,
    setTimer: clock.setTimeout,
    clearTimer: clock.clear,
    backoffMs: [500, 1000, 2000],
  });
}

describe("BridgeClient", () => {
  it("subscribes on page load once connected", () => {
    const sockets = new FakeSockets();
    const clock = new FakeClock();
    const client = makeClient(sockets, clock);
    const got: unknown[] = [];
    client.subscribe("/gaze_position/gaze_dir", (p) => got.push(p));
    client.subscribe("/face_emotion", () => undefined);
    client.connect();
    sockets.last.open();
    const ops = sockets.last.sentEnvelopes();
    expect(ops).toContainEqual({ op: "subscribe", topic: "/gaze_position/gaze_dir" });
    expect(ops).toContainEqual({ op: "subscribe", topic: "/face_emotion" });

    sockets.last.deliver({
      op: "publish",
      topic: "/gaze_position/gaze_dir",
      payload: { data: "left up" },
    });
    expect(got).toEqual([{ data: "left up" }]);
  });

  it("reports disconnection immediately and reconnects with backoff", () => {
    const sockets = new FakeSockets();
    const clock = new FakeClock();
    const client = makeClient(sockets, clock);
    const states: string[] = [];
    client.onStateChange = (s) => states.push(s);
    client.subscribe("/t", () => undefined);
    client.connect();
    sockets.last.open();
    expect(states).toEqual(["connecting", "connected"]);

    sockets.last.drop();
    // banner state flips well within the 3 s bound
    expect(states[states.length - 1]).toBe("disconnected");
    expect(sockets.created.length).toBe(1);
    clock.advance(500);
    expect(sockets.created.length).toBe(2);
    sockets.last.open();
    // resubscribed automatically after reconnect
    expect(sockets.last.sentEnvelopes()).toContainEqual({ op: "subscribe", topic: "/t" });
  });

  it("escalates backoff across consecutive failures", () => {
    const sockets = new FakeSockets();
    const clock = new FakeClock();
    const client = makeClient(sockets, clock);
    client.connect();
    sockets.last.drop(); // attempt 0 fails
    clock.advance(500);
    expect(sockets.created.length).toBe(2);
    sockets.last.drop(); // attempt 1 fails
    clock.advance(999);
    expect(sockets.created.length).toBe(2);
    clock.advance(1);
    expect(sockets.created.length).toBe(3);
  });

  it("correlates service responses by id", async () => {
    const sockets = new FakeSockets();
    const clock = new FakeClock();
    const client = makeClient(sockets, clock);
    client.connect();
    sockets.last.open();
    const pending = client.callService("gaze_detector", { x: 1 });
    const sent = sockets.last.sentEnvelopes().at(-1)!;
    expect(sent.op).toBe("call_service");
    sockets.last.deliver({
      op: "service_response",
      service: "gaze_detector",
      id: sent.id,
      ok: true,
      payload: { label: "center" },
    });
    await expect(pending).resolves.toEqual({ label: "center" });
  });

  it("rejects queued calls when the link drops", async () => {
    const sockets = new FakeSockets();
    const clock = new FakeClock();
    const client = makeClient(sockets, clock);
    client.connect();
    sockets.last.open();
    const pending = client.callService("echo", {});
    sockets.last.drop();
    await expect(pending).rejects.toThrow("disconnected");
  });

  it("routes status envelopes to the status handler", () => {
    const sockets = new FakeSockets();
    const clock = new FakeClock();
    const client = makeClient(sockets, clock);
    const statuses: string[] = [];
    client.onStatus = (level, message) => statuses.push(`${level}:${message}`);
    client.connect();
    sockets.last.open();
    sockets.last.deliver({ op: "status", level: "error", message: "NotFound: /x" });
    expect(statuses).toEqual(["error:NotFound: /x"]);
  });

  it("close() stops reconnecting", () => {
    const sockets = new FakeSockets();
    const clock = new FakeClock();
    const client = makeClient(sockets, clock);
    client.connect();
    sockets.last.drop();
    client.close();
    clock.advance(10_000);
    expect(sockets.created.length).toBe(1);
  });
});
