// Bridge client: declarative subscriptions over a reconnecting socket.
//
// Callers register the topics they want once; the client (re)sends the
// subscribe envelopes every time a connection opens, so a drop never
// leaks or duplicates subscriptions. Reconnects back off 0.5s -> 5s.

import type { Envelope } from "./types.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
  onmessage: ((event: { data: string }) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export type ConnectionState = "connecting" | "connected" | "disconnected";

interface PendingCall {
  resolve: (payload: unknown) => void;
  reject: (error: Error) => void;
}

export interface BridgeClientOptions {
  socketFactory?: SocketFactory;
  setTimer?: (fn: () => void, ms: number) => unknown;
  clearTimer?: (handle: unknown) => void;
  backoffMs?: number[];
}

export class BridgeClient {
  private url: string;
  private factory: SocketFactory;
  private setTimer: (fn: () => void, ms: number) => unknown;
  private clearTimer: (handle: unknown) => void;
  private backoff: number[];
  private socket: SocketLike | null = null;
  private attempts = 0;
  private closed = false;
  private reconnectHandle: unknown = null;
  private handlers = new Map<string, (payload: unknown) => void>();
  private pending = new Map<string, PendingCall>();
  private callSeq = 0;
  state: ConnectionState = "disconnected";
  onStateChange: ((state: ConnectionState) => void) | null = null;
  onStatus: ((level: string, message: string) => void) | null = null;

  constructor(url: string, options: BridgeClientOptions = {}) {
    this.url = url;
    this.factory =
      options.socketFactory ??
      ((u) => new WebSocket(u) as unknown as SocketLike);
    this.setTimer = options.setTimer ?? ((fn, ms) => setTimeout(fn, ms));
    this.clearTimer = options.clearTimer ?? ((h) => clearTimeout(h as number));
    this.backoff = options.backoffMs ?? [500, 1000, 2000, 5000];
  }

  connect(): void {
    if (this.closed) return;
    this.setState("connecting");
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.attempts = 0;
      this.setState("connected");
      for (const topic of this.handlers.keys()) {
        this.sendEnvelope({ op: "subscribe", topic });
      }
    };
    socket.onmessage = (event) => this.dispatch(event.data);
    socket.onclose = () => this.handleDrop();
    socket.onerror = () => {
      /* onclose follows */
    };
  }

  private handleDrop(): void {
    this.socket = null;
    for (const call of this.pending.values()) {
      call.reject(new Error("bridge disconnected"));
    }
    this.pending.clear();
    if (this.closed) {
      this.setState("disconnected");
      return;
    }
    this.setState("disconnected");
    const delay = this.backoff[Math.min(this.attempts, this.backoff.length - 1)];
    this.attempts += 1;
    this.reconnectHandle = this.setTimer(() => this.connect(), delay);
  }

  private setState(state: ConnectionState): void {
    if (state !== this.state) {
      this.state = state;
      this.onStateChange?.(state);
    }
  }

  private dispatch(raw: string): void {
    let envelope: Envelope;
    try {
      envelope = JSON.parse(raw) as Envelope;
    } catch {
      return;
    }
    if (envelope.op === "publish") {
      this.handlers.get(envelope.topic)?.(envelope.payload);
    } else if (envelope.op === "service_response") {
      const call = this.pending.get(envelope.id);
      if (call) {
        this.pending.delete(envelope.id);
        if (envelope.ok) call.resolve(envelope.payload);
        else call.reject(new Error(envelope.error ?? "service failed"));
      }
    } else if (envelope.op === "status") {
      this.onStatus?.(envelope.level, envelope.message);
    }
  }

  private sendEnvelope(envelope: Envelope): boolean {
    if (this.socket === null || this.state !== "connected") return false;
    this.socket.send(JSON.stringify(envelope));
    return true;
  }

  /** Topics this client currently wants delivered. */
  subscriptions(): string[] {
    return [...this.handlers.keys()].sort();
  }

  subscribe(topic: string, handler: (payload: unknown) => void): void {
    const fresh = !this.handlers.has(topic);
    this.handlers.set(topic, handler);
    if (fresh) this.sendEnvelope({ op: "subscribe", topic });
  }

  unsubscribe(topic: string): void {
    if (this.handlers.delete(topic)) {
      this.sendEnvelope({ op: "unsubscribe", topic });
    }
  }

  publish(topic: string, payload: unknown): boolean {
    return this.sendEnvelope({ op: "publish", topic, payload });
  }

  callService(service: string, payload: unknown): Promise<unknown> {
    const id = `c${++this.callSeq}`;
    return new Promise((resolve, reject) => {
      this.pending.set(id, { resolve, reject });
      if (!this.sendEnvelope({ op: "call_service", service, payload, id })) {
        this.pending.delete(id);
        reject(new Error("bridge disconnected"));
      }
    });
  }

  close(): void {
    this.closed = true;
    if (this.reconnectHandle !== null) this.clearTimer(this.reconnectHandle);
    this.socket?.close();
    this.socket = null;
    this.setState("disconnected");
  }
}
