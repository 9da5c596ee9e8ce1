// Live video pane with the landmark-overlay toggle.
//
// The pane owns at most ONE image-topic subscription at any moment:
// toggling the overlay unsubscribes the active topic before (not after)
// subscribing the other, so subscription economy holds no matter how
// fast the toggle is hammered.

import type { BridgeClient } from "./bridge.js";
import type { CameraInfoPayload, ImagePayload } from "./types.js";

export const RAW_TOPIC = "/image_raw";
export const OVERLAY_TOPIC = "/image_raw/landmarked";
export const CAMERA_INFO_TOPIC = "/camera_info";

export interface FrameSurface {
  drawFrame(width: number, height: number, rgb: Uint8Array): void;
}

export function decodeBase64(data: string): Uint8Array {
  if (typeof atob === "function") {
    const binary = atob(data);
    const out = new Uint8Array(binary.length);
    for (let i = 0; i < binary.length; i++) out[i] = binary.charCodeAt(i);
    return out;
  }
  // node (tests) has Buffer instead of atob
  const nodeBuffer = (globalThis as {
    Buffer?: { from(s: string, enc: string): Uint8Array };
  }).Buffer;
  if (nodeBuffer !== undefined) {
    return new Uint8Array(nodeBuffer.from(data, "base64"));
  }
  throw new Error("no base64 decoder available");
}

export function stripStride(frame: ImagePayload, bytes: Uint8Array): Uint8Array {
  const rowBytes = 3 * frame.width;
  if (frame.stride === rowBytes) return bytes;
  const out = new Uint8Array(rowBytes * frame.height);
  for (let row = 0; row < frame.height; row++) {
    out.set(bytes.subarray(row * frame.stride, row * frame.stride + rowBytes), row * rowBytes);
  }
  return out;
}

export class VideoFeed {
  private bridge: BridgeClient;
  private surface: FrameSurface;
  private overlay = false;
  private active: string | null = null;
  cameraInfo: CameraInfoPayload | null = null;
  framesDrawn = 0;

  constructor(bridge: BridgeClient, surface: FrameSurface) {
    this.bridge = bridge;
    this.surface = surface;
  }

  start(): void {
    this.bridge.subscribe(CAMERA_INFO_TOPIC, (payload) => {
      this.cameraInfo = payload as CameraInfoPayload;
    });
    this.activate(this.overlay ? OVERLAY_TOPIC : RAW_TOPIC);
  }

  stop(): void {
    if (this.active !== null) {
      this.bridge.unsubscribe(this.active);
      this.active = null;
    }
    this.bridge.unsubscribe(CAMERA_INFO_TOPIC);
  }

  private activate(topic: string): void {
    if (this.active === topic) return;
    if (this.active !== null) this.bridge.unsubscribe(this.active);
    this.active = topic;
    this.bridge.subscribe(topic, (payload) => this.render(payload as ImagePayload));
  }

  setOverlay(enabled: boolean): void {
    this.overlay = enabled;
    if (this.active !== null) {
      this.activate(enabled ? OVERLAY_TOPIC : RAW_TOPIC);
    }
  }

  get activeTopic(): string | null {
    return this.active;
  }

  private render(frame: ImagePayload): void {
    if (frame.encoding !== "rgb8") return;
    const rgb = stripStride(frame, decodeBase64(frame.data));
    this.surface.drawFrame(frame.width, frame.height, rgb);
    this.framesDrawn += 1;
  }
}
