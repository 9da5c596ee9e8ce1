// DOM wiring: everything stateful lives in the testable modules; this
// file only binds them to elements in index.html.

import { BridgeClient } from "./bridge.js";
import { DEFAULT_CONFIG, PanelConfig, validateConfig } from "./config.js";
import { TwistStream } from "./joystick.js";
import { BehaviorPanel } from "./behaviors.js";
import { Readouts } from "./readouts.js";
import { FrameSurface, VideoFeed } from "./video.js";

class CanvasSurface implements FrameSurface {
  constructor(private canvas: HTMLCanvasElement) {}

  drawFrame(width: number, height: number, rgb: Uint8Array): void {
    if (this.canvas.width !== width) this.canvas.width = width;
    if (this.canvas.height !== height) this.canvas.height = height;
    const ctx = this.canvas.getContext("2d");
    if (ctx === null) return;
    const image = ctx.createImageData(width, height);
    for (let i = 0, j = 0; i < rgb.length; i += 3, j += 4) {
      image.data[j] = rgb[i];
      image.data[j + 1] = rgb[i + 1];
      image.data[j + 2] = rgb[i + 2];
      image.data[j + 3] = 255;
    }
    ctx.putImageData(image, 0, 0);
  }
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing #${id}`);
  return node as T;
}

export function startPanel(overrides: Partial<PanelConfig> = {}): void {
  const config = validateConfig({ ...DEFAULT_CONFIG, ...overrides });
  const banner = el<HTMLDivElement>("banner");
  const bridge = new BridgeClient(config.bridgeUrl);
  bridge.onStateChange = (state) => {
    banner.textContent = state === "connected" ? "" : "disconnected";
    banner.style.display = state === "connected" ? "none" : "block";
    if (state !== "connected") twist.handleDisconnect();
  };

  const video = new VideoFeed(bridge, new CanvasSurface(el("video")));
  const readouts = new Readouts();
  readouts.onChange = () => {
    el("gaze").textContent = readouts.gaze;
    el("emotion").textContent = readouts.emotion;
  };

  const twist = new TwistStream(bridge, config);
  const pad = el<HTMLDivElement>("joystick");
  const engage = (event: PointerEvent) => {
    const rect = pad.getBoundingClientRect();
    const x = ((event.clientX - rect.left) / rect.width) * 2 - 1;
    const y = -(((event.clientY - rect.top) / rect.height) * 2 - 1);
    twist.move(x, y);
  };
  pad.addEventListener("pointerdown", (event) => {
    pad.setPointerCapture(event.pointerId);
    engage(event);
  });
  pad.addEventListener("pointermove", (event) => {
    if (twist.engaged) engage(event);
  });
  for (const kind of ["pointerup", "pointercancel"] as const) {
    pad.addEventListener(kind, () => twist.release());
  }

  el<HTMLInputElement>("overlay-toggle").addEventListener("change", (event) => {
    video.setOverlay((event.target as HTMLInputElement).checked);
  });

  const behaviors = new BehaviorPanel(config.restBase, (url, init) =>
    fetch(url, init).then((r) => ({ status: r.status, json: () => r.json() })),
  );
  behaviors.load().then(() => {
    const caps = behaviors.capabilities();
    el("video-pane").style.display = caps.hasCamera ? "block" : "none";
    el("joystick-pane").style.display = caps.hasWheels ? "block" : "none";
    const list = el<HTMLDivElement>("behaviors");
    list.innerHTML = "";
    for (const profile of behaviors.profiles) {
      const button = document.createElement("button");
      button.textContent = `${profile.affect_label}: ${profile.id}`;
      const chip = document.createElement("span");
      chip.className = "chip";
      button.addEventListener("click", () => {
        behaviors.trigger(profile.id, (_, status) => {
          chip.textContent = status;
        });
      });
      list.append(button, chip);
    }
  });

  readouts.attach(bridge);
  video.start();
  bridge.connect();
}
