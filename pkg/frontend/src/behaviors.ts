// Behavior triggers backed by the REST service.
//
// The robot definition decides which panes exist (no camera -> no video
// pane, no wheel_pair -> no joystick); each stored profile becomes one
// trigger button whose status chip follows the request through
// accepted -> dispatched -> completed (or failed).

import type { BehaviorProfile, ExpRequest, ExpStatus, RobotDefinition } from "./types.js";

export type FetchJson = (
  url: string,
  init?: { method?: string; body?: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

export interface Capabilities {
  hasCamera: boolean;
  hasWheels: boolean;
  hasSpeaker: boolean;
}

export function capabilitiesOf(robot: RobotDefinition): Capabilities {
  return {
    hasCamera: robot.sensors.some((s) => s.kind === "camera"),
    hasWheels: robot.actuators.some((a) => a.kind === "wheel_pair"),
    hasSpeaker: robot.actuators.some((a) => a.kind === "speaker"),
  };
}

export interface TriggerObserver {
  (profileId: string, status: ExpStatus): void;
}

export class BehaviorPanel {
  private restBase: string;
  private fetchJson: FetchJson;
  private sleep: (ms: number) => Promise<void>;
  profiles: BehaviorProfile[] = [];
  robot: RobotDefinition | null = null;
  statusLog = new Map<string, ExpStatus[]>();

  constructor(
    restBase: string,
    fetchJson: FetchJson,
    sleep: (ms: number) => Promise<void> = (ms) => new Promise((r) => setTimeout(r, ms)),
  ) {
    this.restBase = restBase.replace(/\/$/, "");
    this.fetchJson = fetchJson;
    this.sleep = sleep;
  }

  async load(): Promise<void> {
    const robotResponse = await this.fetchJson(`${this.restBase}/api/robot`);
    this.robot = robotResponse.status === 200
      ? ((await robotResponse.json()) as RobotDefinition)
      : null;
    const listResponse = await this.fetchJson(`${this.restBase}/api/profiles`);
    this.profiles = (await listResponse.json()) as BehaviorProfile[];
  }

  capabilities(): Capabilities {
    return this.robot !== null
      ? capabilitiesOf(this.robot)
      : { hasCamera: true, hasWheels: true, hasSpeaker: true };
  }

  private record(profileId: string, status: ExpStatus, observer?: TriggerObserver): void {
    const log = this.statusLog.get(profileId) ?? [];
    if (log[log.length - 1] !== status) {
      log.push(status);
      this.statusLog.set(profileId, log);
      observer?.(profileId, status);
    }
  }

  /** POST the trigger, then follow the request until terminal. */
  async trigger(
    profileId: string,
    observer?: TriggerObserver,
    pollMs = 100,
    maxPolls = 50,
  ): Promise<ExpStatus> {
    const response = await this.fetchJson(
      `${this.restBase}/api/exp/${profileId}`,
      { method: "POST" },
    );
    if (response.status >= 400) {
      this.record(profileId, "failed", observer);
      return "failed";
    }
    let request = (await response.json()) as ExpRequest;
    this.record(profileId, request.status, observer);
    let polls = 0;
    while (request.status !== "completed" && request.status !== "failed") {
      if (++polls > maxPolls) break;
      await this.sleep(pollMs);
      const poll = await this.fetchJson(`${this.restBase}/api/exp/${request.id}`);
      request = (await poll.json()) as ExpRequest;
      this.record(profileId, request.status, observer);
    }
    return request.status;
  }
}
