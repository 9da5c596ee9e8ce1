// Wire-facing shapes: bridge envelopes and the message payloads the
// panel consumes. Field names mirror the bus schemas exactly.

export interface TwistPayload {
  linear_x: number;
  linear_y: number;
  linear_z: number;
  angular_x: number;
  angular_y: number;
  angular_z: number;
}

export interface ImagePayload {
  width: number;
  height: number;
  encoding: string;
  stride: number;
  data: string; // base64 rgb8 bytes
}

export interface CameraInfoPayload {
  width: number;
  height: number;
  fx: number;
  fy: number;
  cx: number;
  cy: number;
}

export interface StringPayload {
  data: string;
}

export interface EmotionPayload {
  label: string;
  confidence: number;
}

export type Envelope =
  | { op: "subscribe"; topic: string }
  | { op: "unsubscribe"; topic: string }
  | { op: "publish"; topic: string; payload: unknown }
  | { op: "call_service"; service: string; payload: unknown; id: string }
  | {
      op: "service_response";
      service: string;
      id: string;
      ok: boolean;
      payload?: unknown;
      error?: string;
    }
  | { op: "status"; level: string; message: string };

export interface RobotComponent {
  name: string;
  kind: string;
  params: Record<string, unknown>;
}

export interface RobotDefinition {
  robot_name: string;
  actuators: RobotComponent[];
  sensors: RobotComponent[];
}

export interface BehaviorProfile {
  id: string;
  affect_label: string;
  face_asset: string;
  sound_asset: string;
  description: string;
}

export type ExpStatus = "accepted" | "dispatched" | "completed" | "failed";

export interface ExpRequest {
  id: string;
  profile_id: string;
  requested_at: number;
  status: ExpStatus;
}
