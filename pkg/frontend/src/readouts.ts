// Live gaze and emotion readouts: the panes show exactly the strings
// carried on their topics.

import type { BridgeClient } from "./bridge.js";
import type { EmotionPayload, StringPayload } from "./types.js";

export const GAZE_TOPIC = "/gaze_position/gaze_dir";
export const EMOTION_TOPIC = "/face_emotion";

export class Readouts {
  gaze = "";
  emotion = "";
  onChange: (() => void) | null = null;

  attach(bridge: BridgeClient): void {
    bridge.subscribe(GAZE_TOPIC, (payload) => {
      this.gaze = (payload as StringPayload).data;
      this.onChange?.();
    });
    bridge.subscribe(EMOTION_TOPIC, (payload) => {
      const emotion = payload as EmotionPayload;
      this.emotion = `${emotion.label} (${emotion.confidence.toFixed(2)})`;
      this.onChange?.();
    });
  }
}
