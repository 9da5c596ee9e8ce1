"""Audio pipeline nodes.

Topics: audio_raw (std/AudioChunk) -> audio_features (std/NdArray f64)
-> audio_sentiment (std/String).
"""

from __future__ import annotations

import logging
import threading
import time
import wave
from dataclasses import dataclass

import numpy as np

from sobot.bus import NodeContext
from sobot.codec import MessageValue, SchemaRegistry
from sobot.audio.features import (
    SAMPLE_RATE,
    WINDOW,
    BadWindow,
    FeatureVector,
    extract_features,
)
from sobot.audio.forest import bundled_model, classify_sentiment, load_model
from sobot.errors import SobotError

log = logging.getLogger(__name__)


class SourceUnavailable(SobotError):
    pass


@dataclass
class AudioChunk:
    samples: list[int]
    sequence: int
    padded: bool = False
    sample_rate: int = SAMPLE_RATE
    channels: int = 1

    def __post_init__(self) -> None:
        if self.channels != 1:
            raise BadWindow("only mono audio is supported")
        if len(self.samples) != WINDOW:
            raise BadWindow(f"chunk must hold {WINDOW} samples")

    def to_value(self, registry: SchemaRegistry) -> MessageValue:
        return MessageValue(
            registry.get("std/AudioChunk"),
            {
                "sample_rate": self.sample_rate,
                "channels": self.channels,
                "sequence": self.sequence,
                "samples": [int(s) for s in self.samples],
                "padded": self.padded,
            },
        )

    @staticmethod
    def from_value(value: MessageValue) -> "AudioChunk":
        d = value.data
        return AudioChunk(d["samples"], d["sequence"], d["padded"],
                          d["sample_rate"], d["channels"])


def chunk_pcm(pcm: np.ndarray) -> list[AudioChunk]:
    """Split int16 PCM into fixed chunks; the final short chunk is
    zero-padded and flagged."""
    chunks = []
    for seq, start in enumerate(range(0, len(pcm), WINDOW)):
        piece = pcm[start : start + WINDOW]
        padded = len(piece) < WINDOW
        if padded:
            piece = np.concatenate([piece, np.zeros(WINDOW - len(piece), dtype=np.int16)])
        chunks.append(AudioChunk(piece.tolist(), seq, padded))
    return chunks


def read_wav(path: str) -> np.ndarray:
    try:
        with wave.open(path, "rb") as fh:
            if fh.getnchannels() != 1 or fh.getsampwidth() != 2 \
                    or fh.getframerate() != SAMPLE_RATE:
                raise SourceUnavailable(
                    f"{path}: need mono 16-bit {SAMPLE_RATE} Hz PCM, got "
                    f"{fh.getnchannels()}ch {8 * fh.getsampwidth()}-bit "
                    f"{fh.getframerate()} Hz")
            raw = fh.readframes(fh.getnframes())
    except (OSError, wave.Error) as exc:
        raise SourceUnavailable(f"cannot read {path}: {exc}") from None
    return np.frombuffer(raw, dtype="<i2")


def synth_tone(freq: float, duration_s: float, amplitude: float = 0.5) -> np.ndarray:
    t = np.arange(int(round(duration_s * SAMPLE_RATE))) / SAMPLE_RATE
    return np.round(amplitude * 32767 * np.sin(2 * np.pi * freq * t)).astype(np.int16)


def audio_stream(ctx: NodeContext):
    source = ctx.param("source", "tone")
    realtime = bool(ctx.param("realtime", False))
    registry = ctx.bus.registry

    if source == "tone":
        freq = ctx.param("freq", 440.0, kind=float)
        duration = ctx.param("duration_s", 1.0, kind=float)
        amplitude = ctx.param("amplitude", 0.5, kind=float)
        pcm = synth_tone(freq, duration, amplitude)
    elif source == "silence":
        duration = ctx.param("duration_s", 1.0, kind=float)
        pcm = np.zeros(int(round(duration * SAMPLE_RATE)), dtype=np.int16)
    elif source == "file":
        pcm = read_wav(ctx.param("path", "", kind=str))
    else:
        raise SourceUnavailable(f"unknown source {source!r}")

    pub = ctx.advertise("audio_raw", "std/AudioChunk")
    stop_flag = threading.Event()

    def run() -> None:
        period = WINDOW / SAMPLE_RATE
        start = time.monotonic()
        for chunk in chunk_pcm(pcm):
            if stop_flag.is_set():
                return
            pub.publish(chunk.to_value(registry))
            if realtime:
                due = start + (chunk.sequence + 1) * period
                delay = due - time.monotonic()
                if delay > 0:
                    stop_flag.wait(delay)

    worker = threading.Thread(target=run, daemon=True, name="audio_stream")
    worker.start()

    def stop() -> None:
        stop_flag.set()
        worker.join(timeout=5)

    return stop


def audio_features(ctx: NodeContext):
    registry = ctx.bus.registry
    pub = ctx.advertise("audio_features", "std/NdArray")

    def on_chunk(value: MessageValue) -> None:
        chunk = AudioChunk.from_value(value)
        try:
            features = extract_features(chunk.samples, chunk.sample_rate)
        except BadWindow as exc:
            log.warning("audio_features: %s", exc)
            return
        pub.publish(features.to_value(registry))

    ctx.subscribe("audio_raw", "std/AudioChunk", on_chunk, queue_capacity=1024)
    return None


def audio_sentiment(ctx: NodeContext):
    registry = ctx.bus.registry
    model_path = ctx.param("model", "")
    model = load_model(model_path) if model_path else bundled_model()
    pub = ctx.advertise("audio_sentiment", "std/String")

    def on_features(value: MessageValue) -> None:
        try:
            features = FeatureVector.from_value(value)
        except BadWindow as exc:
            log.warning("audio_sentiment: %s", exc)
            return
        label, _ = classify_sentiment(features, model)
        pub.publish(MessageValue(registry.get("std/String"), {"data": label}))

    ctx.subscribe("audio_features", "std/NdArray", on_features, queue_capacity=1024)
    return None
