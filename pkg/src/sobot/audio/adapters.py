"""Adapter seams for speech-to-text, text-to-speech, and dialogue.

Real cloud backends are out of scope; each seam ships a deterministic
stub so pipelines exercising these stages stay reproducible.  Backends
register by name; asking for an unconfigured one raises
AdapterUnavailable.
"""

from __future__ import annotations

import hashlib

import numpy as np

from sobot.audio.features import SAMPLE_RATE, WINDOW
from sobot.errors import SobotError


class AdapterUnavailable(SobotError):
    pass


class FixtureStt:
    """Lookup-table recognizer: known windows map to stored transcripts."""

    name = "fixture"

    def __init__(self, utterances: dict[str, str] | None = None):
        # keyed by sha256 of the raw little-endian int16 sample bytes
        self._table = dict(utterances or {})

    @staticmethod
    def fingerprint(samples) -> str:
        arr = np.asarray(samples, dtype="<i2")
        return hashlib.sha256(arr.tobytes()).hexdigest()

    def add_utterance(self, samples, transcript: str) -> None:
        self._table[self.fingerprint(samples)] = transcript

    def transcribe(self, samples) -> tuple[str, float]:
        """Returns (transcript, confidence); unknown audio -> ("", 0.0)."""
        hit = self._table.get(self.fingerprint(samples))
        if hit is None:
            return "", 0.0
        return hit, 1.0


class ToneTts:
    """Synthesizes a three-tone jingle derived from the text hash."""

    name = "tone"

    def synthesize(self, text: str) -> list[np.ndarray]:
        digest = hashlib.sha256(text.encode("utf-8")).digest()
        freqs = [220.0 + digest[i] * 4.0 for i in range(3)]
        t = np.arange(SAMPLE_RATE // 10) / SAMPLE_RATE  # 100 ms per tone
        wave = np.concatenate([0.4 * np.sin(2 * np.pi * f * t) for f in freqs])
        pcm = np.round(wave * 32767).astype(np.int16)
        pad = (-len(pcm)) % WINDOW
        pcm = np.concatenate([pcm, np.zeros(pad, dtype=np.int16)])
        return [pcm[i : i + WINDOW] for i in range(0, len(pcm), WINDOW)]


class EchoDialogue:
    """Placeholder response generator: repeats the prompt."""

    name = "echo"

    def respond(self, text: str) -> str:
        return text


_ADAPTERS = {
    ("stt", "fixture"): FixtureStt,
    ("tts", "tone"): ToneTts,
    ("dialogue", "echo"): EchoDialogue,
}


def register_adapter(kind: str, name: str, factory) -> None:
    _ADAPTERS[(kind, name)] = factory


def make_adapter(kind: str, name: str):
    factory = _ADAPTERS.get((kind, name))
    if factory is None:
        raise AdapterUnavailable(f"no {kind} adapter named {name!r}")
    return factory()
