"""Deterministic audio fixtures for the bundled sentiment model.

Thirty 512-sample windows in three synthetic styles: quiet low hums
(negative), mid-level noise (neutral), loud bright tones (positive).
The same recipe feeds the trainer (see train_model) and the tests.
"""

from __future__ import annotations

import numpy as np

from sobot.audio.features import SAMPLE_RATE, WINDOW

FIXTURE_SEED = 20


def _tone(freq: float, amplitude: float, phase: float) -> np.ndarray:
    t = np.arange(WINDOW) / SAMPLE_RATE
    wave = amplitude * np.sin(2 * np.pi * freq * t + phase)
    return np.round(wave * 32767).astype(np.int16)


def make_fixture_set(seed: int = FIXTURE_SEED) -> list[tuple[np.ndarray, str]]:
    rng = np.random.default_rng(seed)
    out: list[tuple[np.ndarray, str]] = []
    for i in range(10):
        out.append((_tone(80.0 + 4.0 * i, 0.05 + 0.01 * i, 0.13 * i), "negative"))
    for i in range(10):
        noise = (0.18 + 0.012 * i) * rng.standard_normal(WINDOW)
        out.append((np.clip(np.round(noise * 32767), -32768, 32767).astype(np.int16),
                    "neutral"))
    for i in range(10):
        out.append((_tone(300.0 + 12.0 * i, 0.6 + 0.03 * i, 0.29 * i), "positive"))
    return out
