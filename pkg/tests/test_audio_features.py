import math
import random

import numpy as np
import pytest

from mfcc_oracle import oracle_f0_lag_search, oracle_mfcc
from sobot.audio import BadWindow, FeatureVector, extract_features, synth_tone

WINDOW = 512


def noise_window(seed, amplitude=3000):
    rng = random.Random(seed)
    return [rng.randint(-amplitude, amplitude) for _ in range(WINDOW)]


def test_silence_features():
    fv = extract_features([0] * WINDOW)
    assert fv.energy_rms == 0.0
    assert fv.f0_hz is None
    assert fv.zcr == 0.0
    assert len(fv.mfcc) == 13


def test_window_length_checked():
    with pytest.raises(BadWindow):
        extract_features([0] * 100)
    with pytest.raises(BadWindow):
        extract_features([0] * WINDOW, sample_rate=8000)


def test_440hz_sine_pitch():
    tone = synth_tone(440.0, WINDOW / 16000.0, amplitude=1.0)[:WINDOW]
    fv = extract_features(tone.tolist())
    assert fv.f0_hz == pytest.approx(440.0, abs=5.0)
    # exhaustive-lag oracle lands in the same +-5 Hz window
    assert oracle_f0_lag_search(tone.tolist()) == pytest.approx(440.0, abs=5.0)


def test_pitch_sweep_100_to_400():
    for freq in range(100, 401, 10):
        tone = synth_tone(float(freq), WINDOW / 16000.0, amplitude=0.8)[:WINDOW]
        fv = extract_features(tone.tolist())
        assert fv.f0_hz == pytest.approx(float(freq), abs=5.0), freq


def test_noise_is_unvoiced():
    fv = extract_features(noise_window(5))
    assert fv.f0_hz is None


def test_mfcc_matches_straight_line_oracle():
    for seed in range(10):
        window = noise_window(seed)
        got = extract_features(window).mfcc
        want = oracle_mfcc(window)
        assert np.allclose(got, want, rtol=1e-6, atol=1e-12), seed


def test_scaling_shifts_c0_only():
    base = noise_window(77, amplitude=700)
    for g in (2, 4, 8):
        scaled = [s * g for s in base]
        a = extract_features(base)
        b = extract_features(scaled)
        assert np.allclose(a.mfcc[1:], b.mfcc[1:], atol=1e-6)
        # c0 shifts by ln(g) * sqrt(n_mels) for an orthonormal DCT
        assert b.mfcc[0] - a.mfcc[0] == pytest.approx(
            math.log(g) * math.sqrt(26), abs=1e-6)


def test_zcr_counts_sign_changes():
    # alternating signs: every adjacent pair crosses
    window = [1000 if i % 2 == 0 else -1000 for i in range(WINDOW)]
    assert extract_features(window).zcr == 1.0


def test_feature_vector_roundtrip(registry):
    fv = extract_features(noise_window(3))
    back = FeatureVector.from_value(fv.to_value(registry))
    assert back.to_list() == pytest.approx(fv.to_list())
    silent = extract_features([0] * WINDOW)
    assert FeatureVector.from_value(silent.to_value(registry)).f0_hz is None
