"""MFCC and prosody extraction over fixed 512-sample windows.

The chain is pinned so results are bit-stable across runs:

    int16 samples scaled to [-1, 1)
    pre-emphasis        y[n] = x[n] - 0.97 x[n-1], y[0] = x[0]
    symmetric Hamming window (512)
    512-point magnitude spectrum (257 bins)
    26 triangular mel filters over 0..8000 Hz
    natural log, floored at 1e-10
    orthonormal DCT-II, first 13 coefficients kept

Pitch is the highest normalized autocorrelation peak for lags spanning
50..500 Hz, refined with parabolic interpolation; a window is voiced
when that peak reaches 0.3.  Energy is RMS of the scaled samples and the
zero-crossing rate counts sign changes over adjacent samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from sobot.codec import MessageValue, SchemaRegistry
from sobot.errors import SobotError

WINDOW = 512
SAMPLE_RATE = 16000
N_MELS = 26
N_MFCC = 13
PREEMPHASIS = 0.97
LOG_FLOOR = 1e-10
F0_MIN = 50.0
F0_MAX = 500.0
VOICING_THRESHOLD = 0.3
FEATURE_ARITY = N_MFCC + 3  # mfcc then f0 (0 when unvoiced), energy, zcr


class BadWindow(SobotError):
    pass


@dataclass
class FeatureVector:
    mfcc: list[float]  # exactly 13
    f0_hz: float | None
    energy_rms: float
    zcr: float

    def to_list(self) -> list[float]:
        return [float(v) for v in
                (*self.mfcc, self.f0_hz or 0.0, self.energy_rms, self.zcr)]

    @staticmethod
    def from_list(values: list[float]) -> "FeatureVector":
        if len(values) != FEATURE_ARITY:
            raise BadWindow(f"feature vector needs {FEATURE_ARITY} values, got {len(values)}")
        f0 = values[N_MFCC]
        return FeatureVector(list(values[:N_MFCC]), f0 if f0 > 0 else None,
                             values[N_MFCC + 1], values[N_MFCC + 2])

    def to_value(self, registry: SchemaRegistry) -> MessageValue:
        from sobot.codec import ndarray_to_nested, to_message_fields

        nd = ndarray_to_nested("f64", [FEATURE_ARITY], self.to_list())
        return MessageValue(registry.get("std/NdArray"), to_message_fields(nd))

    @staticmethod
    def from_value(value: MessageValue) -> "FeatureVector":
        from sobot.codec import from_message_fields

        nd = from_message_fields(value.data)
        if nd.dtype != "f64" or nd.shape != [FEATURE_ARITY]:
            raise BadWindow(f"expected f64 [{FEATURE_ARITY}], got {nd.dtype} {nd.shape}")
        return FeatureVector.from_list(nd.data)


def _hz_to_mel(f: float) -> float:
    return 2595.0 * math.log10(1.0 + f / 700.0)


def _mel_to_hz(m: float) -> float:
    return 700.0 * (10.0 ** (m / 2595.0) - 1.0)


def mel_filterbank(n_fft: int = WINDOW, sample_rate: int = SAMPLE_RATE,
                   n_mels: int = N_MELS) -> np.ndarray:
    """Triangular filters [n_mels, n_fft//2 + 1] spanning 0..sr/2."""
    n_bins = n_fft // 2 + 1
    f_max = sample_rate / 2.0
    mel_points = np.linspace(_hz_to_mel(0.0), _hz_to_mel(f_max), n_mels + 2)
    hz_points = np.array([_mel_to_hz(m) for m in mel_points])
    bin_freqs = np.arange(n_bins) * sample_rate / n_fft
    bank = np.zeros((n_mels, n_bins))
    for m in range(n_mels):
        lo, center, hi = hz_points[m], hz_points[m + 1], hz_points[m + 2]
        rising = (bin_freqs - lo) / (center - lo)
        falling = (hi - bin_freqs) / (hi - center)
        bank[m] = np.clip(np.minimum(rising, falling), 0.0, None)
    return bank


def dct_ortho_matrix(n_out: int = N_MFCC, n_in: int = N_MELS) -> np.ndarray:
    """Orthonormal DCT-II rows (the first n_out of them)."""
    m = np.arange(n_in)
    mat = np.array(
        [np.cos(math.pi * k * (2 * m + 1) / (2.0 * n_in)) for k in range(n_out)]
    ) * math.sqrt(2.0 / n_in)
    mat[0] /= math.sqrt(2.0)
    return mat


_MEL_BANK = mel_filterbank()
_DCT = dct_ortho_matrix()
_HAMMING = np.hamming(WINDOW)


def estimate_f0(x: np.ndarray, sample_rate: int = SAMPLE_RATE,
                threshold: float = VOICING_THRESHOLD) -> float | None:
    """Autocorrelation pitch with parabolic peak refinement."""
    x = x - x.mean()
    r = np.correlate(x, x, mode="full")[len(x) - 1 :]
    if r[0] <= 0.0:
        return None
    lag_min = int(sample_rate / F0_MAX)
    lag_max = min(int(sample_rate / F0_MIN), len(x) - 1)
    window = r[lag_min : lag_max + 1]
    if window.size == 0:
        return None
    peak = int(np.argmax(window)) + lag_min
    if r[peak] / r[0] < threshold:
        return None
    lag = float(peak)
    if 0 < peak < len(r) - 1:
        a, b, c = r[peak - 1], r[peak], r[peak + 1]
        denom = a - 2 * b + c
        if abs(denom) > 1e-12:
            lag += 0.5 * (a - c) / denom
    f0 = sample_rate / lag
    return float(min(max(f0, F0_MIN), F0_MAX))


def extract_features(samples, sample_rate: int = SAMPLE_RATE) -> FeatureVector:
    """Feature vector for one window of 512 int16 samples."""
    if sample_rate != SAMPLE_RATE:
        raise BadWindow(f"sample rate must be {SAMPLE_RATE}, got {sample_rate}")
    x = np.asarray(samples, dtype=np.float64)
    if x.shape != (WINDOW,):
        raise BadWindow(f"window must hold {WINDOW} samples, got {x.shape}")
    x = x / 32768.0

    emphasized = np.empty_like(x)
    emphasized[0] = x[0]
    emphasized[1:] = x[1:] - PREEMPHASIS * x[:-1]
    spectrum = np.abs(np.fft.rfft(emphasized * _HAMMING, n=WINDOW))
    energies = _MEL_BANK @ spectrum
    logs = np.log(np.maximum(energies, LOG_FLOOR))
    mfcc = (_DCT @ logs).tolist()

    energy = float(np.sqrt(np.mean(x * x)))
    zcr = int(np.count_nonzero(x[1:] * x[:-1] < 0.0)) / (WINDOW - 1)

    return FeatureVector(mfcc, estimate_f0(x, sample_rate), energy, zcr)
