"""Audio skills: PCM source, features, sentiment, tokenizer, adapters."""

from sobot.audio.adapters import (
    AdapterUnavailable,
    EchoDialogue,
    FixtureStt,
    ToneTts,
    make_adapter,
    register_adapter,
)
from sobot.audio.features import (
    FEATURE_ARITY,
    SAMPLE_RATE,
    WINDOW,
    BadWindow,
    FeatureVector,
    estimate_f0,
    extract_features,
    mel_filterbank,
)
from sobot.audio.forest import (
    SENTIMENT_LABELS,
    ModelInvalid,
    Tree,
    TreeEnsembleModel,
    TreeNode,
    bundled_model,
    classify_sentiment,
    dump_model,
    load_model,
    parse_model,
    train_forest,
)
from sobot.audio.nodes import AudioChunk, SourceUnavailable, chunk_pcm, read_wav, synth_tone
from sobot.audio.tokenizer import ZWNJ, tokenize

__all__ = [
    "AdapterUnavailable",
    "EchoDialogue",
    "FixtureStt",
    "ToneTts",
    "make_adapter",
    "register_adapter",
    "FEATURE_ARITY",
    "SAMPLE_RATE",
    "WINDOW",
    "BadWindow",
    "FeatureVector",
    "estimate_f0",
    "extract_features",
    "mel_filterbank",
    "SENTIMENT_LABELS",
    "ModelInvalid",
    "Tree",
    "TreeEnsembleModel",
    "TreeNode",
    "bundled_model",
    "classify_sentiment",
    "dump_model",
    "load_model",
    "parse_model",
    "train_forest",
    "AudioChunk",
    "SourceUnavailable",
    "chunk_pcm",
    "read_wav",
    "synth_tone",
    "tokenize",
    "ZWNJ",
]
