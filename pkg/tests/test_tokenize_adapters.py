import numpy as np
import pytest

from sobot.audio import (
    AdapterUnavailable,
    FixtureStt,
    ToneTts,
    ZWNJ,
    make_adapter,
    synth_tone,
    tokenize,
)


def test_whitespace_split():
    assert tokenize("سلام دنیا") == ["سلام", "دنیا"]


def test_zwnj_stays_inside_token():
    word = "می" + ZWNJ + "روم"
    assert tokenize(word) == [word]
    assert tokenize(f"من {word} خانه") == ["من", word, "خانه"]


def test_punctuation_becomes_own_token():
    assert tokenize("hi, there") == ["hi", ",", "there"]
    assert tokenize("wow!!") == ["wow", "!", "!"]
    assert tokenize("سلام، دنیا") == ["سلام", "،", "دنیا"]


def test_empty_and_space_only():
    assert tokenize("") == []
    assert tokenize("   \t\n") == []


def test_join_reversibility_without_punctuation():
    s = "  the quick   brown\tfox "
    normalized = " ".join(s.split())
    assert " ".join(tokenize(s)) == normalized


def test_stt_fixture_lookup():
    stt = FixtureStt()
    utterance = synth_tone(220.0, 0.1)
    stt.add_utterance(utterance, "سلام")
    assert stt.transcribe(utterance) == ("سلام", 1.0)
    text, confidence = stt.transcribe(synth_tone(330.0, 0.1))
    assert text == "" and confidence == 0.0


def test_tts_deterministic():
    tts = ToneTts()
    first = tts.synthesize("a")
    second = tts.synthesize("a")
    assert len(first) == len(second)
    for a, b in zip(first, second):
        assert np.array_equal(a, b)
        assert len(a) == 512
    different = tts.synthesize("b")
    assert not all(np.array_equal(a, b) for a, b in zip(first, different))


def test_adapter_registry():
    assert isinstance(make_adapter("stt", "fixture"), FixtureStt)
    assert make_adapter("dialogue", "echo").respond("hi") == "hi"
    with pytest.raises(AdapterUnavailable):
        make_adapter("stt", "google-cloud")
