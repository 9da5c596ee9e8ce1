"""Rule-based word tokenizer with Persian-aware joiner handling.

Whitespace separates tokens; punctuation characters (Unicode category P*)
become single-character tokens of their own; the zero-width non-joiner
(U+200C) is a Cf format character, so it stays inside a token, which
keeps Persian compounds such as "می‌روم" whole.
"""

from __future__ import annotations

import unicodedata

ZWNJ = "‌"


def tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    current: list[str] = []

    def flush() -> None:
        if current:
            tokens.append("".join(current))
            current.clear()

    for ch in text:
        if ch.isspace():
            flush()
        elif unicodedata.category(ch).startswith("P"):
            flush()
            tokens.append(ch)
        else:
            current.append(ch)
    flush()
    return tokens
