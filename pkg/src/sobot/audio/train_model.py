"""Regenerate the bundled sentiment model from the fixture recipe.

Usage: python -m sobot.audio.train_model [output_path]
"""

from __future__ import annotations

import sys

from sobot.audio.features import extract_features
from sobot.audio.fixtures import make_fixture_set
from sobot.audio.forest import SENTIMENT_LABELS, classify_sentiment, dump_model, train_forest


def train_bundled_model():
    fixtures = make_fixture_set()
    X = [extract_features(samples).to_list() for samples, _ in fixtures]
    y = [SENTIMENT_LABELS.index(label) for _, label in fixtures]
    model = train_forest(X, y)
    predictions = [classify_sentiment(x, model)[0] for x in X]
    return model, predictions


def main(argv: list[str]) -> int:
    out_path = argv[1] if len(argv) > 1 else "src/sobot/data/sentiment.model"
    model, predictions = train_bundled_model()
    fixtures = make_fixture_set()
    agree = sum(p == label for p, (_, label) in zip(predictions, fixtures))
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(dump_model(model))
    print(f"wrote {out_path}: {len(model.trees)} trees, "
          f"training agreement {agree}/{len(fixtures)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main(sys.argv))
