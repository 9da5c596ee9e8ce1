"""Decision-tree-ensemble sentiment inference and its model file format.

Model files are plain text, one element per line::

    labels negative neutral positive
    features 16
    tree 0
    node 0 feature 14 threshold 0.125 left 1 right 2
    leaf 1 votes 3 0 1
    leaf 2 votes 0 2 5
    tree 1
    ...

``node`` lines test ``x[feature] <= threshold`` (left on true); ``leaf``
lines carry per-class vote counts.  Ids are tree-local, the root is id 0.
A small deterministic trainer is included so the bundled model can be
regenerated from the fixture recipe (`python -m sobot.audio.train_model`).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from sobot.errors import SobotError

SENTIMENT_LABELS = ("negative", "neutral", "positive")


class ModelInvalid(SobotError):
    pass


@dataclass
class TreeNode:
    feature: int = -1  # -1 marks a leaf
    threshold: float = 0.0
    left: int = -1
    right: int = -1
    votes: list[int] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


@dataclass
class Tree:
    nodes: dict[int, TreeNode]

    def predict_votes(self, x: list[float]) -> list[int]:
        node = self.nodes[0]
        while not node.is_leaf:
            node = self.nodes[node.left if x[node.feature] <= node.threshold
                              else node.right]
        return node.votes


@dataclass
class TreeEnsembleModel:
    labels: tuple[str, ...]
    n_features: int
    trees: list[Tree]

    def validate(self) -> None:
        if len(self.trees) < 1:
            raise ModelInvalid("ensemble needs at least one tree")
        if len(self.labels) < 2:
            raise ModelInvalid("need at least two labels")
        for t_index, tree in enumerate(self.trees):
            if 0 not in tree.nodes:
                raise ModelInvalid(f"tree {t_index} has no root (id 0)")
            seen: set[int] = set()
            stack = [0]
            while stack:
                nid = stack.pop()
                if nid in seen:
                    raise ModelInvalid(f"tree {t_index}: node {nid} reachable twice")
                seen.add(nid)
                node = tree.nodes.get(nid)
                if node is None:
                    raise ModelInvalid(f"tree {t_index}: missing node {nid}")
                if node.is_leaf:
                    if len(node.votes) != len(self.labels):
                        raise ModelInvalid(
                            f"tree {t_index}: leaf {nid} has {len(node.votes)} votes, "
                            f"expected {len(self.labels)}")
                else:
                    if not 0 <= node.feature < self.n_features:
                        raise ModelInvalid(
                            f"tree {t_index}: node {nid} feature {node.feature} "
                            f"out of range")
                    stack.extend((node.left, node.right))


def classify_sentiment(features, model: TreeEnsembleModel) -> tuple[str, list[float]]:
    """Majority vote across trees; ties break toward the lower label index."""
    model.validate()
    x = features.to_list() if hasattr(features, "to_list") else list(features)
    if len(x) != model.n_features:
        raise ModelInvalid(f"model expects {model.n_features} features, got {len(x)}")
    tallies = [0] * len(model.labels)
    for tree in model.trees:
        votes = tree.predict_votes(x)
        best = max(range(len(votes)), key=lambda i: (votes[i], -i))
        tallies[best] += 1
    total = sum(tallies)
    winner = max(range(len(tallies)), key=lambda i: (tallies[i], -i))
    return model.labels[winner], [t / total for t in tallies]


# -- model file io -------------------------------------------------------


def dump_model(model: TreeEnsembleModel) -> str:
    lines = [f"labels {' '.join(model.labels)}", f"features {model.n_features}"]
    for index, tree in enumerate(model.trees):
        lines.append(f"tree {index}")
        for nid in sorted(tree.nodes):
            node = tree.nodes[nid]
            if node.is_leaf:
                lines.append(f"leaf {nid} votes {' '.join(map(str, node.votes))}")
            else:
                lines.append(
                    f"node {nid} feature {node.feature} threshold {node.threshold!r} "
                    f"left {node.left} right {node.right}")
    return "\n".join(lines) + "\n"


def parse_model(text: str) -> TreeEnsembleModel:
    labels: tuple[str, ...] = ()
    n_features = 0
    trees: list[Tree] = []
    current: dict[int, TreeNode] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "labels":
                labels = tuple(parts[1:])
            elif parts[0] == "features":
                n_features = int(parts[1])
            elif parts[0] == "tree":
                current = {}
                trees.append(Tree(current))
            elif parts[0] == "node":
                if current is None:
                    raise ModelInvalid(f"line {lineno}: node outside a tree")
                if (parts[2], parts[4], parts[6]) != ("feature", "threshold", "left"):
                    raise ModelInvalid(f"line {lineno}: malformed node line")
                current[int(parts[1])] = TreeNode(
                    feature=int(parts[3]), threshold=float(parts[5]),
                    left=int(parts[7]), right=int(parts[9]))
            elif parts[0] == "leaf":
                if current is None:
                    raise ModelInvalid(f"line {lineno}: leaf outside a tree")
                current[int(parts[1])] = TreeNode(votes=[int(v) for v in parts[3:]])
            else:
                raise ModelInvalid(f"line {lineno}: unknown directive {parts[0]!r}")
        except (IndexError, ValueError) as exc:
            raise ModelInvalid(f"line {lineno}: {exc}") from None
    model = TreeEnsembleModel(labels, n_features, trees)
    model.validate()
    return model


def load_model(path: str) -> TreeEnsembleModel:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model(fh.read())


def bundled_model() -> TreeEnsembleModel:
    from importlib import resources

    text = resources.files("sobot").joinpath("data/sentiment.model").read_text("utf-8")
    return parse_model(text)


# -- trainer -------------------------------------------------------------


def _gini(counts: list[int]) -> float:
    total = sum(counts)
    if total == 0:
        return 0.0
    return 1.0 - sum((c / total) ** 2 for c in counts)


def _grow(X, y, rows, n_labels, rng, max_depth, n_feature_sub, nodes, depth=0):
    counts = [0] * n_labels
    for r in rows:
        counts[y[r]] += 1
    nid = len(nodes)
    nodes[nid] = None  # reserve slot, fill below
    majority_done = counts.count(0) == n_labels - 1
    if depth >= max_depth or majority_done or len(rows) < 4:
        nodes[nid] = TreeNode(votes=counts)
        return nid
    n_features = len(X[0])
    candidates = sorted(rng.sample(range(n_features), n_feature_sub))
    best = None
    for f in candidates:
        values = sorted({X[r][f] for r in rows})
        for lo, hi in zip(values, values[1:]):
            thr = (lo + hi) / 2.0
            left = [r for r in rows if X[r][f] <= thr]
            right = [r for r in rows if X[r][f] > thr]
            if not left or not right:
                continue
            lc = [0] * n_labels
            rc = [0] * n_labels
            for r in left:
                lc[y[r]] += 1
            for r in right:
                rc[y[r]] += 1
            score = (len(left) * _gini(lc) + len(right) * _gini(rc)) / len(rows)
            if best is None or score < best[0]:
                best = (score, f, thr, left, right)
    if best is None or best[0] >= _gini(counts):
        nodes[nid] = TreeNode(votes=counts)
        return nid
    _, f, thr, left_rows, right_rows = best
    left_id = _grow(X, y, left_rows, n_labels, rng, max_depth, n_feature_sub, nodes, depth + 1)
    right_id = _grow(X, y, right_rows, n_labels, rng, max_depth, n_feature_sub, nodes, depth + 1)
    nodes[nid] = TreeNode(feature=f, threshold=thr, left=left_id, right=right_id)
    return nid


def train_forest(X: list[list[float]], y: list[int],
                 labels: tuple[str, ...] = SENTIMENT_LABELS,
                 n_trees: int = 10, max_depth: int = 3,
                 seed: int = 7) -> TreeEnsembleModel:
    """Seeded bootstrap forest; deterministic for fixed inputs."""
    if not X:
        raise ModelInvalid("no training data")
    rng = random.Random(seed)
    n_features = len(X[0])
    n_sub = max(1, int(math.sqrt(n_features)))
    trees = []
    for _ in range(n_trees):
        rows = [rng.randrange(len(X)) for _ in range(len(X))]
        nodes: dict[int, TreeNode] = {}
        _grow(X, y, rows, len(labels), rng, max_depth, n_sub, nodes)
        trees.append(Tree(nodes))
    model = TreeEnsembleModel(tuple(labels), n_features, trees)
    model.validate()
    return model
