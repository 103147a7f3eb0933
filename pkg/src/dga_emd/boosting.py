"""Second-order gradient-boosted trees for multiclass classification.

Each round fits one regression tree per class on the softmax
cross-entropy gradient and diagonal hessian, using exact greedy split
search. Ties are broken by lowest feature index, then lowest threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

import numpy as np

from .errors import DimensionMismatch, SingleClassData


@dataclass(frozen=True)
class TrainConfig:
    rounds: int = 100
    max_depth: int = 4
    learning_rate: float = 0.3
    l2_lambda: float = 1.0
    min_split_gain: float = 0.0
    min_child_hessian: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if not 0 < self.learning_rate <= 1:
            raise ValueError("learning_rate must be in (0, 1]")
        if self.l2_lambda < 0 or self.min_split_gain < 0 or self.min_child_hessian < 0:
            raise ValueError("l2_lambda, min_split_gain and min_child_hessian must be >= 0")


@dataclass(frozen=True)
class Leaf:
    weight: float


@dataclass(frozen=True)
class Split:
    feature_index: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[Leaf, Split]


def tree_depth(node: TreeNode) -> int:
    if isinstance(node, Leaf):
        return 0
    return 1 + max(tree_depth(node.left), tree_depth(node.right))


def iter_leaves(node: TreeNode):
    if isinstance(node, Leaf):
        yield node
    else:
        yield from iter_leaves(node.left)
        yield from iter_leaves(node.right)


def route(node: TreeNode, x) -> Leaf:
    while isinstance(node, Split):
        node = node.left if x[node.feature_index] < node.threshold else node.right
    return node


def softmax_probabilities(logits) -> np.ndarray:
    z = np.asarray(logits, dtype=float)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def gradients_multiclass(probs, true_class) -> tuple[np.ndarray, np.ndarray]:
    """Softmax cross-entropy gradient and diagonal hessian.

    Works on a single probability vector with an int class, or on an
    (M, K) matrix with an (M,) class array.
    """
    p = np.asarray(probs, dtype=float)
    onehot = np.zeros_like(p)
    if p.ndim == 1:
        onehot[int(true_class)] = 1.0
    else:
        onehot[np.arange(p.shape[0]), np.asarray(true_class)] = 1.0
    return p - onehot, p * (1.0 - p)


@dataclass(frozen=True)
class SplitCandidate:
    gain: float
    feature_index: int
    threshold: float


def _leaf_weight(G: float, H: float, lam: float) -> float:
    return -G / (H + lam)


_TIE_TOL = 1e-12


def best_split(X: np.ndarray, g: np.ndarray, h: np.ndarray, config: TrainConfig,
               sorted_idx: np.ndarray | None = None) -> SplitCandidate | None:
    """Best exact-greedy split of the rows of ``X``, or None if nothing has positive gain.

    ``sorted_idx`` may supply an (F, M) array whose row ``f`` orders the rows
    of ``X`` by feature ``f``.
    """
    lam = config.l2_lambda
    M, F = X.shape
    if M < 2 or F == 0:
        return None
    order = sorted_idx if sorted_idx is not None else np.argsort(X.T, axis=1, kind="stable")
    xs = np.take_along_axis(X.T, order, axis=1)
    G, H = float(g.sum()), float(h.sum())
    GL = np.cumsum(g[order], axis=1)[:, :-1]
    HL = np.cumsum(h[order], axis=1)[:, :-1]
    GR, HR = G - GL, H - HL
    gain = 0.5 * (GL * GL / (HL + lam) + GR * GR / (HR + lam) - G * G / (H + lam))
    gain -= config.min_split_gain
    valid = ((xs[:, 1:] != xs[:, :-1])
             & (HL >= config.min_child_hessian) & (HR >= config.min_child_hessian))
    gain = np.where(valid, gain, -np.inf)
    top = float(gain.max())
    if not top > 0:
        return None
    # gains equal up to rounding count as ties (the same partition reached
    # through two features sums in a different order); row-major first wins:
    # lowest feature, then lowest threshold
    k = int(np.argmax(gain >= top - _TIE_TOL * max(1.0, abs(top))))
    f, i = divmod(k, M - 1)
    return SplitCandidate(float(gain[f, i]), f, float(0.5 * (xs[f, i] + xs[f, i + 1])))


def grow_tree(X, g, h, config: TrainConfig) -> TreeNode:
    X = np.asarray(X, dtype=float)
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    presorted = np.argsort(X.T, axis=1, kind="stable")
    return _grow(X, g, h, np.ones(X.shape[0], dtype=bool), presorted, config, 0)


def _grow(X, g, h, mask, presorted, config, depth) -> TreeNode:
    rows = np.flatnonzero(mask)
    gs, hs = g[rows], h[rows]
    if depth >= config.max_depth or rows.size < 2:
        return Leaf(_leaf_weight(float(gs.sum()), float(hs.sum()), config.l2_lambda))
    # map presorted global indices to positions within this node
    pos = np.full(X.shape[0], -1)
    pos[rows] = np.arange(rows.size)
    local = pos[presorted[mask[presorted]].reshape(presorted.shape[0], rows.size)]
    cand = best_split(X[rows], gs, hs, config, local)
    if cand is None:
        return Leaf(_leaf_weight(float(gs.sum()), float(hs.sum()), config.l2_lambda))
    goes_left = X[:, cand.feature_index] < cand.threshold
    return Split(
        cand.feature_index,
        cand.threshold,
        _grow(X, g, h, mask & goes_left, presorted, config, depth + 1),
        _grow(X, g, h, mask & ~goes_left, presorted, config, depth + 1),
    )


@dataclass(frozen=True)
class _FlatTree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    depth: int

    @classmethod
    def compile(cls, root: TreeNode) -> "_FlatTree":
        feature, threshold, left, right, value = [], [], [], [], []

        def visit(node):
            i = len(feature)
            feature.append(-1)
            threshold.append(0.0)
            left.append(i)
            right.append(i)
            value.append(0.0)
            if isinstance(node, Leaf):
                value[i] = node.weight
            else:
                feature[i] = node.feature_index
                threshold[i] = node.threshold
                left[i] = visit(node.left)
                right[i] = visit(node.right)
            return i

        visit(root)
        return cls(np.array(feature), np.array(threshold), np.array(left),
                   np.array(right), np.array(value), tree_depth(root))

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=int)
        rows = np.arange(X.shape[0])
        for _ in range(self.depth):
            f = self.feature[node]
            internal = f >= 0
            xv = X[rows, np.where(internal, f, 0)]
            nxt = np.where(xv < self.threshold[node], self.left[node], self.right[node])
            node = np.where(internal, nxt, node)
        return self.value[node]


@dataclass(frozen=True)
class BoostedEnsemble:
    """Additive softmax model: logits = base_score + learning_rate * sum of tree outputs."""

    n_classes: int
    n_features: int
    trees: tuple[tuple[TreeNode, ...], ...] = ()
    learning_rate: float = 0.3
    base_score: float = 0.0
    # instrumentation: rows and per-class counts seen in training
    train_class_counts: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if any(len(r) != self.n_classes for r in self.trees):
            raise ValueError("every boosting round needs exactly n_classes trees")

    @property
    def rounds(self) -> int:
        return len(self.trees)

    @cached_property
    def _flat(self) -> list[list[_FlatTree]]:
        return [[_FlatTree.compile(t) for t in r] for r in self.trees]

    def raw_scores(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise DimensionMismatch(f"model expects {self.n_features} features, got {X.shape[1]}")
        F = np.full((X.shape[0], self.n_classes), self.base_score)
        for r in self._flat:
            for c, tree in enumerate(r):
                F[:, c] += self.learning_rate * tree.predict(X)
        return F

    def predict_proba(self, X) -> np.ndarray:
        return softmax_probabilities(self.raw_scores(X))

    def predict_classes(self, X) -> np.ndarray:
        # argmax returns the first maximum -> lowest class index on ties
        return np.argmax(self.predict_proba(X), axis=1)


def predict(model: BoostedEnsemble, x) -> tuple[np.ndarray, int]:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatch("predict takes a single feature vector")
    probs = model.predict_proba(x[None, :])[0]
    return probs, int(np.argmax(probs))


def log_loss(model_or_scores, X=None, y=None) -> float:
    """Mean multiclass cross-entropy of ``model`` on ``(X, y)``."""
    scores = model_or_scores.raw_scores(X) if X is not None else model_or_scores
    y = np.asarray(y)
    z = scores - scores.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    return float(-logp[np.arange(len(y)), y].mean())


def train(X, y, config: TrainConfig = TrainConfig(), n_classes: int | None = None,
          record_loss: list | None = None) -> BoostedEnsemble:
    """Fit an ensemble on integer class labels ``y``.

    ``n_classes`` defaults to ``max(y) + 1``. If ``record_loss`` is a list,
    the training log-loss before the first round and after every round is
    appended to it.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise DimensionMismatch("X must be (M, F) with one label per row")
    if X.shape[0] < 2:
        raise ValueError("training needs at least 2 rows")
    K = int(n_classes if n_classes is not None else y.max() + 1)
    if y.min() < 0 or y.max() >= K:
        raise ValueError(f"labels must lie in 0..{K - 1}")
    if np.unique(y).size < 2:
        raise SingleClassData("training data contains a single class")

    presorted = np.argsort(X.T, axis=1, kind="stable")
    all_rows = np.ones(X.shape[0], dtype=bool)
    scores = np.zeros((X.shape[0], K))
    if record_loss is not None:
        record_loss.append(log_loss(scores, y=y))
    rounds = []
    for _ in range(config.rounds):
        g, h = gradients_multiclass(softmax_probabilities(scores), y)
        trees = tuple(_grow(X, g[:, c], h[:, c], all_rows, presorted, config, 0) for c in range(K))
        for c, t in enumerate(trees):
            scores[:, c] += config.learning_rate * _FlatTree.compile(t).predict(X)
        rounds.append(trees)
        if record_loss is not None:
            record_loss.append(log_loss(scores, y=y))
    counts = tuple(int(v) for v in np.bincount(y, minlength=K))
    return BoostedEnsemble(K, X.shape[1], tuple(rounds), config.learning_rate, 0.0, counts)
