"""Regularized gradient-boosted trees for binary classification.

Second-order boosting on the logistic loss with exact greedy split finding.
Each round fits one regression tree to the current gradients/hessians; leaf
weights use the closed-form L1/L2-regularized optimum and are scaled by the
learning rate at evaluation time. Node cover is the hessian mass routed
through the node, recorded so attributions can marginalize over the tree's
own training distribution.

Training is deliberately single-threaded and seeded: the same data, config
and seed always produce a bit-identical ensemble.
"""
from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from .errors import (
    DegenerateLeaf,
    DimensionMismatch,
    EmptyData,
    ModelFormatError,
    SingleClassData,
)

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    n_estimators: int = 100
    learning_rate: float = 0.05
    max_depth: int = 3
    subsample: float = 0.8
    colsample_bytree: float = 0.8
    min_child_weight: float = 3.0
    alpha: float = 0.1
    lambda_l2: float = 1.0
    gamma: float = 0.0
    base_score: float | None = None  # None: log-odds of the training positive rate
    seed: int = 0

    def validate(self) -> None:
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be >= 1")
        if not 0 < self.learning_rate <= 1:
            raise ValueError("learning_rate must be in (0, 1]")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if not 0 < self.subsample <= 1 or not 0 < self.colsample_bytree <= 1:
            raise ValueError("subsample and colsample_bytree must be in (0, 1]")
        if self.alpha < 0 or self.lambda_l2 < 0 or self.gamma < 0:
            raise ValueError("alpha, lambda_l2 and gamma must be nonnegative")
        if self.min_child_weight < 0:
            raise ValueError("min_child_weight must be nonnegative")


# The hyperparameter grid used by the tuning harness.
DEFAULT_GRID: dict[str, list] = {
    "n_estimators": [50, 100],
    "learning_rate": [0.01, 0.05, 0.1],
    "max_depth": [2, 3, 4],
    "subsample": [0.6, 0.8],
    "colsample_bytree": [0.6, 0.8],
    "min_child_weight": [3, 5],
    "alpha": [0.1, 1.0],
    "lambda_l2": [0.1, 1.0],
}


@dataclass
class TreeNode:
    cover: float
    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    weight: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.left is None


@dataclass(frozen=True)
class TreeEnsemble:
    trees: tuple[TreeNode, ...]
    learning_rate: float
    base_score: float
    feature_count: int


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    tn: int
    fn: int
    precision_degenerate: bool = False
    recall_degenerate: bool = False


# --- loss -----------------------------------------------------------------

def sigmoid(m):
    return 1.0 / (1.0 + np.exp(-np.asarray(m, dtype=float)))


def logistic_loss(margin, label):
    """Elementwise binary logistic loss on the margin scale."""
    m = np.asarray(margin, dtype=float)
    y = np.asarray(label, dtype=float)
    return np.logaddexp(0.0, m) - y * m


def logistic_grad_hess(margin: float, label: int) -> tuple[float, float]:
    """Gradient and hessian of the logistic loss at one margin."""
    p = float(sigmoid(margin))
    return p - label, p * (1.0 - p)


# --- per-leaf closed form ----------------------------------------------------

def leaf_weight(G: float, H: float, alpha: float, lambda_l2: float) -> float:
    """Minimizer of G*w + 0.5*(H + lambda_l2)*w^2 + alpha*|w| (soft threshold)."""
    denom = H + lambda_l2
    if denom <= 0:
        raise DegenerateLeaf(f"H + lambda_l2 = {denom} is not positive")
    mag = max(abs(G) - alpha, 0.0)
    if mag == 0.0:
        return 0.0
    return -np.sign(G) * mag / denom


def _split_score(G, H, alpha, lambda_l2):
    """Per-node structure score max(|G|-alpha, 0)^2 / (H + lambda_l2)."""
    mag = np.maximum(np.abs(G) - alpha, 0.0)
    return mag * mag / (H + lambda_l2)


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    gain: float


def best_split(
    X: np.ndarray,
    node_samples: np.ndarray,
    gradients: np.ndarray,
    hessians: np.ndarray,
    feature_pool,
    config: TrainConfig,
) -> Split | None:
    """Exact greedy scan; returns None when no split has positive gain.

    Candidate thresholds are midpoints of adjacent distinct values. A split
    is admissible only if both children carry at least min_child_weight of
    hessian mass. Gain is 0.5*(S_left + S_right - S_parent) - gamma.
    """
    gs = gradients[node_samples]
    hs = hessians[node_samples]
    G, H = float(gs.sum()), float(hs.sum())
    parent = _split_score(G, H, config.alpha, config.lambda_l2)

    best: Split | None = None
    for f in feature_pool:
        x = X[node_samples, f]
        order = np.argsort(x, kind="stable")
        xo = x[order]
        if xo[0] == xo[-1]:
            continue
        gl = np.cumsum(gs[order])[:-1]
        hl = np.cumsum(hs[order])[:-1]
        gr = G - gl
        hr = H - hl
        admissible = (
            (xo[:-1] != xo[1:])
            & (hl >= config.min_child_weight)
            & (hr >= config.min_child_weight)
        )
        if not admissible.any():
            continue
        gains = (
            0.5
            * (
                _split_score(gl, hl, config.alpha, config.lambda_l2)
                + _split_score(gr, hr, config.alpha, config.lambda_l2)
                - parent
            )
            - config.gamma
        )
        gains[~admissible] = -np.inf
        k = int(np.argmax(gains))
        gain = float(gains[k])
        if gain > 0 and (best is None or gain > best.gain):
            threshold = float((xo[k] + xo[k + 1]) / 2.0)
            if not xo[k] <= threshold < xo[k + 1]:
                threshold = float(xo[k])  # adjacent floats: route by left value
            best = Split(feature=int(f), threshold=threshold, gain=gain)
    return best


# --- training -----------------------------------------------------------------

def _grow_tree(
    X: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    samples: np.ndarray,
    feature_pool: np.ndarray,
    config: TrainConfig,
    depth: int,
) -> TreeNode:
    G, H = float(g[samples].sum()), float(h[samples].sum())
    split = None
    if depth < config.max_depth:
        split = best_split(X, samples, g, h, feature_pool, config)
    if split is None:
        return TreeNode(cover=H, weight=leaf_weight(G, H, config.alpha, config.lambda_l2))

    mask = X[samples, split.feature] <= split.threshold
    left = _grow_tree(X, g, h, samples[mask], feature_pool, config, depth + 1)
    right = _grow_tree(X, g, h, samples[~mask], feature_pool, config, depth + 1)
    return TreeNode(
        cover=left.cover + right.cover,
        feature=split.feature,
        threshold=split.threshold,
        left=left,
        right=right,
    )


def train_ensemble(X: np.ndarray, y: np.ndarray, config: TrainConfig) -> TreeEnsemble:
    """Fit config.n_estimators trees stagewise on the logistic objective."""
    config.validate()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if X.size == 0 or len(y) == 0:
        raise EmptyData("training set is empty")
    if X.ndim != 2 or len(X) != len(y):
        raise DimensionMismatch(f"X {X.shape} does not align with y {y.shape}")
    pos = int(y.sum())
    if pos == 0 or pos == len(y):
        raise SingleClassData("training labels contain a single class")

    if config.base_score is None:
        rate = pos / len(y)
        base_score = float(np.log(rate / (1.0 - rate)))
    else:
        base_score = float(config.base_score)

    n, d = X.shape
    rng = np.random.default_rng(config.seed)
    margins = np.full(n, base_score, dtype=float)
    trees: list[TreeNode] = []

    n_rows = max(1, int(round(config.subsample * n)))
    n_cols = max(1, int(round(config.colsample_bytree * d)))

    for _ in range(config.n_estimators):
        p = sigmoid(margins)
        g = p - y
        h = p * (1.0 - p)

        if n_rows < n:
            rows = np.sort(rng.choice(n, size=n_rows, replace=False))
        else:
            rows = np.arange(n)
        if n_cols < d:
            cols = np.sort(rng.choice(d, size=n_cols, replace=False))
        else:
            cols = np.arange(d)

        tree = _grow_tree(X, g, h, rows, cols, config, depth=0)
        trees.append(tree)
        margins += config.learning_rate * _tree_predict(tree, X)

    return TreeEnsemble(
        trees=tuple(trees),
        learning_rate=config.learning_rate,
        base_score=base_score,
        feature_count=d,
    )


# --- evaluation ------------------------------------------------------------------

def _tree_predict(root: TreeNode, X: np.ndarray) -> np.ndarray:
    """Raw (unscaled) leaf values for every row."""
    out = np.empty(len(X), dtype=float)
    stack = [(root, np.arange(len(X)))]
    while stack:
        node, idx = stack.pop()
        if len(idx) == 0:
            continue
        if node.is_leaf:
            out[idx] = node.weight
            continue
        mask = X[idx, node.feature] <= node.threshold
        stack.append((node.left, idx[mask]))
        stack.append((node.right, idx[~mask]))
    return out


def tree_value(root: TreeNode, x) -> float:
    """Raw leaf value reached by a single instance."""
    node = root
    while not node.is_leaf:
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node.weight


def predict_margin(model: TreeEnsemble, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (model.feature_count,):
        raise DimensionMismatch(
            f"expected {model.feature_count} features, got {x.shape}"
        )
    total = sum(tree_value(t, x) for t in model.trees)
    return model.base_score + model.learning_rate * total


def predict_margin_batch(model: TreeEnsemble, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.feature_count:
        raise DimensionMismatch(
            f"expected (n, {model.feature_count}) features, got {X.shape}"
        )
    margins = np.full(len(X), model.base_score, dtype=float)
    for tree in model.trees:
        margins += model.learning_rate * _tree_predict(tree, X)
    return margins


def predict_proba(model: TreeEnsemble, x) -> float:
    return float(sigmoid(predict_margin(model, x)))


def classify(model: TreeEnsemble, x) -> int:
    return int(predict_proba(model, x) >= 0.5)


def evaluate(model: TreeEnsemble, X: np.ndarray, y: np.ndarray) -> Metrics:
    """Confusion counts and derived metrics at the 0.5 probability threshold."""
    y = np.asarray(y, dtype=int)
    if len(y) == 0:
        raise EmptyData("evaluation set is empty")
    pred = (predict_margin_batch(model, X) >= 0.0).astype(int)
    tp = int(np.sum((pred == 1) & (y == 1)))
    fp = int(np.sum((pred == 1) & (y == 0)))
    tn = int(np.sum((pred == 0) & (y == 0)))
    fn = int(np.sum((pred == 0) & (y == 1)))

    precision_degenerate = (tp + fp) == 0
    recall_degenerate = (tp + fn) == 0
    precision = 0.0 if precision_degenerate else tp / (tp + fp)
    recall = 0.0 if recall_degenerate else tp / (tp + fn)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return Metrics(
        accuracy=(tp + tn) / len(y),
        precision=precision,
        recall=recall,
        f1=f1,
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
        precision_degenerate=precision_degenerate,
        recall_degenerate=recall_degenerate,
    )


# --- grid search --------------------------------------------------------------------

@dataclass(frozen=True)
class GridCell:
    index: int
    config: TrainConfig
    metrics: Metrics | None
    error: str | None = None


@dataclass(frozen=True)
class GridSearchResult:
    best: TrainConfig
    best_metrics: Metrics
    leaderboard: tuple[GridCell, ...]  # sorted by validation F1, descending


def grid_cells(grid: dict[str, list], base: TrainConfig) -> list[TrainConfig]:
    """Cartesian product of the grid over a base config, in declaration order."""
    keys = list(grid.keys())
    configs = []
    for combo in itertools.product(*(grid[k] for k in keys)):
        configs.append(replace(base, **dict(zip(keys, combo))))
    return configs


def grid_search(
    train_X: np.ndarray,
    train_y: np.ndarray,
    val_X: np.ndarray,
    val_y: np.ndarray,
    grid: dict[str, list],
    base: TrainConfig = TrainConfig(),
) -> GridSearchResult:
    """Exhaustive search selecting by validation F1.

    Ties break toward fewer trees, then shallower depth, then lower learning
    rate. Per-cell training failures are recorded in the leaderboard, not
    raised.
    """
    if not grid:
        raise ValueError("grid must have at least one parameter list")
    cells: list[GridCell] = []
    for i, config in enumerate(grid_cells(grid, base)):
        try:
            model = train_ensemble(train_X, train_y, config)
            metrics = evaluate(model, val_X, val_y)
            cells.append(GridCell(index=i, config=config, metrics=metrics))
        except Exception as exc:  # recorded, never fatal
            cells.append(GridCell(index=i, config=config, metrics=None, error=str(exc)))

    scored = [c for c in cells if c.metrics is not None]
    if not scored:
        raise EmptyData("every grid cell failed to train")

    def rank_key(cell: GridCell):
        return (
            -cell.metrics.f1,
            cell.config.n_estimators,
            cell.config.max_depth,
            cell.config.learning_rate,
            cell.index,
        )

    scored.sort(key=rank_key)
    failed = [c for c in cells if c.metrics is None]
    return GridSearchResult(
        best=scored[0].config,
        best_metrics=scored[0].metrics,
        leaderboard=tuple(scored + failed),
    )


# --- model artifact --------------------------------------------------------------------

def _node_to_doc(node: TreeNode) -> dict:
    if node.is_leaf:
        return {"weight": node.weight, "cover": node.cover}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "cover": node.cover,
        "left": _node_to_doc(node.left),
        "right": _node_to_doc(node.right),
    }


def _node_from_doc(doc: dict, feature_count: int) -> TreeNode:
    cover = float(doc["cover"])
    if cover <= 0:
        raise ModelFormatError(f"node cover {cover} must be positive")
    if "feature" not in doc:
        return TreeNode(cover=cover, weight=float(doc["weight"]))
    feature = int(doc["feature"])
    if not 0 <= feature < feature_count:
        raise ModelFormatError(f"split feature {feature} outside 0..{feature_count - 1}")
    left = _node_from_doc(doc["left"], feature_count)
    right = _node_from_doc(doc["right"], feature_count)
    if abs((left.cover + right.cover) - cover) > 1e-9 * max(1.0, cover):
        raise ModelFormatError(
            f"internal cover {cover} != children sum {left.cover + right.cover}"
        )
    return TreeNode(
        cover=cover,
        feature=feature,
        threshold=float(doc["threshold"]),
        left=left,
        right=right,
    )


def model_to_dict(model: TreeEnsemble, config: TrainConfig, schema_hash: str = "") -> dict:
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "schema_hash": schema_hash,
        "config": asdict(config),
        "base_score": model.base_score,
        "learning_rate": model.learning_rate,
        "feature_count": model.feature_count,
        "trees": [_node_to_doc(t) for t in model.trees],
    }


def model_from_dict(doc: dict) -> tuple[TreeEnsemble, TrainConfig]:
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model format {doc.get('format_version')!r}"
        )
    config = TrainConfig(**doc["config"])
    feature_count = int(doc["feature_count"])
    trees = tuple(_node_from_doc(t, feature_count) for t in doc["trees"])
    model = TreeEnsemble(
        trees=trees,
        learning_rate=float(doc["learning_rate"]),
        base_score=float(doc["base_score"]),
        feature_count=feature_count,
    )
    return model, config


def save_model(
    model: TreeEnsemble, config: TrainConfig, path: str | Path, schema_hash: str = ""
) -> None:
    doc = model_to_dict(model, config, schema_hash)
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> tuple[TreeEnsemble, TrainConfig]:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


def model_digest(model: TreeEnsemble, config: TrainConfig) -> str:
    blob = json.dumps(model_to_dict(model, config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()
