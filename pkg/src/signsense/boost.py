"""Gradient-boosted decision trees for 3-class softmax classification.

Second-order boosting with exact greedy split search: per round and class,
gradients/hessians of the multiclass log-loss are fit by a regression tree
maximizing

    gain = 1/2 [ GL^2/(HL+lambda) + GR^2/(HR+lambda) - G^2/(H+lambda) ] - gamma

with splits rejected when a child hessian sum falls below min_child_weight
or the gain is not positive. Leaf weights apply an L1 soft-threshold and
the learning rate:

    w = -sign(G) * max(|G| - alpha, 0) / (H + lambda) * eta

Exact enumeration is deliberate: at a few hundred rows and features it is
cheap and removes any histogram-approximation fidelity question.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from ._util import substream

logger = logging.getLogger(__name__)

CLASS_NAMES = ("negative", "neutral", "positive")
N_CLASSES = 3

MODEL_FORMAT = "signsense-gbdt"
MODEL_FORMAT_VERSION = 1

_warned_scale_pos_weight = False


@dataclass(frozen=True)
class HyperParams:
    """Training knobs; defaults are the tuned production values."""

    max_depth: int = 5
    min_child_weight: float = 1.5
    eta: float = 0.06
    gamma: float = 0.15
    subsample: float = 0.85
    colsample_bytree: float = 0.75
    reg_lambda: float = 2.0
    reg_alpha: float = 0.6
    scale_pos_weight: float = 0.9
    num_rounds_max: int = 500
    early_stop_patience: int = 150
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.subsample <= 1.0:
            raise ValueError("subsample must be in (0, 1]")
        if not 0.0 < self.colsample_bytree <= 1.0:
            raise ValueError("colsample_bytree must be in (0, 1]")
        if self.reg_lambda < 0 or self.reg_alpha < 0:
            raise ValueError("regularization strengths must be non-negative")


@dataclass
class TreeNode:
    feature: int = -1  # -1 marks a leaf
    threshold: float = 0.0
    left: int = -1
    right: int = -1
    default_left: bool = True  # reserved; inputs are dense so never trained
    gain: float = 0.0
    leaf_value: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


@dataclass
class Tree:
    nodes: list[TreeNode] = field(default_factory=list)

    def predict(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros(x.shape[0])
        stack = [(0, np.arange(x.shape[0]))]
        while stack:
            node_id, rows = stack.pop()
            node = self.nodes[node_id]
            if node.is_leaf:
                out[rows] = node.leaf_value
                continue
            goes_left = x[rows, node.feature] < node.threshold
            stack.append((node.left, rows[goes_left]))
            stack.append((node.right, rows[~goes_left]))
        return out

    def max_path_depth(self) -> int:
        depth = {0: 0}
        deepest = 0
        for i, node in enumerate(self.nodes):
            if not node.is_leaf:
                depth[node.left] = depth[i] + 1
                depth[node.right] = depth[i] + 1
                deepest = max(deepest, depth[i] + 1)
        return deepest


@dataclass
class GbdtModel:
    hyperparams: HyperParams
    feature_names: list[str]
    schema_hash: str
    base_score: float = 0.0
    rounds: list[list[Tree]] = field(default_factory=list)  # [round][class]
    classes: tuple[str, ...] = CLASS_NAMES

    @property
    def n_features(self) -> int:
        return len(self.feature_names)


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def multiclass_logloss(logits: np.ndarray, y: np.ndarray) -> float:
    p = softmax(logits)
    return float(-np.log(p[np.arange(len(y)), y]).mean())


def logloss_gradients(logits: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample gradient and diagonal hessian of the softmax log-loss."""
    p = softmax(logits)
    g = p.copy()
    g[np.arange(len(y)), y] -= 1.0
    h = p * (1.0 - p)
    return g, h


def schema_hash_for(feature_names: list[str]) -> str:
    return hashlib.sha256("\n".join(feature_names).encode("utf-8")).hexdigest()[:16]


def _macro_f1(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """Unweighted mean F1 over the fixed 3-class set (early-stop criterion)."""
    score = 0.0
    for k in range(N_CLASSES):
        tp = np.sum((y_true == k) & (y_pred == k))
        fp = np.sum((y_true != k) & (y_pred == k))
        fn = np.sum((y_true == k) & (y_pred != k))
        denom = 2 * tp + fp + fn
        score += 2 * tp / denom if denom else 0.0
    return score / N_CLASSES


def _leaf_weight(g_sum: float, h_sum: float, hp: HyperParams) -> float:
    denom = h_sum + hp.reg_lambda
    if denom <= 0.0:
        return 0.0
    shrunk = max(abs(g_sum) - hp.reg_alpha, 0.0)
    return -np.sign(g_sum) * shrunk / denom * hp.eta


def _best_split(
    x: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    rows: np.ndarray,
    cols: np.ndarray,
    hp: HyperParams,
) -> tuple[int, float, float, np.ndarray, np.ndarray] | None:
    """Exact greedy search over all (feature, threshold) candidates.

    Evaluates every distinct-value boundary of every candidate feature at
    once; ties resolve by split position then feature order, so results
    are deterministic.
    """
    xn = x[np.ix_(rows, cols)]
    n = xn.shape[0]
    if n < 2:
        return None
    order = np.argsort(xn, axis=0, kind="stable")
    xs = np.take_along_axis(xn, order, axis=0)
    gs = g[rows][order]
    hs = h[rows][order]
    g_total = g[rows].sum()
    h_total = h[rows].sum()

    gl = np.cumsum(gs, axis=0)[:-1]
    hl = np.cumsum(hs, axis=0)[:-1]
    gr = g_total - gl
    hr = h_total - hl
    # With reg_lambda = 0 a saturated node can have a zero hessian sum;
    # treat the resulting 0/0 candidates as unusable instead of NaN.
    with np.errstate(divide="ignore", invalid="ignore"):
        parent_score = g_total * g_total / (h_total + hp.reg_lambda)
        gain = 0.5 * (
            gl * gl / (hl + hp.reg_lambda) + gr * gr / (hr + hp.reg_lambda) - parent_score
        ) - hp.gamma
    usable = (
        (xs[1:] > xs[:-1])
        & (hl >= hp.min_child_weight)
        & (hr >= hp.min_child_weight)
        & np.isfinite(gain)
    )
    gain[~usable] = -np.inf
    flat = int(np.argmax(gain))
    pos, j = divmod(flat, gain.shape[1])
    best_gain = gain[pos, j]
    if not best_gain > 0.0:
        return None
    threshold = 0.5 * (xs[pos, j] + xs[pos + 1, j])
    feature = int(cols[j])
    goes_left = x[rows, feature] < threshold
    return feature, float(threshold), float(best_gain), rows[goes_left], rows[~goes_left]


def _grow_tree(
    x: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    rows: np.ndarray,
    cols: np.ndarray,
    hp: HyperParams,
) -> Tree:
    tree = Tree()

    def build(node_rows: np.ndarray, depth: int) -> int:
        node_id = len(tree.nodes)
        tree.nodes.append(TreeNode())
        split = None
        if depth < hp.max_depth:
            split = _best_split(x, g, h, node_rows, cols, hp)
        if split is None:
            g_sum = float(g[node_rows].sum())
            h_sum = float(h[node_rows].sum())
            tree.nodes[node_id].leaf_value = _leaf_weight(g_sum, h_sum, hp)
            return node_id
        feature, threshold, gain, left_rows, right_rows = split
        left = build(left_rows, depth + 1)
        right = build(right_rows, depth + 1)
        node = tree.nodes[node_id]
        node.feature = feature
        node.threshold = threshold
        node.gain = gain
        node.left = left
        node.right = right
        return node_id

    build(rows, 0)
    return tree


def fit(
    X: np.ndarray,
    y: np.ndarray,
    hp: HyperParams = HyperParams(),
    valid: tuple[np.ndarray, np.ndarray] | None = None,
    feature_names: list[str] | None = None,
) -> GbdtModel:
    """Train the per-class additive ensembles.

    When a validation pair (X_valid, y_valid) is given, training stops
    after `early_stop_patience` rounds without a macro-F1 improvement and
    the model is truncated back to the best round.
    """
    X = np.ascontiguousarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError("X must be N x D with one label per row")
    if X.shape[0] < 2:
        raise ValueError("need at least 2 training rows")
    if np.isnan(X).any():
        raise ValueError("X contains NaN; inputs must be dense and finite")
    if y.min() < 0 or y.max() >= N_CLASSES:
        raise ValueError("labels must be class indices 0..2")
    if feature_names is None:
        feature_names = [f"f{i}" for i in range(X.shape[1])]
    if len(feature_names) != X.shape[1]:
        raise ValueError("feature_names length does not match X width")
    global _warned_scale_pos_weight
    if hp.scale_pos_weight != 1.0 and not _warned_scale_pos_weight:
        _warned_scale_pos_weight = True
        logger.warning(
            "scale_pos_weight=%g is stored but has no effect on multiclass "
            "softmax training", hp.scale_pos_weight,
        )

    model = GbdtModel(
        hyperparams=hp,
        feature_names=list(feature_names),
        schema_hash=schema_hash_for(list(feature_names)),
    )
    if len(np.unique(y)) < 2:
        logger.warning("single-class training labels; returning a constant-score model")
        return model

    n, d = X.shape
    rng_sub = substream(hp.seed, "subsample")
    rng_col = substream(hp.seed, "colsample")
    n_cols = max(1, int(round(hp.colsample_bytree * d)))

    logits = np.zeros((n, N_CLASSES)) + model.base_score
    if valid is not None:
        x_valid = np.ascontiguousarray(valid[0], dtype=float)
        y_valid = np.asarray(valid[1], dtype=int)
        valid_logits = np.zeros((x_valid.shape[0], N_CLASSES)) + model.base_score
    best_score = -np.inf
    best_round = -1

    for round_no in range(hp.num_rounds_max):
        g, h = logloss_gradients(logits, y)
        if hp.subsample < 1.0:
            rows = np.flatnonzero(rng_sub.random(n) < hp.subsample)
            if rows.size < 2:
                rows = np.arange(n)
        else:
            rows = np.arange(n)
        round_trees: list[Tree] = []
        for k in range(N_CLASSES):
            if hp.colsample_bytree < 1.0:
                cols = np.sort(rng_col.choice(d, size=n_cols, replace=False))
            else:
                cols = np.arange(d)
            tree = _grow_tree(X, g[:, k], h[:, k], rows, cols, hp)
            round_trees.append(tree)
            logits[:, k] += tree.predict(X)
        model.rounds.append(round_trees)

        if valid is not None:
            for k in range(N_CLASSES):
                valid_logits[:, k] += round_trees[k].predict(x_valid)
            score = _macro_f1(y_valid, np.argmax(valid_logits, axis=1))
            if score > best_score:
                best_score = score
                best_round = round_no
            elif round_no - best_round >= hp.early_stop_patience:
                break
    if valid is not None and best_round >= 0:
        model.rounds = model.rounds[: best_round + 1]
    return model


def predict_proba(model: GbdtModel, X: np.ndarray) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ValueError(
            f"feature schema mismatch: model expects {model.n_features} features, "
            f"got {X.shape[1] if X.ndim == 2 else 'non-matrix input'}"
        )
    logits = np.zeros((X.shape[0], N_CLASSES)) + model.base_score
    for round_trees in model.rounds:
        for k in range(N_CLASSES):
            logits[:, k] += round_trees[k].predict(X)
    return softmax(logits)


def predict(model: GbdtModel, X: np.ndarray) -> np.ndarray:
    # argmax takes the lowest index on ties.
    return np.argmax(predict_proba(model, X), axis=1)


def feature_importance(model: GbdtModel) -> dict[str, float]:
    """Total split gain per feature, normalized to sum to 1."""
    totals = np.zeros(model.n_features)
    for round_trees in model.rounds:
        for tree in round_trees:
            for node in tree.nodes:
                if not node.is_leaf:
                    totals[node.feature] += node.gain
    total = totals.sum()
    if total <= 0.0:
        return {}
    return {
        model.feature_names[i]: float(totals[i] / total)
        for i in range(model.n_features)
        if totals[i] > 0.0
    }


def _tree_to_dict(tree: Tree) -> dict:
    nodes = []
    for node in tree.nodes:
        if node.is_leaf:
            nodes.append({"leaf": node.leaf_value})
        else:
            nodes.append(
                {
                    "feature": node.feature,
                    "threshold": node.threshold,
                    "left": node.left,
                    "right": node.right,
                    "default": "left" if node.default_left else "right",
                    "gain": node.gain,
                }
            )
    return {"nodes": nodes}


def _tree_from_dict(payload: dict) -> Tree:
    tree = Tree()
    for item in payload["nodes"]:
        if "leaf" in item:
            tree.nodes.append(TreeNode(leaf_value=float(item["leaf"])))
        else:
            tree.nodes.append(
                TreeNode(
                    feature=int(item["feature"]),
                    threshold=float(item["threshold"]),
                    left=int(item["left"]),
                    right=int(item["right"]),
                    default_left=item.get("default", "left") == "left",
                    gain=float(item["gain"]),
                )
            )
    return tree


def save_model(model: GbdtModel, path: str | Path) -> None:
    """Self-describing JSON dump; round-trips to bit-identical predictions."""
    payload = {
        "format": MODEL_FORMAT,
        "format_version": MODEL_FORMAT_VERSION,
        "schema_hash": model.schema_hash,
        "n_features": model.n_features,
        "feature_names": model.feature_names,
        "classes": list(model.classes),
        "base_score": model.base_score,
        "hyperparams": asdict(model.hyperparams),
        "rounds": [[_tree_to_dict(t) for t in rnd] for rnd in model.rounds],
    }
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def load_model(path: str | Path) -> GbdtModel:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != MODEL_FORMAT:
        raise ValueError(f"{path}: not a {MODEL_FORMAT} file")
    if payload.get("format_version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format version {payload.get('format_version')}")
    expected = schema_hash_for(payload["feature_names"])
    if payload["schema_hash"] != expected:
        raise ValueError(f"{path}: schema hash does not match feature list")
    model = GbdtModel(
        hyperparams=HyperParams(**payload["hyperparams"]),
        feature_names=list(payload["feature_names"]),
        schema_hash=payload["schema_hash"],
        base_score=float(payload["base_score"]),
        rounds=[[_tree_from_dict(t) for t in rnd] for rnd in payload["rounds"]],
        classes=tuple(payload["classes"]),
    )
    return model


def with_overrides(hp: HyperParams, **kwargs) -> HyperParams:
    return replace(hp, **kwargs)
