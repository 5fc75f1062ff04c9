"""Exact Shapley attributions for tree ensembles.

Two independent routes compute the same quantity:

* `tree_shap`: the polynomial-time path recursion. Walking down a tree it
  maintains, for every prefix of distinct split features, the proportion of
  feature subsets that flow down the path weighted by the Shapley kernel,
  splitting each step into a "feature followed" fraction and a
  "marginalized by cover" fraction.
* `brute_force_shapley`: direct evaluation of the Shapley sum over all
  feature subsets, with the subset value function defined by the identical
  conditioning rule (fixed features follow the instance, free features
  descend both children weighted by node cover).

Both operate on the margin scale. Attributions of the ensemble are the sum
of per-tree attributions scaled by the learning rate, so
base_value + sum(phi) reconstructs predict_margin exactly.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyReport,
    MissingFeature,
    TooManyFeatures,
    ZeroCover,
)
from .gbm import TreeEnsemble, TreeNode, predict_margin
from .schema import SurveySchema

BRUTE_FORCE_FEATURE_LIMIT = 15


@dataclass(frozen=True)
class AttributionReport:
    phi: np.ndarray  # (samples, features)
    base_value: float
    sample_ids: tuple
    feature_names: tuple[str, ...]


@dataclass(frozen=True)
class WeightVector:
    raw: dict[str, float]
    normalized: dict[str, float]
    total_mass: float
    degenerate: bool = False  # all-zero attributions: normalization undefined


# --- path-recursion Tree SHAP ------------------------------------------------

def _extend(path: list[list[float]], pz: float, po: float, pi: int) -> list[list[float]]:
    """Append a split to the path and update subset-permutation weights."""
    l = len(path)
    out = [e.copy() for e in path]
    out.append([pi, pz, po, 1.0 if l == 0 else 0.0])
    for i in range(l - 1, -1, -1):
        out[i + 1][3] += po * out[i][3] * (i + 1) / (l + 1)
        out[i][3] = pz * out[i][3] * (l - i) / (l + 1)
    return out


def _unwind(path: list[list[float]], index: int) -> list[list[float]]:
    """Undo _extend for the element at `index`, returning the shorter path."""
    l = len(path) - 1
    zero, one = path[index][1], path[index][2]
    out = [e.copy() for e in path]
    n = out[l][3]
    for i in range(l - 1, -1, -1):
        if one != 0:
            tmp = out[i][3]
            out[i][3] = n * (l + 1) / ((i + 1) * one)
            n = tmp - out[i][3] * zero * (l - i) / (l + 1)
        else:
            out[i][3] = out[i][3] * (l + 1) / (zero * (l - i))
    for i in range(index, l):
        out[i][0], out[i][1], out[i][2] = out[i + 1][0], out[i + 1][1], out[i + 1][2]
    return out[:l]


def _unwound_sum(path: list[list[float]], index: int) -> float:
    """Total weight the path would carry with element `index` removed."""
    l = len(path) - 1
    zero, one = path[index][1], path[index][2]
    total = 0.0
    n = path[l][3]
    if one != 0:
        for i in range(l - 1, -1, -1):
            tmp = n * (l + 1) / ((i + 1) * one)
            total += tmp
            n = path[i][3] - tmp * zero * (l - i) / (l + 1)
    else:
        for i in range(l - 1, -1, -1):
            total += path[i][3] * (l + 1) / (zero * (l - i))
    return total


def _shap_recurse(
    node: TreeNode,
    x: np.ndarray,
    phi: np.ndarray,
    path: list[list[float]],
    pz: float,
    po: float,
    pi: int,
) -> None:
    path = _extend(path, pz, po, pi)
    if node.is_leaf:
        for i in range(1, len(path)):
            w = _unwound_sum(path, i)
            d, z, o = int(path[i][0]), path[i][1], path[i][2]
            phi[d] += w * (o - z) * node.weight
        return

    if node.cover <= 0 or node.left.cover <= 0 or node.right.cover <= 0:
        raise ZeroCover(f"non-positive cover at split on feature {node.feature}")
    if x[node.feature] <= node.threshold:
        hot, cold = node.left, node.right
    else:
        hot, cold = node.right, node.left
    hot_fraction = hot.cover / node.cover
    cold_fraction = cold.cover / node.cover

    incoming_z, incoming_o = 1.0, 1.0
    found = -1
    for j in range(1, len(path)):
        if path[j][0] == node.feature:
            found = j
            break
    if found >= 0:
        incoming_z, incoming_o = path[found][1], path[found][2]
        path = _unwind(path, found)

    _shap_recurse(hot, x, phi, path, incoming_z * hot_fraction, incoming_o, node.feature)
    _shap_recurse(cold, x, phi, path, incoming_z * cold_fraction, 0.0, node.feature)


def _tree_expectation(node: TreeNode) -> float:
    if node.is_leaf:
        return node.weight
    if node.cover <= 0:
        raise ZeroCover(f"non-positive cover at split on feature {node.feature}")
    return (
        node.left.cover * _tree_expectation(node.left)
        + node.right.cover * _tree_expectation(node.right)
    ) / node.cover


def expected_margin(model: TreeEnsemble) -> float:
    """Cover-weighted expected model output (the attribution base value)."""
    return model.base_score + model.learning_rate * sum(
        _tree_expectation(t) for t in model.trees
    )


def tree_shap(model: TreeEnsemble, x) -> tuple[np.ndarray, float]:
    """Per-feature attributions and base value for one instance."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.feature_count,):
        raise DimensionMismatch(
            f"expected {model.feature_count} features, got {x.shape}"
        )
    phi = np.zeros(model.feature_count)
    for tree in model.trees:
        tree_phi = np.zeros(model.feature_count)
        _shap_recurse(tree, x, tree_phi, [], 1.0, 1.0, -1)
        phi += model.learning_rate * tree_phi
    return phi, expected_margin(model)


# --- brute-force oracle ---------------------------------------------------------

def _subset_value(node: TreeNode, x: np.ndarray, mask: int) -> float:
    """Expected tree output with the masked features fixed to x."""
    if node.is_leaf:
        return node.weight
    if node.cover <= 0 or node.left.cover <= 0 or node.right.cover <= 0:
        raise ZeroCover(f"non-positive cover at split on feature {node.feature}")
    if mask >> node.feature & 1:
        child = node.left if x[node.feature] <= node.threshold else node.right
        return _subset_value(child, x, mask)
    return (
        node.left.cover * _subset_value(node.left, x, mask)
        + node.right.cover * _subset_value(node.right, x, mask)
    ) / node.cover


def coalition_value(model: TreeEnsemble, x, mask: int) -> float:
    """Cover-weighted expected margin with the features in `mask` fixed."""
    x = np.asarray(x, dtype=float)
    return model.base_score + model.learning_rate * sum(
        _subset_value(t, x, mask) for t in model.trees
    )


def brute_force_shapley(model: TreeEnsemble, x) -> np.ndarray:
    """Shapley values by full subset enumeration (verification oracle)."""
    d = model.feature_count
    if d > BRUTE_FORCE_FEATURE_LIMIT:
        raise TooManyFeatures(f"{d} features: subset enumeration capped at 2^{BRUTE_FORCE_FEATURE_LIMIT}")
    x = np.asarray(x, dtype=float)
    if x.shape != (d,):
        raise DimensionMismatch(f"expected {d} features, got {x.shape}")

    values = np.empty(1 << d)
    for mask in range(1 << d):
        values[mask] = coalition_value(model, x, mask)

    fact = [math.factorial(k) for k in range(d + 1)]
    kernel = [fact[s] * fact[d - s - 1] / fact[d] for s in range(d)]

    phi = np.zeros(d)
    for mask in range(1 << d):
        size = bin(mask).count("1")
        for i in range(d):
            if mask >> i & 1:
                continue
            phi[i] += kernel[size] * (values[mask | (1 << i)] - values[mask])
    return phi


# --- dataset-level reports --------------------------------------------------------

def explain_dataset(
    model: TreeEnsemble,
    X: np.ndarray,
    feature_names,
    sample_ids=None,
) -> AttributionReport:
    X = np.asarray(X, dtype=float)
    if sample_ids is None:
        sample_ids = tuple(range(len(X)))
    phi = np.empty((len(X), model.feature_count))
    base = expected_margin(model)
    for i in range(len(X)):
        row_phi, _ = tree_shap(model, X[i])
        phi[i] = row_phi
    return AttributionReport(
        phi=phi,
        base_value=base,
        sample_ids=tuple(sample_ids),
        feature_names=tuple(feature_names),
    )


def verify_local_accuracy(
    model: TreeEnsemble, report: AttributionReport, X: np.ndarray, tol: float = 1e-9
) -> float:
    """Max |base + sum(phi) - margin| over the report; raises when above tol."""
    worst = 0.0
    for i in range(len(report.phi)):
        margin = predict_margin(model, X[i])
        err = abs(report.base_value + float(report.phi[i].sum()) - margin)
        worst = max(worst, err)
    if worst > tol:
        raise AssertionError(f"local accuracy violated: max error {worst:.3e} > {tol}")
    return worst


def mean_abs_weights(report: AttributionReport) -> WeightVector:
    """Aggregate attributions into nonnegative optimization weights."""
    if len(report.phi) == 0:
        raise EmptyReport("attribution report has no samples")
    raw_values = np.abs(report.phi).mean(axis=0)
    total = float(raw_values.sum())
    raw = {name: float(v) for name, v in zip(report.feature_names, raw_values)}
    if total > 0:
        normalized = {name: v / total for name, v in raw.items()}
        degenerate = False
    else:
        normalized = {name: 0.0 for name in raw}
        degenerate = True
    return WeightVector(raw=raw, normalized=normalized, total_mass=total, degenerate=degenerate)


def actionable_weights(
    weights: WeightVector, schema: SurveySchema, normalized: bool = False
) -> list[tuple[str, float]]:
    """Project weights onto the actionable fields, in schema order."""
    table = weights.normalized if normalized else weights.raw
    out = []
    for f in schema.actionable_fields:
        if f.name not in table:
            raise MissingFeature(f.name)
        out.append((f.name, table[f.name]))
    return out


def per_student_weights(model: TreeEnsemble, x, schema: SurveySchema) -> list[tuple[str, float]]:
    """|phi_i| of a single instance projected onto the actionable fields."""
    phi, _ = tree_shap(model, x)
    out = []
    for f in schema.actionable_fields:
        out.append((f.name, float(abs(phi[schema.index_of(f.name)]))))
    return out


# --- files ---------------------------------------------------------------------------

def write_attribution_csv(report: AttributionReport, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id", "feature", "phi"])
        for i, sid in enumerate(report.sample_ids):
            for j, name in enumerate(report.feature_names):
                writer.writerow([sid, name, f"{report.phi[i, j]:.17g}"])


def weights_to_dict(weights: WeightVector) -> dict:
    return {
        "features": {
            name: {"raw": weights.raw[name], "normalized": weights.normalized[name]}
            for name in weights.raw
        },
        "total_mass": weights.total_mass,
        "degenerate": weights.degenerate,
    }


def weights_from_dict(doc: dict) -> WeightVector:
    features = doc["features"]
    return WeightVector(
        raw={k: float(v["raw"]) for k, v in features.items()},
        normalized={k: float(v["normalized"]) for k, v in features.items()},
        total_mass=float(doc["total_mass"]),
        degenerate=bool(doc.get("degenerate", False)),
    )


def save_weights(weights: WeightVector, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(weights_to_dict(weights), indent=1) + "\n", encoding="utf-8"
    )


def load_weights(path: str | Path) -> WeightVector:
    with open(path, encoding="utf-8") as fh:
        return weights_from_dict(json.load(fh))
