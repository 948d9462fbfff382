"""Humor scoring and weight estimation.

A scene's score is a convex combination of its laughter mean (f1),
laughter coverage (f2), text humor score (f3), and an exponential
duration decay exp(-f4 / t_c). Weights live on the probability
simplex and are fit either by exhaustive grid search against the
ranking-quality objective or by regression against curator scores
(linear least squares, logistic on the funny flag, or a shallow
regression tree's impurity-based feature importances).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import metrics

_SIMPLEX_TOL = 1e-9


class DegenerateFitError(ValueError):
    pass


@dataclass(frozen=True)
class HumorFeatures:
    scene_id: int
    start_s: float
    end_s: float
    f1: float                      # mean laughter probability
    f2: float                      # laughter coverage fraction
    f3: float                      # text humor score
    f4: float                      # scene duration, seconds
    keep: bool = True              # guardrail verdict
    reject_reasons: tuple = ()


@dataclass(frozen=True)
class ScoreWeights:
    w1: float
    w2: float
    w3: float
    w4: float
    t_c: float = 60.0

    def __post_init__(self):
        ws = (self.w1, self.w2, self.w3, self.w4)
        if not all(math.isfinite(w) and w >= 0.0 for w in ws):
            raise ValueError("weights must be finite and >= 0")
        if abs(sum(ws) - 1.0) > _SIMPLEX_TOL:
            raise ValueError(f"weights must sum to 1, got {sum(ws)!r}")
        if not (math.isfinite(self.t_c) and self.t_c > 0.0):
            raise ValueError("t_c must be positive")

    def as_dict(self) -> dict:
        return {"w1": self.w1, "w2": self.w2, "w3": self.w3, "w4": self.w4,
                "t_c": self.t_c}


@dataclass(frozen=True)
class RankedScene:
    rank: int                      # 1-based
    scene_id: int
    score: float
    start_s: float
    end_s: float


@dataclass
class TitleTrainData:
    """Per-title fitting inputs: normalized candidates plus curator truth."""
    candidates: list[HumorFeatures]
    gt_ranked: list[int]                      # funny scene ids, best first
    curator_scores: list[float] | None = None  # aligned with candidates
    curator_labels: list[bool] | None = None   # aligned with candidates


def humor_score(f: HumorFeatures, w: ScoreWeights) -> float:
    return (w.w1 * f.f1 + w.w2 * f.f2 + w.w3 * f.f3
            + w.w4 * math.exp(-f.f4 / w.t_c))


def normalize_features(candidates: list[HumorFeatures]) \
        -> list[HumorFeatures]:
    """Min-max normalize f1..f3 across the candidate pool (per title).

    A constant feature maps to 0.5 everywhere. f4 stays in seconds;
    its decay term is already bounded. Returns new records.
    """
    if not candidates:
        return []
    out = list(candidates)
    for name in ("f1", "f2", "f3"):
        vals = np.array([getattr(c, name) for c in out])
        lo, hi = float(vals.min()), float(vals.max())
        if hi == lo:
            scaled = np.full(vals.shape, 0.5)
        else:
            scaled = (vals - lo) / (hi - lo)
        out = [replace(c, **{name: float(v)}) for c, v in zip(out, scaled)]
    return out


def rank_scenes(candidates: list[HumorFeatures],
                weights: ScoreWeights) -> list[RankedScene]:
    """Descending score order; ties break on earlier start time."""
    if any(not c.keep for c in candidates):
        raise ValueError("candidates must be guardrail-filtered before "
                         "ranking")
    scored = [(humor_score(c, weights), c) for c in candidates]
    scored.sort(key=lambda sc: (-sc[0], sc[1].start_s))
    return [RankedScene(rank=i + 1, scene_id=c.scene_id, score=s,
                        start_s=c.start_s, end_s=c.end_s)
            for i, (s, c) in enumerate(scored)]


def _check_train(train: list[TitleTrainData]) -> None:
    if not train:
        raise ValueError("no titles to fit on")
    for i, t in enumerate(train):
        if len(t.gt_ranked) < 3:
            raise ValueError(f"title {i}: need a curator ranking of length "
                             f">= 3, got {len(t.gt_ranked)}")


def _objective(train: list[TitleTrainData], weights: ScoreWeights,
               n_values) -> float:
    total = 0.0
    for t in train:
        predicted = [r.scene_id for r in rank_scenes(t.candidates, weights)]
        total += metrics.eval_metric(t.gt_ranked, predicted, n_values)
    return total / len(train)


def fit_weights_grid(train: list[TitleTrainData], step: float = 0.05,
                     t_c: float = 60.0, n_values=(3, 5, 10)) \
        -> tuple[ScoreWeights, float]:
    """Exhaustive search of the simplex lattice with the given step.

    Maximizes the mean ranking-quality objective over titles; ties
    resolve to the lexicographically smallest (w1, w2, w3, w4).
    """
    _check_train(train)
    if not 0.0 < step <= 1.0:
        raise ValueError("step must be in (0, 1]")
    m = round(1.0 / step)
    if abs(m * step - 1.0) > 1e-9:
        raise ValueError(f"step {step} must evenly divide 1")
    best, best_obj = None, -np.inf
    for i in range(m + 1):
        for j in range(m + 1 - i):
            for k in range(m + 1 - i - j):
                l = m - i - j - k
                w = ScoreWeights(i / m, j / m, k / m, l / m, t_c=t_c)
                obj = _objective(train, w, n_values)
                # Ascending lexicographic scan: strict improvement
                # keeps the smallest tuple among ties.
                if obj > best_obj:
                    best, best_obj = w, obj
    return best, float(best_obj)


def _design_matrix(train: list[TitleTrainData], t_c: float) \
        -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rows, scores, labels = [], [], []
    for t in train:
        for idx, c in enumerate(t.candidates):
            rows.append([c.f1, c.f2, c.f3, math.exp(-c.f4 / t_c)])
            if t.curator_scores is not None:
                scores.append(t.curator_scores[idx])
            if t.curator_labels is not None:
                labels.append(bool(t.curator_labels[idx]))
    return (np.asarray(rows, dtype=np.float64),
            np.asarray(scores, dtype=np.float64),
            np.asarray(labels, dtype=bool))


def _onto_simplex(coef: np.ndarray, t_c: float) -> ScoreWeights:
    w = np.maximum(np.asarray(coef, dtype=np.float64), 0.0)
    total = w.sum()
    if total <= 0.0:
        w = np.full(4, 0.25)
    else:
        w = w / total
    return ScoreWeights(*(float(v) for v in w), t_c=t_c)


def fit_weights_regression(train: list[TitleTrainData],
                           method: str = "logistic",
                           t_c: float = 60.0) -> ScoreWeights:
    """Regress curator truth on the four feature columns.

    "linear": least squares on curator_score (ridge fallback when
    rank-deficient). "logistic": full-batch gradient descent on the
    funny flag, intercept included. "tree": depth-3 regression tree;
    weights are normalized impurity reductions per feature. Negative
    coefficients clip to zero before renormalizing onto the simplex.
    """
    _check_train(train)
    x, scores, labels = _design_matrix(train, t_c)
    if x.shape[0] == 0:
        raise DegenerateFitError("no candidates to fit on")

    if method == "linear":
        if scores.shape[0] != x.shape[0]:
            raise DegenerateFitError("linear fit needs curator_scores")
        coef, _, rank, _ = np.linalg.lstsq(x, scores, rcond=None)
        if rank < x.shape[1]:
            gram = x.T @ x + 1e-6 * np.eye(x.shape[1])
            coef = np.linalg.solve(gram, x.T @ scores)
        return _onto_simplex(coef, t_c)

    if method == "logistic":
        if labels.shape[0] != x.shape[0]:
            raise DegenerateFitError("logistic fit needs curator_labels")
        y = labels.astype(np.float64)
        if y.min() == y.max():
            raise DegenerateFitError(
                "logistic fit needs both funny and non-funny examples")
        coef = np.zeros(4)
        bias = 0.0
        lr = 1.0
        for _ in range(500):
            z = x @ coef + bias
            p = 1.0 / (1.0 + np.exp(-z))
            err = p - y
            coef -= lr * (x.T @ err) / y.size
            bias -= lr * err.mean()
        return _onto_simplex(coef, t_c)

    if method == "tree":
        if scores.shape[0] != x.shape[0]:
            raise DegenerateFitError("tree fit needs curator_scores")
        importance = np.zeros(4)
        _grow_tree(x, scores, depth=0, max_depth=3, importance=importance)
        return _onto_simplex(importance, t_c)

    raise ValueError(f"unknown fit method {method!r}")


def _sse(y: np.ndarray) -> float:
    return float(np.sum((y - y.mean()) ** 2)) if y.size else 0.0


def _grow_tree(x: np.ndarray, y: np.ndarray, depth: int, max_depth: int,
               importance: np.ndarray) -> None:
    """Accumulate squared-error reductions of the best splits in place."""
    if depth >= max_depth or y.size < 2 or _sse(y) == 0.0:
        return
    parent = _sse(y)
    best_gain, best_feat, best_thresh = 0.0, None, None
    for feat in range(x.shape[1]):
        values = np.unique(x[:, feat])
        for thresh in (values[:-1] + values[1:]) / 2.0:
            mask = x[:, feat] <= thresh
            gain = parent - _sse(y[mask]) - _sse(y[~mask])
            # Strict > keeps the lowest (feature, threshold) on ties.
            if gain > best_gain:
                best_gain, best_feat, best_thresh = gain, feat, thresh
    if best_feat is None:
        return
    importance[best_feat] += best_gain
    mask = x[:, best_feat] <= best_thresh
    _grow_tree(x[mask], y[mask], depth + 1, max_depth, importance)
    _grow_tree(x[~mask], y[~mask], depth + 1, max_depth, importance)
