"""Ranking and clustering quality metrics.

Conventions, fixed here and relied on by the evaluation stage:
average precision uses a descending stable sort (ties keep input
order); best_f1 sweeps midpoints between distinct scores plus +-inf
and returns the lowest threshold among ties; NMI normalizes mutual
information by the arithmetic mean of the entropies with natural
logs; top_iou/top_iou_align treat rankings as id sequences and the
combined eval_metric sums both over N in {3, 5, 10}, so its range
is [0, 6].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RankMetricsConfig:
    n_values: tuple[int, ...] = (3, 5, 10)

    def __post_init__(self):
        ns = tuple(self.n_values)
        if not ns or any(n <= 0 for n in ns) \
                or any(a >= b for a, b in zip(ns, ns[1:])):
            raise ValueError("n_values must be positive and strictly "
                             "increasing")
        object.__setattr__(self, "n_values", ns)


def _n_values(n_values) -> tuple[int, ...]:
    if isinstance(n_values, RankMetricsConfig):
        return n_values.n_values
    return RankMetricsConfig(tuple(int(n) for n in n_values)).n_values


def _scores_labels(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.ndim != 1 or y.shape != s.shape:
        raise ValueError("scores and labels must be 1-D and equal length")
    if s.size == 0:
        raise ValueError("empty inputs")
    if not np.all(np.isfinite(s)):
        raise ValueError("scores must be finite")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be binary")
    return s, y.astype(np.int64)


def average_precision(scores, labels) -> float:
    """Mean of precision@k over the ranks k holding a positive."""
    s, y = _scores_labels(scores, labels)
    if y.sum() == 0:
        raise ValueError("average_precision needs at least one positive")
    order = np.argsort(-s, kind="stable")
    hits = y[order]
    precision_at = np.cumsum(hits) / np.arange(1, s.size + 1)
    return float(precision_at[hits == 1].mean())


def best_f1(scores, labels) -> tuple[float, float]:
    """Max F1 over thresholds (predict positive iff score >= t).

    Candidate thresholds are midpoints between consecutive distinct
    scores plus +-inf. Returns (f1, threshold); ties resolve to the
    lowest threshold.
    """
    s, y = _scores_labels(scores, labels)
    if y.sum() == 0 or y.sum() == y.size:
        raise ValueError("best_f1 needs both classes present")
    distinct = np.unique(s)
    thresholds = np.concatenate(
        [[-np.inf], (distinct[:-1] + distinct[1:]) / 2.0, [np.inf]])
    best_score, best_t = -1.0, None
    for t in thresholds:
        pred = s >= t
        tp = int(np.sum(pred & (y == 1)))
        fp = int(np.sum(pred & (y == 0)))
        fn = int(np.sum(~pred & (y == 1)))
        f1 = 0.0 if tp == 0 else 2.0 * tp / (2.0 * tp + fp + fn)
        if f1 > best_score:
            best_score, best_t = f1, float(t)
    return best_score, best_t


def nmi(labels_a, labels_b) -> float:
    """Mutual information over the arithmetic mean of entropies.

    Both partitions trivial (zero entropy) gives 1.0; exactly one
    trivial gives 0.0. Natural logarithms throughout.
    """
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if a.ndim != 1 or a.shape != b.shape:
        raise ValueError("label arrays must be 1-D and equal length")
    n = a.size
    if n == 0:
        raise ValueError("empty inputs")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((int(ai.max()) + 1, int(bi.max()) + 1))
    np.add.at(table, (ai, bi), 1.0)
    pij = table / n
    pa = pij.sum(axis=1)
    pb = pij.sum(axis=0)
    h_a = float(-np.sum(pa[pa > 0] * np.log(pa[pa > 0])))
    h_b = float(-np.sum(pb[pb > 0] * np.log(pb[pb > 0])))
    if h_a == 0.0 and h_b == 0.0:
        return 1.0
    if h_a == 0.0 or h_b == 0.0:
        return 0.0
    mask = pij > 0
    mi = float(np.sum(pij[mask] * (np.log(pij[mask])
                                   - np.log(np.outer(pa, pb)[mask]))))
    return min(max(mi / (0.5 * (h_a + h_b)), 0.0), 1.0)


def top_iou(gt_ids, predicted, n: int) -> float:
    """|gt set intersect top-n predicted| / n. gt_ids is the full set."""
    if n <= 0:
        raise ValueError("n must be positive")
    return len(set(gt_ids) & set(predicted[:n])) / n


def top_iou_align(gt_ranked, predicted, n: int) -> float:
    """|top-n gt intersect top-n predicted| / n: rank-sensitive overlap."""
    if n <= 0:
        raise ValueError("n must be positive")
    return len(set(gt_ranked[:n]) & set(predicted[:n])) / n


def eval_metric(gt_ranked, predicted, n_values=(3, 5, 10)) -> float:
    """Sum of top_iou and top_iou_align over n_values (range [0, 6])."""
    ns = _n_values(n_values)
    gt_set = set(gt_ranked)
    return float(sum(top_iou(gt_set, predicted, n)
                     + top_iou_align(gt_ranked, predicted, n)
                     for n in ns))


def eval_metric_report(gt_ranked, predicted, n_values=(3, 5, 10)) -> dict:
    """eval_metric with its per-N terms and a /len-normalized display."""
    ns = _n_values(n_values)
    gt_set = set(gt_ranked)
    per_n = {int(n): {"top_iou": top_iou(gt_set, predicted, n),
                      "top_iou_align": top_iou_align(gt_ranked, predicted, n)}
             for n in ns}
    total = float(sum(v["top_iou"] + v["top_iou_align"]
                      for v in per_n.values()))
    return {"per_n": per_n, "eval_metric": total,
            "eval_metric_normalized": total / (2 * len(ns))}


def temporal_iou(span_a: tuple[float, float],
                 span_b: tuple[float, float]) -> float:
    a0, a1 = span_a
    b0, b1 = span_b
    inter = max(0.0, min(a1, b1) - max(a0, b0))
    union = (a1 - a0) + (b1 - b0) - inter
    return inter / union if union > 0 else 0.0


def match_scenes(gt_spans, pred_spans, iou_threshold: float = 0.5) -> dict:
    """Greedy 1:1 match of predicted spans to ground-truth spans.

    Inputs are (id, start_s, end_s) triples with integer ids. Pairs
    are taken in decreasing temporal-IoU order (ties by gt then pred
    position); pairs below iou_threshold never match. Returns a dict
    pred_id -> gt_id, with unmatched predictions assigned fresh ids
    above every gt id.
    """
    pairs = []
    for gi, (gid, g0, g1) in enumerate(gt_spans):
        for pi, (pid, p0, p1) in enumerate(pred_spans):
            iou = temporal_iou((g0, g1), (p0, p1))
            if iou >= iou_threshold:
                pairs.append((-iou, gi, pi))
    pairs.sort()
    taken_g, taken_p = set(), set()
    mapping = {}
    for _, gi, pi in pairs:
        if gi in taken_g or pi in taken_p:
            continue
        taken_g.add(gi)
        taken_p.add(pi)
        mapping[pred_spans[pi][0]] = gt_spans[gi][0]
    fresh = max((gid for gid, _, _ in gt_spans), default=-1) + 1
    for pid, _, _ in pred_spans:
        if pid not in mapping:
            mapping[pid] = fresh
            fresh += 1
    return mapping
