"""Contrastive shot encoder: projection head, training loop, k-means NMI.

The projection head follows a three-layer MLP with GELU activations,
an L2-normalized 256-d bottleneck, and a weight-normalized output
layer. Training minimizes the hinge triplet loss over mined triplets
with Adam. Embedding quality is probed by k-means clustering against
scene labels, scored with NMI.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import metrics
from .mining import Triplet
from .nnet import AdamState, LayerSpec, Network, adam_step, triplet_loss


@dataclass
class EncoderConfig:
    in_dim: int
    hidden_dim: int = 2048
    bottleneck_dim: int = 256
    out_dim: int = 4096
    alpha: float = 1.0
    epochs: int = 25
    batch_size: int = 64
    lr: float = 1e-4
    seed: int = 0


def build_projection_head(cfg: EncoderConfig) -> Network:
    """Linear-GELU-Linear-GELU-Linear-L2Norm-WeightNormLinear stack."""
    specs = [
        LayerSpec("linear", cfg.in_dim, cfg.hidden_dim),
        LayerSpec("gelu"),
        LayerSpec("linear", cfg.hidden_dim, cfg.hidden_dim),
        LayerSpec("gelu"),
        LayerSpec("linear", cfg.hidden_dim, cfg.bottleneck_dim),
        LayerSpec("l2norm"),
        LayerSpec("wn_linear", cfg.bottleneck_dim, cfg.out_dim),
    ]
    return Network(specs, seed=cfg.seed)


def _scene_label_lookup(scene_labels) -> np.ndarray | None:
    if scene_labels is None:
        return None
    return np.asarray(scene_labels)


def train_encoder(triplets: list[Triplet], features: np.ndarray,
                  cfg: EncoderConfig, scene_labels=None,
                  index_of=None) -> tuple[Network, list[float]]:
    """Train the projection head on mined triplets.

    features is the [n_shots, in_dim] matrix the triplet indices
    refer to; for multi-title corpora pass index_of mapping
    (title_id, shot_id) -> row. When scene_labels (per row) are
    given, guided triplets are re-checked against them defensively.
    Returns the trained network and per-epoch mean losses.
    """
    feats = np.asarray(features, dtype=np.float64)
    if feats.ndim != 2 or feats.shape[1] != cfg.in_dim:
        raise ValueError(f"features must be [n, {cfg.in_dim}]")
    if not triplets:
        raise ValueError("no triplets to train on")
    if index_of is None:
        index_of = lambda title_id, shot_id: shot_id

    rows = np.array([[index_of(t.title_id, t.anchor),
                      index_of(t.title_id, t.positive),
                      index_of(t.title_id, t.negative)] for t in triplets],
                    dtype=np.int64)
    if rows.min() < 0 or rows.max() >= feats.shape[0]:
        raise ValueError("triplet index out of range of the feature matrix")

    labels = _scene_label_lookup(scene_labels)
    if labels is not None:
        for t, (a, p, n) in zip(triplets, rows):
            if t.source != "guided":
                continue
            if labels[a] != labels[p] or labels[a] == labels[n]:
                raise ValueError(
                    f"guided triplet ({t.anchor}, {t.positive}, "
                    f"{t.negative}) of {t.title_id} violates scene labels")

    net = build_projection_head(cfg)
    state = AdamState(net)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed,
                                                       spawn_key=(2,)))
    history = []
    n = rows.shape[0]
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, cfg.batch_size):
            batch = rows[order[start:start + cfg.batch_size]]
            fa, tape_a = net.forward(feats[batch[:, 0]], train=True)
            fp, tape_p = net.forward(feats[batch[:, 1]], train=True)
            fn, tape_n = net.forward(feats[batch[:, 2]], train=True)
            losses, dfa, dfp, dfn = triplet_loss(fa, fp, fn, cfg.alpha)
            b = batch.shape[0]
            total += float(losses.sum())
            _, ga = net.backward(tape_a, dfa / b)
            _, gp = net.backward(tape_p, dfp / b)
            _, gn = net.backward(tape_n, dfn / b)
            grads = [{k: ga[i][k] + gp[i][k] + gn[i][k] for k in ga[i]}
                     for i in range(len(ga))]
            adam_step(net, grads, state, lr=cfg.lr)
        history.append(total / n)
    return net, history


def embed_shots(net: Network, features: np.ndarray) -> np.ndarray:
    """Eval-mode projection of [n, in_dim] features."""
    out, _ = net.forward(np.asarray(features, dtype=np.float64), train=False)
    return out


def _kmeans_once(x: np.ndarray, k: int, rng: np.random.Generator,
                 max_iter: int = 100) -> tuple[np.ndarray, float]:
    n = x.shape[0]
    # k-means++ seeding.
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[int(rng.integers(n))]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[j] = x[int(rng.integers(n))]
        else:
            centers[j] = x[int(rng.choice(n, p=d2 / total))]
        d2 = np.minimum(d2, np.sum((x - centers[j]) ** 2, axis=1))
    assign = np.full(n, -1, dtype=np.int64)
    for _ in range(max_iter):
        dists = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_assign = dists.argmin(axis=1)
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for j in range(k):
            mask = assign == j
            if mask.any():
                centers[j] = x[mask].mean(axis=0)
            else:
                # Re-seed an empty cluster at the farthest point.
                centers[j] = x[int(dists.min(axis=1).argmax())]
    inertia = float(((x - centers[assign]) ** 2).sum())
    return assign, inertia


def kmeans(x: np.ndarray, k: int, seed: int = 0,
           restarts: int = 10) -> np.ndarray:
    """Lloyd's algorithm, k-means++ init, best inertia of 10 restarts."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < k or k < 1:
        raise ValueError("need a 2-D matrix with at least k rows")
    best_assign, best_inertia = None, np.inf
    for r in range(restarts):
        rng = np.random.default_rng(np.random.SeedSequence(seed,
                                                           spawn_key=(r,)))
        assign, inertia = _kmeans_once(x, k, rng)
        if inertia < best_inertia:
            best_assign, best_inertia = assign, inertia
    return best_assign


def cluster_nmi(embeddings: np.ndarray, gt_labels, seed: int = 0) -> float:
    """k-means (k = number of distinct gt labels) scored by NMI."""
    gt = np.asarray(gt_labels)
    k = len(np.unique(gt))
    assign = kmeans(embeddings, k, seed=seed)
    return metrics.nmi(assign, gt)
