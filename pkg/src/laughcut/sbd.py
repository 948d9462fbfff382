"""Sliding-window scene boundary detection over fused shot features.

Each shot becomes a window of the 2N+1 surrounding fused vectors
(edge-padded), flattened into one input row. A ReLU MLP with dropout
classifies the center shot as scene-final or not; a shot is a
boundary when its softmax boundary probability strictly exceeds the
threshold. assemble_scenes turns boundary flags back into a gap-free
scene partition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import SceneAnnotation, Title
from .nnet import AdamState, LayerSpec, Network, adam_step, softmax_ce


@dataclass
class SbdConfig:
    feat_dim: int = 4864           # fused width: visual embedding + text
    context_n: int = 2             # window holds 2 * context_n + 1 shots
    hidden_dims: tuple[int, int, int] = (8192, 4096, 1024)
    dropout_p: float = 0.5
    threshold: float = 0.5
    neg_per_pos: float = 4.0       # batch class balance, 1:4 by default
    epochs: int = 20
    batch_size: int = 64
    lr: float = 1e-4
    seed: int = 0


@dataclass
class WindowSample:
    center_shot: int
    features: np.ndarray           # ((2n+1) * feat_dim,) flattened window
    label: int | None = None       # 1 = scene-final shot, None = unlabeled


def build_sbd_head(cfg: SbdConfig) -> Network:
    in_dim = (2 * cfg.context_n + 1) * cfg.feat_dim
    dims = [in_dim, *cfg.hidden_dims]
    specs = []
    for a, b in zip(dims[:-1], dims[1:]):
        specs.extend([LayerSpec("linear", a, b), LayerSpec("relu"),
                      LayerSpec("dropout", p=cfg.dropout_p)])
    specs.append(LayerSpec("linear", dims[-1], 2))
    return Network(specs, seed=cfg.seed)


def boundary_labels(title: Title) -> np.ndarray:
    """1 for scene-final shots; the title-final shot is never positive."""
    if title.gt_scenes is None:
        raise ValueError(f"{title.title_id}: no scene annotations")
    n = len(title.shots)
    labels = np.zeros(n, dtype=np.int64)
    for sc in title.gt_scenes:
        if sc.last_shot < n - 1:
            labels[sc.last_shot] = 1
    return labels


def build_windows(fused: np.ndarray, cfg: SbdConfig,
                  labels: np.ndarray | None = None) -> list[WindowSample]:
    """One edge-padded window per shot from [n_shots, feat_dim] rows."""
    fused = np.asarray(fused, dtype=np.float64)
    if fused.ndim != 2 or fused.shape[1] != cfg.feat_dim:
        raise ValueError(f"fused features must be [n, {cfg.feat_dim}]")
    n = fused.shape[0]
    if labels is not None and len(labels) != n:
        raise ValueError("labels must align with the feature rows")
    out = []
    for i in range(n):
        idx = np.clip(np.arange(i - cfg.context_n, i + cfg.context_n + 1),
                      0, n - 1)
        out.append(WindowSample(
            center_shot=i, features=fused[idx].reshape(-1),
            label=None if labels is None else int(labels[i])))
    return out


def train_sbd(windows: list[WindowSample], cfg: SbdConfig) \
        -> tuple[Network, list[float]]:
    """Cross-entropy training with class-rebalanced batches.

    Every batch draws positives and negatives (with replacement) at
    one positive per cfg.neg_per_pos negatives. Returns the trained
    head and per-epoch mean losses.
    """
    if cfg.neg_per_pos < 1.0:
        raise ValueError("neg_per_pos must be >= 1")
    x = np.stack([w.features for w in windows])
    if any(w.label is None for w in windows):
        raise ValueError("training windows must be labeled")
    y = np.array([w.label for w in windows], dtype=np.int64)
    pos = np.flatnonzero(y == 1)
    neg = np.flatnonzero(y == 0)
    if pos.size == 0 or neg.size == 0:
        raise ValueError("training needs both boundary and non-boundary "
                         "windows")

    net = build_sbd_head(cfg)
    state = AdamState(net)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed,
                                                       spawn_key=(3,)))
    n_pos = max(1, int(round(cfg.batch_size / (1.0 + cfg.neg_per_pos))))
    n_neg = max(1, cfg.batch_size - n_pos)
    steps = max(1, int(np.ceil(len(windows) / cfg.batch_size)))
    history = []
    for _ in range(cfg.epochs):
        total = 0.0
        for _ in range(steps):
            batch = np.concatenate([rng.choice(pos, size=n_pos),
                                    rng.choice(neg, size=n_neg)])
            logits, tape = net.forward(x[batch], train=True)
            loss, dlogits = softmax_ce(logits, y[batch])
            total += loss
            _, grads = net.backward(tape, dlogits)
            adam_step(net, grads, state, lr=cfg.lr)
        history.append(total / steps)
    return net, history


def predict_boundaries(net: Network, windows: list[WindowSample],
                       threshold: float = 0.5) \
        -> tuple[np.ndarray, np.ndarray]:
    """Eval-mode boundary probabilities and strict-threshold flags."""
    x = np.stack([w.features for w in windows])
    logits, _ = net.forward(x, train=False)
    shifted = logits - logits.max(axis=1, keepdims=True)
    expd = np.exp(shifted)
    probs = expd[:, 1] / expd.sum(axis=1)
    return probs, probs > threshold


def assemble_scenes(flags) -> list[SceneAnnotation]:
    """Boundary flags -> contiguous scene partition.

    A flagged shot is the last shot of its scene; the title-final
    shot always closes the last scene regardless of its flag.
    """
    flags = np.asarray(flags).astype(bool)
    if flags.ndim != 1 or flags.size == 0:
        raise ValueError("flags must be a nonempty 1-D sequence")
    scenes = []
    first = 0
    n = flags.size
    for i in range(n):
        if flags[i] or i == n - 1:
            scenes.append(SceneAnnotation(len(scenes), first, i))
            first = i + 1
    return scenes
