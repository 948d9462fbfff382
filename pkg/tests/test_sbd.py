import numpy as np
import pytest

from laughcut.corpus import SceneAnnotation
from laughcut.sbd import (SbdConfig, WindowSample, assemble_scenes,
                          boundary_labels, build_sbd_head, build_windows,
                          predict_boundaries, train_sbd)

from conftest import make_title


def tiny_cfg(**over):
    base = dict(feat_dim=6, context_n=2, hidden_dims=(64, 32, 16),
                dropout_p=0.1, epochs=150, batch_size=32, lr=1e-2, seed=0)
    base.update(over)
    return SbdConfig(**base)


# ---------------------------------------------------------------------------
# Labels and windows.
# ---------------------------------------------------------------------------


def test_boundary_labels_mark_scene_final_shots():
    title = make_title(n_scenes=3, shots_per_scene=2)   # 6 shots
    labels = boundary_labels(title)
    assert labels.tolist() == [0, 1, 0, 1, 0, 0]
    title.gt_scenes = None
    with pytest.raises(ValueError, match="scene annotations"):
        boundary_labels(title)


def test_boundary_labels_title_final_never_positive():
    title = make_title(n_scenes=1, shots_per_scene=4)
    assert boundary_labels(title).tolist() == [0, 0, 0, 0]


def test_build_windows_edge_padding():
    cfg = tiny_cfg(feat_dim=1, context_n=2)
    fused = np.arange(5.0)[:, None]           # rows 0..4
    windows = build_windows(fused, cfg)
    assert len(windows) == 5
    assert windows[0].features.tolist() == [0, 0, 0, 1, 2]
    assert windows[1].features.tolist() == [0, 0, 1, 2, 3]
    assert windows[2].features.tolist() == [0, 1, 2, 3, 4]
    assert windows[4].features.tolist() == [2, 3, 4, 4, 4]
    assert [w.center_shot for w in windows] == list(range(5))
    assert all(w.label is None for w in windows)


def test_build_windows_flatten_order_and_labels():
    cfg = tiny_cfg(feat_dim=2, context_n=1)
    fused = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
    labels = np.array([0, 1, 0])
    windows = build_windows(fused, cfg, labels)
    # Window rows concatenate in temporal order.
    assert windows[1].features.tolist() == [1, 2, 3, 4, 5, 6]
    assert [w.label for w in windows] == [0, 1, 0]
    with pytest.raises(ValueError, match=r"\[n, 2\]"):
        build_windows(np.zeros((3, 5)), cfg)
    with pytest.raises(ValueError, match="align"):
        build_windows(fused, cfg, labels[:2])


def test_window_width_matches_head_input():
    cfg = tiny_cfg(feat_dim=3, context_n=2)
    net = build_sbd_head(cfg)
    assert net.specs[0].in_dim == 5 * 3
    windows = build_windows(np.zeros((4, 3)), cfg)
    out, _ = net.forward(np.stack([w.features for w in windows]))
    assert out.shape == (4, 2)


def test_head_structure():
    cfg = SbdConfig(feat_dim=10, context_n=1, hidden_dims=(20, 12, 6),
                    dropout_p=0.4)
    net = build_sbd_head(cfg)
    kinds = [s.kind for s in net.specs]
    assert kinds == ["linear", "relu", "dropout"] * 3 + ["linear"]
    assert [s.out_dim for s in net.specs if s.kind == "linear"] \
        == [20, 12, 6, 2]
    assert all(s.p == 0.4 for s in net.specs if s.kind == "dropout")


# ---------------------------------------------------------------------------
# Training and prediction.
# ---------------------------------------------------------------------------


def separable_windows(n_scenes=6, shots_per_scene=4, feat_dim=6, seed=0):
    """Windows over per-scene constant rows: boundaries are learnable."""
    rng = np.random.default_rng(seed)
    rows, labels = [], []
    for s in range(n_scenes):
        center = rng.standard_normal(feat_dim) * 3.0
        for j in range(shots_per_scene):
            rows.append(center + 0.05 * rng.standard_normal(feat_dim))
            is_final = j == shots_per_scene - 1
            labels.append(1 if is_final and s < n_scenes - 1 else 0)
    cfg = tiny_cfg(feat_dim=feat_dim)
    return build_windows(np.stack(rows), cfg, np.array(labels)), cfg


def test_train_sbd_learns_separable_boundaries():
    windows, cfg = separable_windows()
    net, history = train_sbd(windows, cfg)
    assert len(history) == cfg.epochs
    assert history[-1] < history[0]
    probs, flags = predict_boundaries(net, windows, cfg.threshold)
    want = np.array([w.label for w in windows], dtype=bool)
    assert np.array_equal(flags, want)
    assert probs.shape == (len(windows),)
    assert np.all((probs >= 0) & (probs <= 1))


def test_train_sbd_deterministic():
    windows, cfg = separable_windows()
    net1, h1 = train_sbd(windows, tiny_cfg(epochs=2))
    net2, h2 = train_sbd(windows, tiny_cfg(epochs=2))
    assert h1 == h2
    for a, b in zip(net1.params, net2.params):
        for k in a:
            assert np.array_equal(a[k], b[k])


def test_train_sbd_validates():
    windows, cfg = separable_windows()
    for w in windows:
        w.label = 0
    with pytest.raises(ValueError, match="both boundary"):
        train_sbd(windows, cfg)
    windows[0].label = None
    with pytest.raises(ValueError, match="labeled"):
        train_sbd(windows, cfg)
    with pytest.raises(ValueError, match="neg_per_pos"):
        train_sbd(windows, tiny_cfg(neg_per_pos=0.5))


def test_train_sbd_survives_extreme_imbalance():
    # One positive window and a huge neg_per_pos still yield at least
    # one positive per batch, so training stays finite.
    windows, _ = separable_windows(n_scenes=2, shots_per_scene=8)
    assert sum(w.label for w in windows) == 1
    _, history = train_sbd(windows, tiny_cfg(epochs=2, batch_size=8,
                                             neg_per_pos=1000.0))
    assert np.all(np.isfinite(history))


def test_predict_boundaries_strict_threshold():
    # A zero network emits equal logits: prob exactly 0.5 never flags
    # at threshold 0.5.
    cfg = tiny_cfg(feat_dim=4, hidden_dims=(8, 8, 8), dropout_p=0.0)
    net = build_sbd_head(cfg)
    final = net.params[-1]
    final["W"][:] = 0.0
    final["b"][:] = 0.0
    windows = build_windows(np.ones((6, 4)), cfg)
    probs, flags = predict_boundaries(net, windows, threshold=0.5)
    assert probs == pytest.approx(np.full(6, 0.5))
    assert not flags.any()
    # Nudging the boundary logit above parity flips every flag.
    final["b"][1] = 1e-9
    probs2, flags2 = predict_boundaries(net, windows, threshold=0.5)
    assert flags2.all()
    assert np.all(probs2 > 0.5)


# ---------------------------------------------------------------------------
# Scene assembly.
# ---------------------------------------------------------------------------


def test_assemble_scenes_hand_cases():
    assert assemble_scenes([0, 1, 0, 0, 1, 0]) == [
        SceneAnnotation(0, 0, 1), SceneAnnotation(1, 2, 4),
        SceneAnnotation(2, 5, 5)]
    assert assemble_scenes([0, 0, 0]) == [SceneAnnotation(0, 0, 2)]
    assert assemble_scenes([1, 1, 1]) == [
        SceneAnnotation(0, 0, 0), SceneAnnotation(1, 1, 1),
        SceneAnnotation(2, 2, 2)]
    # Trailing flag is redundant with the title-final rule.
    assert assemble_scenes([0, 0, 1]) == [SceneAnnotation(0, 0, 2)]
    assert assemble_scenes([1]) == [SceneAnnotation(0, 0, 0)]


def test_assemble_scenes_validates():
    with pytest.raises(ValueError, match="nonempty"):
        assemble_scenes([])
    with pytest.raises(ValueError, match="1-D"):
        assemble_scenes(np.zeros((2, 2)))


def test_labels_to_scenes_round_trip_randomized():
    # boundary_labels and assemble_scenes are inverse maps across every
    # random partition.
    rng = np.random.default_rng(0)
    for _ in range(1000):
        n_shots = int(rng.integers(1, 40))
        cuts = sorted(rng.choice(np.arange(1, n_shots),
                                 size=int(rng.integers(0, max(1, n_shots))),
                                 replace=False).tolist()) if n_shots > 1 \
            else []
        bounds = [0] + cuts + [n_shots]
        scenes = [SceneAnnotation(i, a, b - 1)
                  for i, (a, b) in enumerate(zip(bounds[:-1], bounds[1:]))]
        flags = np.zeros(n_shots, dtype=np.int64)
        for sc in scenes:
            if sc.last_shot < n_shots - 1:
                flags[sc.last_shot] = 1
        assert assemble_scenes(flags) == scenes


def test_boundary_labels_feed_assemble_scenes():
    title = make_title(n_scenes=4, shots_per_scene=3)
    labels = boundary_labels(title)
    assert assemble_scenes(labels) == title.gt_scenes
