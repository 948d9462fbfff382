import json

import numpy as np
import pytest

from laughcut.corpus import (AudioTagEvent, CuratorAnnotation, LaughterTrack,
                             ManifestError, SceneAnnotation, Title,
                             fuse_features, load_title, save_title,
                             validate_title)
from laughcut.synth import SynthConfig, generate_title

from conftest import make_title


def rich_title() -> Title:
    title, _ = generate_title(SynthConfig(
        scenes_per_title=(5, 6), d_vis=8, funny_scene_fraction=0.4,
        improper_scene_fraction=0.2, seed=11), 0)
    return title


def test_save_load_round_trip_identity(tmp_path):
    title = rich_title()
    d = save_title(title, tmp_path / "t")
    loaded = load_title(d)
    assert loaded.title_id == title.title_id
    assert loaded.d_vis == title.d_vis
    assert len(loaded.shots) == len(title.shots)
    for a, b in zip(loaded.shots, title.shots):
        assert a.shot_id == b.shot_id
        assert a.start_s == b.start_s and a.end_s == b.end_s
        assert np.array_equal(a.visual_feat, b.visual_feat)
        if b.text_feat is None:
            assert a.text_feat is None
        else:
            assert np.array_equal(a.text_feat, b.text_feat)
    assert loaded.gt_scenes == title.gt_scenes
    assert loaded.transcript == title.transcript
    assert loaded.laughter.hop_s == title.laughter.hop_s
    assert np.array_equal(loaded.laughter.probs, title.laughter.probs)
    assert loaded.audio_tags == title.audio_tags
    assert loaded.curator == title.curator


def test_save_load_save_byte_stable(tmp_path):
    title = rich_title()
    d1 = save_title(title, tmp_path / "a")
    d2 = save_title(load_title(d1), tmp_path / "b")
    for f in sorted(p.name for p in d1.iterdir()):
        assert (d2 / f).read_bytes() == (d1 / f).read_bytes(), f


def test_optional_manifests_absent(tmp_path):
    title = make_title()
    title.transcript = None
    title.laughter = None
    title.audio_tags = None
    title.curator = None
    loaded = load_title(save_title(title, tmp_path / "t"))
    assert loaded.transcript is None
    assert loaded.laughter is None
    assert loaded.audio_tags is None
    assert loaded.curator is None
    assert loaded.gt_scenes is not None


def test_parse_error_reports_line_number(tmp_path):
    d = save_title(make_title(), tmp_path / "t")
    lines = (d / "shots.jsonl").read_text().splitlines()
    lines[1] = "{broken"
    (d / "shots.jsonl").write_text("\n".join(lines) + "\n")
    with pytest.raises(ManifestError, match="line 2"):
        load_title(d)


def test_missing_header_and_bad_version(tmp_path):
    d = save_title(make_title(), tmp_path / "t")
    header = json.loads((d / "title.json").read_text())
    header["schema_version"] = 99
    (d / "title.json").write_text(json.dumps(header))
    with pytest.raises(ManifestError, match="schema_version"):
        load_title(d)
    (d / "title.json").unlink()
    with pytest.raises(ManifestError, match="title.json"):
        load_title(d)


def test_shot_invariants():
    title = make_title()
    bad = Title(title_id="x", d_vis=4, shots=[
        title.shots[0],
        # shot_id skips 1
        type(title.shots[1])(shot_id=2, start_s=2.0, end_s=4.0,
                             visual_feat=title.shots[1].visual_feat,
                             text_feat=None)])
    with pytest.raises(ManifestError, match="contiguous"):
        validate_title(bad)

    rec = title.shots[0]
    bad = Title(title_id="x", d_vis=4, shots=[
        type(rec)(shot_id=0, start_s=5.0, end_s=5.0,
                  visual_feat=rec.visual_feat, text_feat=None)])
    with pytest.raises(ManifestError, match="start_s"):
        validate_title(bad)

    # Overlapping consecutive shots.
    bad = Title(title_id="x", d_vis=4, shots=[
        type(rec)(shot_id=0, start_s=0.0, end_s=3.0,
                  visual_feat=rec.visual_feat, text_feat=None),
        type(rec)(shot_id=1, start_s=1.0, end_s=4.0,
                  visual_feat=rec.visual_feat, text_feat=None)])
    with pytest.raises(ManifestError, match="overlap"):
        validate_title(bad)


def test_feature_dimension_and_finiteness(tmp_path):
    d = save_title(make_title(d_vis=4), tmp_path / "t")
    rows = [json.loads(l) for l in (d / "shots.jsonl").read_text()
            .splitlines()]
    rows[0]["visual_feat"] = [1.0, 2.0]
    (d / "shots.jsonl").write_text(
        "\n".join(json.dumps(r) for r in rows) + "\n")
    with pytest.raises(ManifestError, match="4-dim"):
        load_title(d)

    rows[0]["visual_feat"] = [1.0, 2.0, float("nan"), 0.0]
    (d / "shots.jsonl").write_text(
        "\n".join(json.dumps(r) for r in rows) + "\n")
    with pytest.raises(ManifestError, match="non-finite"):
        load_title(d)


def test_scene_partition_invariants():
    title = make_title(n_scenes=2, shots_per_scene=2)
    title.gt_scenes = [SceneAnnotation(0, 0, 1), SceneAnnotation(1, 3, 3)]
    with pytest.raises(ManifestError, match="scene_id=1"):
        validate_title(title)
    title.gt_scenes = [SceneAnnotation(0, 0, 1), SceneAnnotation(1, 2, 2)]
    with pytest.raises(ManifestError, match="cover"):
        validate_title(title)
    title.gt_scenes = [SceneAnnotation(0, 0, 3)]
    validate_title(title)


def test_curator_span_validation():
    title = make_title()
    title.curator = [CuratorAnnotation(curator_score=1.0, is_funny=True)]
    with pytest.raises(ManifestError, match="span"):
        validate_title(title)
    title.curator = [CuratorAnnotation(curator_score=1.0, is_funny=True,
                                       first_shot=0, last_shot=99)]
    with pytest.raises(ManifestError, match="range"):
        validate_title(title)
    title.curator = [CuratorAnnotation(curator_score=-1.0, is_funny=True,
                                       first_shot=0, last_shot=1)]
    with pytest.raises(ManifestError, match="curator_score"):
        validate_title(title)
    title.curator = [CuratorAnnotation(curator_score=0.5, is_funny=True,
                                       start_s=0.0, end_s=4.0)]
    validate_title(title)
    assert title.curator_span(title.curator[0]) == (0.0, 4.0)


def test_laughter_and_tag_validation():
    title = make_title()
    title.laughter = LaughterTrack(hop_s=0.0, probs=np.array([0.5]))
    with pytest.raises(ManifestError, match="hop_s"):
        validate_title(title)
    title.laughter = LaughterTrack(hop_s=0.5, probs=np.array([1.5]))
    with pytest.raises(ManifestError, match="probs"):
        validate_title(title)
    title.laughter = None
    title.audio_tags = [AudioTagEvent(3.0, 2.0, "music", 0.5)]
    with pytest.raises(ManifestError, match="start_s"):
        validate_title(title)
    title.audio_tags = [AudioTagEvent(1.0, 2.0, "music", 1.5)]
    with pytest.raises(ManifestError, match="prob"):
        validate_title(title)


def test_fuse_features_defaults():
    visual = np.arange(4096, dtype=np.float64)
    fused = fuse_features(visual, None)
    assert fused.shape == (4864,)
    assert np.array_equal(fused[:4096], visual)
    assert not fused[4096:].any()
    text = np.ones(768)
    fused = fuse_features(visual, text)
    assert np.array_equal(fused[4096:], text)


def test_fuse_features_batched_and_errors():
    v = np.random.default_rng(0).standard_normal((5, 8))
    t = np.random.default_rng(1).standard_normal((5, 768))
    fused = fuse_features(v, t, d_vis=8)
    assert fused.shape == (5, 776)
    assert np.array_equal(fused[:, :8], v)
    with pytest.raises(ValueError, match="width 8"):
        fuse_features(np.zeros(9), None, d_vis=8)
    with pytest.raises(ValueError, match="text"):
        fuse_features(np.zeros(8), np.zeros(10), d_vis=8)


def test_fuse_features_injective():
    rng = np.random.default_rng(2)
    seen = set()
    for _ in range(200):
        v = rng.integers(0, 5, size=4).astype(float)
        t = rng.integers(0, 5, size=768).astype(float)
        fused = fuse_features(v, t, d_vis=4)
        key = fused.tobytes()
        recovered_v, recovered_t = fused[:4], fused[4:]
        assert np.array_equal(recovered_v, v)
        assert np.array_equal(recovered_t, t)
        seen.add(key)
