from collections import Counter

import numpy as np
import pytest

import laughcut.mining as mining
from laughcut.corpus import SceneAnnotation
from laughcut.mining import (HEURISTIC_VARIANTS, InfeasibleVariantError,
                             MiningError, Triplet, load_triplets,
                             mine_guided, mine_heuristic, save_triplets)

from conftest import make_title


def scene_of(title):
    lookup = {}
    for sc in title.gt_scenes:
        for shot in range(sc.first_shot, sc.last_shot + 1):
            lookup[shot] = sc.scene_id
    return lookup


def test_guided_triplet_structure():
    title = make_title(n_scenes=6, shots_per_scene=3)
    lookup = scene_of(title)
    triplets = mine_guided(title, 500, scene_window=3, seed=0)
    assert len(triplets) == 500
    for t in triplets:
        assert t.source == "guided"
        assert t.title_id == title.title_id
        assert t.anchor != t.positive
        assert lookup[t.anchor] == lookup[t.positive]
        gap = abs(lookup[t.negative] - lookup[t.anchor])
        assert 1 <= gap <= 3


def test_guided_respects_scene_window():
    title = make_title(n_scenes=9, shots_per_scene=2)
    lookup = scene_of(title)
    for window in (1, 2):
        triplets = mine_guided(title, 400, scene_window=window, seed=1)
        gaps = {abs(lookup[t.negative] - lookup[t.anchor]) for t in triplets}
        assert gaps <= set(range(1, window + 1))
        assert max(gaps) == window      # the full window is actually used


def test_guided_anchor_distribution_proportional_to_pairs():
    title = make_title(n_scenes=3, shots_per_scene=2)
    # Re-partition the same 6 shots into scenes of 2 and 4 shots:
    # ordered-pair weights 2 and 12.
    title.gt_scenes = [SceneAnnotation(0, 0, 1), SceneAnnotation(1, 2, 5)]
    lookup = scene_of(title)
    triplets = mine_guided(title, 20000, seed=2)
    counts = Counter(lookup[t.anchor] for t in triplets)
    frac0 = counts[0] / 20000
    assert frac0 == pytest.approx(2 / 14, abs=0.02)


def test_guided_singleton_scenes_never_anchor():
    title = make_title(n_scenes=4, shots_per_scene=2)
    title.gt_scenes = [
        SceneAnnotation(0, 0, 0), SceneAnnotation(1, 1, 4),
        SceneAnnotation(2, 5, 5), SceneAnnotation(3, 6, 7)]
    lookup = scene_of(title)
    triplets = mine_guided(title, 300, seed=3)
    anchor_scenes = {lookup[t.anchor] for t in triplets}
    assert anchor_scenes <= {1, 3}
    # Singleton scenes still serve as negative pools.
    neg_scenes = {lookup[t.negative] for t in triplets}
    assert 0 in neg_scenes or 2 in neg_scenes


def test_guided_errors():
    title = make_title(n_scenes=1, shots_per_scene=4)
    with pytest.raises(MiningError, match="eligible"):
        mine_guided(title, 10)
    singles = make_title(n_scenes=4, shots_per_scene=1)
    with pytest.raises(MiningError, match="eligible"):
        mine_guided(singles, 10)
    title = make_title()
    title.gt_scenes = None
    with pytest.raises(MiningError, match="scene annotations"):
        mine_guided(title, 10)
    title = make_title()
    with pytest.raises(MiningError, match="n_triplets"):
        mine_guided(title, -1)
    with pytest.raises(MiningError, match="scene_window"):
        mine_guided(title, 10, scene_window=0)


def test_guided_deterministic():
    title = make_title(n_scenes=5, shots_per_scene=3)
    a = mine_guided(title, 50, seed=9)
    b = mine_guided(title, 50, seed=9)
    c = mine_guided(title, 50, seed=10)
    assert a == b
    assert a != c
    assert mine_guided(title, 0, seed=9) == []


@pytest.mark.parametrize("variant", sorted(HEURISTIC_VARIANTS))
def test_heuristic_constraints_hold(variant):
    pos_max, neg_min = HEURISTIC_VARIANTS[variant]
    n_shots = 120
    triplets = mine_heuristic(variant, n_shots, 400, title_id="t9", seed=4)
    assert len(triplets) == 400
    for t in triplets:
        assert t.source == variant
        assert t.title_id == "t9"
        assert 0 <= t.positive < n_shots
        assert 1 <= abs(t.positive - t.anchor) <= pos_max
        assert abs(t.negative - t.anchor) >= neg_min


def test_heuristic_infeasible_when_negatives_cannot_exist():
    # V1 requires a negative at least 10 shots away: impossible on 10.
    with pytest.raises(InfeasibleVariantError, match="infeasible"):
        mine_heuristic("V1", 10, 5)
    triplets = mine_heuristic("V1", 11, 10, seed=0)
    for t in triplets:
        assert t.anchor in (0, 10)
        assert abs(t.negative - t.anchor) >= 10
    with pytest.raises(InfeasibleVariantError):
        mine_heuristic("V3", 30, 5)
    assert mine_heuristic("V3", 31, 5, seed=1)


def test_heuristic_attempt_cap(monkeypatch):
    monkeypatch.setattr(mining, "_ATTEMPT_CAP", 1)
    with pytest.raises(InfeasibleVariantError, match="1 attempts"):
        # Feasible variant, but one attempt is (all but certainly) not
        # enough when only anchors 0 and 10 admit a valid negative.
        mine_heuristic("V1", 11, 50, seed=5)


def test_heuristic_errors():
    with pytest.raises(MiningError, match="unknown variant"):
        mine_heuristic("V9", 100, 5)
    with pytest.raises(MiningError, match="n_shots"):
        mine_heuristic("V1", 0, 5)


def test_heuristic_deterministic():
    assert mine_heuristic("V2", 80, 40, seed=6) \
        == mine_heuristic("V2", 80, 40, seed=6)
    assert mine_heuristic("V2", 80, 40, seed=6) \
        != mine_heuristic("V2", 80, 40, seed=7)


def test_triplets_round_trip(tmp_path):
    title = make_title(n_scenes=4, shots_per_scene=3)
    triplets = mine_guided(title, 25, seed=8)
    path = tmp_path / "t.jsonl"
    save_triplets(triplets, path)
    assert load_triplets(path) == triplets
    save_triplets([], tmp_path / "empty.jsonl")
    assert load_triplets(tmp_path / "empty.jsonl") == []


def test_triplets_load_reports_line(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"anchor": 0, "positive": 1, "negative": 5, '
                    '"source": "guided", "title_id": "t"}\n{oops\n')
    with pytest.raises(MiningError, match="line 2"):
        load_triplets(path)


def test_triplet_record_is_frozen():
    t = Triplet(0, 1, 2, "guided", "x")
    with pytest.raises(AttributeError):
        t.anchor = 5
