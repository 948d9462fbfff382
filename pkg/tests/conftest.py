import numpy as np
import pytest

from laughcut.corpus import (LaughterTrack, SceneAnnotation, ShotRecord,
                             Title, TranscriptSentence)
from laughcut.synth import SynthConfig, generate_corpus


def make_title(n_scenes=3, shots_per_scene=2, d_vis=4, seed=0,
               title_id="t0") -> Title:
    """Minimal hand-built valid title for unit tests."""
    rng = np.random.default_rng(seed)
    shots, scenes, first = [], [], 0
    t = 0.0
    for s in range(n_scenes):
        for _ in range(shots_per_scene):
            shots.append(ShotRecord(
                shot_id=len(shots), start_s=t, end_s=t + 2.0,
                visual_feat=rng.standard_normal(d_vis), text_feat=None))
            t += 2.0
        scenes.append(SceneAnnotation(s, first, first + shots_per_scene - 1))
        first += shots_per_scene
    return Title(title_id=title_id, d_vis=d_vis, shots=shots,
                 gt_scenes=scenes)


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """Two separable synthetic titles with funny and improper scenes."""
    out = tmp_path_factory.mktemp("small_corpus")
    cfg = SynthConfig(n_titles=2, scenes_per_title=(6, 8),
                      shots_per_scene=(4, 5), d_vis=16,
                      within_scene_sigma=0.1, funny_scene_fraction=0.4,
                      improper_scene_fraction=0.15, seed=42)
    titles = generate_corpus(cfg, out)
    return out, cfg, titles
