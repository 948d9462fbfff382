"""Synthetic title generator with planted scene structure and humor.

Shots cluster around per-scene centroids with a small temporal drift.
Planted funny scenes carry laughter bursts whose strength is monotone
in a per-scene intensity, and a marker word in every transcript
sentence. Planted improper scenes look funny but additionally carry
deny-listed audio tag events. Everything is a pure function of the
config seed and title index.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .corpus import (AudioTagEvent, CuratorAnnotation, LaughterTrack,
                     SceneAnnotation, ShotRecord, Title, TranscriptSentence,
                     save_title, write_json)

# Ten marker words planted in every sentence of a funny scene. The
# Oracle and Lexicon scorers key off this list.
MARKER_WORDS = (
    "guffaw", "snicker", "chortle", "zinger", "pratfall",
    "whoopee", "hijinks", "slapstick", "giggle", "punchline",
)

# Fifty plain filler words used to assemble non-marker sentence text.
_SUBJECTS = (
    "captain", "neighbor", "barista", "plumber", "tourist",
    "chef", "janitor", "pilot", "clerk", "violinist",
    "landlord", "referee", "mascot", "butler", "cartographer",
)
_VERBS = (
    "inspects", "misplaces", "polishes", "borrows", "repaints",
    "catalogs", "measures", "rearranges", "unplugs", "waters",
    "folds", "labels", "sharpens", "stacks", "trades",
)
_OBJECTS = (
    "ladder", "teapot", "umbrella", "accordion", "doormat",
    "lampshade", "suitcase", "thermostat", "stapler", "bicycle",
    "fishbowl", "raincoat", "bookend", "curtain", "mailbox",
    "spatula", "houseplant", "telescope", "footstool", "chandelier",
)

DENY_TAG_LABELS = ("crying", "screaming", "moaning", "grunting")
_BENIGN_TAG_LABELS = ("music", "speech", "applause", "footsteps", "traffic")


@dataclass
class SynthConfig:
    n_titles: int = 2
    scenes_per_title: tuple[int, int] = (8, 10)     # inclusive bounds
    shots_per_scene: tuple[int, int] = (4, 6)
    shot_duration_s: tuple[float, float] = (2.0, 5.0)
    d_vis: int = 64
    with_text_features: bool = True
    within_scene_sigma: float = 0.25
    text_sigma_scale: float = 1.0      # text noise = sigma * this scale
    centroid_separation: float = 1.0
    drift_per_shot: float = 0.1        # fraction of sigma per shot step
    funny_scene_fraction: float = 0.3
    improper_scene_fraction: float = 0.0
    funny_early_fraction: float = 0.75  # funny scenes start in this head
    intensity_range: tuple[float, float] = (0.4, 1.0)
    laughter_hop_s: float = 0.2
    seed: int = 0


@dataclass
class PlantedTruth:
    """Generator-side ground truth, saved beside the bundle for tests."""
    funny_scene_ids: list[int]
    improper_scene_ids: list[int]
    intensities: dict[int, float]          # funny scene id -> intensity
    visual_centroids: np.ndarray           # (n_scenes, d_vis)


def _unit_vectors(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    v = rng.standard_normal((n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _scene_features(rng, centroids, drift_dirs, sizes, sigma, drift_frac):
    rows = []
    for s, m in enumerate(sizes):
        noise = rng.standard_normal((m, centroids.shape[1]))
        steps = np.arange(m)[:, None] * drift_frac * sigma
        rows.append(centroids[s] + sigma * noise + steps * drift_dirs[s])
    return np.vstack(rows)


def _sentence_text(rng, funny: bool) -> str:
    words = [
        "the", _SUBJECTS[rng.integers(len(_SUBJECTS))],
        _VERBS[rng.integers(len(_VERBS))],
        "the", _OBJECTS[rng.integers(len(_OBJECTS))],
    ]
    if funny:
        words.append(MARKER_WORDS[rng.integers(len(MARKER_WORDS))])
    return " ".join(words)


def generate_title(cfg: SynthConfig, title_index: int) \
        -> tuple[Title, PlantedTruth]:
    """Deterministically generate one title from (cfg.seed, title_index)."""
    ss = np.random.SeedSequence(cfg.seed, spawn_key=(title_index,))
    rng = np.random.default_rng(ss)

    lo, hi = cfg.scenes_per_title
    n_scenes = int(rng.integers(lo, hi + 1))
    slo, shi = cfg.shots_per_scene
    sizes = [int(rng.integers(slo, shi + 1)) for _ in range(n_scenes)]
    n_shots = sum(sizes)

    durs = rng.uniform(*cfg.shot_duration_s, size=n_shots)
    edges = np.concatenate([[0.0], np.cumsum(durs)])
    total_s = float(edges[-1])

    scenes, first = [], 0
    for s, m in enumerate(sizes):
        scenes.append(SceneAnnotation(s, first, first + m - 1))
        first += m

    vis_centroids = cfg.centroid_separation \
        * _unit_vectors(rng, n_scenes, cfg.d_vis)
    vis_drift = _unit_vectors(rng, n_scenes, cfg.d_vis)
    visual = _scene_features(rng, vis_centroids, vis_drift, sizes,
                             cfg.within_scene_sigma, cfg.drift_per_shot)
    if cfg.with_text_features:
        from .corpus import TEXT_DIM
        txt_centroids = cfg.centroid_separation \
            * _unit_vectors(rng, n_scenes, TEXT_DIM)
        txt_drift = _unit_vectors(rng, n_scenes, TEXT_DIM)
        text = _scene_features(rng, txt_centroids, txt_drift, sizes,
                               cfg.within_scene_sigma * cfg.text_sigma_scale,
                               cfg.drift_per_shot)
    else:
        text = None

    # Pick funny scenes among those starting early enough to survive a
    # downstream spoiler skip, then improper scenes among the rest.
    spans = [(float(edges[sc.first_shot]), float(edges[sc.last_shot + 1]))
             for sc in scenes]
    n_funny = int(np.floor(cfg.funny_scene_fraction * n_scenes))
    eligible = [s for s in range(n_scenes)
                if spans[s][0] < cfg.funny_early_fraction * total_s]
    n_funny = min(n_funny, len(eligible))
    funny = sorted(rng.choice(eligible, size=n_funny, replace=False).tolist()) \
        if n_funny else []
    rest = [s for s in range(n_scenes) if s not in funny]
    n_improper = min(int(np.floor(cfg.improper_scene_fraction * n_scenes)),
                     len(rest))
    improper = sorted(rng.choice(rest, size=n_improper,
                                 replace=False).tolist()) if n_improper else []

    # Evenly spaced intensities keep laughter feature gaps well above
    # frame-quantization noise, so score order matches planted order.
    i_lo, i_hi = cfg.intensity_range
    if n_funny:
        levels = np.linspace(i_lo, i_hi, n_funny)
        order = rng.permutation(n_funny)
        intensities = {funny[k]: float(levels[order[k]])
                       for k in range(n_funny)}
    else:
        intensities = {}

    hop = cfg.laughter_hop_s
    n_frames = int(np.ceil(total_s / hop))
    probs = rng.uniform(0.02, 0.08, size=n_frames)
    mids = (np.arange(n_frames) + 0.5) * hop

    def plant_burst(scene_id: int, intensity: float) -> None:
        t0, t1 = spans[scene_id]
        dur = t1 - t0
        coverage = 0.35 + 0.5 * intensity
        mid = 0.5 * (t0 + t1)
        b0, b1 = mid - 0.5 * coverage * dur, mid + 0.5 * coverage * dur
        sel = (mids >= b0) & (mids < b1)
        probs[sel] = min(0.8 + 0.2 * intensity, 1.0)

    for s in funny:
        plant_burst(s, intensities[s])
    for s in improper:
        plant_burst(s, float(rng.uniform(0.5, 0.9)))

    transcript, idx = [], 0
    for s, sc in enumerate(scenes):
        t0, t1 = spans[s]
        n_sent = max(1, int(round((t1 - t0) / 3.0)))
        bounds = np.linspace(t0, t1, n_sent + 1)
        for k in range(n_sent):
            transcript.append(TranscriptSentence(
                index=idx, start_s=float(bounds[k]),
                end_s=float(bounds[k + 1]),
                text=_sentence_text(rng, funny=s in funny or s in improper)))
            idx += 1

    def middle_window(scene_id: int, length: float) -> tuple[float, float]:
        t0, t1 = spans[scene_id]
        dur = t1 - t0
        inner0, inner1 = t0 + 0.2 * dur, t1 - 0.2 * dur
        length = min(length, inner1 - inner0)
        start = float(rng.uniform(inner0, max(inner0, inner1 - length)))
        return start, start + length

    tags = []
    for s in range(n_scenes):
        if s in improper:
            for _ in range(int(rng.integers(1, 3))):
                a, b = middle_window(s, float(rng.uniform(1.2, 2.5)))
                tags.append(AudioTagEvent(
                    a, b, DENY_TAG_LABELS[rng.integers(len(DENY_TAG_LABELS))],
                    float(rng.uniform(0.55, 0.95))))
            continue
        if rng.random() < 0.3:
            a, b = middle_window(s, float(rng.uniform(1.0, 3.0)))
            tags.append(AudioTagEvent(
                a, b, _BENIGN_TAG_LABELS[rng.integers(len(_BENIGN_TAG_LABELS))],
                float(rng.uniform(0.2, 0.9))))
        if rng.random() < 0.15:
            # Sub-threshold deny cue: too improbable to trip the filter.
            a, b = middle_window(s, float(rng.uniform(1.0, 2.0)))
            tags.append(AudioTagEvent(
                a, b, DENY_TAG_LABELS[rng.integers(len(DENY_TAG_LABELS))],
                float(rng.uniform(0.05, 0.25))))
        if rng.random() < 0.1:
            # High-prob deny cue far shorter than any rejection minimum.
            a, b = middle_window(s, float(rng.uniform(0.2, 0.4)))
            tags.append(AudioTagEvent(
                a, b, DENY_TAG_LABELS[rng.integers(len(DENY_TAG_LABELS))],
                float(rng.uniform(0.5, 0.9))))
    tags.sort(key=lambda ev: ev.start_s)

    curator = [CuratorAnnotation(
        curator_score=intensities[s], is_funny=True,
        first_shot=scenes[s].first_shot, last_shot=scenes[s].last_shot)
        for s in funny]

    shots = []
    for i in range(n_shots):
        shots.append(ShotRecord(
            shot_id=i, start_s=float(edges[i]), end_s=float(edges[i + 1]),
            visual_feat=visual[i],
            text_feat=None if text is None else text[i]))

    title = Title(
        title_id=f"synth-{title_index:03d}", d_vis=cfg.d_vis, shots=shots,
        gt_scenes=scenes, transcript=transcript,
        laughter=LaughterTrack(hop_s=hop, probs=probs),
        audio_tags=tags, curator=curator or None)
    truth = PlantedTruth(
        funny_scene_ids=list(funny), improper_scene_ids=list(improper),
        intensities=intensities, visual_centroids=vis_centroids)
    return title, truth


def generate_corpus(cfg: SynthConfig, out_dir: str | Path) -> list[Title]:
    """Write cfg.n_titles bundles plus synth.json under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    titles = []
    for i in range(cfg.n_titles):
        title, truth = generate_title(cfg, i)
        tdir = save_title(title, out / title.title_id)
        write_json(tdir / "planted.json", {
            "funny_scene_ids": truth.funny_scene_ids,
            "improper_scene_ids": truth.improper_scene_ids,
            "intensities": {str(k): v for k, v in truth.intensities.items()},
            "visual_centroids": [[float(x) for x in row]
                                 for row in truth.visual_centroids],
        })
        titles.append(title)
    write_json(out / "synth.json", {"config": asdict(cfg)})
    return titles


def load_planted(title_dir: str | Path) -> PlantedTruth:
    obj = json.loads((Path(title_dir) / "planted.json").read_text())
    return PlantedTruth(
        funny_scene_ids=list(obj["funny_scene_ids"]),
        improper_scene_ids=list(obj["improper_scene_ids"]),
        intensities={int(k): float(v)
                     for k, v in obj["intensities"].items()},
        visual_centroids=np.asarray(obj["visual_centroids"],
                                    dtype=np.float64))


def synth_config_from_dict(d: dict) -> SynthConfig:
    kwargs = dict(d)
    for key in ("scenes_per_title", "shots_per_scene", "shot_duration_s",
                "intensity_range"):
        if key in kwargs:
            kwargs[key] = tuple(kwargs[key])
    return SynthConfig(**kwargs)
