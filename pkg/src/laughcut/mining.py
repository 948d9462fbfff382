"""Triplet mining for contrastive shot-encoder training.

Guided mining uses scene annotations: anchor and positive share a
scene, the negative comes from a scene at most scene_window scenes
away (and at least one away). The heuristic variants V1-V3 ignore
scenes entirely and pick positives/negatives by shot distance alone,
via rejection sampling with a per-triplet attempt cap.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Title

# variant -> (positive max shot distance, negative min shot distance)
HEURISTIC_VARIANTS = {
    "V1": (3, 10),
    "V2": (2, 15),
    "V3": (1, 30),
}

_ATTEMPT_CAP = 1000


class MiningError(ValueError):
    pass


class InfeasibleVariantError(MiningError):
    pass


@dataclass(frozen=True)
class Triplet:
    anchor: int
    positive: int
    negative: int
    source: str          # "guided" or a heuristic variant name
    title_id: str


def mine_guided(title: Title, n_triplets: int, scene_window: int = 3,
                seed: int = 0) -> list[Triplet]:
    """Scene-guided triplets for one title.

    Anchor scenes are drawn proportionally to their ordered positive
    pair count m*(m-1); the negative shot is uniform over all shots
    of scenes within scene_window of the anchor scene (never the
    anchor scene itself).
    """
    if n_triplets < 0:
        raise MiningError("n_triplets must be >= 0")
    if scene_window < 1:
        raise MiningError("scene_window must be >= 1")
    if title.gt_scenes is None:
        raise MiningError(f"{title.title_id}: guided mining needs "
                          "scene annotations")
    scenes = title.gt_scenes
    members = [list(range(sc.first_shot, sc.last_shot + 1)) for sc in scenes]
    n_scenes = len(scenes)
    eligible = [s for s in range(n_scenes) if len(members[s]) >= 2]
    if n_scenes < 2 or not eligible:
        raise MiningError(f"{title.title_id}: no eligible anchor scene "
                          "(need >= 2 scenes and a scene with >= 2 shots)")

    weights = np.array([len(members[s]) * (len(members[s]) - 1)
                        for s in eligible], dtype=np.float64)
    weights /= weights.sum()
    neg_pools = []
    for s in eligible:
        pool = []
        for other in range(max(0, s - scene_window),
                           min(n_scenes, s + scene_window + 1)):
            if other != s:
                pool.extend(members[other])
        neg_pools.append(pool)

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    out = []
    for _ in range(n_triplets):
        k = int(rng.choice(len(eligible), p=weights))
        pair = rng.choice(len(members[eligible[k]]), size=2, replace=False)
        anchor = members[eligible[k]][int(pair[0])]
        positive = members[eligible[k]][int(pair[1])]
        negative = int(neg_pools[k][int(rng.integers(len(neg_pools[k])))])
        out.append(Triplet(anchor, positive, negative, "guided",
                           title.title_id))
    return out


def mine_heuristic(variant: str, n_shots: int, n_triplets: int,
                   title_id: str = "", seed: int = 0) -> list[Triplet]:
    """Distance-only triplets: positive within +-pos_max shots of the
    anchor, negative at least neg_min shots away. Draws are rejected
    and retried as a whole, capped at 1000 attempts per triplet."""
    if variant not in HEURISTIC_VARIANTS:
        raise MiningError(f"unknown variant {variant!r}")
    if n_shots < 1:
        raise MiningError("n_shots must be >= 1")
    pos_max, neg_min = HEURISTIC_VARIANTS[variant]

    def has_valid(anchor: int) -> bool:
        has_pos = anchor > 0 or anchor + 1 < n_shots
        has_neg = anchor - neg_min >= 0 or anchor + neg_min < n_shots
        return has_pos and has_neg

    if not any(has_valid(a) for a in range(n_shots)):
        raise InfeasibleVariantError(
            f"variant {variant} is infeasible on a {n_shots}-shot title "
            f"(no anchor has both a positive within {pos_max} and a "
            f"negative at least {neg_min} away)")

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    out = []
    for _ in range(n_triplets):
        for attempt in range(_ATTEMPT_CAP):
            anchor = int(rng.integers(n_shots))
            positive = anchor + int(rng.integers(-pos_max, pos_max + 1))
            if positive == anchor or not (0 <= positive < n_shots):
                continue
            negative = int(rng.integers(n_shots))
            if abs(negative - anchor) < neg_min:
                continue
            out.append(Triplet(anchor, positive, negative, variant,
                               title_id))
            break
        else:
            raise InfeasibleVariantError(
                f"variant {variant}: no valid triplet in {_ATTEMPT_CAP} "
                f"attempts on a {n_shots}-shot title")
    return out


def save_triplets(triplets: list[Triplet], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in triplets:
            fh.write(json.dumps({
                "anchor": t.anchor, "positive": t.positive,
                "negative": t.negative, "source": t.source,
                "title_id": t.title_id}))
            fh.write("\n")


def load_triplets(path: str | Path) -> list[Triplet]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise MiningError(f"{path}: line {lineno}: bad JSON "
                                  f"({exc.msg})") from exc
            out.append(Triplet(int(obj["anchor"]), int(obj["positive"]),
                               int(obj["negative"]), str(obj["source"]),
                               str(obj["title_id"])))
    return out
