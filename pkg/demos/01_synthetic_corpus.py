#!/usr/bin/env python3
"""Generate a tiny synthetic corpus and inspect what the generator plants.

Each title is a sequence of shots grouped into scenes. Scenes have their
own feature centroid, funny scenes get laughter bursts plus marker words
in the transcript, improper scenes additionally get deny-listed audio
events, and a curator list ranks the funny scenes by planted intensity.
"""
import tempfile
from pathlib import Path

from laughcut.corpus import load_title
from laughcut.synth import SynthConfig, generate_corpus, load_planted

out = Path(tempfile.mkdtemp(prefix="laughcut-demo-")) / "corpus"
cfg = SynthConfig(
    n_titles=2, scenes_per_title=(6, 8), shots_per_scene=(4, 6),
    d_vis=32, funny_scene_fraction=0.4, improper_scene_fraction=0.15,
    seed=11)
generate_corpus(cfg, out)
print(f"wrote {cfg.n_titles} titles under {out}\n")

title_dir = out / "synth-000"
title = load_title(title_dir)
truth = load_planted(title_dir)

print(f"{title.title_id}: {len(title.shots)} shots, "
      f"{len(title.gt_scenes)} scenes, {title.duration_s:.0f}s total")
print(f"bundle files: {sorted(p.name for p in title_dir.iterdir())}\n")

funny = set(truth.funny_scene_ids)
improper = set(truth.improper_scene_ids)
for sc in title.gt_scenes:
    start, end = title.scene_span(sc)
    kind = ("improper" if sc.scene_id in improper
            else "funny" if sc.scene_id in funny else "")
    print(f"  scene {sc.scene_id}: shots {sc.first_shot}-{sc.last_shot}, "
          f"{start:6.1f}-{end:6.1f}s  {kind}")

print("\ncurator ranking (best first):")
for ann in sorted(title.curator, key=lambda a: -a.curator_score):
    start, end = title.curator_span(ann)
    print(f"  scene at {start:6.1f}-{end:6.1f}s  "
          f"score {ann.curator_score:.3f}")

print("\nsample transcript lines from the first funny scene:")
fid = min(funny)
span = title.scene_span(title.gt_scenes[fid])
shown = 0
for s in title.transcript:
    if span[0] <= 0.5 * (s.start_s + s.end_s) < span[1] and shown < 3:
        print(f"  [{s.start_s:6.1f}s] {s.text}")
        shown += 1
