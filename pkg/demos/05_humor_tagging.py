#!/usr/bin/env python3
"""Tag scenes with humor evidence, filter improper content, and rank.

Per scene the tagger extracts four features: laughter coverage (f1),
laughter burst rate (f2), transcript funniness from a pluggable scorer
(f3), and duration (f4, fed through an exponential decay so tighter
scenes win ties). A guardrail rejects scenes whose audio events hit the
deny list before any ranking happens.
"""
from laughcut.humor_text import OracleScorer
from laughcut.pipeline import PipelineConfig, curator_train_data, tag_title
from laughcut.scoring import (fit_weights_grid, normalize_features,
                              rank_scenes)
from laughcut.synth import SynthConfig, generate_title

cfg = SynthConfig(n_titles=1, scenes_per_title=(9, 9),
                  shots_per_scene=(4, 6), d_vis=32,
                  funny_scene_fraction=0.45, improper_scene_fraction=0.2,
                  seed=51)
title, truth = generate_title(cfg, 0)

pipe = PipelineConfig(seed=1)
tagged = tag_title(title, title.gt_scenes, OracleScorer(), pipe)

print("scene   f1     f2     f3     f4     verdict")
for feats, text in tagged:
    verdict = "keep" if feats.keep else "REJECT (" + ", ".join(
        f"{label} {secs:.1f}s" for label, secs in feats.reject_reasons) + ")"
    planted = ("funny" if feats.scene_id in truth.funny_scene_ids else
               "improper" if feats.scene_id in truth.improper_scene_ids
               else "plain")
    print(f"  {feats.scene_id}   {feats.f1:5.2f}  {feats.f2:5.2f}  "
          f"{feats.f3:5.2f}  {feats.f4:5.1f}s  {verdict:<28} "
          f"[planted: {planted}]")

kept = normalize_features([f for f, _ in tagged if f.keep])
train = curator_train_data(title, kept)
weights, objective = fit_weights_grid([train], step=0.25)
print(f"\nfitted weights: w1={weights.w1:.2f} w2={weights.w2:.2f} "
      f"w3={weights.w3:.2f} w4={weights.w4:.2f} "
      f"(ranking objective {objective:.2f}/6)")

print("\nfinal ranking (curator's favorites first means a good fit):")
for r in rank_scenes(kept, weights):
    print(f"  rank {r.rank}: scene {r.scene_id} "
          f"({r.start_s:.0f}-{r.end_s:.0f}s) score {r.score:.3f}")
