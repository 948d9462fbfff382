#!/usr/bin/env python3
"""Detect scene boundaries with the sliding-window classifier.

Each shot's fused feature (projected visual embedding + raw text vector)
is stacked with its neighbors into a window; the classifier predicts
whether the center shot ends a scene. Flags are then assembled back into
contiguous scenes. The strip chart prints predicted boundary probability
against the true partition for one title.
"""
import numpy as np

from laughcut.metrics import average_precision, best_f1
from laughcut.pipeline import (PipelineConfig, detect_title, mine_corpus,
                               train_encoder_stage, train_sbd_stage)
from laughcut.sbd import boundary_labels
from laughcut.synth import SynthConfig, generate_title

cfg = SynthConfig(n_titles=3, scenes_per_title=(8, 10),
                  shots_per_scene=(4, 6), d_vis=64,
                  within_scene_sigma=0.2, centroid_separation=1.5,
                  seed=41)
titles = [generate_title(cfg, i)[0] for i in range(cfg.n_titles)]
pipe = PipelineConfig(
    seed=2,
    encoder={"hidden_dim": 128, "bottleneck_dim": 32, "out_dim": 64,
             "epochs": 8, "batch_size": 64, "lr": 1e-3},
    sbd={"hidden_dims": [64, 32, 16], "dropout_p": 0.1, "epochs": 25,
         "batch_size": 64, "lr": 1e-3})

triplets = mine_corpus(titles, pipe)
encoder, _ = train_encoder_stage(titles, triplets, pipe)
sbd, history = train_sbd_stage(titles, encoder, pipe)
print(f"trained boundary head, loss {history[0]:.3f} -> {history[-1]:.3f}")

aps, f1s = [], []
for t in titles:
    det = detect_title(t, encoder, sbd, pipe)
    labels = boundary_labels(t)
    aps.append(average_precision(det.probs, labels))
    f1s.append(best_f1(det.probs, labels)[0])
print(f"boundary AP  per title: {['%.3f' % a for a in aps]}")
print(f"best F1      per title: {['%.3f' % f for f in f1s]}\n")

title = titles[0]
det = detect_title(title, encoder, sbd, pipe)
truth = boundary_labels(title)
print(f"{title.title_id} strip chart (# = p(boundary), | = true cut):")
for i, p in enumerate(det.probs):
    bar = "#" * int(round(p * 30))
    mark = "|" if truth[i] else " "
    flag = "cut" if det.flags[i] else ""
    print(f"  shot {i:2d} {mark} {p:.2f} {bar:<30} {flag}")

pred = [(sc.first_shot, sc.last_shot) for sc in det.scenes]
true = [(sc.first_shot, sc.last_shot) for sc in title.gt_scenes]
print(f"\nassembled scenes: {pred}")
print(f"true scenes:      {true}")
print("exact match" if pred == true else "partitions differ")
