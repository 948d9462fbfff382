"""Command-line interface over the pipeline stages.

Subcommands mirror the stage order: synth, mine, train-encoder,
train-sbd, detect-scenes, tag-humor, rank, evaluate, run-all, plus
validate for bundle checking. Exit codes: 0 success, 1 input or
config validation failure, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import pipeline as pl
from .corpus import ManifestError, corpus_title_dirs, load_title
from .humor_text import ScorerError, make_scorer
from .mining import MiningError, load_triplets, save_triplets
from .nnet import load_matrix, load_network, save_matrix, save_network
from .pipeline import ConfigError, PipelineConfig, StageError
from .synth import SynthConfig, generate_corpus, synth_config_from_dict


def _pipeline_config(args) -> PipelineConfig:
    cfg = pl.load_config(args.config) if args.config else PipelineConfig()
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    return cfg


def _load_titles(corpus_dir):
    return [load_title(p) for p in corpus_title_dirs(corpus_dir)]


def cmd_synth(args) -> int:
    if args.config:
        obj = json.loads(Path(args.config).read_text(encoding="utf-8"))
        cfg = synth_config_from_dict(obj)
    else:
        cfg = SynthConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.titles is not None:
        cfg.n_titles = args.titles
    generate_corpus(cfg, args.out)
    print(f"wrote {cfg.n_titles} titles to {args.out}")
    return 0


def cmd_validate(args) -> int:
    titles = _load_titles(args.corpus)
    for t in titles:
        print(f"{t.title_id}: {len(t.shots)} shots ok")
    return 0


def cmd_mine(args) -> int:
    cfg = _pipeline_config(args)
    if args.variant:
        cfg.mining_variant = args.variant
    if args.n_per_title is not None:
        cfg.n_triplets_per_title = args.n_per_title
    if args.scene_window is not None:
        cfg.scene_window = args.scene_window
    titles = _load_titles(args.corpus)
    triplets = pl.mine_corpus(titles, cfg)
    save_triplets(triplets, args.out)
    print(f"mined {len(triplets)} triplets ({cfg.mining_variant}) "
          f"to {args.out}")
    return 0


def cmd_train_encoder(args) -> int:
    cfg = _pipeline_config(args)
    titles = _load_titles(args.corpus)
    triplets = load_triplets(args.triplets)
    net, history = pl.train_encoder_stage(titles, triplets, cfg)
    save_network(net, args.out)
    print(f"encoder loss {history[0]:.4f} -> {history[-1]:.4f}, "
          f"saved {args.out}")
    return 0


def cmd_train_sbd(args) -> int:
    cfg = _pipeline_config(args)
    titles = _load_titles(args.corpus)
    enc_net = load_network(args.encoder)
    net, history = pl.train_sbd_stage(titles, enc_net, cfg)
    save_network(net, args.out)
    print(f"boundary loss {history[0]:.4f} -> {history[-1]:.4f}, "
          f"saved {args.out}")
    return 0


def cmd_detect_scenes(args) -> int:
    cfg = _pipeline_config(args)
    titles = _load_titles(args.corpus)
    enc_net = load_network(args.encoder)
    sbd_net = load_network(args.sbd)
    for title in titles:
        det = pl.detect_title(title, enc_net, sbd_net, cfg)
        tdir = Path(args.out) / "titles" / title.title_id
        tdir.mkdir(parents=True, exist_ok=True)
        save_matrix(det.embeddings, tdir / "embeddings.bin")
        pl.write_boundaries(tdir / "boundaries.jsonl", det.probs, det.flags)
        pl.write_scenes(tdir / "pred_scenes.jsonl", title, det.scenes)
        print(f"{title.title_id}: {len(det.scenes)} scenes")
    return 0


def cmd_tag_humor(args) -> int:
    cfg = _pipeline_config(args)
    if args.scorer:
        cfg.scorer = args.scorer
    titles = _load_titles(args.corpus)
    scorer = make_scorer(pl.scorer_spec(cfg))
    try:
        for title in titles:
            tdir = Path(args.artifacts) / "titles" / title.title_id
            if args.use_gt:
                if title.gt_scenes is None:
                    raise ManifestError(f"{title.title_id}: --use-gt needs "
                                        "scene annotations")
                scenes = title.gt_scenes
            else:
                scenes = pl.read_scenes(tdir / "pred_scenes.jsonl")
            kept = pl.spoiler_scenes(title, scenes,
                                     cfg.spoiler_skip_fraction)
            tagged = pl.tag_title(title, kept, scorer, cfg)
            tdir.mkdir(parents=True, exist_ok=True)
            pl.write_humor_tags(tdir / "humor_tags.jsonl", tagged)
            rejected = sum(1 for f, _ in tagged if not f.keep)
            print(f"{title.title_id}: tagged {len(tagged)} scenes, "
                  f"{rejected} rejected")
    finally:
        scorer.close()
    return 0


def cmd_rank(args) -> int:
    cfg = _pipeline_config(args)
    if args.fit:
        cfg.fit_method = args.fit
    titles = _load_titles(args.corpus)
    root = Path(args.artifacts)
    candidates = {}
    for title in titles:
        tags = pl.read_humor_tags(root / "titles" / title.title_id
                                  / "humor_tags.jsonl")
        candidates[title.title_id] = pl.normalize_features(
            [f for f in tags if f.keep])
    if args.weights:
        weights, objective, method = pl.read_weights(args.weights), None, \
            "fixed"
    else:
        train = [d for d in (pl.curator_train_data(t,
                                                   candidates[t.title_id])
                             for t in titles) if d is not None]
        weights, objective = pl.fit_weights_stage(train, cfg)
        method = cfg.fit_method
    pl.write_weights(root / "weights.json", weights, method, objective)
    for title in titles:
        ranking = pl.rank_scenes(candidates[title.title_id], weights)
        pl.write_ranking(root / "titles" / title.title_id / "ranking.jsonl",
                         ranking)
        top = ranking[0].scene_id if ranking else None
        print(f"{title.title_id}: ranked {len(ranking)} scenes, "
              f"top scene {top}")
    return 0


def cmd_evaluate(args) -> int:
    cfg = _pipeline_config(args)
    titles = _load_titles(args.corpus)
    root = Path(args.artifacts)
    reports = []
    for title in titles:
        tdir = root / "titles" / title.title_id
        probs = None
        if (tdir / "boundaries.jsonl").exists():
            probs, _ = pl.read_boundaries(tdir / "boundaries.jsonl")
        embeddings = load_matrix(tdir / "embeddings.bin") \
            if (tdir / "embeddings.bin").exists() else None
        ranking = pl.read_ranking(tdir / "ranking.jsonl") \
            if (tdir / "ranking.jsonl").exists() else None
        n_candidates = n_rejected = None
        if (tdir / "humor_tags.jsonl").exists():
            tags = pl.read_humor_tags(tdir / "humor_tags.jsonl")
            n_candidates = sum(1 for f in tags if f.keep)
            n_rejected = sum(1 for f in tags if not f.keep)
        report = pl.evaluate_title(
            title, probs=probs, embeddings=embeddings, ranking=ranking,
            n_candidates=n_candidates, n_rejected=n_rejected,
            n_values=cfg.n_values)
        if tdir.is_dir():
            pl.write_json(tdir / "eval_report.json", report)
        reports.append(report)
    summary = pl.corpus_report(reports)
    pl.write_json(root / "eval_report.json", summary)
    metric = summary["mean_eval_metric"]
    print(f"mean eval_metric: "
          f"{'n/a' if metric is None else format(metric, '.4f')}")
    return 0


def cmd_run_all(args) -> int:
    cfg = _pipeline_config(args)
    summary = pl.run_all(args.corpus, args.out, cfg)
    metric = summary["mean_eval_metric"]
    print(f"run complete: {summary['n_titles']} titles, mean eval_metric "
          f"{'n/a' if metric is None else format(metric, '.4f')}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="laughcut",
        description="Funny-scene extraction pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, corpus=True):
        if corpus:
            p.add_argument("--corpus", required=True,
                           help="corpus directory of title bundles")
        p.add_argument("--config", help="pipeline config JSON")
        p.add_argument("--seed", type=int, help="override the config seed")

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="synth config JSON")
    p.add_argument("--seed", type=int)
    p.add_argument("--titles", type=int, help="override n_titles")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("validate", help="validate every bundle in a corpus")
    p.add_argument("--corpus", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("mine", help="mine training triplets")
    common(p)
    p.add_argument("--out", required=True)
    p.add_argument("--variant", choices=["guided", "V1", "V2", "V3"])
    p.add_argument("--n-per-title", type=int)
    p.add_argument("--scene-window", type=int)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("train-encoder", help="train the shot encoder")
    common(p)
    p.add_argument("--triplets", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_encoder)

    p = sub.add_parser("train-sbd", help="train the boundary detector")
    common(p)
    p.add_argument("--encoder", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_sbd)

    p = sub.add_parser("detect-scenes", help="embed shots and detect "
                                             "scene boundaries")
    common(p)
    p.add_argument("--encoder", required=True)
    p.add_argument("--sbd", required=True)
    p.add_argument("--out", required=True, help="artifacts directory")
    p.set_defaults(func=cmd_detect_scenes)

    p = sub.add_parser("tag-humor", help="tag scenes with humor evidence")
    common(p)
    p.add_argument("--artifacts", required=True)
    p.add_argument("--scorer", help='"oracle", "lexicon:PATH" or '
                                    '"external:CMD"')
    p.add_argument("--use-gt", action="store_true",
                   help="tag annotated scenes instead of predictions")
    p.set_defaults(func=cmd_tag_humor)

    p = sub.add_parser("rank", help="fit weights and rank scenes")
    common(p)
    p.add_argument("--artifacts", required=True)
    p.add_argument("--weights", help="use fixed weights from a JSON file")
    p.add_argument("--fit", choices=["grid", "linear", "logistic", "tree"])
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("evaluate", help="score artifacts against "
                                        "annotations")
    common(p)
    p.add_argument("--artifacts", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("run-all", help="run every stage end to end")
    common(p)
    p.add_argument("--out", required=True, help="artifacts directory")
    p.set_defaults(func=cmd_run_all)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        cause = exc.__cause__
        return 1 if isinstance(cause, (ManifestError, ConfigError,
                                       MiningError, ValueError)) else 2
    except (ManifestError, ConfigError, MiningError, ScorerError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
