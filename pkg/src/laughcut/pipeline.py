"""End-to-end funny-scene extraction over a corpus of title bundles.

Stages: mine triplets, train the shot encoder, embed and fuse shot
features, train and run the boundary detector, assemble scenes, skip
the spoiler tail, tag each scene with laughter/text/guardrail
evidence, fit or load score weights, rank, and evaluate against
curator annotations. Every stage is a pure function of its inputs
and the config seed, and every artifact is written byte-stably.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import metrics
from .corpus import (SceneAnnotation, Title, corpus_title_dirs,
                     fuse_features, load_title, write_json, write_jsonl)
from .encoder import EncoderConfig, cluster_nmi, embed_shots, train_encoder
from .humor_audio import (GuardrailConfig, LaughterFeatureConfig,
                          guardrail_filter, laughter_features)
from .humor_text import (FUNNY_THRESHOLD, TextScore, make_scorer,
                         score_scene_text)
from .mining import Triplet, mine_guided, mine_heuristic
from .nnet import Network, load_matrix, load_network, save_matrix, \
    save_network
from .sbd import (SbdConfig, WindowSample, assemble_scenes, boundary_labels,
                  build_windows, predict_boundaries, train_sbd)
from .scoring import (HumorFeatures, RankedScene, ScoreWeights,
                      TitleTrainData, fit_weights_grid,
                      fit_weights_regression, normalize_features,
                      rank_scenes)

SCORER_ENV_VAR = "LAUGHCUT_SCORER"


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"stage {stage}: {message}")
        self.stage = stage


@dataclass
class PipelineConfig:
    seed: int = 0
    scorer: str = "oracle"
    mining_variant: str = "guided"
    n_triplets_per_title: int = 420
    scene_window: int = 3
    spoiler_skip_fraction: float = 0.2
    text_threshold: float = FUNNY_THRESHOLD
    n_values: tuple[int, ...] = (3, 5, 10)
    grid_step: float = 0.05
    use_text: bool = True
    weights: ScoreWeights | None = None
    fit_method: str = "grid"       # grid | linear | logistic | tree
    t_c: float = 60.0
    encoder: dict = field(default_factory=dict)   # EncoderConfig overrides
    sbd: dict = field(default_factory=dict)       # SbdConfig overrides
    guardrail: GuardrailConfig = field(default_factory=GuardrailConfig)
    laughter: LaughterFeatureConfig = field(
        default_factory=LaughterFeatureConfig)


def config_from_dict(obj: dict) -> PipelineConfig:
    data = dict(obj)
    known = set(PipelineConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "n_values" in data:
        data["n_values"] = tuple(int(n) for n in data["n_values"])
    if data.get("weights") is not None:
        data["weights"] = ScoreWeights(**data["weights"])
    if "guardrail" in data:
        g = dict(data["guardrail"])
        if "deny_labels" in g:
            g["deny_labels"] = frozenset(g["deny_labels"])
        data["guardrail"] = GuardrailConfig(**g)
    if "laughter" in data:
        data["laughter"] = LaughterFeatureConfig(**data["laughter"])
    try:
        return PipelineConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> PipelineConfig:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(obj)


def derive_seed(base: int, *key: int) -> int:
    """Stable per-stage/per-title seed derivation."""
    return int(np.random.SeedSequence(base,
                                      spawn_key=key).generate_state(1)[0])


def scorer_spec(cfg: PipelineConfig) -> str:
    """Config scorer, unless the environment overrides it."""
    return os.environ.get(SCORER_ENV_VAR, cfg.scorer)


# ---------------------------------------------------------------- mining

def mine_corpus(titles: list[Title], cfg: PipelineConfig) -> list[Triplet]:
    out = []
    for i, title in enumerate(titles):
        seed = derive_seed(cfg.seed, 10, i)
        if cfg.mining_variant == "guided":
            out.extend(mine_guided(title, cfg.n_triplets_per_title,
                                   cfg.scene_window, seed=seed))
        else:
            out.extend(mine_heuristic(cfg.mining_variant, len(title.shots),
                                      cfg.n_triplets_per_title,
                                      title_id=title.title_id, seed=seed))
    return out


# ------------------------------------------------------------- encoding

def corpus_feature_matrix(titles: list[Title]):
    """Stacked visual features, a (title_id, shot_id) -> row map, and
    globally distinct per-row scene labels."""
    rows, labels, index = [], [], {}
    offset = 0
    for t_idx, title in enumerate(titles):
        for shot in title.shots:
            index[(title.title_id, shot.shot_id)] = offset + shot.shot_id
        rows.append(np.stack([s.visual_feat for s in title.shots]))
        if title.gt_scenes is not None:
            shot_scene = np.zeros(len(title.shots), dtype=np.int64)
            for sc in title.gt_scenes:
                shot_scene[sc.first_shot:sc.last_shot + 1] = sc.scene_id
            labels.extend((t_idx * 100000 + s) for s in shot_scene)
        else:
            labels.extend(-1 for _ in title.shots)
        offset += len(title.shots)
    feats = np.vstack(rows)
    return feats, (lambda tid, sid: index[(tid, sid)]), np.array(labels)


def encoder_config(titles: list[Title], cfg: PipelineConfig) -> EncoderConfig:
    overrides = dict(cfg.encoder)
    overrides.setdefault("seed", derive_seed(cfg.seed, 20))
    try:
        return EncoderConfig(in_dim=titles[0].d_vis, **overrides)
    except TypeError as exc:
        raise ConfigError(f"encoder config: {exc}") from exc


def train_encoder_stage(titles: list[Title], triplets: list[Triplet],
                        cfg: PipelineConfig):
    feats, index_of, labels = corpus_feature_matrix(titles)
    enc_cfg = encoder_config(titles, cfg)
    scene_labels = labels if (labels >= 0).all() else None
    return train_encoder(triplets, feats, enc_cfg,
                         scene_labels=scene_labels, index_of=index_of)


def fused_title_features(title: Title, enc_net: Network,
                         cfg: PipelineConfig) -> np.ndarray:
    """Project visual features, then concatenate 768-d text (zeros when
    absent or when text is disabled)."""
    visual = np.stack([s.visual_feat for s in title.shots])
    embedded = embed_shots(enc_net, visual)
    if cfg.use_text:
        text = np.stack([
            s.text_feat if s.text_feat is not None
            else np.zeros(title.d_text) for s in title.shots])
    else:
        text = None
    return fuse_features(embedded, text, d_vis=embedded.shape[1],
                         d_text=title.d_text)


# ------------------------------------------------------------ boundaries

def sbd_config(feat_dim: int, cfg: PipelineConfig) -> SbdConfig:
    overrides = dict(cfg.sbd)
    if "hidden_dims" in overrides:
        overrides["hidden_dims"] = tuple(overrides["hidden_dims"])
    overrides.setdefault("seed", derive_seed(cfg.seed, 30))
    try:
        return SbdConfig(feat_dim=feat_dim, **overrides)
    except TypeError as exc:
        raise ConfigError(f"sbd config: {exc}") from exc


def train_sbd_stage(titles: list[Title], enc_net: Network,
                    cfg: PipelineConfig):
    windows: list[WindowSample] = []
    sb_cfg = None
    for title in titles:
        fused = fused_title_features(title, enc_net, cfg)
        if sb_cfg is None:
            sb_cfg = sbd_config(fused.shape[1], cfg)
        windows.extend(build_windows(fused, sb_cfg,
                                     labels=boundary_labels(title)))
    return train_sbd(windows, sb_cfg)


@dataclass
class DetectResult:
    embeddings: np.ndarray
    probs: np.ndarray
    flags: np.ndarray
    scenes: list[SceneAnnotation]


def detect_title(title: Title, enc_net: Network, sbd_net: Network,
                 cfg: PipelineConfig) -> DetectResult:
    visual = np.stack([s.visual_feat for s in title.shots])
    embeddings = embed_shots(enc_net, visual)
    fused = fused_title_features(title, enc_net, cfg)
    sb_cfg = sbd_config(fused.shape[1], cfg)
    windows = build_windows(fused, sb_cfg)
    probs, flags = predict_boundaries(sbd_net, windows, sb_cfg.threshold)
    return DetectResult(embeddings, probs, flags, assemble_scenes(flags))


# ---------------------------------------------------------------- humor

def spoiler_scenes(title: Title, scenes: list[SceneAnnotation],
                   skip_fraction: float) -> list[SceneAnnotation]:
    """Drop scenes starting in the final skip_fraction of the title."""
    cutoff = (1.0 - skip_fraction) * title.duration_s
    return [sc for sc in scenes if title.shots[sc.first_shot].start_s
            <= cutoff]


def tag_title(title: Title, scenes: list[SceneAnnotation], scorer,
              cfg: PipelineConfig) -> list[tuple[HumorFeatures, TextScore]]:
    """Laughter, text, duration, and guardrail evidence per scene."""
    out = []
    for sc in scenes:
        span = title.scene_span(sc)
        if title.laughter is not None:
            f1, f2 = laughter_features(title.laughter, span, cfg.laughter)
        else:
            f1, f2 = 0.0, 0.0
        sentences = [s.text for s in (title.transcript or ())
                     if span[0] <= 0.5 * (s.start_s + s.end_s) < span[1]]
        text = score_scene_text(sentences, scorer, cfg.text_threshold)
        verdict = guardrail_filter(title.audio_tags, span, cfg.guardrail)
        out.append((HumorFeatures(
            scene_id=sc.scene_id, start_s=span[0], end_s=span[1],
            f1=f1, f2=f2, f3=text.score, f4=span[1] - span[0],
            keep=verdict.keep, reject_reasons=verdict.reasons), text))
    return out


def curator_spans(title: Title) -> list[tuple[int, float, float]]:
    return [(cid, *title.curator_span(ann))
            for cid, ann in enumerate(title.curator or ())]


def curator_train_data(title: Title, candidates: list[HumorFeatures]) \
        -> TitleTrainData | None:
    """Candidates re-identified in curator space, plus curator truth.

    Candidate scenes map onto curator entries by temporal IoU; the
    ground-truth ranking is the funny entries by descending score.
    Returns None when the title has no curator annotations.
    """
    if not title.curator:
        return None
    gt = curator_spans(title)
    pred = [(c.scene_id, c.start_s, c.end_s) for c in candidates]
    mapping = metrics.match_scenes(gt, pred)
    mapped = [replace(c, scene_id=mapping[c.scene_id]) for c in candidates]
    scores, labels = [], []
    by_cid = {cid: ann for cid, ann in enumerate(title.curator)}
    for c in mapped:
        ann = by_cid.get(c.scene_id)
        scores.append(ann.curator_score if ann else 0.0)
        labels.append(bool(ann.is_funny) if ann else False)
    gt_ranked = [cid for cid, ann in sorted(
        by_cid.items(), key=lambda kv: (-kv[1].curator_score, kv[0]))
        if ann.is_funny]
    return TitleTrainData(candidates=mapped, gt_ranked=gt_ranked,
                          curator_scores=scores, curator_labels=labels)


def fit_weights_stage(train: list[TitleTrainData], cfg: PipelineConfig) \
        -> tuple[ScoreWeights, float | None]:
    usable = [t for t in train if len(t.gt_ranked) >= 3]
    if not usable:
        raise StageError("rank", "no title has a curator ranking of "
                         "length >= 3 to fit weights on")
    if cfg.fit_method == "grid":
        return fit_weights_grid(usable, step=cfg.grid_step, t_c=cfg.t_c,
                                n_values=cfg.n_values)
    return fit_weights_regression(usable, method=cfg.fit_method,
                                  t_c=cfg.t_c), None


# ------------------------------------------------------------ evaluation

def evaluate_title(title: Title, *, probs=None, embeddings=None,
                   ranking: list[RankedScene] | None = None,
                   n_candidates=None, n_rejected=None,
                   n_values=(3, 5, 10)) -> dict:
    """Per-title quality report; fields are null when inputs are absent."""
    report = {"title_id": title.title_id, "boundary_ap": None,
              "boundary_best_f1": None, "boundary_f1_threshold": None,
              "embedding_nmi": None, "eval_metric": None,
              "eval_metric_normalized": None, "ranking": None,
              "n_candidates": n_candidates, "n_rejected": n_rejected}
    if title.gt_scenes is not None and probs is not None:
        labels = np.zeros(len(title.shots), dtype=np.int64)
        for sc in title.gt_scenes:
            if sc.last_shot < len(title.shots) - 1:
                labels[sc.last_shot] = 1
        if labels.any() and not labels.all():
            report["boundary_ap"] = metrics.average_precision(probs, labels)
            f1, thresh = metrics.best_f1(probs, labels)
            report["boundary_best_f1"] = f1
            report["boundary_f1_threshold"] = thresh
    if title.gt_scenes is not None and embeddings is not None:
        shot_scene = np.zeros(len(title.shots), dtype=np.int64)
        for sc in title.gt_scenes:
            shot_scene[sc.first_shot:sc.last_shot + 1] = sc.scene_id
        report["embedding_nmi"] = cluster_nmi(embeddings, shot_scene)
    if title.curator and ranking is not None:
        gt = curator_spans(title)
        pred = [(r.scene_id, r.start_s, r.end_s) for r in ranking]
        mapping = metrics.match_scenes(gt, pred)
        predicted = [mapping[r.scene_id] for r in ranking]
        gt_ranked = [cid for cid, ann in sorted(
            enumerate(title.curator),
            key=lambda kv: (-kv[1].curator_score, kv[0])) if ann.is_funny]
        rep = metrics.eval_metric_report(gt_ranked, predicted, n_values)
        report["ranking"] = rep["per_n"]
        report["eval_metric"] = rep["eval_metric"]
        report["eval_metric_normalized"] = rep["eval_metric_normalized"]
    return report


def corpus_report(title_reports: list[dict]) -> dict:
    def mean_of(key):
        vals = [r[key] for r in title_reports if r.get(key) is not None]
        return float(np.mean(vals)) if vals else None
    return {
        "n_titles": len(title_reports),
        "mean_boundary_ap": mean_of("boundary_ap"),
        "mean_boundary_best_f1": mean_of("boundary_best_f1"),
        "mean_embedding_nmi": mean_of("embedding_nmi"),
        "mean_eval_metric": mean_of("eval_metric"),
        "mean_eval_metric_normalized": mean_of("eval_metric_normalized"),
        "titles": [r["title_id"] for r in title_reports],
    }


# ------------------------------------------------------------- artifacts

def write_boundaries(path: Path, probs, flags) -> None:
    write_jsonl(path, [{"shot_id": i, "prob": float(p),
                        "is_boundary": bool(f)}
                       for i, (p, f) in enumerate(zip(probs, flags))])


def read_boundaries(path: Path) -> tuple[np.ndarray, np.ndarray]:
    rows = [json.loads(line) for line in
            Path(path).read_text(encoding="utf-8").splitlines() if line]
    probs = np.array([r["prob"] for r in rows])
    flags = np.array([r["is_boundary"] for r in rows], dtype=bool)
    return probs, flags


def write_scenes(path: Path, title: Title,
                 scenes: list[SceneAnnotation]) -> None:
    write_jsonl(path, [{
        "scene_id": sc.scene_id, "first_shot": sc.first_shot,
        "last_shot": sc.last_shot,
        "start_s": title.shots[sc.first_shot].start_s,
        "end_s": title.shots[sc.last_shot].end_s} for sc in scenes])


def read_scenes(path: Path) -> list[SceneAnnotation]:
    rows = [json.loads(line) for line in
            Path(path).read_text(encoding="utf-8").splitlines() if line]
    return [SceneAnnotation(r["scene_id"], r["first_shot"], r["last_shot"])
            for r in rows]


def write_humor_tags(path: Path,
                     tagged: list[tuple[HumorFeatures, TextScore]]) -> None:
    write_jsonl(path, [{
        "scene_id": f.scene_id, "start_s": f.start_s, "end_s": f.end_s,
        "f1": f.f1, "f2": f.f2, "f3": f.f3, "f4": f.f4,
        "keep": f.keep,
        "reject_reasons": [[label, dur] for label, dur in f.reject_reasons],
        "is_funny_text": t.is_funny,
        "chunk_scores": list(t.chunk_scores)} for f, t in tagged])


def read_humor_tags(path: Path) -> list[HumorFeatures]:
    rows = [json.loads(line) for line in
            Path(path).read_text(encoding="utf-8").splitlines() if line]
    return [HumorFeatures(
        scene_id=r["scene_id"], start_s=r["start_s"], end_s=r["end_s"],
        f1=r["f1"], f2=r["f2"], f3=r["f3"], f4=r["f4"], keep=r["keep"],
        reject_reasons=tuple((lab, dur) for lab, dur in r["reject_reasons"]))
        for r in rows]


def write_ranking(path: Path, ranking: list[RankedScene]) -> None:
    write_jsonl(path, [{
        "rank": r.rank, "scene_id": r.scene_id, "score": r.score,
        "start_s": r.start_s, "end_s": r.end_s} for r in ranking])


def read_ranking(path: Path) -> list[RankedScene]:
    rows = [json.loads(line) for line in
            Path(path).read_text(encoding="utf-8").splitlines() if line]
    return [RankedScene(r["rank"], r["scene_id"], r["score"], r["start_s"],
                        r["end_s"]) for r in rows]


def write_weights(path: Path, weights: ScoreWeights, method: str,
                  objective: float | None) -> None:
    write_json(path, {**weights.as_dict(), "method": method,
                      "objective": objective})


def read_weights(path: Path) -> ScoreWeights:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    return ScoreWeights(w1=obj["w1"], w2=obj["w2"], w3=obj["w3"],
                        w4=obj["w4"], t_c=obj.get("t_c", 60.0))


# ----------------------------------------------------------------- runner

def _fail_marker(out_dir: Path, stage: str, error: Exception) -> None:
    try:
        write_json(out_dir / "FAILED.json",
                   {"stage": stage, "error": str(error)})
    except OSError:
        pass


def run_all(corpus_dir: str | Path, out_dir: str | Path,
            cfg: PipelineConfig) -> dict:
    """Run every stage over the corpus, writing artifacts under out_dir.

    Returns the corpus-level report. Any stage failure writes a
    FAILED.json marker beside the partial artifacts and re-raises as
    StageError.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    marker = out / "FAILED.json"
    if marker.exists():
        marker.unlink()
    stage = "load-corpus"
    scorer = None
    try:
        titles = [load_title(p) for p in corpus_title_dirs(corpus_dir)]

        stage = "mine"
        triplets = mine_corpus(titles, cfg)
        from .mining import save_triplets
        save_triplets(triplets, out / "triplets.jsonl")

        stage = "train-encoder"
        enc_net, enc_history = train_encoder_stage(titles, triplets, cfg)
        save_network(enc_net, out / "encoder.ckpt")

        stage = "train-sbd"
        sbd_net, sbd_history = train_sbd_stage(titles, enc_net, cfg)
        save_network(sbd_net, out / "sbd.ckpt")
        write_json(out / "training_history.json",
                   {"encoder_loss": enc_history, "sbd_loss": sbd_history})

        stage = "detect-scenes"
        detections = {}
        for title in titles:
            det = detect_title(title, enc_net, sbd_net, cfg)
            tdir = out / "titles" / title.title_id
            tdir.mkdir(parents=True, exist_ok=True)
            save_matrix(det.embeddings, tdir / "embeddings.bin")
            write_boundaries(tdir / "boundaries.jsonl", det.probs, det.flags)
            write_scenes(tdir / "pred_scenes.jsonl", title, det.scenes)
            detections[title.title_id] = det

        stage = "tag-humor"
        scorer = make_scorer(scorer_spec(cfg))
        tags = {}
        for title in titles:
            kept = spoiler_scenes(title, detections[title.title_id].scenes,
                                  cfg.spoiler_skip_fraction)
            tagged = tag_title(title, kept, scorer, cfg)
            write_humor_tags(out / "titles" / title.title_id
                             / "humor_tags.jsonl", tagged)
            tags[title.title_id] = [f for f, _ in tagged]

        stage = "rank"
        candidates = {tid: normalize_features([f for f in fs if f.keep])
                      for tid, fs in tags.items()}
        if cfg.weights is not None:
            weights, objective = cfg.weights, None
        else:
            train = [d for d in (curator_train_data(t, candidates[t.title_id])
                                 for t in titles) if d is not None]
            weights, objective = fit_weights_stage(train, cfg)
        write_weights(out / "weights.json", weights,
                      "fixed" if cfg.weights is not None else cfg.fit_method,
                      objective)
        rankings = {}
        for title in titles:
            ranking = rank_scenes(candidates[title.title_id], weights)
            write_ranking(out / "titles" / title.title_id / "ranking.jsonl",
                          ranking)
            rankings[title.title_id] = ranking

        stage = "evaluate"
        reports = []
        for title in titles:
            det = detections[title.title_id]
            report = evaluate_title(
                title, probs=det.probs, embeddings=det.embeddings,
                ranking=rankings[title.title_id],
                n_candidates=len(candidates[title.title_id]),
                n_rejected=sum(1 for f in tags[title.title_id]
                               if not f.keep),
                n_values=cfg.n_values)
            write_json(out / "titles" / title.title_id / "eval_report.json",
                       report)
            reports.append(report)
        summary = corpus_report(reports)
        write_json(out / "eval_report.json", summary)
        return summary
    except Exception as exc:
        _fail_marker(out, stage, exc)
        raise StageError(stage, str(exc)) from exc
    finally:
        if scorer is not None:
            scorer.close()
