"""Title data model and manifest-bundle I/O.

A title is a directory of JSON/JSONL manifests: title.json (header),
shots.jsonl, scenes.jsonl, transcript.jsonl, laughter.json,
audio_tags.jsonl, curator.jsonl. Everything except the header and
shots is optional. load_title is the reference validator for the
bundle format; save_title writes bundles that round-trip byte-stably.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1
TEXT_DIM = 768
# Tolerance for shot timeline gaps/overlaps, in seconds.
TIME_EPS = 1e-6


class ManifestError(ValueError):
    """A manifest failed to parse or violated a bundle invariant."""

    def __init__(self, message: str, *, path: str | Path | None = None,
                 line: int | None = None, where: str | None = None):
        parts = []
        if path is not None:
            parts.append(str(path))
        if line is not None:
            parts.append(f"line {line}")
        if where is not None:
            parts.append(where)
        prefix = ": ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.path = None if path is None else str(path)
        self.line = line
        self.where = where


@dataclass(frozen=True)
class ShotRecord:
    shot_id: int
    start_s: float
    end_s: float
    visual_feat: np.ndarray          # (d_vis,) float64
    text_feat: np.ndarray | None     # (768,) float64, None when absent
    caption: str | None = None


@dataclass(frozen=True)
class SceneAnnotation:
    scene_id: int
    first_shot: int
    last_shot: int                   # inclusive


@dataclass(frozen=True)
class TranscriptSentence:
    index: int
    start_s: float
    end_s: float
    text: str


@dataclass(frozen=True)
class LaughterTrack:
    hop_s: float
    probs: np.ndarray                # (n_frames,) in [0, 1]


@dataclass(frozen=True)
class AudioTagEvent:
    start_s: float
    end_s: float
    label: str
    prob: float


@dataclass(frozen=True)
class CuratorAnnotation:
    """A curator-reviewed span: a shot span, a temporal span, or both."""
    curator_score: float
    is_funny: bool
    first_shot: int | None = None
    last_shot: int | None = None
    start_s: float | None = None
    end_s: float | None = None


@dataclass
class Title:
    title_id: str
    d_vis: int
    shots: list[ShotRecord]
    gt_scenes: list[SceneAnnotation] | None = None
    transcript: list[TranscriptSentence] | None = None
    laughter: LaughterTrack | None = None
    audio_tags: list[AudioTagEvent] | None = None
    curator: list[CuratorAnnotation] | None = None
    d_text: int = TEXT_DIM

    @property
    def duration_s(self) -> float:
        return self.shots[-1].end_s if self.shots else 0.0

    def scene_span(self, scene: SceneAnnotation) -> tuple[float, float]:
        return (self.shots[scene.first_shot].start_s,
                self.shots[scene.last_shot].end_s)

    def curator_span(self, ann: CuratorAnnotation) -> tuple[float, float]:
        """Temporal span of a curator annotation, resolving shot spans."""
        if ann.start_s is not None and ann.end_s is not None:
            return (ann.start_s, ann.end_s)
        return (self.shots[ann.first_shot].start_s,
                self.shots[ann.last_shot].end_s)


def _float_list(x: np.ndarray) -> list[float]:
    return [float(v) for v in x]


def _as_feature(raw, dim: int, *, path, line, where) -> np.ndarray:
    arr = np.asarray(raw, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != dim:
        raise ManifestError(f"expected {dim}-dim vector, got shape {arr.shape}",
                            path=path, line=line, where=where)
    if not np.all(np.isfinite(arr)):
        raise ManifestError("non-finite feature value", path=path, line=line,
                            where=where)
    arr.flags.writeable = False
    return arr


def _read_jsonl(path: Path) -> list[tuple[int, dict]]:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"bad JSON ({exc.msg})", path=path,
                                    line=lineno) from exc
            if not isinstance(obj, dict):
                raise ManifestError("expected a JSON object", path=path,
                                    line=lineno)
            rows.append((lineno, obj))
    return rows


def _req(obj: dict, key: str, *, path, line):
    if key not in obj:
        raise ManifestError(f"missing field '{key}'", path=path, line=line)
    return obj[key]


def write_jsonl(path: Path, rows: list[dict]) -> None:
    """Write JSONL with fixed key order (insertion order of each dict)."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False))
            fh.write("\n")


def write_json(path: Path, obj: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(obj, ensure_ascii=False, indent=2))
        fh.write("\n")


def load_title(title_dir: str | Path) -> Title:
    """Load and validate one title bundle. Raises ManifestError."""
    d = Path(title_dir)
    header_path = d / "title.json"
    if not header_path.exists():
        raise ManifestError("title.json not found", path=d)
    try:
        header = json.loads(header_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestError(f"bad JSON ({exc.msg})", path=header_path,
                            line=exc.lineno) from exc
    version = _req(header, "schema_version", path=header_path, line=None)
    if version != SCHEMA_VERSION:
        raise ManifestError(f"unsupported schema_version {version!r}",
                            path=header_path)
    title_id = _req(header, "title_id", path=header_path, line=None)
    d_vis = int(_req(header, "d_vis", path=header_path, line=None))
    d_text = int(header.get("d_text", TEXT_DIM))
    if d_vis <= 0:
        raise ManifestError("d_vis must be positive", path=header_path)
    if d_text != TEXT_DIM:
        raise ManifestError(f"d_text must be {TEXT_DIM}, got {d_text}",
                            path=header_path)

    shots_path = d / "shots.jsonl"
    if not shots_path.exists():
        raise ManifestError("shots.jsonl not found", path=d)
    shots = []
    for lineno, obj in _read_jsonl(shots_path):
        text_raw = obj.get("text_feat")
        shots.append(ShotRecord(
            shot_id=int(_req(obj, "shot_id", path=shots_path, line=lineno)),
            start_s=float(_req(obj, "start_s", path=shots_path, line=lineno)),
            end_s=float(_req(obj, "end_s", path=shots_path, line=lineno)),
            visual_feat=_as_feature(
                _req(obj, "visual_feat", path=shots_path, line=lineno),
                d_vis, path=shots_path, line=lineno, where="visual_feat"),
            text_feat=None if text_raw is None else _as_feature(
                text_raw, d_text, path=shots_path, line=lineno,
                where="text_feat"),
            caption=obj.get("caption"),
        ))

    gt_scenes = None
    scenes_path = d / "scenes.jsonl"
    if scenes_path.exists():
        gt_scenes = [SceneAnnotation(
            scene_id=int(_req(o, "scene_id", path=scenes_path, line=ln)),
            first_shot=int(_req(o, "first_shot", path=scenes_path, line=ln)),
            last_shot=int(_req(o, "last_shot", path=scenes_path, line=ln)),
        ) for ln, o in _read_jsonl(scenes_path)]

    transcript = None
    tr_path = d / "transcript.jsonl"
    if tr_path.exists():
        transcript = [TranscriptSentence(
            index=int(_req(o, "index", path=tr_path, line=ln)),
            start_s=float(_req(o, "start_s", path=tr_path, line=ln)),
            end_s=float(_req(o, "end_s", path=tr_path, line=ln)),
            text=str(_req(o, "text", path=tr_path, line=ln)),
        ) for ln, o in _read_jsonl(tr_path)]

    laughter = None
    la_path = d / "laughter.json"
    if la_path.exists():
        try:
            obj = json.loads(la_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ManifestError(f"bad JSON ({exc.msg})", path=la_path,
                                line=exc.lineno) from exc
        probs = np.asarray(_req(obj, "probs", path=la_path, line=None),
                           dtype=np.float64)
        probs.flags.writeable = False
        laughter = LaughterTrack(
            hop_s=float(_req(obj, "hop_s", path=la_path, line=None)),
            probs=probs)

    audio_tags = None
    at_path = d / "audio_tags.jsonl"
    if at_path.exists():
        audio_tags = [AudioTagEvent(
            start_s=float(_req(o, "start_s", path=at_path, line=ln)),
            end_s=float(_req(o, "end_s", path=at_path, line=ln)),
            label=str(_req(o, "label", path=at_path, line=ln)),
            prob=float(_req(o, "prob", path=at_path, line=ln)),
        ) for ln, o in _read_jsonl(at_path)]

    curator = None
    cu_path = d / "curator.jsonl"
    if cu_path.exists():
        curator = []
        for ln, o in _read_jsonl(cu_path):
            curator.append(CuratorAnnotation(
                curator_score=float(_req(o, "curator_score", path=cu_path,
                                         line=ln)),
                is_funny=bool(_req(o, "is_funny", path=cu_path, line=ln)),
                first_shot=None if o.get("first_shot") is None
                else int(o["first_shot"]),
                last_shot=None if o.get("last_shot") is None
                else int(o["last_shot"]),
                start_s=None if o.get("start_s") is None
                else float(o["start_s"]),
                end_s=None if o.get("end_s") is None else float(o["end_s"]),
            ))

    title = Title(title_id=str(title_id), d_vis=d_vis, shots=shots,
                  gt_scenes=gt_scenes, transcript=transcript,
                  laughter=laughter, audio_tags=audio_tags, curator=curator,
                  d_text=d_text)
    validate_title(title, path=d)
    return title


def validate_title(title: Title, path: str | Path | None = None) -> None:
    """Check all cross-record invariants. Raises ManifestError."""
    shots = title.shots
    if not shots:
        raise ManifestError("title has no shots", path=path)
    n = len(shots)
    for i, s in enumerate(shots):
        if s.shot_id != i:
            raise ManifestError(
                f"shot_id {s.shot_id} at position {i}: ids must be "
                "contiguous from 0", path=path, where=f"shots[{i}]")
        if not (math.isfinite(s.start_s) and math.isfinite(s.end_s)):
            raise ManifestError("non-finite shot times", path=path,
                                where=f"shots[{i}]")
        if not s.start_s < s.end_s:
            raise ManifestError(
                f"start_s {s.start_s} must be < end_s {s.end_s}",
                path=path, where=f"shots[{i}]")
        if i > 0:
            if not shots[i - 1].start_s < s.start_s:
                raise ManifestError("shots must be strictly ordered by "
                                    "start_s", path=path, where=f"shots[{i}]")
            if s.start_s < shots[i - 1].end_s - TIME_EPS:
                raise ManifestError("shot overlaps previous shot", path=path,
                                    where=f"shots[{i}]")
        if s.visual_feat.shape != (title.d_vis,):
            raise ManifestError(
                f"visual_feat has shape {s.visual_feat.shape}, expected "
                f"({title.d_vis},)", path=path, where=f"shots[{i}]")
        if s.text_feat is not None and s.text_feat.shape != (title.d_text,):
            raise ManifestError(
                f"text_feat has shape {s.text_feat.shape}, expected "
                f"({title.d_text},)", path=path, where=f"shots[{i}]")

    if title.gt_scenes is not None:
        scenes = title.gt_scenes
        if not scenes:
            raise ManifestError("scenes.jsonl present but empty", path=path)
        expect_first = 0
        for j, sc in enumerate(scenes):
            where = f"scenes[scene_id={sc.scene_id}]"
            if sc.scene_id != j:
                raise ManifestError(
                    f"scene_id {sc.scene_id} at position {j}: ids must be "
                    "contiguous from 0", path=path, where=where)
            if sc.first_shot != expect_first:
                raise ManifestError(
                    f"first_shot {sc.first_shot} leaves a gap or overlap "
                    f"(expected {expect_first})", path=path, where=where)
            if sc.last_shot < sc.first_shot:
                raise ManifestError("scene spans no shots", path=path,
                                    where=where)
            if sc.last_shot >= n:
                raise ManifestError(f"last_shot {sc.last_shot} out of range",
                                    path=path, where=where)
            expect_first = sc.last_shot + 1
        if expect_first != n:
            raise ManifestError(
                f"scenes cover shots up to {expect_first - 1}, title has {n}",
                path=path, where="scenes")

    if title.transcript is not None:
        prev_start = None
        for k, sent in enumerate(title.transcript):
            where = f"transcript[{k}]"
            if sent.index != k:
                raise ManifestError("sentence indices must be contiguous "
                                    "from 0", path=path, where=where)
            if sent.end_s < sent.start_s:
                raise ManifestError("sentence end_s before start_s",
                                    path=path, where=where)
            if prev_start is not None and sent.start_s < prev_start:
                raise ManifestError("sentence start_s must be nondecreasing",
                                    path=path, where=where)
            prev_start = sent.start_s

    if title.laughter is not None:
        track = title.laughter
        if not track.hop_s > 0:
            raise ManifestError("laughter hop_s must be positive", path=path,
                                where="laughter")
        p = track.probs
        if p.ndim != 1 or not np.all(np.isfinite(p)) or np.any(p < 0) \
                or np.any(p > 1):
            raise ManifestError("laughter probs must be finite in [0, 1]",
                                path=path, where="laughter")

    if title.audio_tags is not None:
        for k, ev in enumerate(title.audio_tags):
            where = f"audio_tags[{k}]"
            if not ev.start_s < ev.end_s:
                raise ManifestError("event start_s must be < end_s",
                                    path=path, where=where)
            if not (0.0 <= ev.prob <= 1.0):
                raise ManifestError("event prob must be in [0, 1]",
                                    path=path, where=where)

    if title.curator is not None:
        for k, ann in enumerate(title.curator):
            where = f"curator[{k}]"
            has_shot_span = ann.first_shot is not None \
                and ann.last_shot is not None
            has_time_span = ann.start_s is not None and ann.end_s is not None
            if not (has_shot_span or has_time_span):
                raise ManifestError("annotation needs a shot span or a "
                                    "temporal span", path=path, where=where)
            if has_shot_span:
                if not (0 <= ann.first_shot <= ann.last_shot < n):
                    raise ManifestError("shot span out of range", path=path,
                                        where=where)
            if has_time_span and not ann.start_s < ann.end_s:
                raise ManifestError("temporal span start must be < end",
                                    path=path, where=where)
            if not (math.isfinite(ann.curator_score)
                    and ann.curator_score >= 0):
                raise ManifestError("curator_score must be finite and >= 0",
                                    path=path, where=where)


def save_title(title: Title, title_dir: str | Path) -> Path:
    """Write a validated title bundle; floats as shortest round-trip text."""
    validate_title(title)
    d = Path(title_dir)
    d.mkdir(parents=True, exist_ok=True)

    write_json(d / "title.json", {
        "schema_version": SCHEMA_VERSION,
        "title_id": title.title_id,
        "d_vis": title.d_vis,
        "d_text": title.d_text,
    })

    write_jsonl(d / "shots.jsonl", [{
        "shot_id": s.shot_id,
        "start_s": s.start_s,
        "end_s": s.end_s,
        "visual_feat": _float_list(s.visual_feat),
        "text_feat": None if s.text_feat is None else _float_list(s.text_feat),
        "caption": s.caption,
    } for s in title.shots])

    if title.gt_scenes is not None:
        write_jsonl(d / "scenes.jsonl", [{
            "scene_id": sc.scene_id,
            "first_shot": sc.first_shot,
            "last_shot": sc.last_shot,
        } for sc in title.gt_scenes])

    if title.transcript is not None:
        write_jsonl(d / "transcript.jsonl", [{
            "index": t.index,
            "start_s": t.start_s,
            "end_s": t.end_s,
            "text": t.text,
        } for t in title.transcript])

    if title.laughter is not None:
        write_json(d / "laughter.json", {
            "hop_s": title.laughter.hop_s,
            "probs": _float_list(title.laughter.probs),
        })

    if title.audio_tags is not None:
        write_jsonl(d / "audio_tags.jsonl", [{
            "start_s": ev.start_s,
            "end_s": ev.end_s,
            "label": ev.label,
            "prob": ev.prob,
        } for ev in title.audio_tags])

    if title.curator is not None:
        write_jsonl(d / "curator.jsonl", [{
            "curator_score": a.curator_score,
            "is_funny": a.is_funny,
            "first_shot": a.first_shot,
            "last_shot": a.last_shot,
            "start_s": a.start_s,
            "end_s": a.end_s,
        } for a in title.curator])
    return d


def fuse_features(visual: np.ndarray, text: np.ndarray | None,
                  d_vis: int = 4096, d_text: int = TEXT_DIM) -> np.ndarray:
    """Concatenate visual and text features; missing text becomes zeros.

    Accepts a single vector or a matrix of row vectors. The fused width
    is always d_vis + d_text, so downstream inputs are dimension-stable.
    """
    visual = np.asarray(visual, dtype=np.float64)
    batched = visual.ndim == 2
    if visual.shape[-1] != d_vis or visual.ndim not in (1, 2):
        raise ValueError(f"visual features must have width {d_vis}, "
                         f"got shape {visual.shape}")
    if text is None:
        text = np.zeros(visual.shape[:-1] + (d_text,), dtype=np.float64)
    else:
        text = np.asarray(text, dtype=np.float64)
    if text.shape != visual.shape[:-1] + (d_text,):
        raise ValueError(f"text features must have width {d_text} and match "
                         f"the visual batch, got shape {text.shape}")
    return np.concatenate([visual, text], axis=-1 if batched else 0)


def corpus_title_dirs(corpus_dir: str | Path) -> list[Path]:
    """Title subdirectories of a corpus root, sorted by name."""
    root = Path(corpus_dir)
    if not root.is_dir():
        raise ManifestError("corpus directory not found", path=root)
    dirs = sorted(p for p in root.iterdir()
                  if p.is_dir() and (p / "title.json").exists())
    if not dirs:
        raise ManifestError("no title bundles found", path=root)
    return dirs


def load_corpus(corpus_dir: str | Path) -> list[Title]:
    return [load_title(p) for p in corpus_title_dirs(corpus_dir)]
