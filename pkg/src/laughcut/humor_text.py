"""Text-side humor scoring: sentence sampling, chunking, scorers.

Long transcripts are cut into 10-sentence chunks; a scorer maps each
chunk to a humor probability in [0, 1]; the scene score is the mean
over chunks and the funny flag is a strict > threshold test (0.56 by
default). Training-time sampling keeps the first two sentences for
context and the last two for the punchline, plus six stratified picks
from the middle. External scorers speak line-delimited JSON over a
child process's stdin/stdout.
"""

from __future__ import annotations

import json
import os
import shlex
import subprocess
from dataclasses import dataclass
from pathlib import Path

import numpy as np

CHUNK_SENTENCES = 10
# Chunk remainders shorter than this merge into the previous chunk.
MIN_TAIL_SENTENCES = 3
FUNNY_THRESHOLD = 0.56


class ScorerError(RuntimeError):
    pass


@dataclass(frozen=True)
class SampledInput:
    indices: tuple[int, ...]
    sentences: tuple[str, ...]


@dataclass(frozen=True)
class TextScore:
    score: float
    is_funny: bool
    chunk_scores: tuple[float, ...]


def sample_train_sentences(sentences: list[str], seed: int = 0) \
        -> SampledInput:
    """Pick at most 10 sentences: indices {0, 1, S-2, S-1} plus one
    uniform draw from each of six contiguous strata of [2, S-3]."""
    s = len(sentences)
    if s <= CHUNK_SENTENCES:
        idx = tuple(range(s))
        return SampledInput(idx, tuple(sentences))
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    middle = np.arange(2, s - 2)
    picks = [int(rng.choice(stratum))
             for stratum in np.array_split(middle, 6)]
    idx = tuple([0, 1] + picks + [s - 2, s - 1])
    return SampledInput(idx, tuple(sentences[i] for i in idx))


def segment_subtexts(sentences: list[str]) -> list[list[str]]:
    """Split into 10-sentence chunks; a tail shorter than 3 sentences
    merges into the previous chunk. Concatenation is lossless."""
    s = len(sentences)
    if s == 0:
        return []
    chunks = [list(sentences[i:i + CHUNK_SENTENCES])
              for i in range(0, s, CHUNK_SENTENCES)]
    if len(chunks) > 1 and len(chunks[-1]) < MIN_TAIL_SENTENCES:
        tail = chunks.pop()
        chunks[-1].extend(tail)
    return chunks


class OracleScorer:
    """1.0 iff any sentence of the chunk contains a marker token."""

    def __init__(self, markers=None):
        if markers is None:
            from .synth import MARKER_WORDS
            markers = MARKER_WORDS
        self.markers = frozenset(w.lower() for w in markers)

    def score_chunk(self, sentences: list[str]) -> float:
        for sent in sentences:
            if self.markers & set(sent.lower().split()):
                return 1.0
        return 0.0

    def close(self) -> None:
        pass


class LexiconScorer:
    """Fraction of the chunk's sentences containing a lexicon token."""

    def __init__(self, words):
        self.words = frozenset(w.lower() for w in words)
        if not self.words:
            raise ScorerError("empty lexicon")

    def score_chunk(self, sentences: list[str]) -> float:
        if not sentences:
            return 0.0
        hits = sum(1 for sent in sentences
                   if self.words & set(sent.lower().split()))
        return hits / len(sentences)

    def close(self) -> None:
        pass


def load_lexicon(path: str | Path) -> list[str]:
    """One marker word per line; blank lines ignored."""
    words = [line.strip() for line in
             Path(path).read_text(encoding="utf-8").splitlines()]
    return [w for w in words if w]


class ExternalScorer:
    """Line-delimited JSON client for a child-process scorer.

    Each request is one line {"id": int, "sentences": [str, ...]};
    the child answers, in order, one line {"id": same, "score": x}
    with x in [0, 1].
    """

    def __init__(self, command: list[str] | str, timeout_s: float = 30.0):
        self.command = shlex.split(command) if isinstance(command, str) \
            else list(command)
        self.timeout_s = timeout_s
        self._proc = None
        self._buf = b""
        self._next_id = 0

    def _ensure_running(self):
        if self._proc is not None and self._proc.poll() is None:
            return
        try:
            self._proc = subprocess.Popen(
                self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE)
        except OSError as exc:
            raise ScorerError(f"cannot start scorer {self.command}: "
                              f"{exc}") from exc
        self._buf = b""

    def _read_line(self) -> bytes:
        import select
        fd = self._proc.stdout.fileno()
        while b"\n" not in self._buf:
            ready, _, _ = select.select([fd], [], [], self.timeout_s)
            if not ready:
                raise ScorerError(
                    f"scorer timed out after {self.timeout_s}s")
            chunk = os.read(fd, 65536)
            if not chunk:
                raise ScorerError("scorer closed its stdout")
            self._buf += chunk
        line, self._buf = self._buf.split(b"\n", 1)
        return line

    def score_chunk(self, sentences: list[str]) -> float:
        self._ensure_running()
        req_id = self._next_id
        self._next_id += 1
        request = json.dumps({"id": req_id, "sentences": list(sentences)},
                             ensure_ascii=False)
        try:
            self._proc.stdin.write(request.encode("utf-8") + b"\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ScorerError(f"scorer pipe failed: {exc}") from exc
        line = self._read_line()
        try:
            response = json.loads(line.decode("utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ScorerError(f"bad scorer response: {exc}") from exc
        if not isinstance(response, dict) or response.get("id") != req_id:
            raise ScorerError(
                f"scorer answered id {response.get('id')!r}, "
                f"expected {req_id}")
        score = response.get("score")
        if not isinstance(score, (int, float)) or not 0.0 <= score <= 1.0:
            raise ScorerError(f"scorer returned score {score!r}, "
                              "expected a number in [0, 1]")
        return float(score)

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()
        self._proc = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def make_scorer(spec: str):
    """Scorer factory: "oracle", "lexicon:<path>", "external:<cmd>"."""
    if spec == "oracle":
        return OracleScorer()
    if spec.startswith("lexicon:"):
        return LexiconScorer(load_lexicon(spec[len("lexicon:"):]))
    if spec.startswith("external:"):
        return ExternalScorer(spec[len("external:"):])
    raise ScorerError(f"unknown scorer spec {spec!r}")


def score_scene_text(sentences: list[str], scorer,
                     threshold: float = FUNNY_THRESHOLD) -> TextScore:
    """Mean chunk score with a strict > threshold funny flag.

    A scene with no sentences scores 0.0 and is never funny. Scorer
    failures are re-raised with the offending chunk index.
    """
    if not sentences:
        return TextScore(0.0, False, ())
    chunks = segment_subtexts(sentences)
    scores = []
    for i, chunk in enumerate(chunks):
        try:
            value = float(scorer.score_chunk(chunk))
        except ScorerError as exc:
            raise ScorerError(f"chunk {i}: {exc}") from exc
        if not 0.0 <= value <= 1.0 or not np.isfinite(value):
            raise ScorerError(f"chunk {i}: score {value!r} outside [0, 1]")
        scores.append(value)
    mean = float(np.mean(scores))
    return TextScore(mean, mean > threshold, tuple(scores))


def serve(scorer, stdin=None, stdout=None) -> None:
    """Answer the line-delimited JSON protocol until stdin closes.

    Reference server half of the ExternalScorer protocol; malformed
    requests produce an error response and the loop continues.
    """
    import sys
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    for raw in stdin:
        raw = raw.strip()
        if not raw:
            continue
        try:
            req = json.loads(raw)
            score = float(scorer.score_chunk(list(req["sentences"])))
            reply = {"id": req["id"], "score": score}
        except Exception as exc:  # protocol: answer, never die mid-stream
            reply = {"id": None, "error": str(exc)}
        stdout.write(json.dumps(reply, ensure_ascii=False) + "\n")
        stdout.flush()
