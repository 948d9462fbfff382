"""Audio-side humor evidence: laughter features and the content filter.

Laughter comes as a frame-level probability track; a scene span gets
an overlap-weighted mean probability (f1) and the overlap-weighted
fraction of frames at or above a trigger threshold (f2). The
guardrail rejects a span when deny-listed audio tag events that are
confident enough accumulate at least a minimum in-span duration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import AudioTagEvent, LaughterTrack

DEFAULT_DENY_LABELS = frozenset(
    {"crying", "screaming", "moaning", "grunting"})


@dataclass
class LaughterFeatureConfig:
    theta_laugh: float = 0.5       # frame prob counted as laughter in f2

    def __post_init__(self):
        if not 0.0 < self.theta_laugh < 1.0:
            raise ValueError("theta_laugh must be in (0, 1)")


@dataclass
class GuardrailConfig:
    deny_labels: frozenset[str] = DEFAULT_DENY_LABELS
    theta_deny: float = 0.3        # min event prob to count at all
    min_duration_s: float = 1.0    # total in-span seconds to reject

    def __post_init__(self):
        if not 0.0 < self.theta_deny <= 1.0:
            raise ValueError("theta_deny must be in (0, 1]")
        if self.min_duration_s < 0.0:
            raise ValueError("min_duration_s must be >= 0")


@dataclass(frozen=True)
class GuardrailVerdict:
    keep: bool
    # (label, accumulated in-span seconds) for each rejecting label.
    reasons: tuple[tuple[str, float], ...] = ()


def laughter_features(track: LaughterTrack, span: tuple[float, float],
                      cfg: LaughterFeatureConfig | None = None) \
        -> tuple[float, float]:
    """(f1, f2) for a span over the frame grid [i*hop, (i+1)*hop).

    Frames are weighted by their overlap with the span. A span that
    misses the track's domain entirely yields (0.0, 0.0).
    """
    cfg = cfg or LaughterFeatureConfig()
    start, end = span
    if not (np.isfinite(start) and np.isfinite(end)) or start >= end:
        raise ValueError(f"invalid span ({start}, {end})")
    hop = track.hop_s
    probs = np.asarray(track.probs, dtype=np.float64)
    n = probs.size
    first = max(0, int(np.floor(start / hop)))
    last = min(n, int(np.ceil(end / hop)))
    if first >= last:
        return 0.0, 0.0
    idx = np.arange(first, last)
    frame_start = idx * hop
    frame_end = frame_start + hop
    weights = np.minimum(frame_end, end) - np.maximum(frame_start, start)
    weights = np.maximum(weights, 0.0)
    total = weights.sum()
    if total <= 0.0:
        return 0.0, 0.0
    p = probs[idx]
    f1 = float(np.sum(weights * p) / total)
    f2 = float(np.sum(weights[p >= cfg.theta_laugh]) / total)
    return f1, f2


def guardrail_filter(events: list[AudioTagEvent] | None,
                     span: tuple[float, float],
                     cfg: GuardrailConfig | None = None) -> GuardrailVerdict:
    """Keep/Reject verdict for a span against deny-listed audio events.

    Per deny label, in-span durations of events with prob >= theta_deny
    accumulate; any label reaching min_duration_s rejects the span.
    """
    cfg = cfg or GuardrailConfig()
    start, end = span
    if not (np.isfinite(start) and np.isfinite(end)) or start >= end:
        raise ValueError(f"invalid span ({start}, {end})")
    per_label: dict[str, float] = {}
    for ev in events or ():
        if ev.label not in cfg.deny_labels or ev.prob < cfg.theta_deny:
            continue
        overlap = min(ev.end_s, end) - max(ev.start_s, start)
        if overlap > 0.0:
            per_label[ev.label] = per_label.get(ev.label, 0.0) + overlap
    reasons = tuple(sorted((label, dur) for label, dur in per_label.items()
                           if dur >= cfg.min_duration_s))
    return GuardrailVerdict(keep=not reasons, reasons=reasons)
