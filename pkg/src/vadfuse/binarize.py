"""Hysteresis thresholding and duration smoothing for posterior streams.

Turns a posterior stream (or an already-binary mask) into a clean speech
Timeline. The two-threshold state machine resists flutter around a single
threshold; ``smooth`` then fills short gaps and deletes short segments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import TIME_EPS, PosteriorStream, Segment, Timeline, mask_to_timeline
from .errors import ConfigError

# Shipped smoothing defaults for the fused output of a two-detector setup.
DEFAULT_MIN_DURATION_ON = 0.182
DEFAULT_MIN_DURATION_OFF = 0.501


@dataclass(frozen=True)
class BinarizeConfig:
    """Thresholds and duration limits for posterior binarization.

    ``offset <= onset`` is the usual setup but is not required; with
    ``onset == offset`` the state machine collapses to plain thresholding.
    """

    onset: float = 0.5
    offset: float = 0.5
    min_duration_on: float = DEFAULT_MIN_DURATION_ON
    min_duration_off: float = DEFAULT_MIN_DURATION_OFF

    def __post_init__(self):
        for name in ("onset", "offset"):
            value = getattr(self, name)
            if not (math.isfinite(value) and 0.0 <= value <= 1.0):
                raise ConfigError(f"{name} must lie in [0, 1], got {value}")
        for name in ("min_duration_on", "min_duration_off"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0.0):
                raise ConfigError(f"{name} must be a non-negative duration, got {value}")


def hysteresis_mask(values: np.ndarray, onset: float, offset: float) -> np.ndarray:
    """Per-frame active mask from the two-state machine.

    Inactive turns active when a value is >= onset; active turns inactive
    when a value is < offset. The initial state is inactive.
    """
    if not 0.0 <= onset <= 1.0:
        raise ConfigError(f"onset must lie in [0, 1], got {onset}")
    if not 0.0 <= offset <= 1.0:
        raise ConfigError(f"offset must lie in [0, 1], got {offset}")
    values = np.asarray(values, dtype=np.float64)
    mask = np.zeros(values.size, dtype=bool)
    active = False
    for i, v in enumerate(values):
        if active:
            if v < offset:
                active = False
        elif v >= onset:
            active = True
        mask[i] = active
    return mask


def hysteresis(stream: PosteriorStream, onset: float, offset: float) -> Timeline:
    """Binarize a stream; active frame runs become segments."""
    mask = hysteresis_mask(stream.values, onset, offset)
    return mask_to_timeline(mask, stream.start, stream.step)


def fill_gaps(timeline: Timeline, min_duration_off: float) -> Timeline:
    """Merge away inactive gaps strictly shorter than ``min_duration_off``."""
    if min_duration_off < 0:
        raise ConfigError(f"min_duration_off must be non-negative, got {min_duration_off}")
    if len(timeline) < 2:
        return timeline
    out = [timeline[0]]
    for seg in timeline[1:]:
        gap = seg.start - out[-1].end
        if gap < min_duration_off - TIME_EPS:
            out[-1] = Segment(out[-1].start, seg.end)
        else:
            out.append(seg)
    return Timeline(tuple(out))


def drop_short(timeline: Timeline, min_duration_on: float) -> Timeline:
    """Remove segments strictly shorter than ``min_duration_on``."""
    if min_duration_on < 0:
        raise ConfigError(f"min_duration_on must be non-negative, got {min_duration_on}")
    return Timeline(
        tuple(s for s in timeline if s.duration >= min_duration_on - TIME_EPS)
    )


def smooth(timeline: Timeline, config: BinarizeConfig) -> Timeline:
    """Fill short gaps, then drop short segments. Idempotent."""
    return drop_short(fill_gaps(timeline, config.min_duration_off), config.min_duration_on)


def binarize(stream: PosteriorStream, config: BinarizeConfig) -> Timeline:
    """Hysteresis followed by smoothing, in one call."""
    return smooth(hysteresis(stream, config.onset, config.offset), config)
