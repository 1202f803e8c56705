"""Core time-domain value types: segments, timelines, posterior streams.

Conventions shared by every other module:

* All times are real seconds and non-negative.
* Frame ``i`` of a posterior stream covers the half-open interval
  ``[start + i * step, start + (i + 1) * step)``.
* Merge and adjacency decisions compare times with the absolute tolerance
  ``TIME_EPS`` (1e-9 s), far below the resolution of any supported text
  format.

All types are immutable after construction and all operations are pure
functions, so values can be shared across threads or worker processes
without coordination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

import numpy as np

TIME_EPS = 1e-9


@dataclass(frozen=True, order=True)
class Segment:
    """Half-open time interval ``[start, end)`` in seconds.

    ``start`` must be non-negative and strictly less than ``end``; zero
    length segments are rejected at construction.
    """

    start: float
    end: float

    def __post_init__(self):
        if not (math.isfinite(self.start) and math.isfinite(self.end)):
            raise ValueError(f"segment bounds must be finite, got ({self.start}, {self.end})")
        if self.start < 0:
            raise ValueError(f"segment start must be non-negative, got {self.start}")
        if self.end <= self.start:
            raise ValueError(f"segment must have positive duration, got ({self.start}, {self.end})")

    @property
    def duration(self) -> float:
        return self.end - self.start

    def overlaps(self, other: Segment) -> bool:
        """True when the open overlap with ``other`` exceeds TIME_EPS."""
        return min(self.end, other.end) - max(self.start, other.start) > TIME_EPS

    def intersection(self, other: Segment) -> Segment | None:
        """Overlap with ``other``, or None when it is empty (within TIME_EPS)."""
        start = max(self.start, other.start)
        end = min(self.end, other.end)
        if end - start <= TIME_EPS:
            return None
        return Segment(start, end)


SegmentLike = Union[Segment, tuple]


def _as_segment(value: SegmentLike) -> Segment:
    if isinstance(value, Segment):
        return value
    start, end = value
    return Segment(float(start), float(end))


def _merged(segments: Iterable[SegmentLike]) -> tuple[Segment, ...]:
    """Sort, then merge overlapping or adjacent (within TIME_EPS) segments."""
    pending = sorted(_as_segment(s) for s in segments)
    out: list[list[float]] = []
    for seg in pending:
        if out and seg.start <= out[-1][1] + TIME_EPS:
            out[-1][1] = max(out[-1][1], seg.end)
        else:
            out.append([seg.start, seg.end])
    return tuple(Segment(a, b) for a, b in out)


@dataclass(frozen=True)
class Timeline:
    """Ordered, pairwise-disjoint segments: the binary view of a recording.

    Construction normalizes its input: segments are sorted, overlapping or
    adjacent ones are merged. Building a Timeline from an existing
    Timeline's segments therefore returns an equal Timeline.
    """

    segments: tuple[Segment, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "segments", _merged(self.segments))

    def __bool__(self) -> bool:
        return bool(self.segments)

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self) -> Iterator[Segment]:
        return iter(self.segments)

    def __getitem__(self, index):
        return self.segments[index]

    @property
    def duration(self) -> float:
        """Total covered time in seconds."""
        return sum(s.duration for s in self.segments)

    def extent(self) -> Segment | None:
        """Smallest segment covering the whole timeline, None when empty."""
        if not self.segments:
            return None
        return Segment(self.segments[0].start, self.segments[-1].end)

    def union(self, other: Timeline) -> Timeline:
        return Timeline(self.segments + other.segments)

    def intersect(self, other: Timeline) -> Timeline:
        """Set intersection, dropping pieces shorter than TIME_EPS."""
        out: list[Segment] = []
        j = 0
        for seg in self.segments:
            while j < len(other.segments) and other.segments[j].end <= seg.start + TIME_EPS:
                j += 1
            k = j
            while k < len(other.segments) and other.segments[k].start < seg.end - TIME_EPS:
                piece = seg.intersection(other.segments[k])
                if piece is not None:
                    out.append(piece)
                k += 1
        return Timeline(out)

    def subtract(self, other: Timeline) -> Timeline:
        """Set difference ``self minus other``."""
        out: list[Segment] = []
        for seg in self.segments:
            cursor = seg.start
            for hole in other.segments:
                if hole.end <= cursor + TIME_EPS:
                    continue
                if hole.start >= seg.end - TIME_EPS:
                    break
                if hole.start - cursor > TIME_EPS:
                    out.append(Segment(cursor, min(hole.start, seg.end)))
                cursor = max(cursor, hole.end)
                if cursor >= seg.end - TIME_EPS:
                    break
            if seg.end - cursor > TIME_EPS:
                out.append(Segment(cursor, seg.end))
        return Timeline(out)


@dataclass(frozen=True, eq=False)
class PosteriorStream:
    """Uniformly sampled speech posteriors for one detector on one recording.

    ``values[i]`` is the probability of speech for frame ``i``, which covers
    ``[start + i * step, start + (i + 1) * step)``.
    """

    uri: str
    start: float
    step: float
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("posterior values must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(arr)):
            raise ValueError("posterior values must be finite")
        if np.any((arr < 0.0) | (arr > 1.0)):
            raise ValueError("posterior values must lie in [0, 1]")
        if not (math.isfinite(self.step) and self.step > 0):
            raise ValueError(f"frame step must be positive, got {self.step}")
        if not (math.isfinite(self.start) and self.start >= 0):
            raise ValueError(f"stream start must be non-negative, got {self.start}")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def n_frames(self) -> int:
        return int(self.values.size)

    @property
    def end(self) -> float:
        """End of the last frame's interval."""
        return self.start + self.n_frames * self.step

    def frame_starts(self) -> np.ndarray:
        return self.start + np.arange(self.n_frames) * self.step

    def frame_midpoints(self) -> np.ndarray:
        return self.start + (np.arange(self.n_frames) + 0.5) * self.step


@dataclass(frozen=True, eq=False)
class StreamSet:
    """Ordered posterior streams for one recording.

    The position of a stream in the set is its detector index, which is how
    fusion reports which detector each window came from.
    """

    streams: tuple[PosteriorStream, ...]

    def __post_init__(self):
        streams = tuple(self.streams)
        if not streams:
            raise ValueError("a StreamSet needs at least one stream")
        uris = {s.uri for s in streams}
        if len(uris) > 1:
            raise ValueError(f"streams must share one uri, got {sorted(uris)}")
        object.__setattr__(self, "streams", streams)

    @property
    def uri(self) -> str:
        return self.streams[0].uri

    def __len__(self) -> int:
        return len(self.streams)

    def __iter__(self) -> Iterator[PosteriorStream]:
        return iter(self.streams)

    def __getitem__(self, index) -> PosteriorStream:
        return self.streams[index]


@dataclass(frozen=True)
class Annotation:
    """Speaker-labeled segments for one recording.

    Entries may overlap in time (overlapped speech) and appear in the order
    given; writers sort on output.
    """

    uri: str
    entries: tuple[tuple[Segment, str], ...] = ()

    def __post_init__(self):
        coerced = []
        for seg, label in self.entries:
            if not label:
                raise ValueError("speaker labels must be non-empty")
            coerced.append((_as_segment(seg), str(label)))
        object.__setattr__(self, "entries", tuple(coerced))

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def speakers(self) -> tuple[str, ...]:
        """Distinct speaker labels, sorted."""
        return tuple(sorted({label for _, label in self.entries}))

    def speaker_timeline(self, label: str) -> Timeline:
        """Merged support of one speaker's entries."""
        return Timeline(tuple(seg for seg, spk in self.entries if spk == label))

    def support(self) -> Timeline:
        """Merged support of all entries (the speech regions)."""
        return Timeline(tuple(seg for seg, _ in self.entries))


def timeline_from_segments(segments: Iterable[SegmentLike]) -> Timeline:
    """Union support of ``segments``: sorted, merged, disjoint."""
    return Timeline(tuple(segments))


def resample(
    stream: PosteriorStream, grid_start: float, grid_step: float, n_frames: int
) -> PosteriorStream:
    """Resample a stream onto a new uniform grid.

    The source is treated as a piecewise-linear function through its frame
    midpoints and evaluated at each target frame's midpoint; targets outside
    the source extent clamp to the nearest source value. Output values stay
    in [0, 1].
    """
    if grid_step <= 0:
        raise ValueError(f"grid_step must be positive, got {grid_step}")
    if n_frames < 1:
        raise ValueError(f"n_frames must be at least 1, got {n_frames}")
    src_t = stream.frame_midpoints()
    dst_t = grid_start + (np.arange(n_frames) + 0.5) * grid_step
    values = np.interp(dst_t, src_t, stream.values)
    return PosteriorStream(stream.uri, grid_start, grid_step, np.clip(values, 0.0, 1.0))


def crop(obj: Timeline | Annotation, scoring_regions: Timeline):
    """Intersect a Timeline or Annotation with ``scoring_regions``.

    Entries reduced to zero length (within TIME_EPS) are dropped. Returns
    the same type as ``obj``.
    """
    if isinstance(obj, Timeline):
        return obj.intersect(scoring_regions)
    if isinstance(obj, Annotation):
        entries: list[tuple[Segment, str]] = []
        for seg, label in obj.entries:
            for region in scoring_regions:
                piece = seg.intersection(region)
                if piece is not None:
                    entries.append((piece, label))
        return Annotation(obj.uri, tuple(entries))
    raise TypeError(f"crop expects a Timeline or Annotation, got {type(obj).__name__}")


def mask_to_timeline(mask: np.ndarray, start: float, step: float) -> Timeline:
    """Convert a per-frame boolean mask to a Timeline of active runs."""
    mask = np.asarray(mask, dtype=bool)
    if mask.size == 0:
        return Timeline()
    edges = np.flatnonzero(np.diff(mask.astype(np.int8)))
    starts = list(edges[mask[edges + 1]] + 1)
    ends = list(edges[~mask[edges + 1]] + 1)
    if mask[0]:
        starts.insert(0, 0)
    if mask[-1]:
        ends.append(mask.size)
    return Timeline(
        tuple(Segment(start + a * step, start + b * step) for a, b in zip(starts, ends))
    )


def timeline_to_mask(timeline: Timeline, start: float, step: float, n_frames: int) -> np.ndarray:
    """Per-frame boolean mask: frame active iff its midpoint lies in ``timeline``."""
    mids = start + (np.arange(n_frames) + 0.5) * step
    mask = np.zeros(n_frames, dtype=bool)
    for seg in timeline:
        mask |= (mids >= seg.start) & (mids < seg.end)
    return mask
