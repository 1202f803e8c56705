"""Entropy-selective fusion of voice-activity posterior streams.

Several detectors rarely fail in the same places: one may be steady on clean
material while another copes better with noise. This module combines their
posterior streams by measuring, per short window, how *certain* each detector
is, and copying the binarized decision of the most certain one.

Certainty is the binary entropy of the raw posterior, averaged over the
window: a detector emitting values near 0 or 1 has entropy near 0 bits, one
hedging around 0.5 has entropy near 1 bit. Selection is exact substitution
of the winning detector's frames, never a blend, so every fused frame is
bit-identical to one input detector's decision for that window.

Pipeline inside :func:`fuse`:

1. resample every stream onto a common grid (union extent, ``grid_step``),
2. binarize each stream independently with its own onset/offset thresholds,
3. compute per-window mean entropies from the raw (pre-threshold) posteriors,
4. per window, emit the lowest-entropy stream's binary mask for the window's
   frames (ties go to the lowest stream index).

Minimum-duration smoothing is deliberately not applied here; feed the fused
mask to :mod:`vadfuse.binarize` for that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .binarize import hysteresis_mask
from .core import TIME_EPS, PosteriorStream, Segment, StreamSet, resample
from .errors import ConfigError

DEFAULT_WINDOW = 0.25
DEFAULT_GRID_STEP = 0.010

# Shipped per-stream thresholds for the two-detector setup this package was
# tuned for: a steady detector with a high operating point and a recall-heavy
# one whose scores sit near zero.
DEFAULT_STREAM_ONSETS = (0.767, 0.010)
DEFAULT_STREAM_OFFSETS = (0.713, 0.010)


@dataclass(frozen=True)
class FusionConfig:
    """Window geometry and per-stream thresholds for fusion.

    ``hop`` is the spacing between window starts; None means ``window``
    (consecutive, non-overlapping windows). :func:`window_entropies` accepts
    any positive hop for analysis, but :func:`fuse` requires ``hop ==
    window`` so that the windows partition the frames.
    """

    window: float = DEFAULT_WINDOW
    per_stream_onset: tuple[float, ...] = DEFAULT_STREAM_ONSETS
    per_stream_offset: tuple[float, ...] = DEFAULT_STREAM_OFFSETS
    grid_step: float = DEFAULT_GRID_STEP
    hop: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.window) and self.window > 0):
            raise ConfigError(f"window must be positive, got {self.window}")
        if not (math.isfinite(self.grid_step) and self.grid_step > 0):
            raise ConfigError(f"grid_step must be positive, got {self.grid_step}")
        if self.hop is not None and not (math.isfinite(self.hop) and self.hop > 0):
            raise ConfigError(f"hop must be positive, got {self.hop}")
        onsets = tuple(float(v) for v in self.per_stream_onset)
        offsets = tuple(float(v) for v in self.per_stream_offset)
        if len(onsets) != len(offsets):
            raise ConfigError(
                f"onset and offset lists differ in length: {len(onsets)} vs {len(offsets)}"
            )
        for value in onsets + offsets:
            if not (math.isfinite(value) and 0.0 <= value <= 1.0):
                raise ConfigError(f"thresholds must lie in [0, 1], got {value}")
        object.__setattr__(self, "per_stream_onset", onsets)
        object.__setattr__(self, "per_stream_offset", offsets)

    @property
    def effective_hop(self) -> float:
        return self.window if self.hop is None else self.hop


@dataclass(frozen=True, eq=False)
class FusionTrace:
    """Per-window entropies and the winning stream per window.

    ``entropies[j, k]`` is the mean binary entropy (bits) of stream ``k``
    over window ``j``; ``selected[j]`` is the argmin over ``k`` with ties
    broken toward the lowest index. ``selected`` is None until
    :func:`select_stream_per_window` fills it.
    """

    window_bounds: tuple[Segment, ...]
    entropies: np.ndarray
    selected: np.ndarray | None = None

    def __post_init__(self):
        entropies = np.asarray(self.entropies, dtype=np.float64)
        entropies.flags.writeable = False
        object.__setattr__(self, "entropies", entropies)
        if self.selected is not None:
            selected = np.asarray(self.selected, dtype=np.intp)
            selected.flags.writeable = False
            object.__setattr__(self, "selected", selected)

    @property
    def n_windows(self) -> int:
        return len(self.window_bounds)

    @property
    def n_streams(self) -> int:
        return int(self.entropies.shape[1])


def binary_entropy(p):
    """Binary entropy in bits of a posterior (scalar or array) in [0, 1].

    ``-p*log2(p) - (1-p)*log2(1-p)`` with the convention ``0*log2(0) == 0``,
    so both endpoints score exactly 0 and 0.5 scores exactly 1.
    """
    arr = np.asarray(p, dtype=np.float64)
    if np.any((arr < 0.0) | (arr > 1.0)) or not np.all(np.isfinite(arr)):
        raise ValueError("binary_entropy expects values in [0, 1]")
    out = np.zeros_like(arr)
    interior = (arr > 0.0) & (arr < 1.0)
    q = arr[interior]
    out[interior] = -q * np.log2(q) - (1.0 - q) * np.log2(1.0 - q)
    if np.isscalar(p) or arr.ndim == 0:
        return float(out)
    return out


def common_grid(streams: StreamSet, grid_step: float) -> StreamSet:
    """Resample every stream onto one grid spanning the union extent.

    The grid starts at the earliest stream start and runs to the latest
    stream end; streams shorter than the union are clamp-extended by
    :func:`vadfuse.core.resample`.
    """
    start = min(s.start for s in streams)
    end = max(s.end for s in streams)
    n_frames = max(1, int(math.ceil((end - start) / grid_step - TIME_EPS)))
    return StreamSet(tuple(resample(s, start, grid_step, n_frames) for s in streams))


def _window_slices(n_frames: int, step: float, window: float, hop: float):
    """Frame index ranges [lo, hi) per window, plus the kept window indices.

    Window ``j`` spans ``[j*hop, j*hop + window)`` relative to the grid
    start; a frame belongs to it when the frame's start time falls inside
    (with TIME_EPS slack at both edges). Windows without frames are dropped,
    which also keeps a final partial window as long as it has one frame.
    """
    t = np.arange(n_frames) * step
    n_windows = int(math.floor((t[-1] + TIME_EPS) / hop)) + 1
    starts = np.arange(n_windows) * hop
    lo = np.searchsorted(t, starts - TIME_EPS, side="left")
    hi = np.searchsorted(t, starts + window - TIME_EPS, side="left")
    keep = hi > lo
    return lo[keep], hi[keep], np.flatnonzero(keep)


def window_entropies(streams: StreamSet, config: FusionConfig) -> FusionTrace:
    """Mean binary entropy of each stream over each window.

    Streams are first resampled to the common grid; entropies are computed
    from the raw posteriors, not the thresholded decisions (binarized values
    would make every entropy zero).
    """
    grid = common_grid(streams, config.grid_step)
    ref = grid[0]
    lo, hi, indices = _window_slices(ref.n_frames, ref.step, config.window, config.effective_hop)
    counts = (hi - lo).astype(np.float64)

    entropies = np.empty((lo.size, len(grid)), dtype=np.float64)
    for k, stream in enumerate(grid):
        h = binary_entropy(stream.values)
        sums = np.concatenate(([0.0], np.cumsum(h)))
        entropies[:, k] = (sums[hi] - sums[lo]) / counts

    grid_end = ref.end
    bounds = tuple(
        Segment(
            ref.start + j * config.effective_hop,
            min(ref.start + j * config.effective_hop + config.window, grid_end),
        )
        for j in indices
    )
    return FusionTrace(window_bounds=bounds, entropies=entropies)


def select_stream_per_window(trace: FusionTrace) -> FusionTrace:
    """Fill ``trace.selected`` with the per-window entropy argmin.

    Returns a new trace (FusionTrace is immutable). Ties go to the lowest
    stream index, i.e. the order the streams were supplied in.
    """
    selected = np.argmin(trace.entropies, axis=1)
    return replace(trace, selected=selected)


def fuse(streams: StreamSet, config: FusionConfig | None = None) -> tuple[PosteriorStream, FusionTrace]:
    """Fuse posterior streams into one binary frame mask plus its trace.

    Returns ``(fused, trace)`` where ``fused`` is a PosteriorStream whose
    values are exactly 0.0 or 1.0 on the common grid, and ``trace`` records
    window bounds, entropies and the selected stream per window. Apply
    minimum-duration smoothing downstream if desired.
    """
    config = config or FusionConfig()
    if abs(config.effective_hop - config.window) > TIME_EPS:
        raise ConfigError("fuse requires hop == window so windows partition the frames")
    if config.window < config.grid_step - TIME_EPS:
        raise ConfigError("window must cover at least one grid step")
    if len(config.per_stream_onset) != len(streams):
        raise ConfigError(
            f"got {len(config.per_stream_onset)} thresholds for {len(streams)} streams"
        )

    grid = common_grid(streams, config.grid_step)
    n = grid[0].n_frames
    masks = np.stack(
        [
            hysteresis_mask(stream.values, onset, offset)
            for stream, onset, offset in zip(grid, config.per_stream_onset, config.per_stream_offset)
        ]
    )

    trace = select_stream_per_window(window_entropies(streams, config))
    frame_window = np.floor(
        (np.arange(n) * config.grid_step + TIME_EPS) / config.window
    ).astype(np.intp)
    fused_mask = masks[trace.selected[frame_window], np.arange(n)]

    fused = PosteriorStream(
        grid.uri, grid[0].start, grid[0].step, fused_mask.astype(np.float64)
    )
    return fused, trace


def trace_to_tsv(trace: FusionTrace) -> str:
    """Tab-separated trace export for plotting: one line per window."""
    header = ["window_start", "window_end"]
    header += [f"entropy_{k}" for k in range(trace.n_streams)]
    header.append("selected")
    lines = ["#" + "\t".join(header)]
    for j, seg in enumerate(trace.window_bounds):
        cells = [f"{seg.start:.6f}", f"{seg.end:.6f}"]
        cells += [f"{trace.entropies[j, k]:.6f}" for k in range(trace.n_streams)]
        cells.append("" if trace.selected is None else str(int(trace.selected[j])))
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"
