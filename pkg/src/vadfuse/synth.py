"""Seeded synthetic benchmark scenarios for stream-selection experiments.

A scenario is a ground-truth speech timeline plus two complementary
posterior streams on a shared frame grid. Time is split into alternating
"reliability regions" of ``region_period`` seconds: in its reliable regions
a stream emits confident, correct posteriors (``confident_hi`` on speech
frames, ``confident_lo`` elsewhere, plus jitter), in the others it emits
uninformative values near ``uncertain_center``. Stream 0 is reliable in
even-numbered regions, stream 1 in odd-numbered ones, so each stream is
informative on half the recording and the pair covers all of it.

Unreliability is modeled as low confidence, not as confident error; a
confidence-based selector has no defense against a classifier that is
certain and wrong, and the generator makes that assumption explicit.

Randomness comes from NumPy's ``default_rng``, i.e. the 64-bit PCG64
generator, so a seed pins outputs bit-for-bit across platforms. The draw
order is fixed: one uniform for the initial speech/non-speech state, one
exponential per segment run, then one uniform jitter array per stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Annotation, PosteriorStream, StreamSet, Timeline, mask_to_timeline
from .errors import ConfigError
from .fusion import binary_entropy
from .ingest import write_posteriors, write_rttm

# expected speech-run mean + gap-run mean, seconds; speech_fraction splits it
MEAN_CYCLE = 6.0


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything that determines a scenario, including the PRNG seed."""

    seed: int
    duration: float = 120.0
    speech_fraction: float = 0.6
    region_period: float = 10.0
    confident_hi: float = 0.9
    confident_lo: float = 0.1
    uncertain_center: float = 0.5
    uncertain_jitter: float = 0.05
    grid_step: float = 0.010

    def __post_init__(self):
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise ConfigError(f"duration must be positive, got {self.duration}")
        if not 0 < self.speech_fraction < 1:
            raise ConfigError(f"speech_fraction must be in (0,1), got {self.speech_fraction}")
        if not (math.isfinite(self.region_period) and self.region_period > 0):
            raise ConfigError(f"region_period must be positive, got {self.region_period}")
        if self.duration < 2 * self.region_period:
            raise ConfigError(
                "duration must cover at least two reliability regions "
                f"(duration {self.duration}, region_period {self.region_period})"
            )
        if not 0 < self.confident_lo < self.uncertain_center < self.confident_hi < 1:
            raise ConfigError(
                "levels must satisfy 0 < confident_lo < uncertain_center < confident_hi < 1"
            )
        j = self.uncertain_jitter
        if not (math.isfinite(j) and j >= 0):
            raise ConfigError(f"uncertain_jitter must be non-negative, got {j}")
        if self.confident_lo - j <= 0 or self.confident_hi + j >= 1:
            raise ConfigError("jitter must keep confident values inside (0,1)")
        if not (self.confident_lo + j < 0.5 < self.confident_hi - j):
            raise ConfigError("jittered confident bands must stay clear of 0.5")
        # the whole point: uncertain frames must carry strictly more entropy
        # than confident ones, or per-window selection has no signal
        confident = max(binary_entropy(self.confident_hi - j), binary_entropy(self.confident_lo + j))
        uncertain = min(
            binary_entropy(self.uncertain_center - j),
            binary_entropy(self.uncertain_center + j),
        )
        if not confident < uncertain:
            raise ConfigError(
                "jitter bands overlap in entropy: confident frames must stay "
                "strictly less uncertain than unreliable ones"
            )
        if self.grid_step <= 0:
            raise ConfigError(f"grid_step must be positive, got {self.grid_step}")


def generate(config: ScenarioConfig) -> tuple[Timeline, StreamSet]:
    """Build one scenario: (reference speech timeline, two posterior streams).

    Speech/non-speech runs are drawn as exponentials with means
    ``MEAN_CYCLE * speech_fraction`` and ``MEAN_CYCLE * (1 - speech_fraction)``
    and snapped to whole frames (at least one), so the realized speech
    fraction approaches ``speech_fraction`` in expectation. Reference
    boundaries therefore always sit exactly on the frame grid.
    """
    rng = np.random.default_rng(config.seed)
    n = int(round(config.duration / config.grid_step))
    step = config.grid_step

    speech = bool(rng.random() < config.speech_fraction)
    mean_on = MEAN_CYCLE * config.speech_fraction
    mean_off = MEAN_CYCLE * (1.0 - config.speech_fraction)
    mask = np.zeros(n, dtype=bool)
    i = 0
    while i < n:
        run_seconds = rng.exponential(mean_on if speech else mean_off)
        run = max(1, int(round(run_seconds / step)))
        mask[i : i + run] = speech
        i += run
        speech = not speech

    mids = (np.arange(n) + 0.5) * step
    region = np.floor(mids / config.region_period).astype(np.int64)
    reliable_0 = region % 2 == 0

    correct = np.where(mask, config.confident_hi, config.confident_lo)
    base_0 = np.where(reliable_0, correct, config.uncertain_center)
    base_1 = np.where(reliable_0, config.uncertain_center, correct)
    j = config.uncertain_jitter
    values_0 = base_0 + rng.uniform(-j, j, n)
    values_1 = base_1 + rng.uniform(-j, j, n)

    uri = f"synth-{config.seed}"
    streams = StreamSet(
        (
            PosteriorStream(uri, 0.0, step, values_0),
            PosteriorStream(uri, 0.0, step, values_1),
        )
    )
    return mask_to_timeline(mask, 0.0, step), streams


def reliability_regions(config: ScenarioConfig, stream_index: int) -> Timeline:
    """Where the given stream (0 or 1) emits confident, correct posteriors."""
    if stream_index not in (0, 1):
        raise ValueError(f"stream_index must be 0 or 1, got {stream_index}")
    n_regions = math.ceil(config.duration / config.region_period)
    segs = []
    for k in range(stream_index, n_regions, 2):
        start = k * config.region_period
        end = min((k + 1) * config.region_period, config.duration)
        if end > start:
            segs.append((start, end))
    return Timeline(tuple(segs))


def write_scenario(
    directory: str | Path, ref: Timeline, streams: StreamSet, label: str = "speech"
) -> dict[str, Path]:
    """Write a scenario to disk: ``ref.rttm`` plus one ``stream<k>.vadpost`` each.

    Returns the paths keyed by ``"ref"`` and ``"stream<k>"``.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    annotation = Annotation(streams.uri, tuple((seg, label) for seg in ref))
    paths: dict[str, Path] = {"ref": directory / "ref.rttm"}
    paths["ref"].write_text(write_rttm([annotation]), encoding="utf-8")
    for k, stream in enumerate(streams):
        path = directory / f"stream{k}.vadpost"
        path.write_text(write_posteriors(stream), encoding="utf-8")
        paths[f"stream{k}"] = path
    return paths
