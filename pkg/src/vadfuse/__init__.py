"""Multi-stream voice activity detection with entropy-based stream selection.

The package turns per-frame speech posteriors from several detectors into a
single speech/non-speech segmentation: each short window keeps the decision
of whichever stream is least uncertain there (lowest mean binary entropy),
the winning decisions are stitched together, and the result is smoothed by
minimum-duration rules. Scoring (DER/JER with the usual forgiveness collar),
RTTM/UEM/posterior-file I/O, a reference energy VAD, and a seeded synthetic
benchmark generator round out the toolkit. ``vadfuse --help`` shows the
command-line interface over the same functionality.
"""

from .binarize import (
    DEFAULT_MIN_DURATION_OFF,
    DEFAULT_MIN_DURATION_ON,
    BinarizeConfig,
    binarize,
    drop_short,
    fill_gaps,
    hysteresis,
    hysteresis_mask,
    smooth,
)
from .core import (
    TIME_EPS,
    Annotation,
    PosteriorStream,
    Segment,
    StreamSet,
    Timeline,
    crop,
    mask_to_timeline,
    resample,
    timeline_from_segments,
    timeline_to_mask,
)
from .errors import ConfigError, ParseError, VadfuseError
from .fusion import (
    DEFAULT_GRID_STEP,
    DEFAULT_STREAM_OFFSETS,
    DEFAULT_STREAM_ONSETS,
    DEFAULT_WINDOW,
    FusionConfig,
    FusionTrace,
    binary_entropy,
    common_grid,
    fuse,
    select_stream_per_window,
    trace_to_tsv,
    window_entropies,
)
from .ingest import (
    WavAudio,
    energy_vad,
    parse_rttm,
    parse_uem,
    read_posteriors,
    read_wav,
    write_posteriors,
    write_rttm,
    write_uem,
)
from .metrics import (
    DEFAULT_COLLAR,
    ScoreConfig,
    ScoreReport,
    der_components,
    detection_scores,
    format_score_lines,
    format_score_table,
    jer,
    optimal_mapping,
    overall_report,
    score,
    scoring_regions,
    speaker_jer,
)
from .synth import ScenarioConfig, generate, reliability_regions, write_scenario

__version__ = "0.1.0"

__all__ = [
    "TIME_EPS",
    "Segment",
    "Timeline",
    "PosteriorStream",
    "StreamSet",
    "Annotation",
    "timeline_from_segments",
    "resample",
    "crop",
    "mask_to_timeline",
    "timeline_to_mask",
    "VadfuseError",
    "ParseError",
    "ConfigError",
    "binary_entropy",
    "common_grid",
    "window_entropies",
    "select_stream_per_window",
    "fuse",
    "trace_to_tsv",
    "FusionConfig",
    "FusionTrace",
    "DEFAULT_WINDOW",
    "DEFAULT_GRID_STEP",
    "DEFAULT_STREAM_ONSETS",
    "DEFAULT_STREAM_OFFSETS",
    "BinarizeConfig",
    "hysteresis_mask",
    "hysteresis",
    "fill_gaps",
    "drop_short",
    "smooth",
    "binarize",
    "DEFAULT_MIN_DURATION_ON",
    "DEFAULT_MIN_DURATION_OFF",
    "ScoreConfig",
    "ScoreReport",
    "DEFAULT_COLLAR",
    "scoring_regions",
    "optimal_mapping",
    "der_components",
    "jer",
    "speaker_jer",
    "detection_scores",
    "score",
    "overall_report",
    "format_score_lines",
    "format_score_table",
    "WavAudio",
    "parse_rttm",
    "write_rttm",
    "parse_uem",
    "write_uem",
    "read_posteriors",
    "write_posteriors",
    "read_wav",
    "energy_vad",
    "ScenarioConfig",
    "generate",
    "reliability_regions",
    "write_scenario",
    "__version__",
]
