"""Command-line front end: energy VAD, fusion, binarization, scoring, synthesis.

Subcommands wire the library into a batch pipeline::

    vadfuse vad        audio.wav out.vadpost
    vadfuse fuse       s0.vadpost s1.vadpost --out fused.vadpost --trace trace.tsv
    vadfuse binarize   fused.vadpost --out hyp.rttm
    vadfuse score      ref.rttm hyp.rttm [--uem all.uem] [--table]
    vadfuse synth      outdir --seed 42
    vadfuse pipeline   run.cfg

Every command is deterministic given identical inputs and flags. Recordings
are processed independently and reported sorted by uri. Failures exit
nonzero after printing a single ``error: ...`` line on stderr.

The pipeline config file is flat ``key=value`` text: one pair per line,
``#`` starts a comment, unknown keys are rejected. ``write_config`` and
``parse_config`` round-trip exactly, so a written default config documents
the shipped thresholds.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from dataclasses import dataclass
from pathlib import Path

from .binarize import (
    DEFAULT_MIN_DURATION_OFF,
    DEFAULT_MIN_DURATION_ON,
    BinarizeConfig,
    binarize,
    hysteresis,
)
from .core import Annotation, PosteriorStream, StreamSet, Timeline
from .errors import ConfigError, VadfuseError
from .fusion import (
    DEFAULT_GRID_STEP,
    DEFAULT_STREAM_OFFSETS,
    DEFAULT_STREAM_ONSETS,
    DEFAULT_WINDOW,
    FusionConfig,
    fuse,
    trace_to_tsv,
)
from .ingest import (
    energy_vad,
    parse_rttm,
    parse_uem,
    read_posteriors,
    read_wav,
    write_posteriors,
    write_rttm,
)
from .metrics import DEFAULT_COLLAR, ScoreConfig, format_score_lines, format_score_table, score
from .synth import ScenarioConfig, generate, write_scenario

DEFAULT_ONSETS_ARG = "0.767,0.010"
DEFAULT_OFFSETS_ARG = "0.713,0.010"


@dataclass(frozen=True)
class PipelineConfig:
    """One flat config for a full vad/ingest -> fuse -> binarize -> score run.

    ``streams`` are existing posterior files; ``wavs`` go through the energy
    VAD first. Streams sharing a uri form one recording's StreamSet, and the
    per-stream onset/offset lists must match that stream count.
    """

    streams: tuple[str, ...] = ()
    wavs: tuple[str, ...] = ()
    ref: str | None = None
    uem: str | None = None
    out_dir: str = "pipeline-out"
    label: str = "speech"
    window: float = DEFAULT_WINDOW
    grid_step: float = DEFAULT_GRID_STEP
    onsets: tuple[float, ...] = DEFAULT_STREAM_ONSETS
    offsets: tuple[float, ...] = DEFAULT_STREAM_OFFSETS
    onset: float = 0.5
    offset: float = 0.5
    min_duration_on: float = DEFAULT_MIN_DURATION_ON
    min_duration_off: float = DEFAULT_MIN_DURATION_OFF
    collar: float = DEFAULT_COLLAR
    score_overlap: bool = True
    vad_frame: float = 0.025
    vad_hop: float = 0.010


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(_format_value(v) for v in value)
    return repr(value) if isinstance(value, float) else str(value)


def write_config(config: PipelineConfig) -> str:
    """Serialize as ``key=value`` lines; None and empty fields are omitted."""
    lines = ["# pipeline configuration (key=value; '#' starts a comment)"]
    for field in dataclasses.fields(config):
        value = getattr(config, field.name)
        if value is None or value == ():
            continue
        lines.append(f"{field.name}={_format_value(value)}")
    return "".join(line + "\n" for line in lines)


def _parse_float_list(text: str, what: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip() != "")
    except ValueError:
        raise ConfigError(f"{what} must be a comma-separated list of numbers, got {text!r}")
    if not values:
        raise ConfigError(f"{what} must contain at least one number")
    return values


def _parse_bool(text: str, what: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ConfigError(f"{what} must be true or false, got {text!r}")


def parse_config(text: str) -> PipelineConfig:
    """Parse ``key=value`` config text; unknown or repeated keys are errors."""
    fields = {f.name: f for f in dataclasses.fields(PipelineConfig)}
    seen: dict[str, object] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected key=value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in fields:
            raise ConfigError(f"line {line_no}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"line {line_no}: duplicate key {key!r}")
        try:
            if key in ("streams", "wavs"):
                seen[key] = tuple(tok.strip() for tok in value.split(",") if tok.strip())
            elif key in ("onsets", "offsets"):
                seen[key] = _parse_float_list(value, key)
            elif key == "score_overlap":
                seen[key] = _parse_bool(value, key)
            elif key in ("ref", "uem", "out_dir", "label"):
                seen[key] = value
            else:
                seen[key] = float(value)
        except ConfigError as exc:
            raise ConfigError(f"line {line_no}: {exc}")
        except ValueError:
            raise ConfigError(f"line {line_no}: {key} must be a number, got {value!r}")
    return PipelineConfig(**seen)


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _load_stream(path: str) -> PosteriorStream:
    try:
        return read_posteriors(_read_text(path))
    except VadfuseError as exc:
        raise VadfuseError(f"{path}: {exc}")


def _load_wav_stream(path: str, frame: float, hop: float) -> PosteriorStream:
    try:
        audio = read_wav(Path(path).read_bytes())
    except VadfuseError as exc:
        raise VadfuseError(f"{path}: {exc}")
    return energy_vad(audio, frame=frame, hop=hop, uri=Path(path).stem)


def _annotations_by_uri(path: str) -> dict[str, Annotation]:
    try:
        return {a.uri: a for a in parse_rttm(_read_text(path))}
    except VadfuseError as exc:
        raise VadfuseError(f"{path}: {exc}")


def _score_config(collar: float, score_overlap: bool, uem_path: str | None, uri: str) -> ScoreConfig:
    uem_timeline = None
    if uem_path is not None:
        uem_map = parse_uem(_read_text(uem_path))
        if uri not in uem_map:
            raise VadfuseError(f"{uem_path}: no scoring regions for recording {uri!r}")
        uem_timeline = uem_map[uri]
    return ScoreConfig(collar=collar, uem=uem_timeline, score_overlap=score_overlap)


def cmd_vad(args: argparse.Namespace) -> int:
    audio = read_wav(Path(args.wav).read_bytes())
    uri = args.uri if args.uri is not None else Path(args.wav).stem
    stream = energy_vad(audio, frame=args.frame, hop=args.hop, uri=uri)
    _write_text(Path(args.out), write_posteriors(stream))
    print(f"wrote {args.out} ({stream.n_frames} frames, uri {stream.uri})")
    return 0


def cmd_fuse(args: argparse.Namespace) -> int:
    streams = StreamSet(tuple(_load_stream(p) for p in args.streams))
    config = FusionConfig(
        window=args.window,
        per_stream_onset=_parse_float_list(args.onsets, "--onsets"),
        per_stream_offset=_parse_float_list(args.offsets, "--offsets"),
        grid_step=args.grid_step,
    )
    fused, trace = fuse(streams, config)
    _write_text(Path(args.out), write_posteriors(fused))
    print(f"wrote {args.out} ({fused.n_frames} frames, {trace.n_windows} windows)")
    if args.trace is not None:
        _write_text(Path(args.trace), trace_to_tsv(trace))
        print(f"wrote {args.trace}")
    return 0


def cmd_binarize(args: argparse.Namespace) -> int:
    stream = _load_stream(args.stream)
    config = BinarizeConfig(
        onset=args.onset,
        offset=args.offset,
        min_duration_on=args.min_duration_on,
        min_duration_off=args.min_duration_off,
    )
    timeline = binarize(stream, config)
    annotation = Annotation(stream.uri, tuple((seg, args.label) for seg in timeline))
    _write_text(Path(args.out), write_rttm([annotation]))
    print(f"wrote {args.out} ({len(timeline)} segments, {timeline.duration:.3f}s active)")
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    refs = _annotations_by_uri(args.ref)
    hyps = _annotations_by_uri(args.hyp)
    unknown = sorted(set(hyps) - set(refs))
    if unknown:
        raise VadfuseError(f"hypothesis contains recordings missing from reference: {unknown}")
    reports = {}
    for uri in sorted(refs):
        config = _score_config(args.collar, not args.ignore_overlap, args.uem, uri)
        hyp = hyps.get(uri, Annotation(uri, ()))
        reports[uri] = score(refs[uri], hyp, config)
    text = format_score_table(reports) if args.table else format_score_lines(reports)
    print(text, end="")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    config = ScenarioConfig(
        seed=args.seed,
        duration=args.duration,
        speech_fraction=args.speech_fraction,
        region_period=args.region_period,
        confident_hi=args.confident_hi,
        confident_lo=args.confident_lo,
        uncertain_center=args.uncertain_center,
        uncertain_jitter=args.uncertain_jitter,
        grid_step=args.grid_step,
    )
    ref, streams = generate(config)
    paths = write_scenario(args.out_dir, ref, streams)
    for name in sorted(paths):
        print(f"wrote {paths[name]}")
    return 0


def _detection_row(ref_speech: Timeline, hyp_speech: Timeline, regions: Timeline) -> tuple[float, float, float]:
    """(miss%, fa%, detection error%) with the detection error DER-style:
    (missed + false alarm time) / reference speech time."""
    ref_r = ref_speech.intersect(regions)
    hyp_r = hyp_speech.intersect(regions)
    if ref_r.duration <= 0:
        raise VadfuseError("no reference speech in scoring regions")
    miss_t = ref_r.subtract(hyp_r).duration
    fa_t = hyp_r.subtract(ref_r).duration
    nonspeech = regions.subtract(ref_r).duration
    miss = miss_t / ref_r.duration * 100.0
    fa = fa_t / nonspeech * 100.0 if nonspeech > 0 else 0.0
    return miss, fa, (miss_t + fa_t) / ref_r.duration * 100.0


def cmd_pipeline(args: argparse.Namespace) -> int:
    config = parse_config(_read_text(args.config))
    if not config.streams and not config.wavs:
        raise ConfigError("config must list at least one input via streams= or wavs=")

    streams = [_load_stream(p) for p in config.streams]
    streams += [_load_wav_stream(p, config.vad_frame, config.vad_hop) for p in config.wavs]
    by_uri: dict[str, list[PosteriorStream]] = {}
    for stream in streams:
        by_uri.setdefault(stream.uri, []).append(stream)

    fusion_config = FusionConfig(
        window=config.window,
        per_stream_onset=config.onsets,
        per_stream_offset=config.offsets,
        grid_step=config.grid_step,
    )
    smoothing = BinarizeConfig(
        onset=config.onset,
        offset=config.offset,
        min_duration_on=config.min_duration_on,
        min_duration_off=config.min_duration_off,
    )
    out_dir = Path(config.out_dir)

    hyps: dict[str, Annotation] = {}
    single_hyps: dict[str, list[Timeline]] = {}
    for uri in sorted(by_uri):
        recording = StreamSet(tuple(by_uri[uri]))
        if len(recording) != len(config.onsets):
            raise ConfigError(
                f"recording {uri!r} has {len(recording)} streams but "
                f"{len(config.onsets)} per-stream thresholds"
            )
        fused, trace = fuse(recording, fusion_config)
        _write_text(out_dir / f"{uri}.fused.vadpost", write_posteriors(fused))
        _write_text(out_dir / f"{uri}.trace.tsv", trace_to_tsv(trace))
        speech = binarize(fused, smoothing)
        hyps[uri] = Annotation(uri, tuple((seg, config.label) for seg in speech))
        single_hyps[uri] = [
            binarize(
                stream,
                dataclasses.replace(smoothing, onset=config.onsets[k], offset=config.offsets[k]),
            )
            for k, stream in enumerate(recording)
        ]

    _write_text(out_dir / "hyp.rttm", write_rttm(list(hyps.values())))
    print(f"wrote {out_dir / 'hyp.rttm'} ({len(hyps)} recordings)")
    if config.ref is None:
        return 0

    refs = _annotations_by_uri(config.ref)
    missing = sorted(set(hyps) - set(refs))
    if missing:
        raise VadfuseError(f"reference {config.ref} lacks recordings: {missing}")

    rows = [("uri", "system", "MISS", "FA", "DETER")]
    reports = {}
    for uri in sorted(hyps):
        score_config = _score_config(config.collar, config.score_overlap, config.uem, uri)
        reports[uri] = score(refs[uri], hyps[uri], score_config)
        regions = reports[uri].scored_regions
        ref_speech = refs[uri].support()
        for k, single in enumerate(single_hyps[uri]):
            miss, fa, det = _detection_row(ref_speech, single, regions)
            rows.append((uri, f"stream{k}", f"{miss:.2f}", f"{fa:.2f}", f"{det:.2f}"))
        miss, fa, det = _detection_row(ref_speech, hyps[uri].support(), regions)
        rows.append((uri, "fused", f"{miss:.2f}", f"{fa:.2f}", f"{det:.2f}"))

    widths = [max(len(row[c]) for row in rows) for c in range(len(rows[0]))]
    for row in rows:
        cells = [row[0].ljust(widths[0]), row[1].ljust(widths[1])]
        cells += [row[c].rjust(widths[c]) for c in range(2, len(row))]
        print("  ".join(cells).rstrip())
    print()
    print(format_score_lines(reports), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vadfuse",
        description="Multi-stream voice activity detection: entropy-based "
        "stream selection, hysteresis binarization, and diarization-style scoring.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("vad", formatter_class=fmt, help="energy VAD posteriors from a WAV file")
    p.add_argument("wav", help="16-bit PCM mono WAV input")
    p.add_argument("out", help="output posterior (.vadpost) path")
    p.add_argument("--frame", type=float, default=0.025, help="analysis frame length, seconds")
    p.add_argument("--hop", type=float, default=0.010, help="frame hop, seconds")
    p.add_argument("--uri", default=None, help="recording id (default: WAV file stem)")
    p.set_defaults(func=cmd_vad)

    p = sub.add_parser("fuse", formatter_class=fmt, help="entropy-select across posterior streams")
    p.add_argument("streams", nargs="+", help="input posterior (.vadpost) files, one per stream")
    p.add_argument("--out", required=True, help="fused 0/1 posterior output path")
    p.add_argument("--trace", default=None, help="optional per-window entropy/selection TSV")
    p.add_argument("--window", type=float, default=DEFAULT_WINDOW, help="selection window, seconds")
    p.add_argument("--grid-step", type=float, default=DEFAULT_GRID_STEP, help="common frame grid step, seconds")
    p.add_argument("--onsets", default=DEFAULT_ONSETS_ARG, help="comma-separated per-stream onset thresholds")
    p.add_argument("--offsets", default=DEFAULT_OFFSETS_ARG, help="comma-separated per-stream offset thresholds")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("binarize", formatter_class=fmt, help="posteriors to speech segments (RTTM)")
    p.add_argument("stream", help="input posterior (.vadpost) file")
    p.add_argument("--out", required=True, help="output RTTM path")
    p.add_argument("--onset", type=float, default=0.5, help="activation threshold")
    p.add_argument("--offset", type=float, default=0.5, help="deactivation threshold")
    p.add_argument("--min-duration-on", type=float, default=DEFAULT_MIN_DURATION_ON,
                   help="drop segments shorter than this, seconds")
    p.add_argument("--min-duration-off", type=float, default=DEFAULT_MIN_DURATION_OFF,
                   help="fill gaps shorter than this, seconds")
    p.add_argument("--label", default="speech", help="RTTM speaker label for active regions")
    p.set_defaults(func=cmd_binarize)

    p = sub.add_parser("score", formatter_class=fmt, help="DER/JER scoring of hyp against ref")
    p.add_argument("ref", help="reference RTTM")
    p.add_argument("hyp", help="hypothesis RTTM")
    p.add_argument("--uem", default=None, help="scoring regions (UEM file)")
    p.add_argument("--collar", type=float, default=DEFAULT_COLLAR,
                   help="no-score zone around reference boundaries, seconds")
    p.add_argument("--ignore-overlap", action="store_true",
                   help="exclude overlapping reference speech from scoring")
    p.add_argument("--table", action="store_true", help="aligned table instead of TSV lines")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("synth", formatter_class=fmt, help="generate a synthetic benchmark scenario")
    p.add_argument("out_dir", help="output directory")
    p.add_argument("--seed", type=int, required=True, help="PRNG seed (PCG64)")
    p.add_argument("--duration", type=float, default=120.0, help="scenario length, seconds")
    p.add_argument("--speech-fraction", type=float, default=0.6, help="expected fraction of speech")
    p.add_argument("--region-period", type=float, default=10.0,
                   help="length of alternating reliability regions, seconds")
    p.add_argument("--confident-hi", type=float, default=0.9, help="confident speech posterior")
    p.add_argument("--confident-lo", type=float, default=0.1, help="confident non-speech posterior")
    p.add_argument("--uncertain-center", type=float, default=0.5,
                   help="posterior level in unreliable regions")
    p.add_argument("--uncertain-jitter", type=float, default=0.05, help="uniform jitter half-width")
    p.add_argument("--grid-step", type=float, default=DEFAULT_GRID_STEP, help="frame step, seconds")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("pipeline", formatter_class=fmt,
                       help="vad/ingest, fuse, binarize and score in one run")
    p.add_argument("config", help="key=value config file (see package docs)")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (VadfuseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
