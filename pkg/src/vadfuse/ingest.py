"""Parsers and writers for every on-disk format, plus a reference energy VAD.

Formats:

* RTTM ``SPEAKER`` lines for speaker-labeled segments,
* UEM scoring-region lists,
* ``vadpost v1``, a line-oriented text interchange format for posterior
  streams (see :func:`write_posteriors` for the exact layout),
* 16-bit PCM mono RIFF/WAVE audio.

All functions take and return text or bytes; file I/O is the caller's
responsibility. Malformed input of any kind raises
:class:`~vadfuse.errors.ParseError`, never anything else.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from decimal import Decimal

import numpy as np

from .core import Annotation, PosteriorStream, Segment, Timeline
from .errors import ParseError

# mapping uri -> Timeline of scoring regions
UemMap = dict[str, Timeline]

VADPOST_HEADER = "#vadpost v1"


@dataclass(frozen=True, eq=False)
class WavAudio:
    """Mono audio samples scaled to [-1, 1]."""

    sample_rate: int
    samples: np.ndarray

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError(f"sample rate must be positive, got {self.sample_rate}")
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.size == 0:
            raise ValueError("audio must be non-empty")
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


def _parse_time(token: str, what: str, line_no: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"{what} is not a number: {token!r}", line_no) from None
    if not math.isfinite(value):
        raise ParseError(f"{what} must be finite: {token!r}", line_no)
    return value


def parse_rttm(text: str) -> list[Annotation]:
    """Parse RTTM SPEAKER lines into Annotations grouped by uri.

    Lines starting with ``;;`` and lines whose first field is not SPEAKER
    are skipped. A SPEAKER line must have exactly 10 whitespace-separated
    fields: ``SPEAKER <uri> <chan> <tbeg> <tdur> <NA> <NA> <speaker> <NA>
    <NA>``. Returned annotations are sorted by uri.
    """
    entries: dict[str, list[tuple[Segment, str]]] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(";;"):
            continue
        fields = stripped.split()
        if fields[0] != "SPEAKER":
            continue
        if len(fields) != 10:
            raise ParseError(
                f"SPEAKER line has {len(fields)} fields, expected 10", line_no
            )
        uri = fields[1]
        tbeg = _parse_time(fields[3], "tbeg", line_no)
        tdur = _parse_time(fields[4], "tdur", line_no)
        if tbeg < 0:
            raise ParseError(f"tbeg must be non-negative, got {tbeg}", line_no)
        if tdur <= 0:
            raise ParseError(f"tdur must be positive, got {tdur}", line_no)
        if not math.isfinite(tbeg + tdur):
            raise ParseError(f"segment end overflows: {tbeg} + {tdur}", line_no)
        entries.setdefault(uri, []).append((Segment(tbeg, tbeg + tdur), fields[7]))
    return [Annotation(uri, tuple(entries[uri])) for uri in sorted(entries)]


def write_rttm(annotations: list[Annotation]) -> str:
    """Serialize Annotations as RTTM SPEAKER lines.

    Entries are sorted by (uri, start, speaker). Both endpoints are rounded
    to 3 decimals independently and the written duration is the difference
    of the rounded endpoints, which keeps adjacent segments adjacent after
    rounding. Reparsing reproduces the input to 1 ms.
    """
    rows = []
    for annotation in annotations:
        for seg, label in annotation.entries:
            rows.append((annotation.uri, seg.start, label, seg.end))
    rows.sort()
    lines = []
    for uri, start, label, end in rows:
        tbeg = round(start, 3)
        tdur = round(end, 3) - tbeg
        lines.append(f"SPEAKER {uri} 1 {tbeg:.3f} {tdur:.3f} <NA> <NA> {label} <NA> <NA>")
    return "".join(line + "\n" for line in lines)


def parse_uem(text: str) -> UemMap:
    """Parse UEM scoring regions: ``<uri> <chan> <tbeg> <tend>`` per line.

    Regions for one uri are unioned into a Timeline. Lines starting with
    ``;;`` and blank lines are skipped.
    """
    regions: dict[str, list[Segment]] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(";;"):
            continue
        fields = stripped.split()
        if len(fields) != 4:
            raise ParseError(f"UEM line has {len(fields)} fields, expected 4", line_no)
        tbeg = _parse_time(fields[2], "tbeg", line_no)
        tend = _parse_time(fields[3], "tend", line_no)
        if tbeg < 0:
            raise ParseError(f"tbeg must be non-negative, got {tbeg}", line_no)
        if tend <= tbeg:
            raise ParseError(f"tend must exceed tbeg, got {tbeg} .. {tend}", line_no)
        regions.setdefault(fields[0], []).append(Segment(tbeg, tend))
    return {uri: Timeline(tuple(segs)) for uri, segs in regions.items()}


def write_uem(uem: UemMap) -> str:
    """Serialize scoring regions, one ``<uri> 1 <tbeg> <tend>`` line per segment."""
    lines = []
    for uri in sorted(uem):
        for seg in uem[uri]:
            lines.append(f"{uri} 1 {seg.start:.3f} {seg.end:.3f}")
    return "".join(line + "\n" for line in lines)


def _format_decimal(value: float) -> str:
    """Up to 9 significant digits, always positional (no exponent)."""
    text = format(value, ".9g")
    if "e" in text or "E" in text:
        text = format(Decimal(text), "f")
    return text


def _format_exact(value: float) -> str:
    """Shortest positional decimal that parses back to the same float."""
    text = repr(float(value))
    if "e" in text or "E" in text:
        text = format(Decimal(text), "f")
    return text


def read_posteriors(text: str) -> PosteriorStream:
    """Parse a ``vadpost v1`` file into a PosteriorStream.

    Layout: header line ``#vadpost v1``, then ``uri=``, ``start=``,
    ``step=`` lines in that order, then one posterior in [0, 1] per line.
    """
    lines = text.splitlines()
    if not lines or lines[0] != VADPOST_HEADER:
        raise ParseError(f"missing {VADPOST_HEADER!r} header", 1)
    if len(lines) < 4:
        raise ParseError("truncated header block", len(lines))
    for idx, key in ((1, "uri"), (2, "start"), (3, "step")):
        if not lines[idx].startswith(key + "="):
            raise ParseError(f"expected {key}=<value>", idx + 1)
    uri = lines[1][len("uri="):]
    if not uri:
        raise ParseError("uri must be non-empty", 2)
    start = _parse_time(lines[2][len("start="):], "start", 3)
    step = _parse_time(lines[3][len("step="):], "step", 4)
    if start < 0:
        raise ParseError(f"start must be non-negative, got {start}", 3)
    if step <= 0:
        raise ParseError(f"step must be positive, got {step}", 4)

    values = []
    for line_no, line in enumerate(lines[4:], start=5):
        value = _parse_time(line, "posterior", line_no)
        if not 0.0 <= value <= 1.0:
            raise ParseError(f"posterior outside [0, 1]: {value}", line_no)
        values.append(value)
    if not values:
        raise ParseError("no posterior values", len(lines))
    return PosteriorStream(uri, start, step, np.array(values))


def write_posteriors(stream: PosteriorStream) -> str:
    """Serialize a PosteriorStream as ``vadpost v1`` text.

    ASCII with LF line endings. Posterior lines carry up to 9 significant
    digits in plain decimal notation, so a read/write round trip preserves
    every value to 1e-9; the grid header (start/step) is written at full
    precision and round-trips exactly.
    """
    lines = [
        VADPOST_HEADER,
        f"uri={stream.uri}",
        f"start={_format_exact(stream.start)}",
        f"step={_format_exact(stream.step)}",
    ]
    lines.extend(_format_decimal(v) for v in stream.values)
    return "".join(line + "\n" for line in lines)


def read_wav(data: bytes) -> WavAudio:
    """Decode a RIFF/WAVE file: PCM, 16-bit, mono only.

    Samples are scaled to [-1, 1] by division by 32768. Anything else
    (compressed formats, stereo, truncated chunks) raises ParseError.
    """
    if len(data) < 12:
        raise ParseError("too short for a RIFF header")
    if data[0:4] != b"RIFF":
        raise ParseError("not a RIFF file")
    if data[8:12] != b"WAVE":
        raise ParseError("RIFF file is not WAVE")

    fmt = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos:pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body_start = pos + 8
        if body_start + chunk_size > len(data):
            raise ParseError(f"truncated {chunk_id!r} chunk")
        if chunk_id == b"fmt ":
            if chunk_size < 16:
                raise ParseError("fmt chunk too small")
            fmt = struct.unpack_from("<HHIIHH", data, body_start)
        elif chunk_id == b"data":
            if fmt is None:
                raise ParseError("data chunk before fmt chunk")
            audio_format, channels, sample_rate, _, _, bits = fmt
            if audio_format != 1:
                raise ParseError(f"not PCM (format tag {audio_format})")
            if channels != 1:
                raise ParseError(f"only mono supported, got {channels} channels")
            if bits != 16:
                raise ParseError(f"only 16-bit samples supported, got {bits}")
            if sample_rate <= 0:
                raise ParseError(f"invalid sample rate {sample_rate}")
            if chunk_size % 2 != 0:
                raise ParseError("data chunk holds a partial 16-bit sample")
            if chunk_size == 0:
                raise ParseError("data chunk is empty")
            raw = np.frombuffer(data, dtype="<i2", count=chunk_size // 2, offset=body_start)
            return WavAudio(sample_rate, raw.astype(np.float64) / 32768.0)
        # chunks are word-aligned: odd sizes carry a pad byte
        pos = body_start + chunk_size + (chunk_size % 2)
    raise ParseError("no data chunk found")


def energy_vad(
    audio: WavAudio, frame: float = 0.025, hop: float = 0.010, uri: str = "audio"
) -> PosteriorStream:
    """Deterministic, non-neural posterior source from frame energies.

    Per frame, takes the log RMS energy (floored at 1e-10), centers it with
    the per-file median and scales by 3x the median absolute deviation, then
    maps through a logistic. Median/MAD rather than mean/std keeps the
    logistic centered between the speech and silence energy modes. A file
    with degenerate spread (MAD < 1e-6, e.g. digital silence or pure DC)
    yields a constant 0.5.
    """
    if not hop > 0:
        raise ValueError(f"hop must be positive, got {hop}")
    if frame < hop:
        raise ValueError(f"frame must be at least hop, got frame={frame} hop={hop}")
    n_samples = audio.samples.size
    rate = audio.sample_rate
    n_frames = int(math.floor((n_samples / rate - frame) / hop)) + 1
    if n_frames < 1:
        raise ValueError("audio is shorter than one analysis frame")

    frame_len = max(1, int(round(frame * rate)))
    log_energy = np.empty(n_frames)
    for i in range(n_frames):
        lo = min(int(round(i * hop * rate)), n_samples - 1)
        chunk = audio.samples[lo:min(lo + frame_len, n_samples)]
        rms = math.sqrt(float(np.mean(chunk * chunk)))
        log_energy[i] = math.log(max(rms, 1e-10))

    center = float(np.median(log_energy))
    spread = float(np.median(np.abs(log_energy - center)))
    if spread < 1e-6:
        values = np.full(n_frames, 0.5)
    else:
        z = np.clip((log_energy - center) / (3.0 * spread), -36.0, 36.0)
        values = 1.0 / (1.0 + np.exp(-z))
    return PosteriorStream(uri=uri, start=0.0, step=hop, values=values)
