"""Diarization and VAD scoring: missed speech, false alarm, confusion, DER, JER.

Scoring follows the usual evaluation conventions for diarization challenges:

* a no-score collar of +/- ``collar`` seconds around every reference segment
  boundary is excluded from scoring (default 250 ms),
* overlapping reference speech is scored unless ``score_overlap`` is False,
* reference and hypothesis speakers are matched by the one-to-one mapping
  that maximizes co-occurring time inside the scored regions,
* DER = (missed + false alarm + confusion) / total reference speech, with
  all components sharing the one denominator,
* JER is the unweighted mean over reference speakers of one minus the
  Jaccard overlap with their mapped hypothesis speaker; unmapped reference
  speakers score 100.

Recordings are scored independently; corpus-level numbers accumulate the
component durations (:func:`overall_report`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import Annotation, Segment, Timeline, crop
from .errors import ConfigError

DEFAULT_COLLAR = 0.25

# duration comparisons: differences at or below this count as ties
_DURATION_TOL = 1e-9


@dataclass(frozen=True)
class ScoreConfig:
    """Collar width, optional scoring regions and overlap handling."""

    collar: float = DEFAULT_COLLAR
    uem: Timeline | None = None
    score_overlap: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.collar) and self.collar >= 0):
            raise ConfigError(f"collar must be non-negative, got {self.collar}")


@dataclass(frozen=True)
class ScoreReport:
    """Score components for one recording (or a corpus accumulation).

    Component percentages share the ``total_reference`` denominator, so
    ``der == missed_speech + false_alarm + speaker_confusion`` exactly.
    ``jer`` is None when only the DER part has been computed.
    """

    missed_speech: float
    false_alarm: float
    speaker_confusion: float
    der: float
    total_reference: float
    mapping: dict[str, str]
    jer: float | None = None
    speaker_jer: dict[str, float] = field(default_factory=dict)
    scored_regions: Timeline | None = None


def _ref_overlap(ref: Annotation) -> Timeline:
    """Regions where two or more reference speakers are simultaneously active."""
    events: list[tuple[float, int]] = []
    for label in ref.speakers():
        for seg in ref.speaker_timeline(label):
            events.append((seg.start, 1))
            events.append((seg.end, -1))
    events.sort()
    out: list[Segment] = []
    active = 0
    overlap_start = None
    for t, delta in events:
        was_overlapped = active >= 2
        active += delta
        if not was_overlapped and active >= 2:
            overlap_start = t
        elif was_overlapped and active < 2:
            if t > overlap_start:
                out.append(Segment(overlap_start, t))
            overlap_start = None
    return Timeline(tuple(out))


def scoring_regions(ref: Annotation, config: ScoreConfig, hyp: Annotation | None = None) -> Timeline:
    """Regions that actually get scored.

    Starts from the UEM (or the union extent of ref and hyp when absent),
    then removes ``[b - collar, b + collar]`` around every reference segment
    boundary ``b``, and the reference overlap regions when ``score_overlap``
    is False.
    """
    if config.uem is not None:
        base = config.uem
    else:
        extents = [a.support().extent() for a in (ref, hyp) if a is not None]
        extents = [e for e in extents if e is not None]
        if not extents:
            return Timeline()
        hull = Segment(min(e.start for e in extents), max(e.end for e in extents))
        base = Timeline((hull,))

    if config.collar > 0:
        zones = []
        for seg, _ in ref.entries:
            for b in (seg.start, seg.end):
                lo = max(0.0, b - config.collar)
                hi = b + config.collar
                if hi > lo:
                    zones.append(Segment(lo, hi))
        base = base.subtract(Timeline(tuple(zones)))
    if not config.score_overlap:
        base = base.subtract(_ref_overlap(ref))
    return base


def _speaker_timelines(annotation: Annotation, regions: Timeline) -> dict[str, Timeline]:
    cropped = crop(annotation, regions)
    return {label: cropped.speaker_timeline(label) for label in cropped.speakers()}


def _cooccurrence(
    ref_tl: dict[str, Timeline], hyp_tl: dict[str, Timeline]
) -> tuple[list[str], list[str], np.ndarray]:
    ref_names = sorted(ref_tl)
    hyp_names = sorted(hyp_tl)
    weights = np.zeros((len(ref_names), len(hyp_names)))
    for i, r in enumerate(ref_names):
        for j, h in enumerate(hyp_names):
            weights[i, j] = ref_tl[r].intersect(hyp_tl[h]).duration
    return ref_names, hyp_names, weights


def _assignment_value(weights: np.ndarray) -> float:
    if weights.size == 0:
        return 0.0
    rows, cols = linear_sum_assignment(weights, maximize=True)
    return float(weights[rows, cols].sum())


def optimal_mapping(ref: Annotation, hyp: Annotation, regions: Timeline) -> dict[str, str]:
    """One-to-one partial speaker map maximizing co-occurring time in regions.

    Deterministic tie-break: reference speakers are visited in sorted order
    and each takes the sorted-smallest hypothesis speaker that preserves the
    optimal total. Pairs with zero co-occurrence stay unmapped.
    """
    ref_names, hyp_names, weights = _cooccurrence(
        _speaker_timelines(ref, regions), _speaker_timelines(hyp, regions)
    )
    mapping: dict[str, str] = {}
    if weights.size == 0:
        return mapping

    free_cols = list(range(len(hyp_names)))
    target = _assignment_value(weights)
    for i, r in enumerate(ref_names):
        sub_rows = list(range(i + 1, len(ref_names)))
        for pos, j in enumerate(free_cols):
            if weights[i, j] <= _DURATION_TOL:
                continue
            rest_cols = free_cols[:pos] + free_cols[pos + 1:]
            fixed = weights[i, j] + _assignment_value(weights[np.ix_(sub_rows, rest_cols)])
            if fixed >= target - _DURATION_TOL:
                mapping[r] = hyp_names[j]
                free_cols = rest_cols
                target -= weights[i, j]
                break
        else:
            # r stays unmapped; the optimum must be reachable without it
            target = _assignment_value(weights[np.ix_(sub_rows, free_cols)])
    return mapping


def der_components(ref: Annotation, hyp: Annotation, config: ScoreConfig) -> ScoreReport:
    """Missed speech, false alarm, speaker confusion and DER, as percentages.

    The scored regions are partitioned into maximal intervals on which the
    active reference and hypothesis speaker sets are constant; each interval
    contributes duration-weighted counts to the components.
    """
    regions = scoring_regions(ref, config, hyp)
    mapping = optimal_mapping(ref, hyp, regions)
    ref_tl = _speaker_timelines(ref, regions)
    hyp_tl = _speaker_timelines(hyp, regions)

    events: list[tuple[float, int, int, str]] = []  # (time, delta, side, speaker)
    for side, timelines in ((0, ref_tl), (1, hyp_tl)):
        for label, timeline in timelines.items():
            for seg in timeline:
                events.append((seg.start, +1, side, label))
                events.append((seg.end, -1, side, label))
    events.sort(key=lambda e: e[0])

    miss = fa = confusion = total = 0.0
    active: tuple[set[str], set[str]] = (set(), set())
    idx = 0
    while idx < len(events):
        t = events[idx][0]
        while idx < len(events) and events[idx][0] == t:
            _, delta, side, label = events[idx]
            if delta > 0:
                active[side].add(label)
            else:
                active[side].discard(label)
            idx += 1
        if idx >= len(events):
            break
        d = events[idx][0] - t
        if d <= 0:
            continue
        n_ref = len(active[0])
        n_hyp = len(active[1])
        n_correct = sum(1 for r in active[0] if mapping.get(r) in active[1])
        miss += d * max(0, n_ref - n_hyp)
        fa += d * max(0, n_hyp - n_ref)
        confusion += d * (min(n_ref, n_hyp) - n_correct)
        total += d * n_ref

    if total <= 0:
        raise ValueError("no reference speech in scoring regions")
    ms_pct = miss / total * 100.0
    fa_pct = fa / total * 100.0
    sc_pct = confusion / total * 100.0
    return ScoreReport(
        missed_speech=ms_pct,
        false_alarm=fa_pct,
        speaker_confusion=sc_pct,
        der=ms_pct + fa_pct + sc_pct,
        total_reference=total,
        mapping=mapping,
        scored_regions=regions,
    )


def jer(ref: Annotation, hyp: Annotation, mapping: dict[str, str], regions: Timeline) -> float:
    """Jaccard error rate: mean per-reference-speaker Jaccard distance, in percent.

    A mapped speaker scores ``100 * (1 - intersection/union)`` over time
    inside the regions; an unmapped reference speaker scores 100.
    """
    speakers = ref.speakers()
    if not speakers:
        raise ValueError("reference has no speakers")
    per_speaker = speaker_jer(ref, hyp, mapping, regions)
    # fsum keeps the mean independent of speaker iteration order.
    return math.fsum(per_speaker.values()) / len(per_speaker)


def speaker_jer(
    ref: Annotation, hyp: Annotation, mapping: dict[str, str], regions: Timeline
) -> dict[str, float]:
    """Per-reference-speaker Jaccard error rates behind :func:`jer`."""
    speakers = ref.speakers()
    if not speakers:
        raise ValueError("reference has no speakers")
    hyp_tl = _speaker_timelines(hyp, regions)
    out: dict[str, float] = {}
    for label in speakers:
        mapped = mapping.get(label)
        if mapped is None:
            out[label] = 100.0
            continue
        r = crop(ref.speaker_timeline(label), regions)
        h = hyp_tl.get(mapped, Timeline())
        inter = r.intersect(h).duration
        union = r.duration + h.duration - inter
        out[label] = 100.0 * (1.0 - inter / union) if union > 0 else 0.0
    return out


def detection_scores(
    ref_speech: Timeline, hyp_speech: Timeline, regions: Timeline
) -> tuple[float, float]:
    """Speech/non-speech miss and false-alarm rates in percent.

    ``miss = |ref - hyp| / |ref|`` and ``fa = |hyp - ref| / |regions - ref|``,
    everything intersected with the regions first. When the regions hold no
    non-speech at all, the false-alarm rate is 0 by convention.
    """
    ref_r = ref_speech.intersect(regions)
    hyp_r = hyp_speech.intersect(regions)
    if ref_r.duration <= 0:
        raise ValueError("no reference speech in scoring regions")
    miss = ref_r.subtract(hyp_r).duration / ref_r.duration * 100.0
    nonspeech = regions.subtract(ref_r).duration
    fa = hyp_r.subtract(ref_r).duration / nonspeech * 100.0 if nonspeech > 0 else 0.0
    return miss, fa


def score(ref: Annotation, hyp: Annotation, config: ScoreConfig | None = None) -> ScoreReport:
    """Complete per-recording report: DER components plus JER."""
    config = config or ScoreConfig()
    if ref.uri != hyp.uri:
        raise ValueError(f"uri mismatch: ref {ref.uri!r} vs hyp {hyp.uri!r}")
    report = der_components(ref, hyp, config)
    per_speaker = speaker_jer(ref, hyp, report.mapping, report.scored_regions)
    return ScoreReport(
        missed_speech=report.missed_speech,
        false_alarm=report.false_alarm,
        speaker_confusion=report.speaker_confusion,
        der=report.der,
        total_reference=report.total_reference,
        mapping=report.mapping,
        jer=math.fsum(per_speaker.values()) / len(per_speaker),
        speaker_jer=per_speaker,
        scored_regions=report.scored_regions,
    )


def overall_report(reports: dict[str, ScoreReport]) -> ScoreReport:
    """Corpus accumulation: summed component durations, speaker-mean JER."""
    if not reports:
        raise ValueError("nothing to accumulate")
    total = sum(r.total_reference for r in reports.values())
    if total <= 0:
        raise ValueError("no reference speech across recordings")
    miss = sum(r.missed_speech * r.total_reference / 100.0 for r in reports.values())
    fa = sum(r.false_alarm * r.total_reference / 100.0 for r in reports.values())
    sc = sum(r.speaker_confusion * r.total_reference / 100.0 for r in reports.values())
    all_jers = [j for r in reports.values() for j in r.speaker_jer.values()]
    ms_pct = miss / total * 100.0
    fa_pct = fa / total * 100.0
    sc_pct = sc / total * 100.0
    return ScoreReport(
        missed_speech=ms_pct,
        false_alarm=fa_pct,
        speaker_confusion=sc_pct,
        der=ms_pct + fa_pct + sc_pct,
        total_reference=total,
        mapping={},
        jer=math.fsum(all_jers) / len(all_jers) if all_jers else None,
        speaker_jer={},
    )


def _report_cells(name: str, report: ScoreReport) -> list[str]:
    jer_cell = "-" if report.jer is None else f"{report.jer:.2f}"
    return [
        name,
        f"{report.missed_speech:.2f}",
        f"{report.false_alarm:.2f}",
        f"{report.speaker_confusion:.2f}",
        f"{report.der:.2f}",
        jer_cell,
        f"{report.total_reference:.2f}",
    ]


def format_score_lines(reports: dict[str, ScoreReport]) -> str:
    """Machine-readable score export: one TSV line per recording plus OVERALL."""
    lines = ["#uri\tMS\tFA\tSC\tDER\tJER\tTOTAL"]
    for uri in sorted(reports):
        lines.append("\t".join(_report_cells(uri, reports[uri])))
    lines.append("\t".join(_report_cells("OVERALL", overall_report(reports))))
    return "".join(line + "\n" for line in lines)


def format_score_table(reports: dict[str, ScoreReport]) -> str:
    """Aligned, human-readable version of :func:`format_score_lines`."""
    rows = [["uri", "MS", "FA", "SC", "DER", "JER", "TOTAL"]]
    for uri in sorted(reports):
        rows.append(_report_cells(uri, reports[uri]))
    rows.append(_report_cells("OVERALL", overall_report(reports)))
    widths = [max(len(row[c]) for row in rows) for c in range(len(rows[0]))]
    out = []
    for row in rows:
        cells = [row[0].ljust(widths[0])]
        cells += [row[c].rjust(widths[c]) for c in range(1, len(row))]
        out.append("  ".join(cells).rstrip())
    return "".join(line + "\n" for line in out)
