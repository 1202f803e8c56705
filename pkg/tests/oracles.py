"""Independent reference implementations the tests compare against.

Everything here is deliberately written from the definitions, not from the
library: high-precision entropy via mpmath, hysteresis as a literal
two-state simulation, and a brute-force diarization scorer that sweeps
sorted boundary points and tries every injective speaker mapping. Slow and
simple on purpose.
"""

from __future__ import annotations

import itertools
import struct

import mpmath

mpmath.mp.dps = 50

Interval = tuple[float, float]
LabeledInterval = tuple[float, float, str]


def entropy_reference(p: float) -> float:
    """Binary entropy at 50 decimal digits, returned as the nearest float."""
    if p == 0 or p == 1:
        return 0.0
    mp = mpmath.mpf(p)
    h = -mp * mpmath.log(mp, 2) - (1 - mp) * mpmath.log(1 - mp, 2)
    return float(h)


def build_wav(
    pcm: bytes,
    rate: int = 16000,
    channels: int = 1,
    bits: int = 16,
    audio_format: int = 1,
    extra_chunks: bytes = b"",
) -> bytes:
    """Hand-assembled RIFF/WAVE bytes, independent of any wave library."""
    fmt = b"fmt " + struct.pack(
        "<IHHIIHH",
        16,
        audio_format,
        channels,
        rate,
        rate * channels * bits // 8,
        channels * bits // 8,
        bits,
    )
    data = b"data" + struct.pack("<I", len(pcm)) + pcm
    body = fmt + extra_chunks + data
    return b"RIFF" + struct.pack("<I", 4 + len(body)) + b"WAVE" + body


def hysteresis_reference(
    values, onset: float, offset: float, start: float, step: float
) -> list[Interval]:
    """Frame-by-frame onset/offset state machine emitting (start, end) runs."""
    segments: list[Interval] = []
    active = False
    active_since = 0.0
    for i, v in enumerate(values):
        if not active:
            if v >= onset:
                active = True
                active_since = start + i * step
        else:
            if v < offset:
                active = False
                segments.append((active_since, start + i * step))
    if active:
        segments.append((active_since, start + len(values) * step))
    return segments


# ---------------------------------------------------------------------------
# plain interval-set arithmetic on sorted (start, end) lists


def merge_intervals(intervals: list[Interval]) -> list[Interval]:
    out: list[Interval] = []
    for s, e in sorted(intervals):
        if e <= s:
            continue
        if out and s <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], e))
        else:
            out.append((s, e))
    return out


def subtract_intervals(base: list[Interval], holes: list[Interval]) -> list[Interval]:
    holes = merge_intervals(holes)
    out: list[Interval] = []
    for s, e in merge_intervals(base):
        cursor = s
        for hs, he in holes:
            if he <= cursor:
                continue
            if hs >= e:
                break
            if hs > cursor:
                out.append((cursor, hs))
            cursor = max(cursor, he)
        if cursor < e:
            out.append((cursor, e))
    return out


def intersect_intervals(a: list[Interval], b: list[Interval]) -> list[Interval]:
    out: list[Interval] = []
    for s, e in merge_intervals(a):
        for hs, he in merge_intervals(b):
            lo, hi = max(s, hs), min(e, he)
            if hi > lo:
                out.append((lo, hi))
    return merge_intervals(out)


def total_duration(intervals: list[Interval]) -> float:
    return sum(e - s for s, e in intervals)


# ---------------------------------------------------------------------------
# brute-force diarization scorer


def reference_scoring_regions(
    ref: list[LabeledInterval],
    hyp: list[LabeledInterval],
    collar: float,
    uem: list[Interval] | None,
) -> list[Interval]:
    if uem is not None:
        base = merge_intervals(uem)
    else:
        points = [s for s, _, _ in ref + hyp] + [e for _, e, _ in ref + hyp]
        if not points:
            return []
        base = [(min(points), max(points))]
    zones = []
    for s, e, _ in ref:
        zones.append((max(0.0, s - collar), s + collar))
        zones.append((max(0.0, e - collar), e + collar))
    return subtract_intervals(base, zones) if collar > 0 else base


def _per_speaker(segments: list[LabeledInterval], regions: list[Interval]) -> dict[str, list[Interval]]:
    out: dict[str, list[Interval]] = {}
    for s, e, label in segments:
        out.setdefault(label, []).append((s, e))
    return {
        label: intersect_intervals(intervals, regions)
        for label, intervals in out.items()
        if intersect_intervals(intervals, regions)
    }


def _active_at(timelines: dict[str, list[Interval]], t: float) -> set[str]:
    return {label for label, ivs in timelines.items() if any(s <= t < e for s, e in ivs)}


def brute_force_score(
    ref: list[LabeledInterval],
    hyp: list[LabeledInterval],
    collar: float = 0.0,
    uem: list[Interval] | None = None,
) -> dict[str, float] | None:
    """MS/FA/SC/DER percentages by boundary sweep + exhaustive mapping.

    Returns None when the scoring regions hold no reference speech (the
    library raises there).
    """
    regions = reference_scoring_regions(ref, hyp, collar, uem)
    ref_tl = _per_speaker(ref, regions)
    hyp_tl = _per_speaker(hyp, regions)

    points = sorted(
        {t for ivs in list(ref_tl.values()) + list(hyp_tl.values()) for s, e in ivs for t in (s, e)}
    )
    spans = [(points[i], points[i + 1]) for i in range(len(points) - 1)]

    # co-occurrence totals, then the best injective mapping value
    ref_names = sorted(ref_tl)
    hyp_names = sorted(hyp_tl)
    co = {
        (r, h): total_duration(intersect_intervals(ref_tl[r], hyp_tl[h]))
        for r in ref_names
        for h in hyp_names
    }
    best = 0.0
    k = min(len(ref_names), len(hyp_names))
    for size in range(k + 1):
        for ref_sub in itertools.combinations(ref_names, size):
            for hyp_perm in itertools.permutations(hyp_names, size):
                best = max(best, sum(co[r, h] for r, h in zip(ref_sub, hyp_perm)))

    miss = fa = overlap_min = total = 0.0
    for s, e in spans:
        mid = (s + e) / 2
        d = e - s
        n_ref = len(_active_at(ref_tl, mid))
        n_hyp = len(_active_at(hyp_tl, mid))
        miss += d * max(0, n_ref - n_hyp)
        fa += d * max(0, n_hyp - n_ref)
        overlap_min += d * min(n_ref, n_hyp)
        total += d * n_ref

    if total <= 0:
        return None
    confusion = overlap_min - best
    return {
        "miss": miss / total * 100.0,
        "fa": fa / total * 100.0,
        "confusion": confusion / total * 100.0,
        "der": (miss + fa + confusion) / total * 100.0,
        "total": total,
        "best_mapping_value": best,
    }
