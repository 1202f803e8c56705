"""Score a toy two-speaker hypothesis and unpack every part of the report.

Covers the no-score collar around reference boundaries, the one-to-one
speaker mapping, the DER components (missed speech, false alarm, speaker
confusion over one shared denominator), JER, and the corpus roll-up.

Run:  python3 demos/03_scoring.py
"""

from vadfuse import (
    Annotation,
    ScoreConfig,
    Segment,
    format_score_table,
    optimal_mapping,
    overall_report,
    score,
    scoring_regions,
)


def pairs(timeline) -> list[tuple[float, float]]:
    return [(round(float(s.start), 2), round(float(s.end), 2)) for s in timeline]


def main() -> None:
    # Reference: alice talks twice, bob once in between.
    ref = Annotation("meeting", (
        (Segment(0.0, 10.0), "alice"),
        (Segment(10.0, 18.0), "bob"),
        (Segment(20.0, 30.0), "alice"),
    ))
    # Hypothesis: spk1 tracks alice but trims her endings; spk2 overshoots
    # bob by two seconds; a stray spk3 blip sits in silence.
    hyp = Annotation("meeting", (
        (Segment(0.1, 9.0), "spk1"),
        (Segment(10.0, 20.0), "spk2"),
        (Segment(20.1, 29.5), "spk1"),
        (Segment(31.0, 32.0), "spk3"),
    ))

    config = ScoreConfig(collar=0.25)
    regions = scoring_regions(ref, config, hyp)
    print("scored regions with a 0.25 s collar (boundary neighborhoods excused):")
    print("  ", pairs(regions))
    print()

    mapping = optimal_mapping(ref, hyp, regions)
    print("optimal speaker mapping (maximizes co-occurring time):", mapping)
    print("  spk3 stays unmapped: it never co-occurs with a reference speaker")
    print()

    report = score(ref, hyp, config)
    print(f"total reference speech in regions : {report.total_reference:6.2f} s")
    print(f"missed speech                     : {report.missed_speech:6.2f} %")
    print(f"false alarm                       : {report.false_alarm:6.2f} %")
    print(f"speaker confusion                 : {report.speaker_confusion:6.2f} %")
    print(f"DER = MS + FA + SC                : {report.der:6.2f} %")
    exact = report.der == report.missed_speech + report.false_alarm + report.speaker_confusion
    print(f"  (the sum is exact, not approximate: {exact})")
    print(f"JER (mean per-speaker Jaccard err): {report.jer:6.2f} %")
    print(f"  per speaker: " + ", ".join(f"{s}={v:.2f}%" for s, v in report.speaker_jer.items()))
    print()

    # What the collar forgives: nudge a hypothesis boundary within 0.25 s of
    # a reference boundary and nothing changes.
    nudged = Annotation("meeting", tuple(
        (Segment(seg.start + (0.12 if seg.start == 10.0 else 0.0), seg.end), label)
        for seg, label in hyp.entries
    ))
    same = score(ref, nudged, config)
    print("nudge the 10.0 s hypothesis onset to 10.12 s (inside the collar):")
    print(f"  DER before {report.der:.4f} %, after {same.der:.4f} %  -> unchanged")
    print()

    # Corpus roll-up: a second, cleaner recording, then one table.
    ref2 = Annotation("call", ((Segment(0.0, 12.0), "carol"),))
    hyp2 = Annotation("call", ((Segment(0.0, 12.0), "spkA"),))
    reports = {"meeting": report, "call": score(ref2, hyp2, config)}
    print("per-recording table plus duration-weighted OVERALL:")
    print(format_score_table(reports))
    overall = overall_report(reports)
    print(f"OVERALL DER {overall.der:.2f} % over {overall.total_reference:.1f} s of reference speech")


if __name__ == "__main__":
    main()
