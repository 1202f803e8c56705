"""Show why binarization uses hysteresis plus minimum-duration smoothing.

A posterior trace that hovers near a single threshold makes a plain
comparison chatter: every wiggle across the line toggles speech on or off.
Hysteresis separates the "turn on" bar from the "stay on" bar, and the
duration rules then fill breath-length gaps and drop blips.

Run:  python3 demos/02_hysteresis_smoothing.py
"""

import numpy as np

from vadfuse import (
    BinarizeConfig,
    PosteriorStream,
    binarize,
    drop_short,
    fill_gaps,
    hysteresis,
    mask_to_timeline,
)

STEP = 0.01


def pairs(timeline) -> list[tuple[float, float]]:
    return [(round(float(s.start), 2), round(float(s.end), 2)) for s in timeline]


def main() -> None:
    rng = np.random.default_rng(7)

    # One second of silence, two of speech, one of silence — but the speech
    # posteriors wobble around 0.72 so they keep re-crossing a 0.75 line.
    values = np.concatenate([
        np.full(100, 0.05),
        0.72 + rng.uniform(-0.06, 0.06, size=200),
        np.full(100, 0.05),
    ])
    stream = PosteriorStream("demo", 0.0, STEP, values)

    chattering = hysteresis(stream, onset=0.75, offset=0.75)  # plain threshold
    steady = hysteresis(stream, onset=0.75, offset=0.60)

    print(f"same trace, same onset bar ({0.75}):")
    print(f"  plain threshold      -> {len(chattering)} segments", pairs(chattering)[:6], "...")
    print(f"  hysteresis (off 0.6) -> {len(steady)} segments", pairs(steady))
    print()

    # Smoothing: a breath pause shorter than min_duration_off gets filled,
    # a click shorter than min_duration_on gets dropped.
    mask = np.zeros(500, dtype=bool)
    mask[50:150] = True    # 1.0 s of speech
    mask[170:300] = True   # 1.3 s more after a 0.2 s breath
    mask[400:405] = True   # 50 ms click
    rough = mask_to_timeline(mask, 0.0, STEP)
    config = BinarizeConfig(min_duration_on=0.182, min_duration_off=0.501)

    print("minimum-duration rules (fill gaps < 0.501 s, drop runs < 0.182 s):")
    print("  raw runs        :", pairs(rough))
    print("  gaps filled     :", pairs(fill_gaps(rough, config.min_duration_off)))
    print("  then blips cut  :", pairs(drop_short(fill_gaps(rough, config.min_duration_off),
                                                  config.min_duration_on)))
    print()

    # The full binarize() pipeline on the wobbly stream.
    final = binarize(stream, BinarizeConfig(onset=0.75, offset=0.60,
                                            min_duration_on=0.182,
                                            min_duration_off=0.501))
    print("hysteresis + smoothing on the wobbly stream:", pairs(final))


if __name__ == "__main__":
    main()
