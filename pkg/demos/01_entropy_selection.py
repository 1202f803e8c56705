"""Walk through entropy-based stream selection on a tiny two-detector setup.

Two detectors watch the same six seconds of audio. Detector 0 is sharp for
the first three seconds and hedges afterwards; detector 1 is the mirror
image. Fusion scores each 250 ms window by mean binary entropy (how unsure
a detector is, in bits) and copies the decision of whichever detector is
most sure there.

Run:  python3 demos/01_entropy_selection.py
"""

import numpy as np

from vadfuse import (
    FusionConfig,
    PosteriorStream,
    StreamSet,
    binary_entropy,
    fuse,
    mask_to_timeline,
)

STEP = 0.01  # 10 ms frames
N = 600      # 6 seconds


def describe(p: float) -> str:
    return f"p={p:4.2f}  ->  H={binary_entropy(p):.4f} bits"


def main() -> None:
    print("binary entropy: 0 bits means certain, 1 bit means a coin flip")
    for p in (0.01, 0.10, 0.30, 0.50, 0.70, 0.99):
        print("   ", describe(p))
    print()

    # Ground truth: speech during [1, 2.5) and [4, 5.5).
    speech = np.zeros(N, dtype=bool)
    speech[100:250] = True
    speech[400:550] = True

    # Detector 0: confident for t < 3 (0.95 / 0.05), coin-flippy after.
    # Detector 1: the other way around.
    half = N // 2
    confident = np.where(speech, 0.95, 0.05)
    hedging = np.where(speech, 0.55, 0.45)
    values0 = np.concatenate([confident[:half], hedging[half:]])
    values1 = np.concatenate([hedging[:half], confident[half:]])

    streams = StreamSet((
        PosteriorStream("demo", 0.0, STEP, values0),
        PosteriorStream("demo", 0.0, STEP, values1),
    ))

    # Plain 0.5 thresholds keep the demo about the selection itself.
    config = FusionConfig(per_stream_onset=(0.5, 0.5), per_stream_offset=(0.5, 0.5))
    fused, trace = fuse(streams, config)

    print(f"{len(trace.window_bounds)} windows of {config.window:.2f} s;"
          " per-window mean entropy and the pick:")
    print("  window        H(stream 0)  H(stream 1)  selected")
    for j, bounds in enumerate(trace.window_bounds):
        if j % 4 != 0:  # every second, to keep the table short
            continue
        e0, e1 = trace.entropies[j]
        print(f"  [{bounds.start:4.2f},{bounds.end:4.2f})   "
              f"{e0:11.4f}  {e1:11.4f}  stream {trace.selected[j]}")

    switches = int(np.count_nonzero(np.diff(trace.selected)))
    print(f"\nselection flips {switches} time(s); detector 0 owns the sure half,"
          " detector 1 the other")

    got = mask_to_timeline(fused.values >= 0.5, fused.start, fused.step)
    want = mask_to_timeline(speech, 0.0, STEP)
    as_pairs = lambda tl: [(round(float(s.start), 2), round(float(s.end), 2)) for s in tl]
    print("\nfused segmentation :", as_pairs(got))
    print("ground truth       :", as_pairs(want))
    print("exact match        :", got == want)


if __name__ == "__main__":
    main()
