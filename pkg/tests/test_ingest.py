"""File formats (RTTM, UEM, vadpost, WAV) and the reference energy VAD."""

import struct

import numpy as np
import pytest

from vadfuse import (
    Annotation,
    PosteriorStream,
    Segment,
    Timeline,
    energy_vad,
    parse_rttm,
    parse_uem,
    read_posteriors,
    read_wav,
    write_posteriors,
    write_rttm,
    write_uem,
)
from vadfuse.errors import ParseError

from oracles import build_wav


class TestParseRttm:
    def test_single_line(self):
        out = parse_rttm("SPEAKER rec1 1 0.50 2.00 <NA> <NA> spkA <NA> <NA>\n")
        assert len(out) == 1
        ann = out[0]
        assert ann.uri == "rec1"
        (seg, label), = ann.entries
        assert (seg.start, seg.end, label) == (0.5, 2.5, "spkA")

    def test_empty_input(self):
        assert parse_rttm("") == []

    def test_grouped_and_sorted_by_uri(self):
        text = (
            "SPEAKER b 1 0 1 <NA> <NA> x <NA> <NA>\n"
            "SPEAKER a 1 0 1 <NA> <NA> y <NA> <NA>\n"
            "SPEAKER b 1 2 1 <NA> <NA> z <NA> <NA>\n"
        )
        out = parse_rttm(text)
        assert [ann.uri for ann in out] == ["a", "b"]
        assert len(out[1].entries) == 2

    def test_skips_comments_and_other_records(self):
        text = (
            ";; a comment line\n"
            "\n"
            "SPKR-INFO rec1 1 <NA> <NA> <NA> unknown spkA <NA>\n"
            "SPEAKER rec1 1 1.0 1.0 <NA> <NA> spkA <NA> <NA>\n"
        )
        assert len(parse_rttm(text)[0].entries) == 1

    def test_negative_duration_rejected(self):
        with pytest.raises(ParseError, match="line 1"):
            parse_rttm("SPEAKER rec1 1 0.5 -1 <NA> <NA> s <NA> <NA>\n")

    def test_error_names_line_number(self):
        text = (
            "SPEAKER rec1 1 0 1 <NA> <NA> a <NA> <NA>\n"
            "SPEAKER rec1 1 zero 1 <NA> <NA> a <NA> <NA>\n"
        )
        with pytest.raises(ParseError, match="line 2"):
            parse_rttm(text)
        with pytest.raises(ParseError, match="10"):
            parse_rttm("SPEAKER rec1 1 0 1 <NA> <NA> a\n")


class TestWriteRttm:
    def test_layout_and_rounding(self):
        ann = Annotation("rec", ((Segment(0.1234, 0.9876), "spk"),))
        assert write_rttm([ann]) == "SPEAKER rec 1 0.123 0.865 <NA> <NA> spk <NA> <NA>\n"

    def test_rounded_endpoints_keep_adjacency(self):
        # 3-decimal rounding happens on the endpoints, so segments sharing a
        # boundary still share it in the output
        ann = Annotation(
            "rec",
            ((Segment(0.0, 1.23456), "a"), (Segment(1.23456, 2.0), "b")),
        )
        lines = write_rttm([ann]).splitlines()
        end_a = float(lines[0].split()[3]) + float(lines[0].split()[4])
        beg_b = float(lines[1].split()[3])
        assert end_a == pytest.approx(beg_b, abs=1e-12)

    def test_sorted_output(self):
        anns = [
            Annotation("b", ((Segment(0, 1), "x"),)),
            Annotation("a", ((Segment(5, 6), "y"), (Segment(1, 2), "z"))),
        ]
        uris = [line.split()[1] for line in write_rttm(anns).splitlines()]
        starts = [float(line.split()[3]) for line in write_rttm(anns).splitlines()]
        assert uris == ["a", "a", "b"] and starts == [1.0, 5.0, 0.0]

    def test_empty(self):
        assert write_rttm([]) == ""

    def test_round_trip_within_1ms(self):
        rng = np.random.default_rng(9)
        entries = []
        for _ in range(40):
            start = float(rng.uniform(0, 500))
            entries.append((Segment(start, start + float(rng.uniform(0.01, 20))), f"s{rng.integers(4)}"))
        ann = Annotation("rec", tuple(entries))
        text = write_rttm([ann])
        (back,) = parse_rttm(text)
        assert len(back.entries) == len(ann.entries)
        for (got, gl), (want, wl) in zip(
            sorted(back.entries, key=lambda e: (e[0], e[1])),
            sorted(ann.entries, key=lambda e: (e[0], e[1])),
        ):
            assert gl == wl
            assert abs(got.start - want.start) <= 0.0005 + 1e-12
            assert abs(got.end - want.end) <= 0.0005 + 1e-12
        # one rounding pass is the fixed point
        assert write_rttm([back]) == text


class TestUem:
    def test_parse_example(self):
        out = parse_uem("rec1 1 0.0 60.0\n")
        assert set(out) == {"rec1"}
        assert [(s.start, s.end) for s in out["rec1"]] == [(0.0, 60.0)]

    def test_overlapping_lines_merge(self):
        out = parse_uem("r 1 0 10\nr 1 5 15\n")
        assert [(s.start, s.end) for s in out["r"]] == [(0.0, 15.0)]

    def test_empty(self):
        assert parse_uem("") == {}

    def test_errors(self):
        with pytest.raises(ParseError, match="line 1"):
            parse_uem("r 1 5 5\n")
        with pytest.raises(ParseError, match="4"):
            parse_uem("r 1 5\n")

    def test_round_trip(self):
        uem = {"a": Timeline((Segment(0, 10.123), Segment(20, 30))), "b": Timeline((Segment(1, 2),))}
        back = parse_uem(write_uem(uem))
        assert set(back) == {"a", "b"}
        for uri in uem:
            for got, want in zip(back[uri], uem[uri]):
                assert abs(got.start - want.start) <= 0.0005
                assert abs(got.end - want.end) <= 0.0005


class TestVadpost:
    def test_parse_example(self):
        text = "#vadpost v1\nuri=rec1\nstart=0\nstep=0.01\n0.5\n0.9\n"
        s = read_posteriors(text)
        assert (s.uri, s.start, s.step, s.n_frames) == ("rec1", 0.0, 0.01, 2)
        np.testing.assert_array_equal(s.values, [0.5, 0.9])

    def test_header_required(self):
        with pytest.raises(ParseError, match="header"):
            read_posteriors("uri=rec1\nstart=0\nstep=0.01\n0.5\n")

    def test_header_order_enforced(self):
        with pytest.raises(ParseError):
            read_posteriors("#vadpost v1\nstart=0\nuri=x\nstep=0.01\n0.5\n")

    def test_range_check(self):
        with pytest.raises(ParseError, match="line 5"):
            read_posteriors("#vadpost v1\nuri=x\nstart=0\nstep=0.01\n1.5\n")

    def test_step_must_be_positive(self):
        with pytest.raises(ParseError):
            read_posteriors("#vadpost v1\nuri=x\nstart=0\nstep=0\n0.5\n")

    def test_round_trip_to_1e9(self):
        rng = np.random.default_rng(21)
        s = PosteriorStream("rec/x 1", 12.3456789, 0.016, rng.random(300))
        back = read_posteriors(write_posteriors(s))
        assert back.uri == s.uri
        assert abs(back.start - s.start) <= 1e-9
        assert abs(back.step - s.step) <= 1e-9
        assert np.max(np.abs(back.values - s.values)) <= 1e-9
        # second pass is byte-identical
        assert write_posteriors(back) == write_posteriors(read_posteriors(write_posteriors(back)))

    def test_plain_decimal_notation(self):
        s = PosteriorStream("u", 0.0, 0.01, np.array([1.23e-7, 0.5]))
        text = write_posteriors(s)
        value_lines = text.splitlines()[4:]
        assert value_lines == ["0.000000123", "0.5"]
        assert abs(read_posteriors(text).values[0] - 1.23e-7) <= 1e-9


class TestReadWav:
    def test_minimal_file(self):
        pcm = struct.pack("<4h", 0, 16384, -16384, -32768)
        audio = read_wav(build_wav(pcm))
        assert audio.sample_rate == 16000
        np.testing.assert_allclose(audio.samples, [0.0, 0.5, -0.5, -1.0])

    def test_all_zero(self):
        audio = read_wav(build_wav(b"\x00\x00" * 8))
        assert np.all(audio.samples == 0.0)

    def test_stereo_rejected(self):
        with pytest.raises(ParseError, match="mono"):
            read_wav(build_wav(b"\x00\x00\x00\x00", channels=2))

    def test_non_pcm_rejected(self):
        with pytest.raises(ParseError, match="PCM"):
            read_wav(build_wav(b"\x00\x00", audio_format=3))

    def test_wrong_bit_depth_rejected(self):
        with pytest.raises(ParseError, match="16-bit"):
            read_wav(build_wav(b"\x00\x00", bits=8))

    def test_truncated_data_chunk(self):
        complete = build_wav(b"\x00\x00" * 10)
        with pytest.raises(ParseError, match="truncated"):
            read_wav(complete[:-4])

    def test_not_riff(self):
        with pytest.raises(ParseError):
            read_wav(b"OggS" + b"\x00" * 40)
        with pytest.raises(ParseError):
            read_wav(b"RIFF\x00\x00\x00\x00AIFF" + b"\x00" * 32)

    def test_skips_unknown_chunks_with_padding(self):
        # odd-sized LIST chunk must be skipped with its pad byte
        extra = b"LIST" + struct.pack("<I", 3) + b"abc\x00"
        audio = read_wav(build_wav(struct.pack("<2h", 100, 200), extra_chunks=extra))
        assert audio.samples.size == 2

    def test_missing_data_chunk(self):
        fmt = b"fmt " + struct.pack("<IHHIIHH", 16, 1, 1, 8000, 16000, 2, 16)
        blob = b"RIFF" + struct.pack("<I", 4 + len(fmt)) + b"WAVE" + fmt
        with pytest.raises(ParseError, match="data"):
            read_wav(blob)


class TestEnergyVad:
    def test_digital_silence_is_uninformative(self):
        audio = read_wav(build_wav(b"\x00\x00" * 16000))
        out = energy_vad(audio)
        assert np.all(out.values == 0.5)

    def test_dc_signal_is_uninformative(self):
        pcm = struct.pack("<h", 5000) * 16000
        out = energy_vad(read_wav(build_wav(pcm)))
        assert np.all(out.values == 0.5)

    def test_sine_frames_beat_silence_frames(self):
        rate = 8000
        t = np.arange(rate) / rate
        sine = np.round(32000 * np.sin(2 * np.pi * 440 * t)).astype("<i2")
        pcm = b"\x00\x00" * rate + sine.tobytes()
        out = energy_vad(read_wav(build_wav(pcm, rate=rate)))
        # frames fully inside each half (frame window is 25 ms)
        silence = out.values[: int(0.975 / 0.01)]
        voiced = out.values[int(1.0 / 0.01) : ]
        assert silence.max() < voiced.min()

    def test_frame_count_and_range(self):
        rate = 16000
        rng = np.random.default_rng(2)
        pcm = (rng.integers(-3000, 3000, rate * 2)).astype("<i2").tobytes()
        out = energy_vad(read_wav(build_wav(pcm, rate=rate)), frame=0.025, hop=0.010)
        assert out.n_frames == int(np.floor((2.0 - 0.025) / 0.010)) + 1
        assert np.all((out.values > 0) & (out.values < 1))
        assert out.step == 0.010 and out.start == 0.0

    def test_parameter_validation(self):
        audio = read_wav(build_wav(b"\x00\x00" * 1000))
        with pytest.raises(ValueError):
            energy_vad(audio, frame=0.005, hop=0.010)
        with pytest.raises(ValueError):
            energy_vad(audio, frame=0.025, hop=0.0)
