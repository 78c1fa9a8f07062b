"""Acceptance gate: seven end-to-end criteria at their stated tolerances.

Run `pytest tests/test_acceptance.py -v -s` to get one pass/fail line per
criterion (the -s flag lets the summary lines through).
"""

import dataclasses
import math
import json
import os
import time

import numpy as np
import pytest

from vadkit import (
    AudioBuffer,
    CliConfig,
    EvalReport,
    FilterSpec,
    LabeledClip,
    MixSpec,
    VadConfig,
    apply_cascade,
    design_butterworth_bandpass,
    detect,
    detect_prefiltered,
    evaluate_clips,
    frequency_response,
    generate_corpus,
    mix,
    read_wav,
    score,
    spectrogram,
    sweep,
    write_wav,
)
from vadkit import repro
from vadkit.cli import main as cli_main

from naive_reference import naive_counts, naive_decisions, naive_intervals


def _ok(k, detail):
    print(f"\ncriterion {k}: PASS ({detail})")


def test_criterion_1_filter_fidelity():
    t0 = time.perf_counter()
    cascade = design_butterworth_bandpass(FilterSpec())
    low = frequency_response(cascade, 300.0)
    high = frequency_response(cascade, 1500.0)
    r50 = frequency_response(cascade, 50.0)
    r6k = frequency_response(cascade, 6000.0)
    mags = [m for s in cascade.sections for m in s.pole_magnitudes()]
    elapsed = time.perf_counter() - t0

    assert abs(low - (-3.0)) <= 0.1, f"300 Hz edge at {low} dB"
    assert abs(high - (-3.0)) <= 0.1, f"1500 Hz edge at {high} dB"
    assert -r50 >= 20.0, f"50 Hz attenuation only {-r50} dB"
    assert -r6k >= 20.0, f"6 kHz attenuation only {-r6k} dB"
    assert all(m < 1.0 for m in mags), f"pole magnitudes {mags}"
    assert elapsed < 1.0, f"took {elapsed:.3f} s"
    _ok(
        1,
        f"edges {low:.4f}/{high:.4f} dB, 50 Hz {-r50:.1f} dB down, "
        f"6 kHz {-r6k:.1f} dB down, max pole {max(mags):.4f}, {elapsed*1e3:.0f} ms",
    )


def test_criterion_2_oracle_agreement():
    t0 = time.perf_counter()
    cascade = design_butterworth_bandpass(FilterSpec())
    fs = 16000
    freqs = [60.0, 120.0, 200.0, 300.0, 420.0, 560.0, 678.0, 800.0, 1000.0, 1200.0,
             1350.0, 1500.0, 1700.0, 2000.0, 2500.0, 3000.0, 3600.0, 4200.0, 5000.0, 6000.0]
    assert len(freqs) == 20
    worst = 0.0
    for f in freqs:
        t = np.arange(fs) / fs
        buf = AudioBuffer(0.5 * np.sin(2.0 * np.pi * f * t), fs)
        out = apply_cascade(cascade, buf)
        a, b = fs // 4, 3 * fs // 4  # transient fully decayed, whole cycles
        gain = 20.0 * math.log10(
            np.sqrt(np.mean(np.square(out.samples[a:b])))
            / np.sqrt(np.mean(np.square(buf.samples[a:b])))
        )
        err = abs(gain - frequency_response(cascade, f))
        worst = max(worst, err)
        assert err < 0.2, f"{f} Hz: measured vs predicted differ by {err:.4f} dB"
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0, f"took {elapsed:.3f} s"
    _ok(2, f"20 tones, worst gap {worst:.4f} dB, {elapsed:.2f} s")


def test_criterion_3_detector_correctness(tmp_path):
    t0 = time.perf_counter()
    clips = generate_corpus(0, str(tmp_path / "corpus"))
    cascade = design_butterworth_bandpass(FilterSpec())
    result = sweep(
        clips,
        [0.155, 0.31, 0.62],
        [6.0, 9.0, 12.0, 15.0, 20.0, 30.0, 90.0],
        cascade,
    )
    tuned = VadConfig(
        window_length_s=result.best.window_s,
        snr_threshold_db=result.best.threshold_db,
    )

    def named(fragment):
        return [c for c in clips if fragment in os.path.basename(c.audio_path)]

    mixtures = named("snr20") + named("snr10")
    assert len(mixtures) == 4
    mix_report, _ = evaluate_clips(mixtures, cascade, tuned)
    quiet = named("silence") + named("ambient")
    assert len(quiet) == 3
    quiet_report, _ = evaluate_clips(quiet, cascade, tuned)
    elapsed = time.perf_counter() - t0

    assert mix_report.f1 >= 0.95, f"f1 on 20/10 dB mixtures: {mix_report.f1:.4f}"
    assert quiet_report.fp == 0, f"{quiet_report.fp} false positives on silence/ambient"
    assert elapsed < 60.0, f"took {elapsed:.3f} s"
    _ok(
        3,
        f"tuned (window {result.best.window_s:g} s, threshold {result.best.threshold_db:g} dB), "
        f"mixture f1 {mix_report.f1:.4f}, quiet fp {quiet_report.fp}, {elapsed:.2f} s",
    )


def test_criterion_4_brute_force_equivalence(tmp_path):
    clips = generate_corpus(0, str(tmp_path / "corpus"))
    cascade = design_butterworth_bandpass(FilterSpec())
    config = VadConfig(snr_threshold_db=12.0)
    checked = 0
    for clip in clips:
        buf, _ = read_wav(clip.audio_path)
        assert buf.duration_s <= 5.0
        filtered = apply_cascade(cascade, buf)
        result = detect_prefiltered(filtered, config)
        expected, floor = naive_decisions(
            list(filtered.samples), filtered.sample_rate_hz,
            config.window_length_s, config.hop_s, config.snr_threshold_db,
            config.noise_percentile, config.energy_floor,
        )
        assert result.noise_power_db == floor
        got = [(f.index, f.start_s, f.energy_db, f.snr_db, f.is_speech) for f in result.frames]
        assert got == expected, f"frame mismatch on {clip.audio_path}"
        assert list(result.intervals) == naive_intervals(expected, config.window_length_s)

        report = score(result, clip)
        counts = naive_counts(expected, config.window_length_s, list(clip.speech_intervals))
        assert report == EvalReport.from_counts(*counts, config), clip.audio_path
        checked += 1
    _ok(4, f"{checked} clips, FrameDecision and EvalReport values identical")


def test_criterion_5_invariant_suite(tmp_path):
    fs = 16000
    cascade = design_butterworth_bandpass(FilterSpec())
    rng = np.random.default_rng(100)

    # filtering linearity and time invariance at 1e-9
    x = rng.standard_normal(3000)
    y = rng.standard_normal(3000)
    lin = np.max(np.abs(
        apply_cascade(cascade, AudioBuffer(1.5 * x - 0.5 * y, fs)).samples
        - 1.5 * apply_cascade(cascade, AudioBuffer(x, fs)).samples
        + 0.5 * apply_cascade(cascade, AudioBuffer(y, fs)).samples
    ))
    assert lin < 1e-9, f"linearity residual {lin}"
    shift = 137
    shifted = apply_cascade(cascade, AudioBuffer(np.concatenate([np.zeros(shift), x]), fs)).samples
    plain = apply_cascade(cascade, AudioBuffer(x, fs)).samples
    tiv = np.max(np.abs(shifted[shift:] - plain))
    assert tiv < 1e-9, f"time-invariance residual {tiv}"

    # detection scale invariance
    clip = 0.01 * rng.standard_normal(4 * fs)
    t = np.arange(fs) / fs
    clip[fs : 2 * fs] += 0.5 * np.sin(2 * np.pi * 700.0 * t)
    config = VadConfig(snr_threshold_db=12.0)
    r1 = detect(AudioBuffer(clip, fs), cascade, config)
    r2 = detect(AudioBuffer(clip * 3.7, fs), cascade, config)
    assert [f.is_speech for f in r1.frames] == [f.is_speech for f in r2.frames]

    # threshold monotonicity
    counts = []
    for threshold in (3.0, 6.0, 12.0, 24.0, 90.0):
        r = detect(AudioBuffer(clip, fs), cascade, VadConfig(snr_threshold_db=threshold))
        counts.append(sum(f.is_speech for f in r.frames))
    assert counts == sorted(counts, reverse=True), counts

    # interval/frame consistency
    for f in r1.frames:
        inside = any(s - 1e-9 <= f.start_s < e - 1e-9 for s, e in r1.intervals)
        assert inside == f.is_speech

    # mix SNR within 0.01 dB
    speech = AudioBuffer(0.4 * rng.standard_normal(8000), fs)
    ambient = AudioBuffer(0.2 * rng.standard_normal(8000), fs)
    mixed = mix(speech, ambient, MixSpec(target_snr_db=10.0))
    noise = mixed.samples - speech.samples
    achieved = 10.0 * np.log10(np.mean(np.square(speech.samples)) / np.mean(np.square(noise)))
    assert abs(achieved - 10.0) < 0.01, f"achieved SNR {achieved}"

    # spectrogram tone-bin localization
    tone = AudioBuffer(0.5 * np.sin(2 * np.pi * 1000.0 * np.arange(fs) / fs), fs)
    m = spectrogram(tone, 1024, 512)
    assert all(int(row.argmax()) == 64 for row in m.magnitudes_db[1:-2])

    # WAV round trips
    vals = rng.uniform(-0.99, 0.99, 4000)
    p16 = tmp_path / "a.wav"
    write_wav(AudioBuffer(vals, fs), p16, format="pcm16")
    back, _ = read_wav(p16)
    assert np.max(np.abs(back.samples - vals)) <= 2.0**-15
    f32 = tmp_path / "b.wav"
    vals32 = vals.astype(np.float32).astype(float)
    write_wav(AudioBuffer(vals32, fs), f32, format="float32")
    back32, _ = read_wav(f32)
    assert np.array_equal(back32.samples, vals32)

    _ok(5, "linearity, time-invariance, scale-invariance, monotonicity, "
           "interval consistency, mix SNR, tone bin, WAV round-trips")


def test_criterion_6_reproduction_pipeline(tmp_path):
    t0 = time.perf_counter()
    run1 = tmp_path / "r1"
    run2 = tmp_path / "r2"
    files1 = repro.run(str(run1), seed=0)
    files2 = repro.run(str(run2), seed=0)
    assert files1 == files2

    compared = 0
    for root, _, names in os.walk(run1):
        for name in sorted(names):
            p1 = os.path.join(root, name)
            p2 = os.path.join(run2, os.path.relpath(p1, run1))
            with open(p1, "rb") as a, open(p2, "rb") as b:
                assert a.read() == b.read(), f"{name} differs between runs"
            compared += 1

    with open(run1 / "fig4_detected.json") as fh:
        d = json.load(fh)
    db = np.array(d["magnitudes_db"])
    freqs = np.arange(d["bin_count"]) * d["sample_rate_hz"] / d["fft_size"]
    in_band = (freqs >= 300.0) & (freqs <= 1500.0)
    margin = float(db[:, in_band].mean() - db[:, ~in_band].mean())
    elapsed = time.perf_counter() - t0
    assert margin >= 15.0, f"out-of-band only {margin:.2f} dB below in-band"
    _ok(6, f"{compared} files byte-identical across runs, "
           f"out-of-band {margin:.2f} dB below in-band, {elapsed:.2f} s")


def test_criterion_7_defaults_provenance(tmp_path, capsys):
    config = CliConfig()
    assert config.window_s == 0.31
    assert config.threshold_db == 90.0
    assert config.low_cutoff_hz == 300.0
    assert config.high_cutoff_hz == 1500.0
    assert config.filter_order == 4

    vad_defaults = VadConfig()
    assert vad_defaults.window_length_s == 0.31
    assert vad_defaults.snr_threshold_db == 90.0
    spec_defaults = FilterSpec()
    assert spec_defaults.order == 4
    assert (spec_defaults.low_cutoff_hz, spec_defaults.high_cutoff_hz) == (300.0, 1500.0)

    # the echoed config in a CLI artifact carries the same values
    out = tmp_path / "f.json"
    assert cli_main(["filter-dump", "--out", str(out)]) == 0
    capsys.readouterr()
    with open(out) as fh:
        echoed = json.load(fh)["effective_config"]
    assert echoed["window_s"] == 0.31
    assert echoed["threshold_db"] == 90.0
    assert echoed["low_cutoff_hz"] == 300.0
    assert echoed["high_cutoff_hz"] == 1500.0
    assert echoed["filter_order"] == 4
    _ok(7, "defaults and artifact echo: window 0.31 s, threshold 90 dB, "
           "band 300-1500 Hz, order 4")
