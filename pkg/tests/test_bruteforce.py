"""Production pipeline versus the loop-built reference on small signals.

The corpus-wide run lives in the acceptance suite; this file exercises the
same cross-check over random signals, odd lengths, and overlapping hops.
"""

import numpy as np
import pytest

from vadkit import AudioBuffer, LabeledClip, VadConfig, detect_prefiltered, score

from naive_reference import naive_counts, naive_decisions, naive_intervals


@pytest.mark.parametrize(
    "n,window_s,hop_s,threshold",
    [
        (16000, 0.31, 0.31, 12.0),
        (16001, 0.31, 0.31, 12.0),
        (4959, 0.31, 0.31, 6.0),
        (20000, 0.25, 0.1, 9.0),
        (7321, 0.5, 0.5, 20.0),
        (160, 0.31, 0.31, 12.0),  # single partial frame
    ],
)
def test_pipeline_matches_naive(n, window_s, hop_s, threshold):
    rng = np.random.default_rng(n)
    x = 0.05 * rng.standard_normal(n)
    burst = slice(n // 4, n // 2)
    x[burst] += 0.5 * np.sin(2 * np.pi * 700.0 * np.arange(burst.stop - burst.start) / 16000)
    buf = AudioBuffer(x, 16000)
    config = VadConfig(
        window_length_s=window_s,
        snr_threshold_db=threshold,
        hop_length_s=hop_s,
    )

    result = detect_prefiltered(buf, config)
    expected, floor = naive_decisions(
        list(x), 16000, window_s, config.hop_s, threshold, config.noise_percentile,
        config.energy_floor,
    )

    assert result.noise_power_db == floor
    assert len(result.frames) == len(expected)
    for frame, (i, start_s, energy, snr, speech) in zip(result.frames, expected):
        assert frame.index == i
        assert frame.start_s == start_s
        assert frame.energy_db == energy
        assert frame.snr_db == snr
        assert frame.is_speech == speech

    assert list(result.intervals) == naive_intervals(expected, window_s)

    truth = ((0.3, 0.45),) if n >= 16000 else ()
    clip = LabeledClip("mem.wav", truth)
    report = score(result, clip)
    tp, fp, tn, fn = naive_counts(expected, window_s, list(truth))
    assert (report.tp, report.fp, report.tn, report.fn) == (tp, fp, tn, fn)
