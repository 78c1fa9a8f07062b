"""Regenerate the figure-style artifacts from a seed.

The chain is: build the seeded corpus, mix one speech surrogate with the
white ambient bed at the requested SNR, run detection, and emit
  - the mixed waveform plus the per-frame decision track (fig3_*)
  - spectrograms of the speech, ambient, mixed, and detected signals (fig4_*)
as plain data files. Same seed and flags, same bytes.
"""

from __future__ import annotations

import dataclasses
import json
import os

import numpy as np

from .audio_io import AudioBuffer, read_wav
from .config import CliConfig
from .corpus import generate_corpus
from .filters import apply_cascade, design_butterworth_bandpass
from .mixing import MixSpec, mix
from .spectrogram import spectrogram, to_json_dict, write_pgm
from .vad import detect_prefiltered, frames_to_csv, result_to_dict


def _interval_mask(n: int, sample_rate_hz: int, intervals) -> np.ndarray:
    mask = np.zeros(n)
    for start_s, end_s in intervals:
        a = max(0, int(round(start_s * sample_rate_hz)))
        b = min(n, int(round(end_s * sample_rate_hz)))
        mask[a:b] = 1.0
    return mask


def run(
    out_dir: str,
    seed: int = 0,
    snr_db: float = 10.0,
    threshold_db: float = 12.0,
    config: CliConfig | None = None,
) -> list[str]:
    """Write every artifact under out_dir; returns their relative names."""
    if config is None:
        config = CliConfig()
    os.makedirs(out_dir, exist_ok=True)
    written: list[str] = []

    corpus_dir = os.path.join(out_dir, "corpus")
    clips = generate_corpus(seed, corpus_dir, sample_rate_hz=config.sample_rate_hz)
    by_name = {os.path.basename(c.audio_path): c for c in clips}
    speech_clip = by_name["speech_a.wav"]
    speech, _ = read_wav(speech_clip.audio_path)
    ambient, _ = read_wav(by_name["ambient_white.wav"].audio_path)

    mixed = mix(speech, ambient, MixSpec(target_snr_db=snr_db, normalize_peak=0.9))
    cascade = design_butterworth_bandpass(config.filter_spec())
    filtered = apply_cascade(cascade, mixed)
    vad_config = dataclasses.replace(config.vad_config(), snr_threshold_db=threshold_db)
    result = detect_prefiltered(filtered, vad_config)

    def _out(name: str) -> str:
        written.append(name)
        return os.path.join(out_dir, name)

    with open(_out("fig3_waveform.csv"), "w", newline="") as fh:
        fh.write("time_s,amplitude\n")
        fs = mixed.sample_rate_hz
        for i, v in enumerate(mixed.samples):
            fh.write(f"{i / fs!r},{float(v)!r}\n")

    with open(_out("fig3_decisions.csv"), "w", newline="") as fh:
        frames_to_csv(result, fh)

    detection = result_to_dict(result)
    detection["effective_config"] = config.to_dict()
    detection["snr_db"] = snr_db
    detection["threshold_db"] = threshold_db
    with open(_out("fig3_detection.json"), "w") as fh:
        json.dump(detection, fh, indent=2)
        fh.write("\n")

    detected = AudioBuffer(
        filtered.samples
        * _interval_mask(len(filtered), filtered.sample_rate_hz, result.intervals),
        filtered.sample_rate_hz,
    )
    panels = [
        ("speech", speech),
        ("ambient", ambient),
        ("mixed", mixed),
        ("detected", detected),
    ]
    for name, buffer in panels:
        matrix = spectrogram(
            buffer, fft_size=config.fft_size, hop_samples=config.spectrogram_hop
        )
        with open(_out(f"fig4_{name}.json"), "w") as fh:
            json.dump(to_json_dict(matrix), fh)
            fh.write("\n")
        write_pgm(matrix, _out(f"fig4_{name}.pgm"))

    summary = {
        "seed": seed,
        "snr_db": snr_db,
        "threshold_db": threshold_db,
        "effective_config": config.to_dict(),
        "speech_intervals_truth": [list(iv) for iv in speech_clip.speech_intervals],
        "intervals_detected": [list(iv) for iv in result.intervals],
        "files": list(written),
    }
    with open(_out("summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    return written
