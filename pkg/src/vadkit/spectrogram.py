"""Hann-windowed magnitude spectrogram with dB output.

Framing follows the detector convention: frame count is ceil(len / hop)
and the tail is zero padded, so a spectrogram and a VAD pass over the same
clip line up frame for frame when their hops match.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .audio_io import AudioBuffer
from .errors import EmptySignal, InvalidFft

DB_FLOOR = -120.0
_MAG_FLOOR = 10.0 ** (DB_FLOOR / 20.0)


@dataclass(frozen=True, eq=False)
class SpectrogramMatrix:
    magnitudes_db: np.ndarray  # shape (frame_count, bin_count)
    fft_size: int
    hop_samples: int
    sample_rate_hz: int

    @property
    def frame_count(self) -> int:
        return self.magnitudes_db.shape[0]

    @property
    def bin_count(self) -> int:
        return self.magnitudes_db.shape[1]

    def times_s(self) -> np.ndarray:
        """Frame start times."""
        return np.arange(self.frame_count) * (self.hop_samples / self.sample_rate_hz)

    def freqs_hz(self) -> np.ndarray:
        return np.arange(self.bin_count) * (self.sample_rate_hz / self.fft_size)


def hann_window(size: int) -> np.ndarray:
    # Periodic form, matching the FFT length rather than size - 1.
    return 0.5 - 0.5 * np.cos(2.0 * math.pi * np.arange(size) / size)


def spectrogram(buffer: AudioBuffer, fft_size: int = 1024, hop_samples: int = 512) -> SpectrogramMatrix:
    if fft_size <= 0 or fft_size & (fft_size - 1) != 0:
        raise InvalidFft(f"fft size must be a power of two, got {fft_size}")
    if hop_samples <= 0:
        raise InvalidFft(f"hop must be positive, got {hop_samples}")
    n = len(buffer)
    if n == 0:
        raise EmptySignal("cannot take a spectrogram of an empty signal")
    n_frames = -(-n // hop_samples)
    needed = (n_frames - 1) * hop_samples + fft_size
    xpad = np.zeros(needed)
    xpad[:n] = buffer.samples
    idx = np.arange(fft_size)[None, :] + (np.arange(n_frames) * hop_samples)[:, None]
    frames = xpad[idx] * hann_window(fft_size)
    mags = np.abs(np.fft.rfft(frames, axis=1))
    db = 20.0 * np.log10(np.maximum(mags, _MAG_FLOOR))
    return SpectrogramMatrix(
        magnitudes_db=db,
        fft_size=fft_size,
        hop_samples=hop_samples,
        sample_rate_hz=buffer.sample_rate_hz,
    )


def to_json_dict(spec: SpectrogramMatrix) -> dict:
    return {
        "fft_size": spec.fft_size,
        "hop_samples": spec.hop_samples,
        "sample_rate_hz": spec.sample_rate_hz,
        "frame_count": spec.frame_count,
        "bin_count": spec.bin_count,
        "magnitudes_db": [[float(v) for v in row] for row in spec.magnitudes_db],
    }


def write_json(spec: SpectrogramMatrix, path) -> None:
    with open(path, "w") as fh:
        json.dump(to_json_dict(spec), fh)
        fh.write("\n")


def write_long_csv(spec: SpectrogramMatrix, fileobj) -> None:
    """One row per (frame, bin) cell: time_s, freq_hz, magnitude_db."""
    writer = csv.writer(fileobj)
    writer.writerow(["time_s", "freq_hz", "magnitude_db"])
    times = spec.times_s()
    freqs = spec.freqs_hz()
    for i in range(spec.frame_count):
        t = times[i]
        row = spec.magnitudes_db[i]
        for j in range(spec.bin_count):
            writer.writerow([t, freqs[j], row[j]])


def write_pgm(spec: SpectrogramMatrix, path) -> None:
    """Greyscale image, frequency up the vertical axis, time left to right.

    dB values are scaled linearly from the floor to the clip maximum.
    """
    db = spec.magnitudes_db
    top = float(db.max())
    span = max(top - DB_FLOOR, 1e-12)
    levels = np.clip((db - DB_FLOOR) / span * 255.0, 0.0, 255.0)
    img = np.flipud(np.round(levels).astype(np.uint8).T)
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(img.tobytes())
