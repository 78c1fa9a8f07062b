"""Frame-level voice activity detection over bandpassed audio.

A clip is cut into fixed windows, each window gets a log energy, the noise
floor is a low quantile of those energies, and a frame counts as speech when
its energy clears the floor by the configured SNR margin. Adjacent speech
frames merge into intervals.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .audio_io import AudioBuffer
from .errors import EmptySignal, InvalidSpec, NoFrames
from .filters import BiquadCascade, apply_cascade


@dataclass(frozen=True)
class VadConfig:
    window_length_s: float = 0.31
    snr_threshold_db: float = 90.0
    hop_length_s: float | None = None  # None means non-overlapping frames
    noise_percentile: float = 0.10
    energy_floor: float = 1e-10

    def __post_init__(self):
        if self.window_length_s <= 0:
            raise InvalidSpec(f"window length must be positive, got {self.window_length_s}")
        hop = self.window_length_s if self.hop_length_s is None else self.hop_length_s
        if not 0 < hop <= self.window_length_s:
            raise InvalidSpec(
                f"hop must satisfy 0 < hop <= window, got hop={hop} "
                f"window={self.window_length_s}"
            )
        if not 0 < self.noise_percentile < 1:
            raise InvalidSpec(f"noise percentile must lie in (0, 1), got {self.noise_percentile}")
        if self.energy_floor <= 0:
            raise InvalidSpec(f"energy floor must be positive, got {self.energy_floor}")

    @property
    def hop_s(self) -> float:
        return self.window_length_s if self.hop_length_s is None else self.hop_length_s

    def window_samples(self, sample_rate_hz: int) -> int:
        return max(1, int(round(self.window_length_s * sample_rate_hz)))

    def hop_samples(self, sample_rate_hz: int) -> int:
        return max(1, int(round(self.hop_s * sample_rate_hz)))


@dataclass(frozen=True)
class FrameDecision:
    index: int
    start_s: float
    energy_db: float
    snr_db: float
    is_speech: bool


@dataclass(frozen=True)
class VadResult:
    frames: tuple[FrameDecision, ...]
    intervals: tuple[tuple[float, float], ...]
    noise_power_db: float
    config: VadConfig


def frame_signal(buffer: AudioBuffer, config: VadConfig) -> np.ndarray:
    """Cut the buffer into frames, one per row.

    The final frame is zero padded to full window length, so every sample
    lands in at least one frame and frame count is ceil(len / hop).
    """
    n = len(buffer)
    if n == 0:
        raise EmptySignal("cannot frame an empty signal")
    win = config.window_samples(buffer.sample_rate_hz)
    hop = config.hop_samples(buffer.sample_rate_hz)
    n_frames = -(-n // hop)
    needed = (n_frames - 1) * hop + win
    xpad = np.zeros(needed)
    xpad[:n] = buffer.samples
    idx = np.arange(win)[None, :] + (np.arange(n_frames) * hop)[:, None]
    return xpad[idx]


def frame_energy_db(frame: np.ndarray, energy_floor: float = 1e-10) -> float:
    """Mean-square frame energy in dB, clamped below by the floor."""
    power = float(np.mean(np.square(np.asarray(frame, dtype=float))))
    return 10.0 * math.log10(max(power, energy_floor))


def _frame_energies_db(frames: np.ndarray, energy_floor: float) -> np.ndarray:
    # One arithmetic path for every energy in the toolkit: the scalar
    # helper. Frame counts are small; the per-row python loop is cheap.
    return np.array([frame_energy_db(row, energy_floor) for row in frames])


def estimate_noise_floor_db(energies_db: np.ndarray, config: VadConfig) -> float:
    """Nearest-rank low quantile of the frame energies.

    rank = ceil(q * N) over the sorted energies, never below the energy
    floor in dB.
    """
    energies_db = np.asarray(energies_db, dtype=float)
    if energies_db.size == 0:
        raise NoFrames("noise floor needs at least one frame")
    ordered = np.sort(energies_db)
    rank = math.ceil(config.noise_percentile * ordered.size)
    value = float(ordered[max(rank - 1, 0)])
    return max(value, 10.0 * math.log10(config.energy_floor))


def merge_intervals(frames: tuple[FrameDecision, ...], config: VadConfig) -> tuple[tuple[float, float], ...]:
    """Collapse maximal runs of speech frames into (start_s, end_s) spans.

    A run ends at last.start_s + window_length_s, so consecutive intervals
    from overlapping hops never leave sub-window gaps.
    """
    out = []
    run_start = None
    last = None
    for f in frames:
        if f.is_speech:
            if run_start is None:
                run_start = f.start_s
            last = f
        elif run_start is not None:
            out.append((run_start, last.start_s + config.window_length_s))
            run_start = None
    if run_start is not None:
        out.append((run_start, last.start_s + config.window_length_s))
    return tuple(out)


def detect_prefiltered(buffer: AudioBuffer, config: VadConfig) -> VadResult:
    """Run framing, noise-floor estimation, and thresholding.

    The buffer is taken as already bandpassed; `detect` is the entry point
    that includes the filter stage.
    """
    frames = frame_signal(buffer, config)
    energies = _frame_energies_db(frames, config.energy_floor)
    floor_db = estimate_noise_floor_db(energies, config)
    hop_s = config.hop_s
    decisions = []
    for i, energy in enumerate(energies):
        snr = float(energy) - floor_db
        decisions.append(
            FrameDecision(
                index=i,
                start_s=i * hop_s,
                energy_db=float(energy),
                snr_db=snr,
                is_speech=snr >= config.snr_threshold_db,
            )
        )
    decisions = tuple(decisions)
    return VadResult(
        frames=decisions,
        intervals=merge_intervals(decisions, config),
        noise_power_db=floor_db,
        config=config,
    )


def detect(buffer: AudioBuffer, cascade: BiquadCascade, config: VadConfig) -> VadResult:
    """Full pipeline: bandpass the buffer, then classify frames."""
    if len(buffer) == 0:
        raise EmptySignal("cannot run detection on an empty signal")
    return detect_prefiltered(apply_cascade(cascade, buffer), config)


def config_to_dict(config: VadConfig) -> dict:
    return {
        "window_length_s": config.window_length_s,
        "snr_threshold_db": config.snr_threshold_db,
        "hop_length_s": config.hop_s,
        "noise_percentile": config.noise_percentile,
        "energy_floor": config.energy_floor,
    }


def result_to_dict(result: VadResult) -> dict:
    return {
        "config": config_to_dict(result.config),
        "noise_power_db": result.noise_power_db,
        "intervals": [{"start_s": s, "end_s": e} for s, e in result.intervals],
        "frames": [
            {
                "index": f.index,
                "start_s": f.start_s,
                "energy_db": f.energy_db,
                "snr_db": f.snr_db,
                "is_speech": f.is_speech,
            }
            for f in result.frames
        ],
    }


def frames_to_csv(result: VadResult, fileobj) -> None:
    writer = csv.writer(fileobj)
    writer.writerow(["index", "start_s", "energy_db", "snr_db", "is_speech"])
    for f in result.frames:
        writer.writerow([f.index, f.start_s, f.energy_db, f.snr_db, int(f.is_speech)])
