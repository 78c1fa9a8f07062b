"""Scoring detections against labeled clips, plus a parameter sweep harness.

Ground truth per frame: a frame is speech when at least half of its window
overlaps the union of the labeled intervals. Confusion counts aggregate
across clips; derived rates fall back to 0.0 when their denominator is 0.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .audio_io import AudioBuffer, read_wav, resample
from .errors import LabelOutOfRange, SweepFailure, VadKitError
from .filters import BiquadCascade, apply_cascade
from .vad import VadConfig, VadResult, detect_prefiltered


@dataclass(frozen=True)
class LabeledClip:
    audio_path: str
    speech_intervals: tuple[tuple[float, float], ...]
    source_note: str = ""

    def __post_init__(self):
        object.__setattr__(
            self,
            "speech_intervals",
            tuple((float(s), float(e)) for s, e in self.speech_intervals),
        )
        prev_end = None
        for start, end in self.speech_intervals:
            if start < 0 or end <= start:
                raise LabelOutOfRange(f"bad interval ({start}, {end}) in {self.audio_path}")
            if prev_end is not None and start < prev_end:
                raise LabelOutOfRange(f"overlapping intervals in {self.audio_path}")
            prev_end = end


@dataclass(frozen=True)
class EvalReport:
    tp: int
    fp: int
    tn: int
    fn: int
    accuracy: float
    precision: float
    recall: float
    f1: float
    config: VadConfig

    @classmethod
    def from_counts(cls, tp: int, fp: int, tn: int, fn: int, config: VadConfig) -> "EvalReport":
        total = tp + fp + tn + fn
        accuracy = (tp + tn) / total if total else 0.0
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = (
            2.0 * precision * recall / (precision + recall)
            if precision + recall
            else 0.0
        )
        return cls(tp, fp, tn, fn, accuracy, precision, recall, f1, config)


@dataclass(frozen=True)
class GridPoint:
    window_s: float
    threshold_db: float
    report: EvalReport


@dataclass(frozen=True)
class SweepResult:
    grid: tuple[GridPoint, ...]
    best: GridPoint


def truth_frame_flags(result: VadResult, clip: LabeledClip) -> np.ndarray:
    """Boolean ground truth per detector frame via the half-overlap rule."""
    window = result.config.window_length_s
    clip_end = result.frames[-1].start_s + window if result.frames else 0.0
    for start, end in clip.speech_intervals:
        if end > clip_end + window:
            raise LabelOutOfRange(
                f"interval ({start}, {end}) runs past the clip end ({clip_end:.3f} s) in {clip.audio_path}"
            )
    flags = np.zeros(len(result.frames), dtype=bool)
    for i, frame in enumerate(result.frames):
        f_start = frame.start_s
        f_end = f_start + window
        covered = 0.0
        for start, end in clip.speech_intervals:
            covered += max(0.0, min(f_end, end) - max(f_start, start))
        flags[i] = covered >= 0.5 * window
    return flags


def score(result: VadResult, clip: LabeledClip) -> EvalReport:
    truth = truth_frame_flags(result, clip)
    predicted = np.array([f.is_speech for f in result.frames], dtype=bool)
    tp = int(np.sum(predicted & truth))
    fp = int(np.sum(predicted & ~truth))
    tn = int(np.sum(~predicted & ~truth))
    fn = int(np.sum(~predicted & truth))
    return EvalReport.from_counts(tp, fp, tn, fn, result.config)


def combine_reports(reports, config: VadConfig) -> EvalReport:
    tp = sum(r.tp for r in reports)
    fp = sum(r.fp for r in reports)
    tn = sum(r.tn for r in reports)
    fn = sum(r.fn for r in reports)
    return EvalReport.from_counts(tp, fp, tn, fn, config)


def load_manifest(path) -> list[LabeledClip]:
    """Read a JSON clip list; relative audio paths resolve against the manifest."""
    with open(path) as fh:
        entries = json.load(fh)
    if not isinstance(entries, list):
        raise VadKitError(f"manifest {path} must hold a JSON list")
    base = os.path.dirname(os.path.abspath(path))
    clips = []
    for entry in entries:
        audio = entry["audio_path"]
        if not os.path.isabs(audio):
            audio = os.path.join(base, audio)
        clips.append(
            LabeledClip(
                audio_path=audio,
                speech_intervals=tuple(tuple(iv) for iv in entry["speech_intervals"]),
                source_note=entry.get("source_note", ""),
            )
        )
    return clips


def save_manifest(clips, path) -> None:
    """Write a manifest with audio paths stored relative to its directory."""
    base = os.path.dirname(os.path.abspath(path))
    entries = []
    for clip in clips:
        audio = os.path.relpath(os.path.abspath(clip.audio_path), base)
        entries.append(
            {
                "audio_path": audio,
                "speech_intervals": [[s, e] for s, e in clip.speech_intervals],
                "source_note": clip.source_note,
            }
        )
    with open(path, "w") as fh:
        json.dump(entries, fh, indent=2)
        fh.write("\n")


def _load_filtered(clip: LabeledClip, cascade: BiquadCascade) -> AudioBuffer:
    buffer, _ = read_wav(clip.audio_path)
    if buffer.sample_rate_hz != cascade.spec.sample_rate_hz:
        buffer = resample(buffer, cascade.spec.sample_rate_hz)
    return apply_cascade(cascade, buffer)


def _eval_one_clip(args):
    clip, cascade, config = args
    result = detect_prefiltered(_load_filtered(clip, cascade), config)
    return score(result, clip)


def evaluate_clips(clips, cascade: BiquadCascade, config: VadConfig, jobs: int = 1):
    """Score every clip under one config.

    Returns (aggregate report, list of (clip, per-clip report)). Results are
    ordered by the input clip list regardless of job count.
    """
    args = [(clip, cascade, config) for clip in clips]
    if jobs > 1 and len(clips) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_eval_one_clip, args))
    else:
        reports = [_eval_one_clip(a) for a in args]
    return combine_reports(reports, config), list(zip(clips, reports))


# Worker state for sweep pools: filtered audio is shipped once per worker
# through the initializer instead of once per grid point.
_SWEEP_STATE: dict = {}


def _sweep_init(payload):
    _SWEEP_STATE["payload"] = payload


def _sweep_point(point):
    window_s, threshold_db = point
    filtered, clips, base_config = _SWEEP_STATE["payload"]
    try:
        config = dataclasses.replace(
            base_config,
            window_length_s=window_s,
            snr_threshold_db=threshold_db,
            hop_length_s=None,
        )
        reports = []
        for buffer, clip in zip(filtered, clips):
            result = detect_prefiltered(buffer, config)
            reports.append(score(result, clip))
        return combine_reports(reports, config)
    except VadKitError as exc:
        raise SweepFailure(
            f"grid point (window={window_s}, threshold={threshold_db}): {exc}"
        ) from exc


def sweep(
    clips,
    windows_s,
    thresholds_db,
    cascade: BiquadCascade,
    base_config: VadConfig | None = None,
    jobs: int = 1,
) -> SweepResult:
    """Grid search over window length and SNR threshold.

    Each clip is read and bandpassed once; the filter stage does not depend
    on the swept parameters. Best point maximizes F1, ties broken by lower
    threshold, then shorter window.
    """
    windows_s = [float(w) for w in windows_s]
    thresholds_db = [float(t) for t in thresholds_db]
    if not clips or not windows_s or not thresholds_db:
        raise SweepFailure("sweep needs at least one clip, window, and threshold")
    if base_config is None:
        base_config = VadConfig()
    filtered = [_load_filtered(clip, cascade) for clip in clips]
    payload = (filtered, list(clips), base_config)
    points = [(w, t) for w in windows_s for t in thresholds_db]

    if jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_sweep_init, initargs=(payload,)) as pool:
            reports = list(pool.map(_sweep_point, points))
    else:
        _sweep_init(payload)
        try:
            reports = [_sweep_point(p) for p in points]
        finally:
            _SWEEP_STATE.clear()

    grid = tuple(
        GridPoint(window_s=w, threshold_db=t, report=r)
        for (w, t), r in zip(points, reports)
    )
    best = min(grid, key=lambda g: (-g.report.f1, g.threshold_db, g.window_s))
    return SweepResult(grid=grid, best=best)


def report_to_dict(report: EvalReport) -> dict:
    return {
        "tp": report.tp,
        "fp": report.fp,
        "tn": report.tn,
        "fn": report.fn,
        "accuracy": report.accuracy,
        "precision": report.precision,
        "recall": report.recall,
        "f1": report.f1,
        "config": {
            "window_length_s": report.config.window_length_s,
            "snr_threshold_db": report.config.snr_threshold_db,
            "hop_length_s": report.config.hop_s,
            "noise_percentile": report.config.noise_percentile,
            "energy_floor": report.config.energy_floor,
        },
    }


def sweep_to_csv(result: SweepResult, fileobj) -> None:
    writer = csv.writer(fileobj)
    writer.writerow(
        ["window_s", "threshold_db", "tp", "fp", "tn", "fn", "accuracy", "precision", "recall", "f1"]
    )
    for point in result.grid:
        r = point.report
        writer.writerow(
            [point.window_s, point.threshold_db, r.tp, r.fp, r.tn, r.fn,
             r.accuracy, r.precision, r.recall, r.f1]
        )
