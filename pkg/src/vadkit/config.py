"""Flat JSON configuration shared by every subcommand.

Precedence: built-in defaults, then the --config file, then command-line
flags. The effective values are echoed into output artifacts.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

from .errors import BadConfig
from .filters import FilterSpec
from .vad import VadConfig

_FIELD_TYPES = {
    "sample_rate_hz": int,
    "filter_order": int,
    "low_cutoff_hz": float,
    "high_cutoff_hz": float,
    "window_s": float,
    "threshold_db": float,
    "hop_s": float,
    "noise_percentile": float,
    "energy_floor": float,
    "fft_size": int,
    "spectrogram_hop": int,
}


@dataclass(frozen=True)
class CliConfig:
    sample_rate_hz: int = 16000
    filter_order: int = 4
    low_cutoff_hz: float = 300.0
    high_cutoff_hz: float = 1500.0
    window_s: float = 0.31
    threshold_db: float = 90.0
    hop_s: float | None = None
    noise_percentile: float = 0.10
    energy_floor: float = 1e-10
    fft_size: int = 1024
    spectrogram_hop: int = 512

    def filter_spec(self) -> FilterSpec:
        return FilterSpec(
            order=self.filter_order,
            low_cutoff_hz=self.low_cutoff_hz,
            high_cutoff_hz=self.high_cutoff_hz,
            sample_rate_hz=self.sample_rate_hz,
        )

    def vad_config(self) -> VadConfig:
        return VadConfig(
            window_length_s=self.window_s,
            snr_threshold_db=self.threshold_db,
            hop_length_s=self.hop_s,
            noise_percentile=self.noise_percentile,
            energy_floor=self.energy_floor,
        )

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["hop_s"] = self.window_s if self.hop_s is None else self.hop_s
        return d

    def with_overrides(self, **overrides) -> "CliConfig":
        """Apply non-None keyword values over this config."""
        live = {k: v for k, v in overrides.items() if v is not None}
        for key in live:
            if key not in _FIELD_TYPES:
                raise BadConfig(f"unknown config key: {key}")
        return dataclasses.replace(self, **live)


def load_config(path) -> CliConfig:
    """Read a flat JSON object of config keys; unknown keys are rejected."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise BadConfig(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise BadConfig(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise BadConfig(f"config {path} must hold a JSON object")
    values = {}
    for key, value in raw.items():
        if key not in _FIELD_TYPES:
            raise BadConfig(f"config {path}: unknown key {key!r}")
        if value is None and key == "hop_s":
            values[key] = None
            continue
        try:
            values[key] = _FIELD_TYPES[key](value)
        except (TypeError, ValueError) as exc:
            raise BadConfig(f"config {path}: bad value for {key!r}: {value!r}") from exc
    return CliConfig(**values)
