"""Pipeline configuration with shipped defaults, plus JSON file loading.

A config file overrides defaults field by field; anything not mentioned
keeps its default. Unknown keys are rejected rather than silently ignored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigError
from .merging import MergeParams
from .plane_test import PlaneTestParams

__all__ = ["ExtractionConfig", "load_config", "config_to_dict"]


@dataclass(frozen=True)
class ExtractionConfig:
    """All tunables of the extraction pipeline.

    root_size: edge length of root voxels (meters).
    min_voxel_size: octants at or below this edge length are never split
        further; one that fails the plane test is discarded.
    min_points: octant population below which a node is discarded.
    """

    root_size: float = 1.0
    min_voxel_size: float = 0.25
    min_points: int = 20
    plane_params: PlaneTestParams = field(default_factory=PlaneTestParams)
    merge_params: MergeParams = field(default_factory=MergeParams)
    merging_enabled: bool = True

    def __post_init__(self):
        if not self.root_size > self.min_voxel_size > 0:
            raise ConfigError("require root_size > min_voxel_size > 0")
        if self.min_points < 1:
            raise ConfigError("min_points must be positive")


_TOP_FIELDS = {"root_size", "min_voxel_size", "min_points", "merging_enabled"}
_PLANE_FIELDS = {"flatness_ratio_max", "quarter_ratio_bound", "min_points",
                 "sigma_shift_multiple"}
_MERGE_FIELDS = {"normal_angle_max_deg", "separation_angle_tol_deg",
                 "min_separation"}


def _sub_params(cls, data: dict, allowed: set[str], section: str):
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in '{section}' section: {sorted(unknown)}")
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(f"bad '{section}' section: {exc}") from exc


def config_from_dict(data: dict) -> ExtractionConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(data) - _TOP_FIELDS - {"plane", "merge"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {k: data[k] for k in _TOP_FIELDS if k in data}
    if "plane" in data:
        kwargs["plane_params"] = _sub_params(PlaneTestParams, data["plane"],
                                             _PLANE_FIELDS, "plane")
    if "merge" in data:
        kwargs["merge_params"] = _sub_params(MergeParams, data["merge"],
                                             _MERGE_FIELDS, "merge")
    try:
        return ExtractionConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ExtractionConfig:
    """Read a JSON config file; missing fields keep shipped defaults."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def config_to_dict(config: ExtractionConfig) -> dict:
    """Plain-dict form of a config, matching the config-file schema."""
    return {
        "root_size": config.root_size,
        "min_voxel_size": config.min_voxel_size,
        "min_points": config.min_points,
        "merging_enabled": config.merging_enabled,
        "plane": {
            "flatness_ratio_max": config.plane_params.flatness_ratio_max,
            "quarter_ratio_bound": config.plane_params.quarter_ratio_bound,
            "min_points": config.plane_params.min_points,
            "sigma_shift_multiple": config.plane_params.sigma_shift_multiple,
        },
        "merge": {
            "normal_angle_max_deg": config.merge_params.normal_angle_max_deg,
            "separation_angle_tol_deg": config.merge_params.separation_angle_tol_deg,
            "min_separation": config.merge_params.min_separation,
        },
    }


def with_merging(config: ExtractionConfig, enabled: bool) -> ExtractionConfig:
    return replace(config, merging_enabled=enabled)
