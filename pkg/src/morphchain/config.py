"""Run configuration: one validated JSON document for the whole pipeline.

Every section is optional and falls back to module defaults; unknown keys
anywhere are rejected so typos fail loudly instead of silently running
with defaults.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields

from .collision import CollisionConfig
from .fitness import FitnessWeights
from .ga import GASettings, SynthesisContext
from .kinematics import ActivationProfile
from .spaceframe import FrameProperties
from .target import IdealCurve


class ConfigError(ValueError):
    """Invalid or malformed run configuration."""


ENV_CONFIG_PATH = "MORPHCHAIN_CONFIG"


@dataclass(frozen=True)
class SynthesisSettings:
    """Escalation-loop parameters around the per-length GA runs."""

    start_n: int = 10
    max_n: int = 20
    quality_ratio: float | None = 0.1
    midpoint_node: int | None = None  # None -> arc-matched node
    align_root: bool = True

    def __post_init__(self):
        if self.start_n < 1:
            raise ValueError("start_n must be >= 1")
        if self.max_n < self.start_n:
            raise ValueError("max_n must be >= start_n")
        if self.quality_ratio is not None and self.quality_ratio <= 0:
            raise ValueError("quality_ratio must be positive or null")


_KNOWN_PATH_KEYS = {"sequence", "trajectory", "density", "output", "log"}


@dataclass(frozen=True)
class RunConfig:
    profile: ActivationProfile = ActivationProfile()
    curve: IdealCurve = IdealCurve()
    weights: FitnessWeights = FitnessWeights()
    collision: CollisionConfig = CollisionConfig()
    ga: GASettings = GASettings()
    synthesis: SynthesisSettings = SynthesisSettings()
    frame: FrameProperties | None = None
    paths: dict = field(default_factory=dict)

    def context(self, n_threads: int = 1) -> SynthesisContext:
        return SynthesisContext(
            profile=self.profile,
            curve=self.curve,
            weights=self.weights,
            collision=self.collision,
            midpoint_node=self.synthesis.midpoint_node,
            align_root=self.synthesis.align_root,
            n_threads=n_threads,
        )


def _build_section(cls, data: dict, section: str):
    if not isinstance(data, dict):
        raise ConfigError(f"config section '{section}' must be an object")
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(
            f"unknown key '{sorted(unknown)[0]}' in config section '{section}'"
        )
    try:
        return cls(**data)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"config section '{section}': {e}") from None


_SECTIONS = {
    "profile": ActivationProfile,
    "curve": IdealCurve,
    "weights": FitnessWeights,
    "collision": CollisionConfig,
    "ga": GASettings,
    "synthesis": SynthesisSettings,
    "frame": FrameProperties,
}


def config_from_dict(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(doc) - set(_SECTIONS) - {"paths"}
    if unknown:
        raise ConfigError(f"unknown config section '{sorted(unknown)[0]}'")
    kwargs = {}
    for name, cls in _SECTIONS.items():
        if name in doc:
            data = dict(doc[name]) if isinstance(doc[name], dict) else doc[name]
            if name == "frame" and isinstance(data, dict) and "gravity" in data:
                data["gravity"] = tuple(data["gravity"])
            kwargs[name] = _build_section(cls, data, name)
    if "paths" in doc:
        paths = doc["paths"]
        if not isinstance(paths, dict):
            raise ConfigError("config section 'paths' must be an object")
        unknown = set(paths) - _KNOWN_PATH_KEYS
        if unknown:
            raise ConfigError(f"unknown key '{sorted(unknown)[0]}' in config section 'paths'")
        kwargs["paths"] = dict(paths)
    return RunConfig(**kwargs)


def load_config(path: str | None) -> RunConfig:
    """Load the config file, honoring the environment override.

    Precedence: explicit path argument, then the MORPHCHAIN_CONFIG
    environment variable, then built-in defaults.
    """
    if path is None:
        path = os.environ.get(ENV_CONFIG_PATH)
    if path is None:
        return RunConfig()
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from None
    return config_from_dict(doc)
