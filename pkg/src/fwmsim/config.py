"""Scenario configuration: YAML files validated into a pydantic model.

A config file is a flat mapping with optional nested blocks for the detector
and the output sink.  Grid-valued keys (``alpha_sq``, ``T``, ``phi``, ``dx``)
accept either an explicit list of numbers, a single number, or a
``{start, stop, num}`` mapping that expands to a linear grid.  Unknown keys
are rejected so typos surface as config errors instead of silent defaults.
"""

from __future__ import annotations

from typing import Annotated, Literal, Optional

import numpy as np
import yaml
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, ValidationError


class ConfigError(ValueError):
    """Invalid or incomplete scenario configuration."""


SCENARIOS = (
    "g2-sweep",
    "fringe",
    "visibility",
    "duality-surface",
    "jitter",
    "oracle-check",
)


def _expand_grid(v):
    if v is None:
        return None
    if isinstance(v, dict):
        try:
            start, stop, num = v["start"], v["stop"], int(v["num"])
        except KeyError as e:
            raise ValueError(f"grid mapping needs start/stop/num (missing {e})")
        if num < 1:
            raise ValueError("grid num must be >= 1")
        return [float(x) for x in np.linspace(float(start), float(stop), num)]
    if isinstance(v, (int, float)):
        return [float(v)]
    return [float(x) for x in v]


Grid = Annotated[list[float], BeforeValidator(_expand_grid)]


class DetectorBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    jitter_sigma: float = Field(ge=0.0, description="per-detector timing std, s")
    tau_c: Optional[float] = Field(
        default=None, gt=0.0, description="coherence time, s; fitted when omitted"
    )
    shape: Literal["gaussian", "exponential"] = "gaussian"
    bin_width: Optional[float] = Field(default=None, gt=0.0)
    window: Optional[float] = Field(default=None, gt=0.0)


class OutputBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    path: Optional[str] = None
    format: Literal["csv", "json"] = "csv"


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: Optional[Literal[SCENARIOS]] = None
    alpha_sq: Optional[Grid] = None
    T: Optional[Grid] = None
    phi: Optional[Grid] = None
    dx: Optional[Grid] = None
    phase_per_length: Optional[float] = Field(default=None, gt=0.0)
    gamma: float = Field(default=1.0, ge=0.0, le=1.0)
    r: float = Field(default=0.05, gt=0.0)
    coupling_sq: float = Field(default=1.0, ge=0.0)
    dim: Optional[int] = Field(default=None, ge=2)
    idler_dim: int = Field(default=6, ge=2)
    background_offset: Optional[float] = Field(default=None, ge=0.0)
    detector: Optional[DetectorBlock] = None
    pair_rate: Optional[float] = Field(default=None, gt=0.0)
    accidental_rate: float = Field(default=0.0, ge=0.0)
    duration: Optional[float] = Field(default=None, gt=0.0)
    tol_closed_density: float = Field(default=1e-10, gt=0.0)
    tol_nonperturbative: float = Field(default=5e-3, gt=0.0)
    seed: int = 0
    output: Optional[OutputBlock] = None

    def echo(self) -> dict:
        """Deterministic plain-dict dump for result metadata."""
        return self.model_dump(mode="json")


def parse_config(data: dict) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(str(e)) from None


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    except yaml.YAMLError as e:
        raise ConfigError(f"malformed YAML in {path}: {e}") from None
    return parse_config(data if data is not None else {})
