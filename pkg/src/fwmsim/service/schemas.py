"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Union

from pydantic import BaseModel

from ..config import ScenarioConfig  # request body model, re-exported

__all__ = ["ScenarioConfig", "TableResponse", "HealthResponse", "ScenarioList"]


class TableResponse(BaseModel):
    columns: list[str]
    rows: list[list[Union[float, int, str]]]
    metadata: dict


class HealthResponse(BaseModel):
    status: str
    version: str


class ScenarioList(BaseModel):
    scenarios: list[str]
