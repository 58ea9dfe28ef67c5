"""Request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, Field

Algorithm = Literal["repad", "salad"]


class RunRequest(BaseModel):
    """One benchmark run. Paths are resolved on the service host; the
    whole run executes inside this request so per-point timing is
    measured server-side, uncontended."""

    algorithm: Algorithm = "repad"
    input_path: str
    labels_path: Optional[str] = None
    preset: Optional[str] = None
    overrides: dict[str, str] = Field(default_factory=dict)
    duplicate_n: int = 1
    k: Optional[int] = None
    seed: Optional[int] = None
    out_dir: Optional[str] = None
    name: str = "run"


class RunResponse(BaseModel):
    name: str
    report: dict
    files: list[str]


class CompareVariant(BaseModel):
    name: str
    overrides: dict[str, str] = Field(default_factory=dict)


class CompareRequest(BaseModel):
    """Sequential comparison of >= 2 variants on one shared input. Each
    variant's overrides apply on top of the base preset/overrides."""

    algorithm: Algorithm = "repad"
    input_path: str
    labels_path: Optional[str] = None
    preset: Optional[str] = None
    overrides: dict[str, str] = Field(default_factory=dict)
    duplicate_n: int = 1
    k: Optional[int] = None
    seed: Optional[int] = None
    out_dir: Optional[str] = None
    variants: list[CompareVariant] = Field(default_factory=list)


class CompareResponse(BaseModel):
    rows: list[dict]
    table: str
    files: list[str]


class PresetsResponse(BaseModel):
    presets: dict[str, dict]


class CreateDetectorRequest(BaseModel):
    algorithm: Algorithm = "repad"
    preset: Optional[str] = None
    overrides: dict[str, str] = Field(default_factory=dict)
    seed: Optional[int] = None


class DetectorInfo(BaseModel):
    detector_id: str
    algorithm: Algorithm
    config: dict
    points_seen: int
    trainings: int
    anomalies: int


class PointIn(BaseModel):
    timestamp: Union[float, str]
    value: float


class StepRequest(BaseModel):
    points: list[PointIn]


class StepResponse(BaseModel):
    detector_id: str
    verdicts: list[dict]


class ErrorBody(BaseModel):
    kind: Literal["config", "data", "io", "overflow", "not_found"]
    message: str
