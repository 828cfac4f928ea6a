import enum
from typing import List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

import settings
from fsl_nodes import FslParams, SegmentMode
from polar_core import ConstructionTag


class DecoderKind(str, enum.Enum):
    scl = "scl"
    fsl = "fsl"


class SnrConvention(str, enum.Enum):
    es = "es"
    eb = "eb"


class ReportFormat(str, enum.Enum):
    csv = "csv"
    json = "json"
    plotscript = "plotscript"


class CodeConfig(BaseModel):
    n: int = 1024
    k: int = 512
    crc_len: int = 16
    construction: ConstructionTag = ConstructionTag.pw
    block_len: int = 16
    k_low: Optional[int] = None
    k_high: Optional[int] = None
    # adds the optional dimension-10 dual-eBCH outer code to hybrid constructions
    dual_ebch_10: bool = False

    @model_validator(mode="after")
    def check_adjust_bounds(self):
        if self.construction == ConstructionTag.adjusted and (self.k_low is None or self.k_high is None):
            raise ValueError("adjusted construction needs k_low and k_high")
        return self


class DecoderConfig(BaseModel):
    kind: DecoderKind = DecoderKind.scl
    list_size: int = Field(8, ge=1)
    block_len: int = 16
    # unset budgets take the block-size preset (T=2, L_sd=4 at B=8; T=3, L_sd=8 at B=16)
    flip_budget: Optional[int] = None
    patterns_per_syndrome: Optional[int] = None
    mode: Optional[SegmentMode] = None

    def fsl_params(self) -> FslParams:
        preset = FslParams.preset(self.block_len, self.list_size)
        overrides = {}
        if self.flip_budget is not None:
            overrides["flip_budget"] = self.flip_budget
        if self.patterns_per_syndrome is not None:
            overrides["patterns_per_syndrome"] = self.patterns_per_syndrome
        return FslParams(**{**preset.model_dump(), **overrides})


class ChannelConfig(BaseModel):
    snr_points_db: List[float]
    convention: SnrConvention = SnrConvention.es

    @field_validator("snr_points_db")
    @classmethod
    def strictly_increasing(cls, points):
        if not points:
            raise ValueError("at least one SNR point is required")
        if any(b <= a for a, b in zip(points, points[1:])):
            raise ValueError("SNR points must be strictly increasing")
        return points


class StoppingConfig(BaseModel):
    min_block_errors: int = Field(100, ge=1)
    max_frames: int = Field(100000, ge=1)
    batch_size: int = Field(64, ge=1)


class OutputConfig(BaseModel):
    path: Optional[str] = None
    formats: List[ReportFormat] = [ReportFormat.csv]
    label: Optional[str] = None


class CampaignConfig(BaseModel):
    code: CodeConfig = CodeConfig()
    decoder: DecoderConfig = DecoderConfig()
    channel: ChannelConfig
    stopping: StoppingConfig = StoppingConfig()
    seed: int = Field(0, ge=0)
    workers: int = Field(default_factory=lambda: settings.DEFAULT_WORKERS, ge=1)
    output: OutputConfig = OutputConfig()

    def describe(self) -> str:
        label = self.output.label or f"{self.decoder.kind.value.upper()}-L{self.decoder.list_size}"
        return f"{label} ({self.code.construction.value} N={self.code.n} K={self.code.k})"


class BlerPoint(BaseModel):
    snr_db: float
    frames: int = Field(ge=0)
    block_errors: int = Field(ge=0)
    bler: float = Field(ge=0.0, le=1.0)
    wall_time: float = 0.0

    @model_validator(mode="after")
    def check_counts(self):
        if self.block_errors > self.frames:
            raise ValueError("block_errors cannot exceed frames")
        return self
