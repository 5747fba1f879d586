from __future__ import annotations

import math
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, model_validator


Branch = Literal["boundary_beta", "interior_beta"]
Command = Literal["sweep", "optimize", "verify", "kink"]
OutputFormat = Literal["csv", "svg"]


class SchemeConfig(BaseModel):
    """One cbit-assisted scheme: noise alpha, cap angle beta, recoveries k (north) and k' (south)."""
    model_config = {"frozen": True}

    alpha: float = Field(ge=0.0, le=1.0)
    beta: float = Field(ge=0.0, le=math.pi)
    k: float = Field(ge=0.0, le=1.0)
    k_prime: float = Field(ge=0.0, le=1.0)


class OptimizationResult(BaseModel):
    alpha: float
    beta_opt: float
    k_opt: float
    k_prime_opt: float
    f_bar: float
    branch: Branch
    # every cap angle gives the same fidelity, so beta_opt is only the tie-break
    degenerate: bool = False


class SweepRow(BaseModel):
    alpha: float
    beta_opt: float
    k_opt: float
    k_prime_opt: float
    f_bar: float
    f_noop: float
    f_classical: float
    degenerate: bool = False


class KinkReport(BaseModel):
    alpha_kink: float
    beta_jump_to: float
    bracket_low: float
    bracket_high: float

    @property
    def bracket_width(self) -> float:
        return self.bracket_high - self.bracket_low


class CheckResult(BaseModel):
    name: str
    passed: bool
    discrepancy: float
    tolerance: float
    detail: str = ""


class VerifyReport(BaseModel):
    seed: int
    mc_samples: int
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def first_failure(self) -> Optional[CheckResult]:
        return next((c for c in self.checks if not c.passed), None)


class RunConfig(BaseModel):
    """Validated CLI configuration for one subcommand."""
    command: Command
    alpha: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    alpha_min: float = Field(default=0.0, ge=0.0, le=1.0)
    alpha_max: float = Field(default=1.0, ge=0.0, le=1.0)
    steps: int = Field(default=101, ge=2, le=1_000_001)
    beta_grid_size: int = Field(default=2001, ge=3, le=1_000_001)
    mc_samples: int = Field(default=0, ge=0, le=100_000_000)
    seed: Optional[int] = Field(default=None, ge=0, le=2**64 - 1)
    output_path: Optional[Path] = None
    format: OutputFormat = "csv"
    workers: int = Field(default=1, ge=1, le=256)
    inject_broken_channel: bool = False
    show_progress: bool = True

    @model_validator(mode="after")
    def _check_consistency(self) -> "RunConfig":
        if self.command == "optimize" and self.alpha is None:
            raise ValueError("optimize requires --alpha")
        if self.command in ("sweep", "kink") and not self.alpha_min < self.alpha_max:
            raise ValueError("alpha_min must be smaller than alpha_max")
        if self.command == "verify" and self.mc_samples > 0 and self.mc_samples < 1000:
            raise ValueError("mc_samples must be at least 1000")
        if self.mc_samples > 0 and self.seed is None:
            raise ValueError("a seed is required whenever mc_samples > 0")
        if self.command == "sweep" and self.output_path is None:
            raise ValueError("sweep requires --output")
        return self
