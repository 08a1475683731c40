"""Pydantic request/response models for the experiment service."""

from pydantic import BaseModel, Field

from ..harness import SAMPLERS, SWEEP_AXES


class MixtureSpec(BaseModel):
    """Inline mixture in the same shape as the mixture JSON file format."""

    dim: int = Field(ge=1)
    weights: list[float]
    means: list[list[float]]
    covariances: list[list[list[float]]]


class ExampleInfo(BaseModel):
    id: int
    dim: int
    components: int
    weights: list[float]
    precond_sigma: float
    notes: str


class SampleRequest(BaseModel):
    out_dir: str
    sampler: str = "follmer_closed"
    example: int | None = None
    mixture: MixtureSpec | None = None
    dim: int | None = Field(default=None, ge=1)
    n: int = Field(default=10_000, ge=1)
    seed: int = 0
    k: int = Field(default=100, ge=1)
    m: int = Field(default=0, ge=0)
    eps: float = Field(default=1e-3, gt=0.0, lt=0.5)
    grid: str = "uniform"
    chains: int = Field(default=50, ge=1)
    burn_in: int = Field(default=10_000, ge=0)
    step: float = Field(default=0.2, gt=0.0)
    precond_sigma: float | None = Field(default=None, gt=0.0)
    traj: int = Field(default=0, ge=0)

    def check_sampler(self) -> None:
        if self.sampler not in SAMPLERS:
            raise ValueError(f"unknown sampler {self.sampler!r}; choose from {SAMPLERS}")


class RunSummary(BaseModel):
    report: dict
    files: dict[str, str]


class SweepRequest(BaseModel):
    base: SampleRequest
    axis: str
    values: list[float] = Field(min_length=1)

    def check_axis(self) -> None:
        if self.axis not in SWEEP_AXES:
            raise ValueError(f"axis must be one of {SWEEP_AXES}")


class SweepSummary(BaseModel):
    rows: list[dict]
    csv_path: str
    status: str
