from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict

from densefit.application.dtos.annotation_dto import ParamsDTO
from densefit.domain.entities.experiment import ResultRow, SceneOutcome
from densefit.domain.entities.fitting import FitResult
from densefit.domain.entities.objectives import LossBreakdown, MetricReport


class MetricReportDTO(BaseModel):
    """DTO for per-fit metrics"""

    pve: float
    mpjpe: float
    pve_t: float
    dkd: float

    @classmethod
    def from_entity(cls, report: MetricReport) -> "MetricReportDTO":
        return cls(**report.as_dict())

    def to_entity(self) -> MetricReport:
        return MetricReport(**self.model_dump())


class LossBreakdownDTO(BaseModel):
    l3d_joints: float
    l_smpl: float
    l2d: float
    l_dense: float
    total: float

    @classmethod
    def from_entity(cls, breakdown: LossBreakdown) -> "LossBreakdownDTO":
        return cls(**breakdown.as_dict())


class FitResultDTO(BaseModel):
    """DTO for a fit result file"""

    params: ParamsDTO
    iterations_used: int
    converged: bool
    initial_loss: float
    final_loss: float
    loss_trace: List[float]
    breakdown: Optional[LossBreakdownDTO] = None
    metrics: Optional[MetricReportDTO] = None

    @classmethod
    def from_entity(cls, result: FitResult, metrics: Optional[MetricReport] = None) -> "FitResultDTO":
        return cls(
            params=ParamsDTO.from_entity(result.params),
            iterations_used=result.iterations_used,
            converged=result.converged,
            initial_loss=result.loss_trace[0],
            final_loss=result.loss_trace[-1],
            loss_trace=list(result.loss_trace),
            breakdown=LossBreakdownDTO.from_entity(result.breakdown) if result.breakdown else None,
            metrics=MetricReportDTO.from_entity(metrics) if metrics else None,
        )


class SceneOutcomeDTO(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scene_id: int
    metrics: Optional[MetricReportDTO] = None
    iterations: int = 0
    converged: bool = False
    error: Optional[str] = None

    @classmethod
    def from_entity(cls, outcome: SceneOutcome) -> "SceneOutcomeDTO":
        return cls(
            scene_id=outcome.scene_id,
            metrics=MetricReportDTO.from_entity(outcome.metrics) if outcome.metrics else None,
            iterations=outcome.iterations,
            converged=outcome.converged,
            error=outcome.error,
        )

    def to_entity(self) -> SceneOutcome:
        return SceneOutcome(
            scene_id=self.scene_id,
            metrics=self.metrics.to_entity() if self.metrics else None,
            iterations=self.iterations,
            converged=self.converged,
            error=self.error,
        )


class MetricStatDTO(BaseModel):
    mean: Optional[float] = None
    std: Optional[float] = None


class ResultRowDTO(BaseModel):
    """DTO for one (mix, sweep value) row with its per-scene data"""

    model_config = ConfigDict(extra="forbid")

    mix: str
    sweep_axis: str
    sweep_value: float
    scene_count: int
    failed_count: int
    statistics: Dict[str, MetricStatDTO]
    scenes: List[SceneOutcomeDTO]

    @classmethod
    def from_entity(cls, row: ResultRow) -> "ResultRowDTO":
        return cls(
            mix=row.mix,
            sweep_axis=row.sweep_axis,
            sweep_value=row.sweep_value,
            scene_count=row.scene_count,
            failed_count=row.failed_count,
            statistics={
                name: MetricStatDTO(mean=mean, std=std) for name, (mean, std) in row.statistics().items()
            },
            scenes=[SceneOutcomeDTO.from_entity(o) for o in row.outcomes],
        )

    def to_entity(self) -> ResultRow:
        return ResultRow(
            mix=self.mix,
            sweep_axis=self.sweep_axis,
            sweep_value=self.sweep_value,
            outcomes=tuple(scene.to_entity() for scene in self.scenes),
        )


class ResultsFileDTO(BaseModel):
    """DTO for results.json"""

    model_config = ConfigDict(extra="forbid")

    version: int = 1
    rows: List[ResultRowDTO]


class ErrorDTO(BaseModel):
    """Machine-readable error payload written on failure"""

    error: str
    message: str
    field: Optional[str] = None
